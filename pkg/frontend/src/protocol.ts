/**
 * Wire frames for the demo protocol: newline-framed JSON over a persistent
 * bidirectional stream (one frame per WebSocket message).
 */

export interface TargetDoc {
  id: string;
  kind: "track" | "nav_left" | "nav_right" | "play_pause";
  x: number;
  y: number;
  w: number;
  h: number;
  dwell_threshold_ms: number;
  enabled: boolean;
  track_index?: number;
  title?: string;
}

export interface LayoutFrame {
  type: "layout";
  band: "small" | "medium" | "large";
  page: number; // 1-based
  page_count: number;
  targets: TargetDoc[];
}

export interface DwellFrame {
  type: "dwell";
  kind: "started" | "progress" | "cancelled" | "activated";
  target: string;
  fraction: number;
  t_ms: number;
}

export interface AdaptationFrame {
  type: "adaptation";
  from: string;
  to: string;
  t_ms: number;
}

export interface PlayerFrame {
  type: "player";
  playing: string | null;
  track_index: number | null;
  paused: boolean;
}

export interface EsmPromptFrame {
  type: "esm_prompt";
  t_ms: number;
}

export interface ErrorFrame {
  type: "error";
  msg: string;
}

export type ServerFrame =
  | LayoutFrame
  | DwellFrame
  | AdaptationFrame
  | PlayerFrame
  | EsmPromptFrame
  | ErrorFrame;

export interface HelloFrame {
  type: "hello";
  interface: string;
  initial_distance_cm: number;
}

export interface GazeFrame {
  type: "gaze";
  t_ms: number;
  x: number;
  y: number;
}

export interface DistanceFrame {
  type: "distance";
  t_ms: number;
  cm: number;
}

export interface EsmAnswerFrame {
  type: "esm_answer";
  t_ms: number;
  answers: Record<string, string | number | boolean>;
}

export interface ResetFrame {
  type: "reset";
}

export type ClientFrame =
  | HelloFrame
  | GazeFrame
  | DistanceFrame
  | EsmAnswerFrame
  | ResetFrame;

const SERVER_FRAME_TYPES = new Set([
  "layout",
  "dwell",
  "adaptation",
  "player",
  "esm_prompt",
  "error",
]);

/** Parse one message; unknown or malformed input becomes an error frame. */
export function parseServerFrame(raw: string): ServerFrame {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    return { type: "error", msg: `unparseable frame: ${raw.slice(0, 80)}` };
  }
  const frame = doc as { type?: string };
  if (!frame || typeof frame.type !== "string" || !SERVER_FRAME_TYPES.has(frame.type)) {
    return { type: "error", msg: `unknown frame type: ${String(frame?.type)}` };
  }
  return doc as ServerFrame;
}

export function encodeClientFrame(frame: ClientFrame): string {
  return JSON.stringify(frame);
}
