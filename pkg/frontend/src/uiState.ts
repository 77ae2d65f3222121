/**
 * Pure state reducer over server frames. All interaction logic lives on the
 * server; this module only accumulates what to draw, so a headless protocol
 * client reproduces any demo scenario without the UI.
 */

import type { LayoutFrame, ServerFrame } from "./protocol.js";

export interface DwellOverlay {
  target: string;
  kind: "started" | "progress" | "activated";
  fraction: number;
}

export interface ConsoleLine {
  text: string;
  t_ms: number | null;
}

export interface UiState {
  connected: boolean;
  layout: LayoutFrame | null;
  /** Bumped on every layout frame whose band differs from the previous one. */
  sizeChanges: number;
  dwell: DwellOverlay | null;
  /** Target id flashed by the most recent activation. */
  activationFlash: string | null;
  playing: string | null;
  paused: boolean;
  esmOpen: boolean;
  esmPromptT: number | null;
  console: ConsoleLine[];
  lastError: string | null;
}

export function initialState(): UiState {
  return {
    connected: false,
    layout: null,
    sizeChanges: 0,
    dwell: null,
    activationFlash: null,
    playing: null,
    paused: false,
    esmOpen: false,
    esmPromptT: null,
    console: [],
    lastError: null,
  };
}

const CONSOLE_LIMIT = 200;

function log(state: UiState, text: string, t_ms: number | null = null): void {
  state.console.push({ text, t_ms });
  if (state.console.length > CONSOLE_LIMIT) {
    state.console.splice(0, state.console.length - CONSOLE_LIMIT);
  }
}

export function applyFrame(state: UiState, frame: ServerFrame): UiState {
  const next: UiState = { ...state, console: [...state.console] };
  switch (frame.type) {
    case "layout": {
      if (next.layout !== null && next.layout.band !== frame.band) {
        next.sizeChanges += 1;
        log(next, `layout resized to ${frame.band}`);
      }
      next.layout = frame;
      next.dwell = null; // rects moved; stale overlay would mislead
      break;
    }
    case "dwell": {
      if (frame.kind === "cancelled") {
        next.dwell = null;
      } else if (frame.kind === "activated") {
        next.dwell = null;
        next.activationFlash = frame.target;
        log(next, `activated ${frame.target}`, frame.t_ms);
      } else {
        next.dwell = { target: frame.target, kind: frame.kind, fraction: frame.fraction };
      }
      break;
    }
    case "adaptation": {
      log(next, `adaptation ${frame.from} -> ${frame.to}`, frame.t_ms);
      break;
    }
    case "player": {
      next.playing = frame.playing;
      next.paused = frame.paused;
      log(next, frame.playing ? `playing ${frame.playing}` : "paused");
      break;
    }
    case "esm_prompt": {
      next.esmOpen = true;
      next.esmPromptT = frame.t_ms;
      log(next, "experience prompt", frame.t_ms);
      break;
    }
    case "error": {
      next.lastError = frame.msg;
      log(next, `error: ${frame.msg}`);
      break;
    }
  }
  return next;
}

export function connectionChanged(state: UiState, connected: boolean): UiState {
  const next = { ...state, connected, console: [...state.console] };
  if (!connected) {
    // Banner plus cleared interaction state; a reconnect starts fresh.
    next.layout = null;
    next.dwell = null;
    next.activationFlash = null;
    next.esmOpen = false;
  }
  log(next, connected ? "connected" : "disconnected");
  return next;
}

export function clearActivationFlash(state: UiState): UiState {
  if (state.activationFlash === null) return state;
  return { ...state, activationFlash: null };
}

export function closeEsm(state: UiState): UiState {
  return { ...state, esmOpen: false };
}
