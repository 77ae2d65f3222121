/**
 * End-to-end against a real server process: the headless client drives the
 * same code paths the browser uses, so the rendered-size-change counts come
 * from the actual ui state reducer fed by actual wire frames.
 */

import { ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import WebSocket from "ws";

import { GauiClient, SocketLike } from "../src/client.js";
import type { LayoutFrame, ServerFrame } from "../src/protocol.js";
import { roundTripError, transformFor } from "../src/transform.js";
import { applyFrame, connectionChanged, initialState, UiState } from "../src/uiState.js";

const PORT = 8750 + (process.pid % 97);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

function nodeSocketFactory(url: string): SocketLike {
  return new WebSocket(url) as unknown as SocketLike;
}

class Harness {
  client: GauiClient;
  state: UiState = initialState();
  frames: ServerFrame[] = [];
  t = 0;

  constructor() {
    this.client = new GauiClient(`ws://127.0.0.1:${PORT}/ws`, nodeSocketFactory);
    this.client.onFrame = (frame) => {
      this.frames.push(frame);
      this.state = applyFrame(this.state, frame);
    };
  }

  async connect(): Promise<void> {
    await new Promise<void>((resolve) => {
      this.client.onOpen = () => {
        this.state = connectionChanged(this.state, true);
        resolve();
      };
      this.client.connect();
    });
  }

  tick(): number {
    this.t += 33;
    return this.t;
  }

  async settle(ms = 150): Promise<void> {
    await new Promise((resolve) => setTimeout(resolve, ms));
  }

  async waitFor<T extends ServerFrame>(
    predicate: (frame: ServerFrame) => frame is T,
    timeoutMs = 5000,
  ): Promise<T> {
    const started = Date.now();
    let cursor = 0;
    while (Date.now() - started < timeoutMs) {
      while (cursor < this.frames.length) {
        const frame = this.frames[cursor++];
        if (predicate(frame)) return frame;
      }
      await this.settle(20);
    }
    throw new Error(`no matching frame within ${timeoutMs} ms`);
  }
}

beforeAll(async () => {
  server = spawn("python3", ["-m", "gaui.cli", "serve", "--port", String(PORT)], {
    stdio: "ignore",
  });
  const deadline = Date.now() + 15_000;
  while (Date.now() < deadline) {
    try {
      const response = await fetch(`${BASE}/health`);
      if (response.ok) return;
    } catch {
      /* not up yet */
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("server did not come up");
}, 20_000);

afterAll(() => {
  server?.kill();
});

describe("live protocol", () => {
  it("slider sweep 27 to 38 renders exactly two size changes; jiggle renders none", async () => {
    const h = new Harness();
    await h.connect();
    h.client.hello("adaptive", 27.0);
    await h.waitFor((f): f is LayoutFrame => f.type === "layout");
    expect(h.state.layout?.band).toBe("small");

    for (let cm = 27.0; cm <= 38.0; cm += 0.25) {
      h.client.distance(h.tick(), cm);
    }
    await h.settle(400);
    expect(h.state.sizeChanges).toBe(2);
    expect(h.state.layout?.band).toBe("large");
    h.client.close();

    // Fresh session held at ~31 cm: jiggling inside the buffer renders nothing.
    const j = new Harness();
    await j.connect();
    j.client.hello("adaptive", 30.5);
    await j.waitFor((f): f is LayoutFrame => f.type === "layout");
    expect(j.state.layout?.band).toBe("medium");
    for (let i = 0; i < 60; i++) {
      j.client.distance(j.tick(), 30.5 + ((i % 3) - 1) * 0.9);
    }
    await j.settle(400);
    expect(j.state.sizeChanges).toBe(0);
    j.client.close();
  }, 15_000);

  it("rendered rects agree with layout-frame rects within one device pixel", async () => {
    const h = new Harness();
    await h.connect();
    h.client.hello("adaptive", 32.0);
    const layout = await h.waitFor((f): f is LayoutFrame => f.type === "layout");
    const transform = transformFor(1290, 387);
    for (const target of layout.targets) {
      expect(roundTripError(target, transform)).toBeLessThan(1.0);
    }
    h.client.close();
  }, 15_000);

  it("drives an easy selection to activation and hears the reflection prompt on schedule", async () => {
    const h = new Harness();
    await h.connect();
    h.client.hello("adaptive", 32.0);
    const layout = await h.waitFor((f): f is LayoutFrame => f.type === "layout");
    const track = layout.targets.find((t) => t.kind === "track")!;
    const cx = track.x + track.w / 2;
    const cy = track.y + track.h / 2;
    for (let i = 0; i <= 31; i++) {
      h.client.gaze(h.tick(), cx, cy);
    }
    const player = await h.waitFor(
      (f): f is Extract<ServerFrame, { type: "player" }> => f.type === "player",
    );
    expect(player.playing).toBe(track.title);
    expect(h.state.playing).toBe(track.title);

    // Trigger an adaptation, then stream time forward to the prompt.
    h.client.distance(h.tick(), 38.0);
    const adaptation = await h.waitFor(
      (f): f is Extract<ServerFrame, { type: "adaptation" }> => f.type === "adaptation",
    );
    while (h.t < adaptation.t_ms + 30_000) {
      h.client.gaze(h.tick(), -1, -1);
    }
    const prompt = await h.waitFor(
      (f): f is Extract<ServerFrame, { type: "esm_prompt" }> => f.type === "esm_prompt",
    );
    expect(Math.abs(prompt.t_ms - adaptation.t_ms - 30_000)).toBeLessThanOrEqual(40);
    expect(h.state.esmOpen).toBe(true);

    h.client.esmAnswer(h.tick(), { noticed: "yes", expected: 4, skipped: false });
    await h.settle(200);
    expect(h.frames.filter((f) => f.type === "error")).toEqual([]);
    h.client.close();
  }, 20_000);

  it("malformed input produces an error frame and the session survives", async () => {
    const h = new Harness();
    await h.connect();
    h.client.hello("static-small", 27.0);
    await h.waitFor((f): f is LayoutFrame => f.type === "layout");
    (h.client as unknown as { socket: SocketLike })["socket"]?.send("garbage !!");
    await h.waitFor((f): f is Extract<ServerFrame, { type: "error" }> => f.type === "error");
    h.client.reset();
    const layout = await h.waitFor(
      (f): f is LayoutFrame => f.type === "layout" && h.frames.indexOf(f) > 0,
    );
    expect(layout.band).toBe("small");
    h.client.close();
  }, 15_000);
});
