/**
 * Browser bootstrap: canvas renderer plus DOM wiring. The cursor is the gaze
 * proxy (streamed at ~30 Hz), the slider is the distance sensor (echoed
 * whenever it changes), and every behaviour on screen is a server frame.
 */

import { GauiClient, browserSocketFactory } from "./client.js";
import { ESM_ITEMS, EsmAnswers, defaultAnswers, skippedAnswers } from "./esm.js";
import { DriftPlayback, POSTURE_PRESETS } from "./presets.js";
import type { TargetDoc } from "./protocol.js";
import { CanvasTransform, toCanvasRect, toDevicePoint, transformFor } from "./transform.js";
import {
  UiState,
  applyFrame,
  clearActivationFlash,
  closeEsm,
  connectionChanged,
  initialState,
} from "./uiState.js";

const DEVICE_WIDTH_PX = 1290;
const DEVICE_HEIGHT_PX = 2796;
const TICK_MS = 1000 / 30;

const BAND_FILL: Record<string, string> = {
  small: "#20324a",
  medium: "#2a4162",
  large: "#35507a",
};

class DemoApp {
  private state: UiState = initialState();
  private client: GauiClient;
  private transform: CanvasTransform;
  private canvas: HTMLCanvasElement;
  private ctx: CanvasRenderingContext2D;
  private cursor: { x: number; y: number } | null = null;
  private sessionStart = 0;
  private lastSentDistance: number | null = null;
  private drift: DriftPlayback | null = null;
  private ticker: number | null = null;

  constructor() {
    this.canvas = document.getElementById("screen") as HTMLCanvasElement;
    this.ctx = this.canvas.getContext("2d")!;
    this.transform = transformFor(DEVICE_WIDTH_PX, this.canvas.width);
    const proto = location.protocol === "https:" ? "wss" : "ws";
    this.client = new GauiClient(`${proto}://${location.host}/ws`, browserSocketFactory);
    this.client.onFrame = (frame) => {
      this.state = applyFrame(this.state, frame);
      if (frame.type === "esm_prompt") this.showEsmModal();
      this.refreshPanel();
    };
    this.client.onOpen = () => {
      this.state = connectionChanged(this.state, true);
      this.sessionStart = performance.now();
      this.lastSentDistance = null;
      this.client.hello(this.interfaceSelect().value, this.slider().valueAsNumber);
      this.refreshPanel();
    };
    this.client.onClose = () => {
      this.state = connectionChanged(this.state, false);
      this.stopTicker();
      this.refreshPanel();
    };
    this.wireDom();
    this.render();
  }

  private slider(): HTMLInputElement {
    return document.getElementById("distance") as HTMLInputElement;
  }

  private interfaceSelect(): HTMLSelectElement {
    return document.getElementById("interface") as HTMLSelectElement;
  }

  private now(): number {
    return Math.round(performance.now() - this.sessionStart);
  }

  private wireDom(): void {
    document.getElementById("connect")!.addEventListener("click", () => this.connect());
    this.canvas.addEventListener("mousemove", (event) => {
      const bounds = this.canvas.getBoundingClientRect();
      this.cursor = {
        x: (event.clientX - bounds.left) * (this.canvas.width / bounds.width),
        y: (event.clientY - bounds.top) * (this.canvas.height / bounds.height),
      };
    });
    this.canvas.addEventListener("mouseleave", () => {
      this.cursor = null;
    });
    this.slider().addEventListener("input", () => {
      document.getElementById("distance-value")!.textContent =
        `${this.slider().valueAsNumber.toFixed(0)} cm`;
    });
    const presets = document.getElementById("posture") as HTMLSelectElement;
    for (const preset of POSTURE_PRESETS) {
      const option = document.createElement("option");
      option.value = preset.name;
      option.textContent = preset.label;
      presets.appendChild(option);
    }
    presets.addEventListener("change", () => {
      const preset = POSTURE_PRESETS.find((p) => p.name === presets.value);
      if (!preset) {
        this.drift = null;
        return;
      }
      this.slider().value = String(preset.medianCm);
      this.drift = (document.getElementById("drift") as HTMLInputElement).checked
        ? new DriftPlayback(preset)
        : null;
    });
    document.getElementById("drift")!.addEventListener("change", (event) => {
      const enabled = (event.target as HTMLInputElement).checked;
      const preset = POSTURE_PRESETS.find((p) => p.name === presets.value);
      this.drift = enabled && preset ? new DriftPlayback(preset) : null;
    });
    document.getElementById("reset")!.addEventListener("click", () => {
      this.client.reset();
    });
  }

  private connect(): void {
    if (this.client.connected) this.client.close();
    this.client.connect();
    this.startTicker();
  }

  private startTicker(): void {
    this.stopTicker();
    this.ticker = window.setInterval(() => this.tick(), TICK_MS);
  }

  private stopTicker(): void {
    if (this.ticker !== null) {
      window.clearInterval(this.ticker);
      this.ticker = null;
    }
  }

  /** One 30 Hz beat: gaze from the cursor, distance echo when it moved. */
  private tick(): void {
    if (!this.client.connected) return;
    const t = this.now();
    if (this.drift !== null) {
      this.slider().value = this.drift.next().toFixed(1);
      document.getElementById("distance-value")!.textContent =
        `${this.slider().valueAsNumber.toFixed(0)} cm`;
    }
    const cm = this.slider().valueAsNumber;
    if (cm !== this.lastSentDistance) {
      this.client.distance(t, cm);
      this.lastSentDistance = cm;
    }
    if (this.cursor !== null) {
      const device = toDevicePoint(this.cursor.x, this.cursor.y, this.transform);
      this.client.gaze(t, device.x, device.y);
    }
  }

  // -- rendering ------------------------------------------------------------

  private render(): void {
    const ctx = this.ctx;
    const layout = this.state.layout;
    ctx.fillStyle = "#10141d";
    ctx.fillRect(0, 0, this.canvas.width, this.canvas.height);
    if (layout !== null) {
      ctx.fillStyle = BAND_FILL[layout.band] ?? "#20324a";
      ctx.fillRect(0, 0, this.canvas.width, (DEVICE_HEIGHT_PX * this.transform.scale));
      for (const target of layout.targets) {
        this.drawTarget(target);
      }
      ctx.fillStyle = "#9fb4d8";
      ctx.font = "13px system-ui";
      ctx.fillText(`page ${layout.page}/${layout.page_count}  ·  ${layout.band}`, 10, 16);
    } else {
      ctx.fillStyle = "#9fb4d8";
      ctx.font = "15px system-ui";
      ctx.fillText(this.state.connected ? "waiting for layout" : "not connected", 10, 24);
    }
    requestAnimationFrame(() => this.render());
  }

  private drawTarget(target: TargetDoc): void {
    const ctx = this.ctx;
    const rect = toCanvasRect(target, this.transform);
    const dwelled = this.state.dwell?.target === target.id;
    const flashed = this.state.activationFlash === target.id;
    ctx.fillStyle = flashed
      ? "#e7c84b"
      : target.kind === "track"
        ? "#1b2840"
        : target.enabled
          ? "#26344e"
          : "#161d2b";
    ctx.fillRect(rect.x, rect.y, rect.w, rect.h);
    ctx.strokeStyle = dwelled ? "#ffffff" : "#3b4a66";
    ctx.lineWidth = dwelled ? 2.5 : 1;
    ctx.strokeRect(rect.x + 1, rect.y + 1, rect.w - 2, rect.h - 2);
    ctx.fillStyle = target.enabled === false ? "#55617a" : "#dce6f5";
    ctx.font = `${Math.max(12, rect.h * 0.28)}px system-ui`;
    ctx.textBaseline = "middle";
    const label =
      target.kind === "track"
        ? (target.title ?? target.id)
        : target.kind === "nav_left"
          ? "◀"
          : target.kind === "nav_right"
            ? "▶"
            : this.state.paused || this.state.playing === null
              ? "▶ / ⏸"
              : "⏸";
    ctx.fillText(label, rect.x + rect.w * 0.06, rect.y + rect.h / 2, rect.w * 0.88);
    if (dwelled && this.state.dwell) {
      // progress ring while the dwell charges
      const cx = rect.x + rect.w - 18;
      const cy = rect.y + 16;
      ctx.beginPath();
      ctx.strokeStyle = "#e7c84b";
      ctx.lineWidth = 3;
      ctx.arc(cx, cy, 9, -Math.PI / 2, -Math.PI / 2 + 2 * Math.PI * this.state.dwell.fraction);
      ctx.stroke();
    }
  }

  // -- panel / modal ----------------------------------------------------------

  private refreshPanel(): void {
    document.getElementById("banner")!.classList.toggle("hidden", this.state.connected);
    document.getElementById("now-playing")!.textContent = this.state.playing
      ? `♪ ${this.state.playing}`
      : this.state.paused
        ? "paused"
        : "idle";
    const consoleEl = document.getElementById("console")!;
    consoleEl.textContent = this.state.console
      .slice(-14)
      .map((line) => (line.t_ms === null ? line.text : `[${(line.t_ms / 1000).toFixed(1)}s] ${line.text}`))
      .join("\n");
    consoleEl.scrollTop = consoleEl.scrollHeight;
    if (this.state.activationFlash !== null) {
      window.setTimeout(() => {
        this.state = clearActivationFlash(this.state);
      }, 350);
    }
  }

  private showEsmModal(): void {
    const modal = document.getElementById("esm-modal")!;
    const form = document.getElementById("esm-form")!;
    form.innerHTML = "";
    const answers: EsmAnswers = defaultAnswers();
    for (const item of ESM_ITEMS) {
      const block = document.createElement("fieldset");
      const legend = document.createElement("legend");
      legend.textContent = item.prompt;
      block.appendChild(legend);
      if (item.kind === "scale") {
        const row = document.createElement("div");
        row.className = "scale-row";
        for (let value = 1; value <= 5; value++) {
          const label = document.createElement("label");
          const radio = document.createElement("input");
          radio.type = "radio";
          radio.name = item.key;
          radio.value = String(value);
          radio.checked = value === 3;
          radio.addEventListener("change", () => (answers[item.key] = value));
          label.append(radio, String(value));
          row.appendChild(label);
        }
        const hint = document.createElement("span");
        hint.className = "scale-hint";
        hint.textContent = `1 = ${item.scaleMin}, 5 = ${item.scaleMax}`;
        block.append(row, hint);
      } else {
        for (const choice of item.choices!) {
          const label = document.createElement("label");
          const radio = document.createElement("input");
          radio.type = "radio";
          radio.name = item.key;
          radio.value = choice.value;
          radio.checked = choice === item.choices![0];
          radio.addEventListener("change", () => (answers[item.key] = choice.value));
          label.append(radio, choice.label);
          block.appendChild(label);
        }
      }
      form.appendChild(block);
    }
    const submit = document.getElementById("esm-submit")!;
    const dismiss = document.getElementById("esm-dismiss")!;
    const finish = (payload: EsmAnswers) => {
      this.client.esmAnswer(this.now(), payload);
      this.state = closeEsm(this.state);
      modal.classList.add("hidden");
    };
    submit.onclick = () => finish(answers);
    dismiss.onclick = () => finish(skippedAnswers());
    modal.classList.remove("hidden");
  }
}

window.addEventListener("DOMContentLoaded", () => new DemoApp());
