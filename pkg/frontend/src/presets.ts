/**
 * Posture presets: each sets the slider and can play back a scripted drift
 * so the adaptive behaviour can be explored hands-off. The drift is a seeded
 * mean-reverting walk, a browser-side stand-in for recorded distance traces.
 */

export interface PosturePreset {
  name: string;
  label: string;
  medianCm: number;
  /** per-tick pull toward the median */
  reversion: number;
  /** per-tick step size, cm */
  volatility: number;
}

export const POSTURE_PRESETS: PosturePreset[] = [
  { name: "walking", label: "Walking", medianCm: 35, reversion: 0.004, volatility: 0.53 },
  { name: "standing", label: "Standing", medianCm: 34, reversion: 0.002, volatility: 0.28 },
  { name: "slouching", label: "Slouching", medianCm: 31, reversion: 0.0025, volatility: 0.31 },
  { name: "sitting_handsfree", label: "Sitting (hands-free)", medianCm: 41, reversion: 0.002, volatility: 0.37 },
  { name: "sitting_desk", label: "Sitting (desk)", medianCm: 33, reversion: 0.0018, volatility: 0.27 },
  { name: "sitting_chair", label: "Sitting (chair)", medianCm: 33, reversion: 0.002, volatility: 0.33 },
];

/** Deterministic uniform generator (Park-Miller), good enough for a demo. */
export function lcg(seed: number): () => number {
  let state = (seed % 2147483647) || 1;
  return () => {
    state = (state * 16807) % 2147483647;
    return state / 2147483646;
  };
}

export class DriftPlayback {
  private readonly preset: PosturePreset;
  private readonly uniform: () => number;
  private current: number;

  constructor(preset: PosturePreset, seed = 1) {
    this.preset = preset;
    this.uniform = lcg(seed);
    this.current = preset.medianCm;
  }

  /** Next distance sample, clamped to the slider's 20-50 cm range. */
  next(): number {
    const gaussish = (this.uniform() + this.uniform() + this.uniform()) * 2 - 3;
    this.current +=
      this.preset.reversion * (this.preset.medianCm - this.current) +
      this.preset.volatility * gaussish;
    this.current = Math.min(50, Math.max(20, this.current));
    return this.current;
  }
}
