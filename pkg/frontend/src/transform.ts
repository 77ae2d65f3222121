/**
 * Canvas mapping: one device pixel of the configured display profile maps to
 * a fixed on-screen factor, so geometric ratios survive even though the
 * monitor's physical size is arbitrary.
 */

export interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface CanvasTransform {
  scale: number;
}

export function transformFor(deviceWidthPx: number, canvasWidthPx: number): CanvasTransform {
  if (deviceWidthPx <= 0 || canvasWidthPx <= 0) {
    throw new Error(`degenerate transform: ${deviceWidthPx} -> ${canvasWidthPx}`);
  }
  return { scale: canvasWidthPx / deviceWidthPx };
}

export function toCanvasRect(rect: Rect, t: CanvasTransform): Rect {
  return {
    x: rect.x * t.scale,
    y: rect.y * t.scale,
    w: rect.w * t.scale,
    h: rect.h * t.scale,
  };
}

/** Cursor position on the canvas back to device-pixel gaze coordinates. */
export function toDevicePoint(xCanvas: number, yCanvas: number, t: CanvasTransform): { x: number; y: number } {
  return { x: xCanvas / t.scale, y: yCanvas / t.scale };
}

/** Round-trip error of a rect through the canvas mapping, in device px. */
export function roundTripError(rect: Rect, t: CanvasTransform): number {
  const there = toCanvasRect(rect, t);
  const back: Rect = {
    x: there.x / t.scale,
    y: there.y / t.scale,
    w: there.w / t.scale,
    h: there.h / t.scale,
  };
  return Math.max(
    Math.abs(back.x - rect.x),
    Math.abs(back.y - rect.y),
    Math.abs(back.w - rect.w),
    Math.abs(back.h - rect.h),
  );
}
