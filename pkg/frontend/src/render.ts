/** Slice and overlay painting. The intensity helpers are pure so they
 * can be tested headless; the paint functions expect a 2D context.
 */

import { UiConfig } from "./config.js";
import { DrawingBoard } from "./drawing.js";
import { NrrdVolume, sliceView } from "./nrrd.js";

export interface Window {
  lo: number;
  hi: number;
}

/** Fixed window over the whole volume: data min to data max. */
export function intensityRange(data: ArrayLike<number>): Window {
  let lo = Infinity;
  let hi = -Infinity;
  for (let i = 0; i < data.length; i++) {
    const v = data[i];
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo)) return { lo: 0, hi: 1 };
  if (lo === hi) hi = lo + 1;
  return { lo, hi };
}

/** Grayscale RGBA pixels for one slice, windowed to [lo, hi]. */
export function sliceToRgba(
  slice: ArrayLike<number>,
  win: Window
): Uint8ClampedArray<ArrayBuffer> {
  const out = new Uint8ClampedArray(4 * slice.length);
  const scale = 255 / (win.hi - win.lo);
  for (let i = 0; i < slice.length; i++) {
    const g = (slice[i] - win.lo) * scale;
    out[4 * i] = g;
    out[4 * i + 1] = g;
    out[4 * i + 2] = g;
    out[4 * i + 3] = 255;
  }
  return out;
}

export function paintSlice(
  ctx: CanvasRenderingContext2D,
  volume: NrrdVolume,
  k: number,
  win: Window
): void {
  const [nx, ny] = volume.sizes;
  const image = new ImageData(sliceToRgba(sliceView(volume, k), win), nx, ny);
  const cell = ctx.canvas.ownerDocument.createElement("canvas");
  cell.width = nx;
  cell.height = ny;
  cell.getContext("2d")!.putImageData(image, 0, 0);
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  ctx.drawImage(cell, 0, 0, ctx.canvas.width, ctx.canvas.height);
}

function tracePath(ctx: CanvasRenderingContext2D, points: { x: number; y: number }[]): void {
  ctx.beginPath();
  ctx.moveTo(points[0].x, points[0].y);
  for (let i = 1; i < points.length; i++) ctx.lineTo(points[i].x, points[i].y);
}

/** Committed contours tinted and stroked, then the active polyline. */
export function paintOverlay(
  ctx: CanvasRenderingContext2D,
  board: DrawingBoard,
  config: UiConfig
): void {
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  for (const contour of board.contoursOnSlice()) {
    tracePath(ctx, contour.canvasPoints);
    ctx.closePath();
    ctx.fillStyle = config.fillStyle;
    ctx.fill();
    ctx.strokeStyle = "rgba(220, 40, 40, 0.9)";
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }
  if (board.selectedVertex) {
    const p = board.selectedVertex.contour.canvasPoints[board.selectedVertex.vertex];
    ctx.beginPath();
    ctx.arc(p.x, p.y, config.vertexHitPx, 0, 2 * Math.PI);
    ctx.strokeStyle = "rgba(40, 120, 255, 0.9)";
    ctx.stroke();
  }
  if (board.activePoints.length > 0) {
    tracePath(ctx, board.activePoints);
    ctx.strokeStyle = "rgba(255, 60, 60, 0.9)";
    ctx.lineWidth = 1.5;
    ctx.stroke();
    const first = board.activePoints[0];
    ctx.beginPath();
    ctx.arc(first.x, first.y, 3, 0, 2 * Math.PI);
    ctx.fillStyle = "rgba(255, 60, 60, 0.9)";
    ctx.fill();
  }
}
