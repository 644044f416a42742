/** Canvas <-> continuous-index coordinate mapping for one axial view.
 *
 * Index coordinates put voxel centers at integers, so voxel (i, j)
 * covers the canvas square [i*sx, (i+1)*sx) x [j*sy, (j+1)*sy) and its
 * center sits at ((i + 0.5) * sx, (j + 0.5) * sy).
 */

export interface Point {
  x: number;
  y: number;
}

export interface CanvasMapping {
  /** canvas pixels per index step along x */
  sx: number;
  /** canvas pixels per index step along y */
  sy: number;
}

export function makeMapping(
  canvasWidth: number,
  canvasHeight: number,
  nx: number,
  ny: number
): CanvasMapping {
  if (canvasWidth <= 0 || canvasHeight <= 0 || nx <= 0 || ny <= 0) {
    throw new Error("mapping needs positive canvas and grid sizes");
  }
  return { sx: canvasWidth / nx, sy: canvasHeight / ny };
}

export function canvasToIndex(m: CanvasMapping, p: Point): Point {
  return { x: p.x / m.sx - 0.5, y: p.y / m.sy - 0.5 };
}

export function indexToCanvas(m: CanvasMapping, p: Point): Point {
  return { x: (p.x + 0.5) * m.sx, y: (p.y + 0.5) * m.sy };
}

export function dist(a: Point, b: Point): number {
  return Math.hypot(a.x - b.x, a.y - b.y);
}

/** Distance from p to the closed segment ab. */
export function segmentDist(p: Point, a: Point, b: Point): number {
  const vx = b.x - a.x;
  const vy = b.y - a.y;
  const lenSq = vx * vx + vy * vy;
  if (lenSq === 0) return dist(p, a);
  let t = ((p.x - a.x) * vx + (p.y - a.y) * vy) / lenSq;
  t = Math.min(1, Math.max(0, t));
  return Math.hypot(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}
