/** User-adjustable interaction settings, distances in canvas pixels. */
export interface UiConfig {
  /** minimum drag distance before another contour point is recorded */
  addPointPx: number;
  /** release this close to the first point to close the contour */
  closePx: number;
  /** click tolerance for selecting a vertex or hitting a contour */
  vertexHitPx: number;
  /** interior tint for committed contours */
  fillStyle: string;
}

export const DEFAULT_CONFIG: UiConfig = {
  addPointPx: 5,
  closePx: 10,
  vertexHitPx: 6,
  fillStyle: "rgba(255, 96, 96, 0.35)",
};
