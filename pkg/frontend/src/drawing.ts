/** Contour drawing state machine for the axial view.
 *
 * One stroke at a time: press starts a contour, dragging records a
 * point whenever the cursor gets far enough from the previous one, and
 * releasing near the first point closes it. Committed contours can
 * have single vertices corrected, or be removed wholesale while in
 * delete-slice mode.
 */

import { DEFAULT_CONFIG, UiConfig } from "./config.js";
import { CanvasMapping, Point, canvasToIndex, dist, segmentDist } from "./geometry.js";

export type Mode = "idle" | "drawing" | "editing" | "deleting_slice";

export type ReleaseOutcome = "committed" | "open" | "discarded";

export type EditOutcome = "selected" | "moved" | "miss";

export interface CommittedContour {
  sliceK: number;
  canvasPoints: Point[];
  indexPoints: Point[];
}

export interface VertexRef {
  contour: CommittedContour;
  vertex: number;
}

export class DrawingBoard {
  mode: Mode = "idle";
  slice = 0;
  activePoints: Point[] = [];
  committed: CommittedContour[] = [];
  selectedVertex: VertexRef | null = null;

  constructor(
    public mapping: CanvasMapping,
    public config: UiConfig = { ...DEFAULT_CONFIG }
  ) {}

  /** Press in draw mode: start a stroke, or keep extending an open one. */
  beginStroke(p: Point): void {
    if (this.mode === "drawing") {
      this.extendStroke(p);
      return;
    }
    if (this.mode !== "idle") return;
    this.mode = "drawing";
    this.activePoints = [{ ...p }];
  }

  /** Record the cursor if it moved at least addPointPx since the last point. */
  extendStroke(p: Point): boolean {
    if (this.mode !== "drawing" || this.activePoints.length === 0) return false;
    const last = this.activePoints[this.activePoints.length - 1];
    if (dist(p, last) < this.config.addPointPx) return false;
    this.activePoints.push({ ...p });
    return true;
  }

  /** Release: close when near the first point, otherwise leave the stroke open. */
  endStroke(p: Point): ReleaseOutcome {
    if (this.mode !== "drawing" || this.activePoints.length === 0) return "open";
    if (dist(p, this.activePoints[0]) > this.config.closePx) return "open";
    if (this.activePoints.length < 3) {
      this.cancelStroke();
      return "discarded";
    }
    const canvasPoints = this.activePoints.map((q) => ({ ...q }));
    this.committed.push({
      sliceK: this.slice,
      canvasPoints,
      indexPoints: canvasPoints.map((q) => canvasToIndex(this.mapping, q)),
    });
    this.activePoints = [];
    this.mode = "idle";
    return "committed";
  }

  cancelStroke(): void {
    this.activePoints = [];
    if (this.mode === "drawing") this.mode = "idle";
  }

  /** First click selects a vertex within vertexHitPx; the next click moves it. */
  editClick(p: Point): EditOutcome {
    if (this.selectedVertex !== null) {
      const { contour, vertex } = this.selectedVertex;
      contour.canvasPoints[vertex] = { ...p };
      contour.indexPoints[vertex] = canvasToIndex(this.mapping, p);
      this.selectedVertex = null;
      return "moved";
    }
    const hit = this.hitVertex(p);
    if (hit === null) return "miss";
    this.selectedVertex = hit;
    return "selected";
  }

  hitVertex(p: Point): VertexRef | null {
    for (const contour of this.contoursOnSlice()) {
      for (let v = 0; v < contour.canvasPoints.length; v++) {
        if (dist(p, contour.canvasPoints[v]) <= this.config.vertexHitPx) {
          return { contour, vertex: v };
        }
      }
    }
    return null;
  }

  /** Remove the contour under the click (near a vertex or an edge); others stay. */
  deleteAt(p: Point): boolean {
    const target = this.contoursOnSlice().find((c) => this.nearContour(p, c));
    if (!target) return false;
    this.committed = this.committed.filter((c) => c !== target);
    return true;
  }

  nearContour(p: Point, c: CommittedContour): boolean {
    const pts = c.canvasPoints;
    for (let i = 0; i < pts.length; i++) {
      const a = pts[i];
      const b = pts[(i + 1) % pts.length];
      if (segmentDist(p, a, b) <= this.config.vertexHitPx) return true;
    }
    return false;
  }

  setMode(mode: Mode): void {
    if (mode === this.mode) return;
    this.cancelStroke();
    this.selectedVertex = null;
    this.mode = mode;
  }

  /** Changing slice abandons any open stroke and pending selection. */
  setSlice(k: number): void {
    if (k === this.slice) return;
    this.cancelStroke();
    this.selectedVertex = null;
    this.slice = k;
  }

  contoursOnSlice(k: number = this.slice): CommittedContour[] {
    return this.committed.filter((c) => c.sliceK === k);
  }

  clearAll(): void {
    this.committed = [];
    this.cancelStroke();
    this.selectedVertex = null;
  }
}
