import { describe, expect, it } from "vitest";

import { DrawingBoard } from "../src/drawing.js";
import { Point, makeMapping } from "../src/geometry.js";

const px = makeMapping(400, 400, 400, 400); // 1 canvas px per index step

function board(overrides = {}): DrawingBoard {
  const b = new DrawingBoard(px);
  Object.assign(b.config, overrides);
  return b;
}

function dragLine(b: DrawingBoard, from: Point, to: Point, stepPx = 1): void {
  const length = Math.hypot(to.x - from.x, to.y - from.y);
  const steps = Math.ceil(length / stepPx);
  for (let s = 1; s <= steps; s++) {
    const t = s / steps;
    b.extendStroke({ x: from.x + t * (to.x - from.x), y: from.y + t * (to.y - from.y) });
  }
}

/** Draw a closed square of the given side starting at (x0, y0). */
function drawSquare(b: DrawingBoard, x0: number, y0: number, side: number): string {
  b.beginStroke({ x: x0, y: y0 });
  dragLine(b, { x: x0, y: y0 }, { x: x0 + side, y: y0 });
  dragLine(b, { x: x0 + side, y: y0 }, { x: x0 + side, y: y0 + side });
  dragLine(b, { x: x0 + side, y: y0 + side }, { x: x0, y: y0 + side });
  dragLine(b, { x: x0, y: y0 + side }, { x: x0, y: y0 + 4 });
  return b.endStroke({ x: x0, y: y0 + 2 });
}

describe("point capture thresholds", () => {
  it("records about one point per 5 px of drag", () => {
    const b = board();
    b.beginStroke({ x: 0, y: 0 });
    dragLine(b, { x: 0, y: 0 }, { x: 100, y: 0 });
    // nominally 0, 5, ..., 100; sub-pixel float drift may drop one
    expect(b.activePoints.length).toBeGreaterThanOrEqual(19);
    expect(b.activePoints.length).toBeLessThanOrEqual(21);
  });

  it("ignores jitter below the threshold", () => {
    const b = board();
    b.beginStroke({ x: 50, y: 50 });
    for (const d of [1, -2, 3, -1, 2]) {
      expect(b.extendStroke({ x: 50 + d, y: 50 + d })).toBe(false);
    }
    expect(b.activePoints.length).toBe(1);
  });

  it("honors a configured threshold", () => {
    const b = board({ addPointPx: 10 });
    b.beginStroke({ x: 0, y: 0 });
    dragLine(b, { x: 0, y: 0 }, { x: 100, y: 0 });
    expect(b.activePoints.length).toBeGreaterThanOrEqual(10);
    expect(b.activePoints.length).toBeLessThanOrEqual(11);
  });
});

describe("closing a contour", () => {
  it("commits when released near the first point", () => {
    const b = board();
    expect(drawSquare(b, 50, 50, 100)).toBe("committed");
    expect(b.mode).toBe("idle");
    expect(b.activePoints).toEqual([]);
    expect(b.committed.length).toBe(1);
    expect(b.committed[0].canvasPoints.length).toBeGreaterThanOrEqual(3);
    expect(b.committed[0].sliceK).toBe(0);
  });

  it("maps committed points to continuous index coords", () => {
    const b = new DrawingBoard(makeMapping(400, 400, 20, 20));
    b.beginStroke({ x: 50, y: 50 });
    b.extendStroke({ x: 250, y: 50 });
    b.extendStroke({ x: 250, y: 250 });
    b.extendStroke({ x: 50, y: 250 });
    expect(b.endStroke({ x: 52, y: 55 })).toBe("committed");
    expect(b.committed[0].indexPoints[0]).toEqual({ x: 2, y: 2 });
    expect(b.committed[0].indexPoints[2]).toEqual({ x: 12, y: 12 });
  });

  it("stays open when released away from the start", () => {
    const b = board();
    b.beginStroke({ x: 0, y: 0 });
    dragLine(b, { x: 0, y: 0 }, { x: 60, y: 0 });
    expect(b.endStroke({ x: 60, y: 0 })).toBe("open");
    expect(b.mode).toBe("drawing");
    const kept = b.activePoints.length;
    dragLine(b, { x: 60, y: 0 }, { x: 60, y: 60 });
    dragLine(b, { x: 60, y: 60 }, { x: 0, y: 60 });
    dragLine(b, { x: 0, y: 60 }, { x: 0, y: 6 });
    expect(b.activePoints.length).toBeGreaterThan(kept);
    expect(b.endStroke({ x: 0, y: 4 })).toBe("committed");
  });

  it("respects the close threshold boundary", () => {
    const b = board();
    b.beginStroke({ x: 0, y: 0 });
    dragLine(b, { x: 0, y: 0 }, { x: 40, y: 0 });
    dragLine(b, { x: 40, y: 0 }, { x: 40, y: 40 });
    expect(b.endStroke({ x: 0, y: 10.5 })).toBe("open");
    expect(b.endStroke({ x: 0, y: 10 })).toBe("committed");
  });

  it("discards a too-short contour on close", () => {
    const b = board();
    b.beginStroke({ x: 0, y: 0 });
    b.extendStroke({ x: 8, y: 0 });
    expect(b.endStroke({ x: 1, y: 1 })).toBe("discarded");
    expect(b.activePoints).toEqual([]);
    expect(b.mode).toBe("idle");
    expect(b.committed).toEqual([]);
  });

  it("keeps at most one stroke active", () => {
    const b = board();
    b.beginStroke({ x: 0, y: 0 });
    dragLine(b, { x: 0, y: 0 }, { x: 30, y: 0 });
    const before = b.activePoints.length;
    b.beginStroke({ x: 60, y: 0 }); // second press continues the open stroke
    expect(b.mode).toBe("drawing");
    expect(b.activePoints.length).toBe(before + 1);
  });
});

describe("editing and deleting", () => {
  function withSquare(): DrawingBoard {
    const b = board();
    expect(drawSquare(b, 100, 100, 80)).toBe("committed");
    b.setMode("editing");
    return b;
  }

  it("selects a vertex within the hit radius, then relocates it", () => {
    const b = withSquare();
    const target = b.committed[0].canvasPoints[0];
    expect(b.editClick({ x: target.x + 4, y: target.y + 4 })).toBe("selected");
    expect(b.editClick({ x: 130, y: 95 })).toBe("moved");
    expect(b.committed[0].canvasPoints[0]).toEqual({ x: 130, y: 95 });
    expect(b.committed[0].indexPoints[0]).toEqual({ x: 129.5, y: 94.5 });
    expect(b.selectedVertex).toBeNull();
  });

  it("misses far from every vertex", () => {
    const b = withSquare();
    expect(b.editClick({ x: 140, y: 140 })).toBe("miss"); // square center
    expect(b.selectedVertex).toBeNull();
  });

  it("delete-slice removes only the clicked contour", () => {
    const b = board();
    expect(drawSquare(b, 20, 20, 60)).toBe("committed");
    expect(drawSquare(b, 200, 200, 60)).toBe("committed");
    b.setMode("deleting_slice");
    expect(b.deleteAt({ x: 50, y: 20 })).toBe(true); // on the first square's top edge
    expect(b.committed.length).toBe(1);
    expect(b.committed[0].canvasPoints[0].x).toBe(200);
    expect(b.deleteAt({ x: 150, y: 150 })).toBe(false);
    expect(b.committed.length).toBe(1);
  });

  it("does not delete contours on other slices", () => {
    const b = board();
    expect(drawSquare(b, 20, 20, 60)).toBe("committed");
    b.setSlice(3);
    b.setMode("deleting_slice");
    expect(b.deleteAt({ x: 50, y: 20 })).toBe(false);
    expect(b.committed.length).toBe(1);
  });
});

describe("slice and mode changes", () => {
  it("abandons an open stroke when the slice changes", () => {
    const b = board();
    b.beginStroke({ x: 0, y: 0 });
    dragLine(b, { x: 0, y: 0 }, { x: 30, y: 0 });
    b.setSlice(4);
    expect(b.activePoints).toEqual([]);
    expect(b.mode).toBe("idle");
    expect(b.slice).toBe(4);
  });

  it("files contours under the slice they were drawn on", () => {
    const b = board();
    expect(drawSquare(b, 20, 20, 60)).toBe("committed");
    b.setSlice(7);
    expect(drawSquare(b, 20, 20, 60)).toBe("committed");
    expect(b.contoursOnSlice(0).length).toBe(1);
    expect(b.contoursOnSlice(7).length).toBe(1);
    expect(b.contoursOnSlice(3).length).toBe(0);
  });

  it("mode switches clear pending state", () => {
    const b = board();
    b.beginStroke({ x: 0, y: 0 });
    b.setMode("editing");
    expect(b.activePoints).toEqual([]);
    b.setMode("idle");
    expect(b.mode).toBe("idle");
  });
});
