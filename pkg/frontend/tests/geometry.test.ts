import { describe, expect, it } from "vitest";

import {
  canvasToIndex,
  dist,
  indexToCanvas,
  makeMapping,
  segmentDist,
} from "../src/geometry.js";

describe("canvas/index mapping", () => {
  it("puts voxel (0, 0) center at half a cell from the corner", () => {
    const m = makeMapping(400, 400, 20, 20);
    expect(indexToCanvas(m, { x: 0, y: 0 })).toEqual({ x: 10, y: 10 });
    expect(canvasToIndex(m, { x: 10, y: 10 })).toEqual({ x: 0, y: 0 });
  });

  it("supports anisotropic canvases", () => {
    const m = makeMapping(600, 200, 30, 10);
    expect(m.sx).toBe(20);
    expect(m.sy).toBe(20);
    const m2 = makeMapping(300, 400, 30, 10);
    const p = canvasToIndex(m2, { x: 300, y: 0 });
    expect(p.x).toBeCloseTo(29.5, 12);
    expect(p.y).toBeCloseTo(-0.5, 12);
  });

  it("round trips far inside the half-pixel budget", () => {
    const mappings = [
      makeMapping(512, 512, 20, 20),
      makeMapping(512, 384, 256, 192),
      makeMapping(333, 517, 48, 40),
    ];
    let worst = 0;
    let seed = 1234567;
    const next = () => {
      seed = (seed * 48271) % 2147483647;
      return seed / 2147483647;
    };
    for (const m of mappings) {
      for (let trial = 0; trial < 400; trial++) {
        const p = { x: next() * 520, y: next() * 520 };
        const back = indexToCanvas(m, canvasToIndex(m, p));
        worst = Math.max(worst, dist(p, back));
      }
    }
    expect(worst).toBeLessThan(1e-9);
    expect(worst).toBeLessThan(0.5);
  });

  it("rejects degenerate sizes", () => {
    expect(() => makeMapping(0, 100, 10, 10)).toThrow();
    expect(() => makeMapping(100, 100, 0, 10)).toThrow();
  });
});

describe("segment distance", () => {
  it("measures perpendicular drop to the segment interior", () => {
    expect(segmentDist({ x: 5, y: 3 }, { x: 0, y: 0 }, { x: 10, y: 0 })).toBeCloseTo(3, 12);
  });

  it("clamps to the nearest endpoint beyond the ends", () => {
    expect(segmentDist({ x: -3, y: 4 }, { x: 0, y: 0 }, { x: 10, y: 0 })).toBeCloseTo(5, 12);
    expect(segmentDist({ x: 13, y: -4 }, { x: 0, y: 0 }, { x: 10, y: 0 })).toBeCloseTo(5, 12);
  });

  it("handles a zero-length segment", () => {
    expect(segmentDist({ x: 3, y: 4 }, { x: 0, y: 0 }, { x: 0, y: 0 })).toBeCloseTo(5, 12);
  });
});
