/** Legacy ASCII VTK polydata export of committed contours.
 *
 * Matches the wire layout the mask service reads back: a mode-tagged
 * title line, a shared POINTS block (one x y z triple per line), and
 * one count-prefixed POLYGONS record per contour.
 */

import { CommittedContour } from "./drawing.js";

export type ExportMode = "index_space" | "world_space";

export interface GridFrame {
  /** row i is the world step per unit of index axis i */
  spaceDirections: number[][];
  spaceOrigin: number[];
}

/** Shortest 6-significant-digit decimal, trailing zeros trimmed. */
export function formatCoord(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  if (v === 0) return "0";
  let s = v.toPrecision(6);
  if (s.includes("e")) {
    const [mantissa, exponent] = s.split("e");
    let m = mantissa;
    if (m.includes(".")) m = m.replace(/0+$/, "").replace(/\.$/, "");
    return `${m}e${exponent}`;
  }
  if (s.includes(".")) s = s.replace(/0+$/, "").replace(/\.$/, "");
  return s;
}

function worldPoint(frame: GridFrame, i: number, j: number, k: number): number[] {
  const [r0, r1, r2] = frame.spaceDirections;
  const o = frame.spaceOrigin;
  return [0, 1, 2].map((c) => o[c] + i * r0[c] + j * r1[c] + k * r2[c]);
}

export function exportPolydata(
  contours: CommittedContour[],
  mode: ExportMode = "index_space",
  frame?: GridFrame
): string {
  if (mode === "world_space" && !frame) {
    throw new Error("world_space export needs the grid frame");
  }
  const coordLines: string[] = [];
  const records: string[] = [];
  let base = 0;
  let total = 0;
  for (const c of contours) {
    const n = c.indexPoints.length;
    for (const p of c.indexPoints) {
      const triple =
        mode === "index_space"
          ? [p.x, p.y, c.sliceK]
          : worldPoint(frame!, p.x, p.y, c.sliceK);
      coordLines.push(triple.map(formatCoord).join(" "));
    }
    const indices = Array.from({ length: n }, (_, v) => base + v);
    records.push([n, ...indices].join(" "));
    base += n;
    total += n + 1;
  }
  const lines = [
    "# vtk DataFile Version 3.0",
    `segstudio contours mode=${mode}`,
    "ASCII",
    "DATASET POLYDATA",
    `POINTS ${base} float`,
    ...coordLines,
    `POLYGONS ${records.length} ${total}`,
    ...records,
  ];
  return lines.join("\n") + "\n";
}
