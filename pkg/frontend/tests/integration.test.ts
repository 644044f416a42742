/** Full-stack checks against a real mask service process: a scripted
 * drawing session exports VTK the server accepts, the job pipeline
 * completes, and the resulting mask scores Dice 1.0 against itself.
 */

import { ChildProcess, spawn } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiError, JobClient, metricsSummary } from "../src/api.js";
import { DrawingBoard } from "../src/drawing.js";
import { Point, canvasToIndex, dist, indexToCanvas, makeMapping } from "../src/geometry.js";
import { parseNrrd } from "../src/nrrd.js";
import { exportPolydata } from "../src/vtk.js";

const PORT = 18200 + (process.pid % 1800);
const BASE = `http://127.0.0.1:${PORT}`;

let workdir: string;
let server: ChildProcess;

async function waitForServer(timeoutMs = 30000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const r = await fetch(`${BASE}/api/jobs/startup-probe/progress`);
      if (r.status === 404) return;
    } catch {
      // connection refused until uvicorn binds
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("mask service did not come up in time");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "segstudio-webui-"));
  server = spawn(
    "python3",
    ["-m", "segstudio.cli", "serve", "--port", String(PORT), "--workdir", workdir],
    { stdio: ["ignore", "ignore", "inherit"] }
  );
  await waitForServer();
});

afterAll(async () => {
  if (server && server.exitCode === null) {
    server.kill("SIGTERM");
    await new Promise<void>((resolve) => {
      const fallback = setTimeout(() => {
        server.kill("SIGKILL");
        resolve();
      }, 5000);
      server.once("exit", () => {
        clearTimeout(fallback);
        resolve();
      });
    });
  }
  rmSync(workdir, { recursive: true, force: true });
});

/** Drag along the fixture square's perimeter in whole-pixel cursor
 * steps, the granularity real pointer events report. With 200 px
 * edges the 5 px capture spacing lands exactly on every corner.
 */
function scriptedSquareDraw(board: DrawingBoard): void {
  const corners: Point[] = [
    { x: 50, y: 50 },
    { x: 250, y: 50 },
    { x: 250, y: 250 },
    { x: 50, y: 250 },
  ];
  board.beginStroke(corners[0]);
  const walk = (from: Point, to: Point) => {
    const steps = Math.max(Math.abs(to.x - from.x), Math.abs(to.y - from.y));
    const dx = Math.sign(to.x - from.x);
    const dy = Math.sign(to.y - from.y);
    for (let s = 1; s <= steps; s++) {
      board.extendStroke({ x: from.x + s * dx, y: from.y + s * dy });
    }
  };
  walk(corners[0], corners[1]);
  walk(corners[1], corners[2]);
  walk(corners[2], corners[3]);
  walk(corners[3], { x: 50, y: 55 });
  expect(board.endStroke({ x: 50, y: 53 })).toBe("committed");
}

const GRID_META = JSON.stringify({
  sizes: [20, 20, 10],
  space_origin: [0, 0, 0],
  space_directions: [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
  ],
  space: "right-anterior-superior",
});

describe("drawing to mask round trip", () => {
  const mapping = makeMapping(400, 400, 20, 20);

  it("runs the drawn square through the service and scores it", async () => {
    const board = new DrawingBoard(mapping);
    scriptedSquareDraw(board);
    expect(board.committed.length).toBe(1);
    expect(board.committed[0].canvasPoints.length).toBeGreaterThanOrEqual(4);

    for (const p of board.committed[0].canvasPoints) {
      const back = indexToCanvas(mapping, canvasToIndex(mapping, p));
      expect(dist(p, back)).toBeLessThan(0.5);
    }

    const vtk = exportPolydata(board.committed, "index_space");
    expect(vtk).toContain("mode=index_space");
    expect(vtk).toContain("POLYGONS 1 ");

    const client = new JobClient(BASE);
    const jobId = await client.createJob(vtk, GRID_META);
    expect(jobId.length).toBeGreaterThanOrEqual(16);

    const seen: number[] = [];
    const maskBytes = await client.runMaskJob(jobId, (info) => seen.push(info.progress));
    expect(seen.length).toBeGreaterThan(0);
    expect(seen[seen.length - 1]).toBe(100);
    expect([...seen].sort((a, b) => a - b)).toEqual(seen);

    const mask = await parseNrrd(maskBytes);
    expect(mask.sizes).toEqual([20, 20, 10]);
    let foreground = 0;
    for (let i = 0; i < mask.data.length; i++) if (mask.data[i] !== 0) foreground++;
    expect(foreground).toBe(121);

    const report = await client.compareMasks(maskBytes, maskBytes);
    expect(report.dice).toBe(1.0);
    expect(report.hausdorff_mm).toBe(0.0);
    expect(report.voxels_a).toBe(121);
    expect(metricsSummary(report)).toContain("Dice 1.0000");
  }, 60000);

  it("surfaces service validation errors with their codes", async () => {
    const client = new JobClient(BASE);
    const board = new DrawingBoard(mapping);
    scriptedSquareDraw(board);
    const vtk = exportPolydata(board.committed, "index_space");

    await expect(client.createJob(vtk, "{not json")).rejects.toMatchObject({
      status: 422,
      code: "MALFORMED",
    });
    await expect(client.getProgress("no-such-job")).rejects.toMatchObject({
      status: 404,
      code: "NOT_FOUND",
    });
    try {
      await client.createJob(vtk, "{not json");
      expect.unreachable("createJob should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
    }
  });
});
