/** DOM wiring: file loading, slice navigation, tool switching, job
 * submission, and metric display. All drawing logic lives in the
 * DrawingBoard; this module only translates events.
 */

import { JobClient, metricsSummary } from "./api.js";
import { DEFAULT_CONFIG } from "./config.js";
import { DrawingBoard } from "./drawing.js";
import { makeMapping } from "./geometry.js";
import { NrrdVolume, metaJson, parseNrrd } from "./nrrd.js";
import { Window, intensityRange, paintOverlay, paintSlice } from "./render.js";
import { exportPolydata } from "./vtk.js";

const MAX_EDGE_PX = 512;

const el = <T extends HTMLElement>(id: string): T => {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
};

const sliceCanvas = el<HTMLCanvasElement>("slice-canvas");
const overlayCanvas = el<HTMLCanvasElement>("overlay-canvas");
const slider = el<HTMLInputElement>("slice-slider");
const sliceLabel = el<HTMLSpanElement>("slice-label");
const progressBar = el<HTMLProgressElement>("job-progress");
const toastBox = el<HTMLDivElement>("toast");
const results = el<HTMLDivElement>("results");
const dropZone = el<HTMLDivElement>("stage");

const client = new JobClient("");
const config = { ...DEFAULT_CONFIG };

let volume: NrrdVolume | null = null;
let win: Window = { lo: 0, hi: 1 };
let board: DrawingBoard | null = null;
let lastMask: ArrayBuffer | null = null;
let toastTimer: number | undefined;

function toast(message: string, isError = false): void {
  toastBox.textContent = message;
  toastBox.className = isError ? "toast error show" : "toast show";
  window.clearTimeout(toastTimer);
  toastTimer = window.setTimeout(() => {
    toastBox.className = "toast";
  }, 3500);
}

function repaint(): void {
  if (!volume || !board) return;
  paintSlice(sliceCanvas.getContext("2d")!, volume, board.slice, win);
  paintOverlay(overlayCanvas.getContext("2d")!, board, config);
}

function setSlice(k: number): void {
  if (!volume || !board) return;
  const clamped = Math.min(volume.sizes[2] - 1, Math.max(0, k));
  board.setSlice(clamped);
  slider.value = String(clamped);
  sliceLabel.textContent = `slice ${clamped} / ${volume.sizes[2] - 1}`;
  repaint();
}

async function loadVolume(file: File): Promise<void> {
  try {
    volume = await parseNrrd(await file.arrayBuffer());
  } catch (err) {
    toast(`could not load ${file.name}: ${(err as Error).message}`, true);
    return;
  }
  const [nx, ny, nz] = volume.sizes;
  const scale = Math.max(1, Math.floor(MAX_EDGE_PX / Math.max(nx, ny)));
  for (const canvas of [sliceCanvas, overlayCanvas]) {
    canvas.width = nx * scale;
    canvas.height = ny * scale;
  }
  board = new DrawingBoard(makeMapping(nx * scale, ny * scale, nx, ny), config);
  win = intensityRange(volume.data);
  slider.min = "0";
  slider.max = String(nz - 1);
  lastMask = null;
  results.textContent = "";
  setSlice(0);
  toast(`loaded ${file.name}: ${nx} x ${ny} x ${nz}`);
}

function exportCurrentVtk(): void {
  if (!board || board.committed.length === 0) {
    toast("nothing to export: no committed contours", true);
    return;
  }
  const text = exportPolydata(board.committed, "index_space");
  const url = URL.createObjectURL(new Blob([text], { type: "text/plain" }));
  const a = document.createElement("a");
  a.href = url;
  a.download = "contours.vtk";
  a.click();
  URL.revokeObjectURL(url);
}

async function generateMask(): Promise<void> {
  if (!volume || !board || board.committed.length === 0) {
    toast("draw at least one contour first", true);
    return;
  }
  progressBar.value = 0;
  try {
    const jobId = await client.createJob(exportPolydata(board.committed), metaJson(volume));
    lastMask = await client.runMaskJob(jobId, (info) => {
      progressBar.value = info.progress;
    });
    const url = URL.createObjectURL(new Blob([lastMask], { type: "application/octet-stream" }));
    const link = el<HTMLAnchorElement>("mask-link");
    link.href = url;
    link.classList.remove("hidden");
    toast("mask ready");
  } catch (err) {
    toast(`mask job failed: ${(err as Error).message}`, true);
  }
}

async function runMetrics(referenceFile: File): Promise<void> {
  if (!lastMask) {
    toast("generate a mask first", true);
    return;
  }
  try {
    const report = await client.compareMasks(lastMask, await referenceFile.arrayBuffer());
    results.textContent = metricsSummary(report);
  } catch (err) {
    toast(`metrics failed: ${(err as Error).message}`, true);
  }
}

function bindTools(): void {
  const buttons: [string, () => void][] = [
    ["tool-draw", () => board?.setMode("idle")],
    ["tool-edit", () => board?.setMode("editing")],
    ["tool-delete", () => board?.setMode("deleting_slice")],
  ];
  for (const [id, activate] of buttons) {
    el<HTMLButtonElement>(id).addEventListener("click", () => {
      activate();
      for (const [other] of buttons) {
        el<HTMLButtonElement>(other).classList.toggle("active", other === id);
      }
      repaint();
    });
  }
}

function bindSettings(): void {
  const inputs: [string, "addPointPx" | "closePx" | "vertexHitPx"][] = [
    ["set-add", "addPointPx"],
    ["set-close", "closePx"],
    ["set-vertex", "vertexHitPx"],
  ];
  for (const [id, key] of inputs) {
    const input = el<HTMLInputElement>(id);
    input.value = String(config[key]);
    input.addEventListener("change", () => {
      const v = Number(input.value);
      if (Number.isFinite(v) && v > 0) config[key] = v;
    });
  }
}

function bindPointer(): void {
  overlayCanvas.addEventListener("pointerdown", (e) => {
    if (!board) return;
    const p = { x: e.offsetX, y: e.offsetY };
    if (board.mode === "editing") {
      const outcome = board.editClick(p);
      if (outcome === "moved") toast("vertex moved");
    } else if (board.mode === "deleting_slice") {
      if (board.deleteAt(p)) toast("contour deleted");
    } else {
      board.beginStroke(p);
      overlayCanvas.setPointerCapture(e.pointerId);
    }
    repaint();
  });
  overlayCanvas.addEventListener("pointermove", (e) => {
    if (!board || board.mode !== "drawing" || e.buttons === 0) return;
    if (board.extendStroke({ x: e.offsetX, y: e.offsetY })) repaint();
  });
  overlayCanvas.addEventListener("pointerup", (e) => {
    if (!board || board.mode !== "drawing") return;
    const outcome = board.endStroke({ x: e.offsetX, y: e.offsetY });
    if (outcome === "committed") toast("contour closed");
    else if (outcome === "discarded") toast("contour discarded: fewer than 3 points", true);
    repaint();
  });
  dropZone.addEventListener("wheel", (e) => {
    if (!board) return;
    e.preventDefault();
    setSlice(board.slice + Math.sign(e.deltaY));
  });
}

function bindFiles(): void {
  const input = el<HTMLInputElement>("volume-input");
  input.addEventListener("change", () => {
    if (input.files?.[0]) void loadVolume(input.files[0]);
  });
  dropZone.addEventListener("dragover", (e) => e.preventDefault());
  dropZone.addEventListener("drop", (e) => {
    e.preventDefault();
    const file = e.dataTransfer?.files?.[0];
    if (file) void loadVolume(file);
  });
  const reference = el<HTMLInputElement>("reference-input");
  el<HTMLButtonElement>("run-metrics").addEventListener("click", () => {
    if (reference.files?.[0]) void runMetrics(reference.files[0]);
    else toast("choose a reference mask first", true);
  });
}

export function init(): void {
  bindTools();
  bindSettings();
  bindPointer();
  bindFiles();
  slider.addEventListener("input", () => setSlice(Number(slider.value)));
  el<HTMLButtonElement>("export-vtk").addEventListener("click", exportCurrentVtk);
  el<HTMLButtonElement>("generate-mask").addEventListener("click", () => void generateMask());
  el<HTMLButtonElement>("tool-draw").classList.add("active");
}

init();
