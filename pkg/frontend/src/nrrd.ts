/** Minimal NRRD reader for the viewer: attached headers, 3-D scalar
 * volumes, raw or gzip payloads. Mirrors the server's parsing rules so
 * anything the service accepts renders here too.
 */

export class NrrdParseError extends Error {}

export type ScalarArray = Uint8Array | Int16Array | Uint16Array | Float32Array;

export interface NrrdVolume {
  sizes: [number, number, number];
  /** row i is the world step (mm) per unit of index axis i */
  spaceDirections: number[][];
  spaceOrigin: number[];
  space: string;
  data: ScalarArray;
}

const MAGIC = /^NRRD000[1-5]$/;

const TYPE_ALIASES: Record<string, "u8" | "i16" | "u16" | "f32"> = {
  uchar: "u8",
  "unsigned char": "u8",
  uint8: "u8",
  uint8_t: "u8",
  short: "i16",
  "signed short": "i16",
  int16: "i16",
  int16_t: "i16",
  ushort: "u16",
  "unsigned short": "u16",
  uint16: "u16",
  uint16_t: "u16",
  float: "f32",
  float32: "f32",
};

const SPACE_ALIASES: Record<string, string> = {
  "right-anterior-superior": "right-anterior-superior",
  RAS: "right-anterior-superior",
  "left-posterior-superior": "left-posterior-superior",
  LPS: "left-posterior-superior",
};

function headerEnd(bytes: Uint8Array): number {
  for (let i = 0; i < bytes.length - 1; i++) {
    if (bytes[i] !== 0x0a) continue;
    if (bytes[i + 1] === 0x0a) return i + 2;
    if (bytes[i + 1] === 0x0d && bytes[i + 2] === 0x0a) return i + 3;
  }
  throw new NrrdParseError("no blank line terminating the header");
}

function parseVectors(value: string, field: string): number[][] {
  const groups = value.match(/\(([^)]*)\)/g);
  if (!groups || groups.length === 0) {
    throw new NrrdParseError(`${field}: expected (a,b,c) vectors`);
  }
  return groups.map((g) => {
    const parts = g.slice(1, -1).split(",").map((s) => Number(s.trim()));
    if (parts.length !== 3 || parts.some((v) => !Number.isFinite(v))) {
      throw new NrrdParseError(`${field}: bad vector ${g}`);
    }
    return parts;
  });
}

async function gunzip(payload: Uint8Array): Promise<Uint8Array> {
  try {
    const stream = new Blob([payload as BlobPart]).stream().pipeThrough(
      new DecompressionStream("gzip")
    );
    return new Uint8Array(await new Response(stream).arrayBuffer());
  } catch {
    throw new NrrdParseError("corrupt gzip payload");
  }
}

function decodeScalars(
  bytes: Uint8Array,
  kind: "u8" | "i16" | "u16" | "f32",
  littleEndian: boolean,
  count: number
): ScalarArray {
  const itemBytes = kind === "u8" ? 1 : kind === "f32" ? 4 : 2;
  if (bytes.length !== count * itemBytes) {
    throw new NrrdParseError(
      `payload holds ${bytes.length} bytes, expected ${count * itemBytes}`
    );
  }
  const copy = bytes.slice(); // private, aligned buffer
  if (kind === "u8") return copy;
  if (littleEndian) {
    if (kind === "i16") return new Int16Array(copy.buffer, 0, count);
    if (kind === "u16") return new Uint16Array(copy.buffer, 0, count);
    return new Float32Array(copy.buffer, 0, count);
  }
  const view = new DataView(copy.buffer);
  if (kind === "f32") {
    const out = new Float32Array(count);
    for (let i = 0; i < count; i++) out[i] = view.getFloat32(4 * i, false);
    return out;
  }
  const out = kind === "i16" ? new Int16Array(count) : new Uint16Array(count);
  for (let i = 0; i < count; i++) {
    out[i] = kind === "i16" ? view.getInt16(2 * i, false) : view.getUint16(2 * i, false);
  }
  return out;
}

export async function parseNrrd(buffer: ArrayBuffer): Promise<NrrdVolume> {
  const bytes = new Uint8Array(buffer);
  const end = headerEnd(bytes);
  const header = new TextDecoder("latin1").decode(bytes.subarray(0, end));
  const lines = header.split("\n").map((l) => l.replace(/\r$/, ""));
  if (!MAGIC.test(lines[0] ?? "")) {
    throw new NrrdParseError("not an NRRD file (bad magic line)");
  }

  const fields = new Map<string, string>();
  for (const line of lines.slice(1)) {
    if (line === "" || line.startsWith("#") || line.includes(":=")) continue;
    const sep = line.indexOf(": ");
    if (sep < 0) continue;
    fields.set(line.slice(0, sep).trim().toLowerCase(), line.slice(sep + 2).trim());
  }
  for (const required of ["type", "dimension", "sizes", "encoding"]) {
    if (!fields.has(required)) throw new NrrdParseError(`missing required field ${required}`);
  }
  if (fields.has("data file") || fields.has("datafile")) {
    throw new NrrdParseError("detached data files are not supported");
  }
  if (Number(fields.get("dimension")) !== 3) {
    throw new NrrdParseError(`only 3-D volumes are supported, got dimension ${fields.get("dimension")}`);
  }
  const kind = TYPE_ALIASES[fields.get("type")!];
  if (!kind) throw new NrrdParseError(`unsupported type ${fields.get("type")}`);
  const sizes = fields.get("sizes")!.split(/\s+/).map(Number);
  if (sizes.length !== 3 || sizes.some((s) => !Number.isInteger(s) || s <= 0)) {
    throw new NrrdParseError(`bad sizes: ${fields.get("sizes")}`);
  }
  const encoding = fields.get("encoding")!;
  if (!["raw", "gzip", "gz"].includes(encoding)) {
    throw new NrrdParseError(`unsupported encoding ${encoding}`);
  }
  const endianField = fields.get("endian") ?? "little";
  if (!["little", "big"].includes(endianField)) {
    throw new NrrdParseError(`unsupported endian ${endianField}`);
  }
  const space = fields.has("space") ? SPACE_ALIASES[fields.get("space")!] : "right-anterior-superior";
  if (!space) throw new NrrdParseError(`unsupported space ${fields.get("space")}`);

  const directions = fields.has("space directions")
    ? parseVectors(fields.get("space directions")!, "space directions")
    : [
        [1, 0, 0],
        [0, 1, 0],
        [0, 0, 1],
      ];
  if (directions.length !== 3) {
    throw new NrrdParseError("space directions must list 3 vectors");
  }
  const origin = fields.has("space origin")
    ? parseVectors(fields.get("space origin")!, "space origin")[0]
    : [0, 0, 0];

  let payload: Uint8Array = bytes.subarray(end);
  if (encoding !== "raw") payload = await gunzip(payload);
  const count = sizes[0] * sizes[1] * sizes[2];
  const data = decodeScalars(payload, kind, endianField === "little", count);
  return {
    sizes: [sizes[0], sizes[1], sizes[2]],
    spaceDirections: directions,
    spaceOrigin: origin,
    space,
    data,
  };
}

/** The nx*ny block of values for axial slice k (x fastest, then y). */
export function sliceView(v: NrrdVolume, k: number): ScalarArray {
  const [nx, ny, nz] = v.sizes;
  if (k < 0 || k >= nz) throw new RangeError(`slice ${k} outside 0..${nz - 1}`);
  return v.data.subarray(nx * ny * k, nx * ny * (k + 1)) as ScalarArray;
}

export function valueAt(v: NrrdVolume, i: number, j: number, k: number): number {
  const [nx, ny] = v.sizes;
  return v.data[i + nx * (j + ny * k)];
}

/** Grid sidecar JSON accepted by the mask service alongside contours. */
export function metaJson(v: NrrdVolume): string {
  return JSON.stringify({
    sizes: v.sizes,
    space_origin: v.spaceOrigin,
    space_directions: v.spaceDirections,
    space: v.space,
  });
}
