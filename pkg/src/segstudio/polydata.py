"""Contour model plus legacy ASCII VTK polydata and metadata JSON I/O.

A contour file holds two blocks: POINTS with every contour point (one
coordinate triple per line) and POLYGONS with one connectivity record
per closed contour.  The title line records whether coordinates are in
continuous index space or in world millimeters, so a reader can
normalize either way.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

import numpy as np

from .errors import MalformedError, NotPlanarError, OutOfGridError, UnknownBasisError
from .volume import LPS, RAS, VolumeGeometry, index_to_world, world_to_index

INDEX_SPACE = "index_space"
WORLD_SPACE = "world_space"

SPACE_TO_BASIS = {
    "right-anterior-superior": RAS,
    "RAS": RAS,
    "left-posterior-superior": LPS,
    "LPS": LPS,
}
BASIS_TO_SPACE = {RAS: "right-anterior-superior", LPS: "left-posterior-superior"}

_DUP_TOL = 1e-9
_PLANAR_SLACK = 1e-9
_MODE_RE = re.compile(r"mode=(index_space|world_space)")


@dataclass(frozen=True)
class MetaDescriptor:
    """Sidecar description of a source grid, enough to rebuild it without voxels.

    ``space_directions`` row i is the world step per unit of index axis i,
    i.e. the transpose of :class:`VolumeGeometry.directions`.
    """

    sizes: tuple[int, int, int]
    space_origin: tuple[float, float, float]
    space_directions: tuple[tuple[float, float, float], ...]
    space: str = "right-anterior-superior"

    def __post_init__(self):
        try:
            sizes = tuple(int(s) for s in self.sizes)
            origin = tuple(float(x) for x in self.space_origin)
            rows = tuple(tuple(float(x) for x in row) for row in self.space_directions)
        except (TypeError, ValueError) as exc:
            raise MalformedError(f"metadata fields must be numeric: {exc}") from exc
        if len(sizes) != 3:
            raise MalformedError(f"sizes must have 3 entries, got {len(sizes)}")
        if len(origin) != 3:
            raise MalformedError(f"space_origin must have 3 entries, got {len(origin)}")
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise MalformedError("space_directions must be 3 rows of 3 numbers")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "space_origin", origin)
        object.__setattr__(self, "space_directions", rows)
        self.to_geometry()  # surface invariant violations eagerly

    @property
    def basis(self) -> str:
        try:
            return SPACE_TO_BASIS[self.space]
        except KeyError:
            raise UnknownBasisError(f"unknown space string {self.space!r}") from None

    def to_geometry(self) -> VolumeGeometry:
        rows = np.array(self.space_directions, dtype=float)
        return VolumeGeometry(self.sizes, rows.T, np.array(self.space_origin), self.basis)

    @classmethod
    def from_geometry(cls, geom: VolumeGeometry) -> "MetaDescriptor":
        rows = tuple(tuple(float(x) for x in col) for col in geom.directions.T)
        origin = tuple(float(x) for x in geom.origin)
        return cls(geom.sizes, origin, rows, BASIS_TO_SPACE[geom.basis])


def _drop_duplicate_points(pts: np.ndarray) -> np.ndarray:
    """Remove consecutive near-duplicates, including the closing wraparound."""
    kept = [pts[0]]
    for p in pts[1:]:
        if float(np.hypot(p[0] - kept[-1][0], p[1] - kept[-1][1])) >= _DUP_TOL:
            kept.append(p)
    while len(kept) > 1 and float(np.hypot(*(kept[-1] - kept[0]))) < _DUP_TOL:
        kept.pop()
    return np.array(kept, dtype=float)


@dataclass(frozen=True, eq=False)
class Contour:
    """One implicitly-closed polygon on an axial slice, in index coords (i, j)."""

    slice_k: int
    points: np.ndarray  # (N, 2) float, normalized on construction

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or len(pts) == 0:
            raise MalformedError("contour points must be an (N, 2) array")
        pts = _drop_duplicate_points(pts)
        if len(pts) < 3:
            raise MalformedError("contour needs at least 3 distinct points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "slice_k", int(self.slice_k))


@dataclass(frozen=True, eq=False)
class ContourSet:
    """Contours plus the grid metadata their index coordinates refer to."""

    contours: tuple[Contour, ...]
    source_geometry: MetaDescriptor | None = None

    def __post_init__(self):
        object.__setattr__(self, "contours", tuple(self.contours))
        if self.source_geometry is not None:
            nz = self.source_geometry.sizes[2]
            for c in self.contours:
                if not 0 <= c.slice_k < nz:
                    raise OutOfGridError(f"contour slice {c.slice_k} outside grid 0..{nz - 1}")


@dataclass(frozen=True, eq=False)
class PolyData:
    """Flat point list plus polygon connectivity, the legacy VTK interchange form."""

    points: np.ndarray  # (N, 3)
    polygons: tuple[tuple[int, ...], ...]
    title: str = ""

    def __post_init__(self):
        pts = np.array(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise MalformedError("points must be an (N, 3) array")
        pts.setflags(write=False)
        polys = tuple(tuple(int(i) for i in poly) for poly in self.polygons)
        for poly in polys:
            if len(poly) < 3:
                raise MalformedError("polygon with fewer than 3 vertices")
            for ix in poly:
                if not 0 <= ix < len(pts):
                    raise MalformedError(f"polygon references point {ix} of {len(pts)}")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "polygons", polys)


def _fmt_coord(v: float) -> str:
    return f"{v:.6g}"


def write_polydata(cs: ContourSet, mode: str = INDEX_SPACE) -> str:
    """Serialize a contour set as a legacy ASCII VTK polydata file.

    Every contour contributes its points (i, j, slice_k) to the POINTS
    block, transformed to world mm when ``mode`` is world_space, and one
    POLYGONS record listing its point indices in drawing order.
    """
    if mode not in (INDEX_SPACE, WORLD_SPACE):
        raise ValueError(f"unknown export mode {mode!r}")
    if mode == WORLD_SPACE and cs.source_geometry is None:
        raise MalformedError("world_space export requires source grid metadata")

    blocks = []
    records = []
    base = 0
    for c in cs.contours:
        n = len(c.points)
        blocks.append(np.column_stack([c.points, np.full(n, float(c.slice_k))]))
        records.append(range(base, base + n))
        base += n
    pts = np.vstack(blocks) if blocks else np.zeros((0, 3))
    if mode == WORLD_SPACE and len(pts):
        pts = index_to_world(cs.source_geometry.to_geometry(), pts)

    lines = [
        "# vtk DataFile Version 3.0",
        f"segstudio contours mode={mode}",
        "ASCII",
        "DATASET POLYDATA",
        f"POINTS {len(pts)} float",
    ]
    lines.extend(" ".join(_fmt_coord(v) for v in p) for p in pts)
    total = sum(len(r) + 1 for r in records)
    lines.append(f"POLYGONS {len(records)} {total}")
    lines.extend(" ".join(str(v) for v in [len(r), *r]) for r in records)
    return "\n".join(lines) + "\n"


def _take(tokens: list[str], pos: int, count: int, section: str) -> list[str]:
    if pos + count > len(tokens):
        raise MalformedError(f"{section} section truncated")
    return tokens[pos : pos + count]


def parse_polydata(text: str) -> PolyData:
    """Parse a legacy ASCII VTK polydata file into points + polygons."""
    lines = text.splitlines()
    if len(lines) < 4:
        raise MalformedError("truncated VTK file")
    title = lines[1]
    preamble = [ln.strip().upper() for ln in lines[:5]]
    if "BINARY" in preamble:
        raise MalformedError("binary legacy VTK is not supported")
    ds_idx = next((i for i, ln in enumerate(preamble) if ln.startswith("DATASET")), None)
    if ds_idx is None or lines[ds_idx].split()[1:] != ["POLYDATA"]:
        raise MalformedError("file does not declare DATASET POLYDATA")

    tokens: list[str] = []
    for ln in lines[ds_idx + 1 :]:
        tokens.extend(ln.split())

    points = np.zeros((0, 3))
    polygons: list[tuple[int, ...]] = []
    pos = 0
    try:
        while pos < len(tokens):
            kw = tokens[pos].upper()
            if kw == "POINTS":
                n = int(_take(tokens, pos + 1, 1, "POINTS")[0])
                pos += 3  # keyword, count, dtype
                vals = _take(tokens, pos, 3 * n, "POINTS")
                points = np.array([float(v) for v in vals], dtype=float).reshape(n, 3)
                pos += 3 * n
            elif kw == "POLYGONS":
                m, total = (int(v) for v in _take(tokens, pos + 1, 2, "POLYGONS"))
                pos += 3
                ints = [int(v) for v in _take(tokens, pos, total, "POLYGONS")]
                i = 0
                for _ in range(m):
                    if i >= total:
                        raise MalformedError("POLYGONS totals inconsistent with records")
                    cnt = ints[i]
                    if cnt < 3 or i + 1 + cnt > total:
                        raise MalformedError("POLYGONS totals inconsistent with records")
                    polygons.append(tuple(ints[i + 1 : i + 1 + cnt]))
                    i += 1 + cnt
                if i != total:
                    raise MalformedError("POLYGONS totals inconsistent with records")
                pos += total
            else:
                pos += 1  # tolerate sections we do not model
    except ValueError as exc:
        raise MalformedError(f"non-numeric value in VTK file: {exc}") from exc

    return PolyData(points, tuple(polygons), title=title)


def polydata_mode(pd: PolyData) -> str | None:
    """Coordinate mode recorded in the title line, if any."""
    m = _MODE_RE.search(pd.title)
    return m.group(1) if m else None


def contours_from_polydata(
    pd: PolyData, meta: MetaDescriptor, mode: str | None = INDEX_SPACE
) -> ContourSet:
    """Normalize polydata to per-slice contours in index space.

    Each polygon must be axial-planar: all its k coordinates within 0.5
    of the rounded mean, which becomes the slice index.  Files without a
    recorded mode (mode=None) are treated as index space.
    """
    if mode is None:
        mode = INDEX_SPACE
    if mode not in (INDEX_SPACE, WORLD_SPACE):
        raise ValueError(f"unknown mode {mode!r}")
    pts = pd.points
    if mode == WORLD_SPACE and len(pts):
        pts = world_to_index(meta.to_geometry(), pts)
    nz = meta.sizes[2]
    contours = []
    for poly in pd.polygons:
        sel = pts[list(poly)]
        kvals = sel[:, 2]
        k = int(np.rint(float(np.mean(kvals))))
        dev = float(np.max(np.abs(kvals - k)))
        if dev > 0.5 + _PLANAR_SLACK:
            raise NotPlanarError(f"polygon is not axial-planar: k deviates {dev:.4g} from {k}")
        if not 0 <= k < nz:
            raise OutOfGridError(f"slice {k} outside grid 0..{nz - 1}")
        contours.append(Contour(k, sel[:, :2]))
    return ContourSet(tuple(contours), meta)


_META_KEYS = ("sizes", "space_origin", "space_directions", "space")


def parse_meta_json(text: str) -> MetaDescriptor:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedError(f"metadata is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedError("metadata must be a JSON object")
    missing = [k for k in _META_KEYS if k not in obj]
    if missing:
        raise MalformedError(f"metadata missing keys: {', '.join(missing)}")
    space = obj["space"]
    if not isinstance(space, str):
        raise MalformedError("space must be a string")
    return MetaDescriptor(obj["sizes"], obj["space_origin"], obj["space_directions"], space)


def write_meta_json(m: MetaDescriptor) -> str:
    return json.dumps(
        {
            "sizes": list(m.sizes),
            "space_origin": list(m.space_origin),
            "space_directions": [list(r) for r in m.space_directions],
            "space": m.space,
        }
    )
