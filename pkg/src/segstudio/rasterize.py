"""Convert per-slice contours into a filled binary mask.

Pipeline: start from an all-zero volume on the source grid, triangulate
each contour, compute the bounding box of all contour points, then test
only voxel centers inside the box against the triangles.  A center on a
triangle edge or vertex counts as foreground (tolerance 1e-9 index
units), so boundary semantics are deterministic.  Inclusion is decided
per slice in 2-D index space; the world affine only shapes the output
header, never the fill.

``point_in_polygon`` is the independent even-odd reference predicate the
triangle path is verified against, and also serves as the fallback fill
for self-intersecting contours when lenient mode is on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import EmptySetError, OutOfGridError, SelfIntersectingError
from .polydata import Contour, ContourSet, MetaDescriptor
from .volume import Mask

BOUNDARY_TOL = 1e-9
_DEGENERATE_AREA = 1e-12

ProgressSink = Callable[[float], None]


@dataclass(frozen=True)
class Triangle2D:
    """Non-degenerate triangle in slice index coordinates (i, j)."""

    a: tuple[float, float]
    b: tuple[float, float]
    c: tuple[float, float]
    slice_k: int

    def __post_init__(self):
        if abs(self.signed_area) <= _DEGENERATE_AREA:
            raise ValueError("degenerate triangle")

    @property
    def signed_area(self) -> float:
        return 0.5 * _cross(*self.a, *self.b, *self.c)


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box in continuous index space."""

    min_corner: tuple[float, float, float]
    max_corner: tuple[float, float, float]

    def __post_init__(self):
        lo = tuple(float(v) for v in self.min_corner)
        hi = tuple(float(v) for v in self.max_corner)
        if any(a > b for a, b in zip(lo, hi)):
            raise ValueError(f"box min {lo} exceeds max {hi}")
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)


def _cross(ox: float, oy: float, ax: float, ay: float, bx: float, by: float) -> float:
    """Twice the signed area of triangle (o, a, b); >0 when b is left of o->a."""
    return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox)


def _segment_dist_sq(px, py, ax: float, ay: float, bx: float, by: float):
    """Squared distance from point(s) to segment a-b; works on scalars and arrays."""
    dx, dy = bx - ax, by - ay
    len_sq = dx * dx + dy * dy
    if len_sq == 0.0:
        ex, ey = px - ax, py - ay
        return ex * ex + ey * ey
    t = ((px - ax) * dx + (py - ay) * dy) / len_sq
    t = np.clip(t, 0.0, 1.0)
    ex = px - (ax + t * dx)
    ey = py - (ay + t * dy)
    return ex * ex + ey * ey


def point_in_polygon(p: Sequence[float], c: Contour) -> bool:
    """Even-odd inclusion of a point in the raw polygon, boundary inclusive.

    Crossing-number parity on the contour edges; points within 1e-9
    index units of any edge count as inside.  Reference predicate only,
    not the production fill path.
    """
    px, py = float(p[0]), float(p[1])
    pts = c.points
    n = len(pts)
    tol_sq = BOUNDARY_TOL * BOUNDARY_TOL
    for i in range(n):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % n]
        if float(_segment_dist_sq(px, py, ax, ay, bx, by)) <= tol_sq:
            return True
    inside = False
    for i in range(n):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % n]
        if (ay > py) != (by > py):
            if px < ax + (py - ay) * (bx - ax) / (by - ay):
                inside = not inside
    return inside


def _on_collinear_segment(ax, ay, bx, by, px, py) -> bool:
    return min(ax, bx) <= px <= max(ax, bx) and min(ay, by) <= py <= max(ay, by)


def contour_is_simple(c: Contour) -> bool:
    """True when the closed polyline has no crossings, overlaps, or spikes."""
    pts = c.points
    n = len(pts)
    ax, ay = pts[:, 0], pts[:, 1]
    bx, by = np.roll(ax, -1), np.roll(ay, -1)

    # spike: adjacent edges fold back onto each other
    for i in range(n):
        j = (i + 1) % n
        cx, cy = bx[j], by[j]
        turn = _cross(ax[i], ay[i], bx[i], by[i], cx, cy)
        if turn == 0.0:
            dot = (ax[i] - bx[i]) * (cx - bx[i]) + (ay[i] - by[i]) * (cy - by[i])
            if dot > 0.0:
                return False

    for i in range(n - 2):
        # candidate partners j > i, excluding adjacent edges (and the
        # wraparound neighbor of edge 0)
        j0 = i + 2
        j1 = n - 1 if i == 0 else n
        if j0 >= j1:
            continue
        sel = slice(j0, j1)
        d1 = _cross(ax[sel], ay[sel], bx[sel], by[sel], ax[i], ay[i])
        d2 = _cross(ax[sel], ay[sel], bx[sel], by[sel], bx[i], by[i])
        d3 = _cross(ax[i], ay[i], bx[i], by[i], ax[sel], ay[sel])
        d4 = _cross(ax[i], ay[i], bx[i], by[i], bx[sel], by[sel])
        proper = (((d1 > 0) & (d2 < 0)) | ((d1 < 0) & (d2 > 0))) & (
            ((d3 > 0) & (d4 < 0)) | ((d3 < 0) & (d4 > 0))
        )
        if bool(np.any(proper)):
            return False
        for off in np.nonzero((d1 == 0) | (d2 == 0) | (d3 == 0) | (d4 == 0))[0]:
            j = j0 + int(off)
            if (
                (d1[off] == 0 and _on_collinear_segment(ax[j], ay[j], bx[j], by[j], ax[i], ay[i]))
                or (d2[off] == 0 and _on_collinear_segment(ax[j], ay[j], bx[j], by[j], bx[i], by[i]))
                or (d3[off] == 0 and _on_collinear_segment(ax[i], ay[i], bx[i], by[i], ax[j], ay[j]))
                or (d4[off] == 0 and _on_collinear_segment(ax[i], ay[i], bx[i], by[i], bx[j], by[j]))
            ):
                return False
    return True


def _signed_area(pts: np.ndarray) -> float:
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _any_point_in_closed_triangle(points: np.ndarray, a, b, c) -> bool:
    # triangle is CCW; >= 0 on all edges means inside or on the boundary
    px, py = points[:, 0], points[:, 1]
    s1 = (b[0] - a[0]) * (py - a[1]) - (b[1] - a[1]) * (px - a[0])
    s2 = (c[0] - b[0]) * (py - b[1]) - (c[1] - b[1]) * (px - b[0])
    s3 = (a[0] - c[0]) * (py - c[1]) - (a[1] - c[1]) * (px - c[0])
    return bool(np.any((s1 >= 0) & (s2 >= 0) & (s3 >= 0)))


def triangulate(c: Contour) -> list[Triangle2D]:
    """Ear-clipping triangulation of a simple contour.

    Yields n-2 counterclockwise triangles for n points; collinear
    vertices form zero-area ears that are clipped without being emitted.
    Raises SELF_INTERSECTING when the polygon's boundary crosses itself.
    """
    if not contour_is_simple(c):
        raise SelfIntersectingError(f"contour on slice {c.slice_k} intersects itself")
    pts = c.points
    order = list(range(len(pts)))
    if _signed_area(pts) < 0:
        order.reverse()

    tris: list[Triangle2D] = []
    while len(order) > 3:
        clipped = False
        for pos in range(len(order)):
            i_prev = order[pos - 1]
            i_cur = order[pos]
            i_next = order[(pos + 1) % len(order)]
            a, b, cp = pts[i_prev], pts[i_cur], pts[i_next]
            area2 = _cross(a[0], a[1], b[0], b[1], cp[0], cp[1])
            if abs(area2) <= 2.0 * _DEGENERATE_AREA:
                order.pop(pos)  # collinear vertex, zero-area ear
                clipped = True
                break
            if area2 < 0:
                continue  # reflex vertex
            others = [i for i in order if i not in (i_prev, i_cur, i_next)]
            if others and _any_point_in_closed_triangle(pts[others], a, b, cp):
                continue
            tris.append(Triangle2D(tuple(a), tuple(b), tuple(cp), c.slice_k))
            order.pop(pos)
            clipped = True
            break
        if not clipped:
            # simple polygons always have an ear; reaching this means the
            # simplicity test was fooled by near-degenerate geometry
            raise SelfIntersectingError(f"contour on slice {c.slice_k}: no ear found")
    a, b, cp = pts[order[0]], pts[order[1]], pts[order[2]]
    if abs(_cross(a[0], a[1], b[0], b[1], cp[0], cp[1])) > 2.0 * _DEGENERATE_AREA:
        tris.append(Triangle2D(tuple(a), tuple(b), tuple(cp), c.slice_k))
    return tris


def compute_bounding_box(cs: ContourSet) -> BoundingBox:
    """Tight box over all contour points; k range spans the slice indices."""
    if not cs.contours:
        raise EmptySetError("cannot bound an empty contour set")
    lo = np.array([math.inf, math.inf, math.inf])
    hi = -lo.copy()
    for c in cs.contours:
        lo[:2] = np.minimum(lo[:2], c.points.min(axis=0))
        hi[:2] = np.maximum(hi[:2], c.points.max(axis=0))
        lo[2] = min(lo[2], c.slice_k)
        hi[2] = max(hi[2], c.slice_k)
    return BoundingBox(tuple(lo), tuple(hi))


def build_blank_volume(meta: MetaDescriptor, foreground_value: int = 1) -> Mask:
    """All-zero mask on the grid described by the metadata sidecar."""
    geom = meta.to_geometry()
    return Mask(geom, np.zeros(geom.voxel_count, dtype=np.uint8), foreground_value)


@dataclass(frozen=True)
class RasterizeOptions:
    lenient: bool = False
    foreground_value: int = 1
    use_bounding_box: bool = True


class _TriangleFill:
    """Vectorized union-of-closed-triangles membership for one contour."""

    def __init__(self, tris: Iterable[Triangle2D]):
        arr = np.array([[t.a, t.b, t.c] for t in tris], dtype=float)
        self._tris = arr  # (T, 3, 2), all CCW

    def mask(self, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        out = np.zeros(px.shape, dtype=bool)
        tol_sq = BOUNDARY_TOL * BOUNDARY_TOL
        for (ax, ay), (bx, by), (cx, cy) in self._tris:
            c1 = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
            c2 = (cx - bx) * (py - by) - (cy - by) * (px - bx)
            c3 = (ax - cx) * (py - cy) - (ay - cy) * (px - cx)
            out |= (c1 >= 0) & (c2 >= 0) & (c3 >= 0)
            # candidates for the boundary tolerance: within 1e-9 of each
            # edge line but not yet inside
            e1 = BOUNDARY_TOL * math.hypot(bx - ax, by - ay)
            e2 = BOUNDARY_TOL * math.hypot(cx - bx, cy - by)
            e3 = BOUNDARY_TOL * math.hypot(ax - cx, ay - cy)
            cand = ~out & (c1 >= -e1) & (c2 >= -e2) & (c3 >= -e3)
            if bool(np.any(cand)):
                idx = np.nonzero(cand)[0]
                qx, qy = px[idx], py[idx]
                near = (
                    (_segment_dist_sq(qx, qy, ax, ay, bx, by) <= tol_sq)
                    | (_segment_dist_sq(qx, qy, bx, by, cx, cy) <= tol_sq)
                    | (_segment_dist_sq(qx, qy, cx, cy, ax, ay) <= tol_sq)
                )
                out[idx[near]] = True
        return out


class _EvenOddFill:
    """Vectorized even-odd membership on the raw polygon (lenient fallback)."""

    def __init__(self, contour: Contour):
        self._pts = contour.points

    def mask(self, px: np.ndarray, py: np.ndarray) -> np.ndarray:
        pts = self._pts
        n = len(pts)
        inside = np.zeros(px.shape, dtype=bool)
        near = np.zeros(px.shape, dtype=bool)
        tol_sq = BOUNDARY_TOL * BOUNDARY_TOL
        for i in range(n):
            ax, ay = pts[i]
            bx, by = pts[(i + 1) % n]
            near |= _segment_dist_sq(px, py, ax, ay, bx, by) <= tol_sq
            if ay != by:
                crossing = ((ay > py) != (by > py)) & (px < ax + (py - ay) * (bx - ax) / (by - ay))
                inside ^= crossing
        return inside | near


class _MonotoneProgress:
    """Serializes raw reports into a nondecreasing 0..100 sequence."""

    def __init__(self, sink: ProgressSink | None):
        self._sink = sink
        self._last = 0.0

    def __call__(self, pct: float) -> None:
        if self._sink is None:
            return
        pct = min(100.0, max(float(pct), self._last))
        self._last = pct
        self._sink(pct)


def rasterize(
    cs: ContourSet,
    meta: MetaDescriptor,
    progress: ProgressSink | None = None,
    options: RasterizeOptions | None = None,
) -> Mask:
    """Fill a binary mask from per-slice contours.

    A voxel becomes foreground iff its center lies inside (boundary
    inclusive) any triangle of any contour on its slice; overlapping
    contours union.  Progress is reported once per slice of the scanned
    k range and always ends at exactly 100.
    """
    opts = options or RasterizeOptions()
    geom = meta.to_geometry()
    nx, ny, nz = geom.sizes
    fg = int(opts.foreground_value)

    for c in cs.contours:
        if not 0 <= c.slice_k < nz:
            raise OutOfGridError(f"contour slice {c.slice_k} outside grid 0..{nz - 1}")

    by_slice: dict[int, list] = {}
    for c in cs.contours:
        try:
            fill = _TriangleFill(triangulate(c))
        except SelfIntersectingError:
            if not opts.lenient:
                raise
            fill = _EvenOddFill(c)
        by_slice.setdefault(c.slice_k, []).append(fill)

    buf = np.zeros(nx * ny * nz, dtype=np.uint8)
    vol = buf.reshape(nz, ny, nx)  # [k, j, i]
    emit = _MonotoneProgress(progress)

    if cs.contours:
        if opts.use_bounding_box:
            box = compute_bounding_box(cs)
            i_lo = max(0, math.ceil(box.min_corner[0] - BOUNDARY_TOL))
            i_hi = min(nx - 1, math.floor(box.max_corner[0] + BOUNDARY_TOL))
            j_lo = max(0, math.ceil(box.min_corner[1] - BOUNDARY_TOL))
            j_hi = min(ny - 1, math.floor(box.max_corner[1] + BOUNDARY_TOL))
            k_range = range(int(round(box.min_corner[2])), int(round(box.max_corner[2])) + 1)
        else:
            i_lo, i_hi, j_lo, j_hi = 0, nx - 1, 0, ny - 1
            k_range = range(nz)

        have_window = i_lo <= i_hi and j_lo <= j_hi
        if have_window:
            ni = i_hi - i_lo + 1
            nj = j_hi - j_lo + 1
            px = np.tile(np.arange(i_lo, i_hi + 1, dtype=float), nj)
            py = np.repeat(np.arange(j_lo, j_hi + 1, dtype=float), ni)

        total = len(k_range)
        for step, k in enumerate(k_range, start=1):
            fills = by_slice.get(k)
            if fills and have_window:
                hit = np.zeros(px.shape, dtype=bool)
                for fill in fills:
                    hit |= fill.mask(px, py)
                window = vol[k, j_lo : j_hi + 1, i_lo : i_hi + 1]
                window[hit.reshape(nj, ni)] = fg
            emit(100.0 * step / total)

    emit(100.0)
    return Mask(geom, buf, fg)
