"""Overlap and surface-distance metrics for binary masks.

Dice is computed on foreground voxel counts; Hausdorff is the symmetric
max-min distance between the 6-connectivity boundary voxel centers of
both masks, measured in world millimeters.  Distances are accumulated as
explicit per-component squares with a single square root at the end, so
results are bit-identical to a naive double loop over the same points.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .errors import EmptyMaskError, GeometryMismatchError
from .volume import Volume, index_to_world

_GEOM_TOL = 1e-6


def _require_same_grid(a: Volume, b: Volume) -> None:
    ga, gb = a.geometry, b.geometry
    if ga.sizes != gb.sizes:
        raise GeometryMismatchError(f"grid sizes differ: {ga.sizes} vs {gb.sizes}")
    if ga.basis != gb.basis:
        raise GeometryMismatchError(f"anatomical bases differ: {ga.basis} vs {gb.basis}")
    if not np.allclose(ga.origin, gb.origin, rtol=0.0, atol=_GEOM_TOL):
        raise GeometryMismatchError("origins differ by more than 1e-6")
    if not np.allclose(ga.directions, gb.directions, rtol=0.0, atol=_GEOM_TOL):
        raise GeometryMismatchError("direction matrices differ by more than 1e-6")


def _counts(a: Volume, b: Volume) -> tuple[int, int, int]:
    fa = a.voxels != 0
    fb = b.voxels != 0
    return (
        int(np.count_nonzero(fa)),
        int(np.count_nonzero(fb)),
        int(np.count_nonzero(fa & fb)),
    )


def dice_with_warnings(a: Volume, b: Volume) -> tuple[float, tuple[str, ...]]:
    """Dice coefficient plus any advisory notes (e.g. both masks empty)."""
    _require_same_grid(a, b)
    na, nb, ni = _counts(a, b)
    if na + nb == 0:
        return 1.0, ("both masks are empty; dice defined as 1.0",)
    return 2.0 * ni / (na + nb), ()


def dice(a: Volume, b: Volume) -> float:
    """Dice overlap 2|A*B| / (|A|+|B|); any nonzero voxel is foreground."""
    return dice_with_warnings(a, b)[0]


def _boundary_array(m: Volume) -> np.ndarray:
    """(N, 3) sorted integer indices of foreground voxels touching background.

    A voxel is boundary when any of its six face neighbors is background
    or lies outside the grid.
    """
    fg = m.as_array() != 0
    if not fg.any():
        return np.zeros((0, 3), dtype=np.intp)
    surrounded = fg.copy()
    for axis in range(3):
        for sign in (1, -1):
            nb = np.zeros_like(fg)
            src = [slice(None)] * 3
            dst = [slice(None)] * 3
            if sign > 0:
                dst[axis] = slice(0, -1)
                src[axis] = slice(1, None)
            else:
                dst[axis] = slice(1, None)
                src[axis] = slice(0, -1)
            nb[tuple(dst)] = fg[tuple(src)]
            surrounded &= nb
    return np.argwhere(fg & ~surrounded)


def boundary_voxels(m: Volume) -> set[tuple[int, int, int]]:
    """Index triples (i, j, k) of the 6-connectivity boundary of a mask."""
    return {(int(i), int(j), int(k)) for i, j, k in _boundary_array(m)}


def _directed_max_min_sq(xs: np.ndarray, ys: np.ndarray) -> float:
    """max over xs of min over ys of squared euclidean distance, blocked."""
    best = -math.inf
    block = max(1, (1 << 22) // max(1, len(ys)))
    for start in range(0, len(xs), block):
        chunk = xs[start : start + block]
        dx = chunk[:, 0][:, None] - ys[:, 0][None, :]
        dy = chunk[:, 1][:, None] - ys[:, 1][None, :]
        dz = chunk[:, 2][:, None] - ys[:, 2][None, :]
        d2 = dx * dx + dy * dy + dz * dz
        best = max(best, float(np.max(np.min(d2, axis=1))))
    return best


def hausdorff(a: Volume, b: Volume) -> float:
    """Symmetric Hausdorff distance between mask boundaries, in mm.

    Boundary voxel centers are mapped through the shared affine to world
    space; the result is the max of the two directed distances.
    """
    _require_same_grid(a, b)
    ia = _boundary_array(a)
    ib = _boundary_array(b)
    if len(ia) == 0 or len(ib) == 0:
        raise EmptyMaskError("hausdorff requires two nonempty masks")
    wa = index_to_world(a.geometry, ia.astype(float))
    wb = index_to_world(a.geometry, ib.astype(float))
    d2 = max(_directed_max_min_sq(wa, wb), _directed_max_min_sq(wb, wa))
    return math.sqrt(d2)


@dataclass(frozen=True)
class MetricReport:
    """Comparison summary for a pair of masks on the same grid."""

    dice: float
    hausdorff_mm: float
    voxels_a: int
    voxels_b: int
    voxels_intersection: int
    sizes: tuple[int, int, int]
    warnings: tuple[str, ...] = ()
    created_at: str = ""


def build_report(a: Volume, b: Volume) -> MetricReport:
    _require_same_grid(a, b)
    na, nb, ni = _counts(a, b)
    d, warnings = dice_with_warnings(a, b)
    h = hausdorff(a, b)
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return MetricReport(d, h, na, nb, ni, a.geometry.sizes, warnings, stamp)


def report_dict(r: MetricReport) -> dict:
    return {
        "dice": r.dice,
        "hausdorff_mm": r.hausdorff_mm,
        "voxels_a": r.voxels_a,
        "voxels_b": r.voxels_b,
        "voxels_intersection": r.voxels_intersection,
        "warnings": list(r.warnings),
        "sizes": list(r.sizes),
        "created_at": r.created_at,
    }


def render_report(r: MetricReport, fmt: str = "json") -> bytes:
    """Serialize a report as pretty JSON or aligned plain text."""
    if fmt == "json":
        return (json.dumps(report_dict(r), indent=2) + "\n").encode("ascii")
    if fmt == "text":
        lines = [
            f"dice {r.dice:.4f}",
            f"hausdorff_mm {r.hausdorff_mm:.4f}",
            f"voxels_a {r.voxels_a}",
            f"voxels_b {r.voxels_b}",
            f"voxels_intersection {r.voxels_intersection}",
        ]
        lines.extend(f"warning {w}" for w in r.warnings)
        return ("\n".join(lines) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")
