"""Shared builders and independent brute-force oracles for the test suite.

The oracles here deliberately avoid the production code paths: mask
filling walks every voxel center through the even-odd predicate,
boundary extraction is a scalar triple loop, and the Hausdorff oracle is
a naive double loop over boundary points.  Production results are
checked against these for exact agreement.
"""

from __future__ import annotations

import math

import numpy as np

from segstudio import (
    Contour,
    ContourSet,
    MalformedError,
    MetaDescriptor,
    Volume,
    contour_is_simple,
    index_to_world,
    point_in_polygon,
)

IDENTITY_DIRECTIONS = ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0))


def identity_meta(nx: int, ny: int, nz: int) -> MetaDescriptor:
    return MetaDescriptor(
        sizes=(nx, ny, nz),
        space_origin=(0.0, 0.0, 0.0),
        space_directions=IDENTITY_DIRECTIONS,
        space="right-anterior-superior",
    )


def square_fixture() -> tuple[MetaDescriptor, ContourSet]:
    """20x20x10 identity grid with the 10x10 square contour on slice 5."""
    meta = identity_meta(20, 20, 10)
    contour = Contour(slice_k=5, points=[(2.0, 2.0), (12.0, 2.0), (12.0, 12.0), (2.0, 12.0)])
    return meta, ContourSet(contours=(contour,), source_geometry=meta)


def bowtie_contour(slice_k: int = 0) -> Contour:
    """Self-intersecting hourglass; rejected unless lenient."""
    return Contour(slice_k=slice_k, points=[(0.0, 0.0), (4.0, 4.0), (4.0, 0.0), (0.0, 4.0)])


def l_hexagon(slice_k: int = 0) -> Contour:
    """Concave L-shaped hexagon, area 12."""
    return Contour(
        slice_k=slice_k,
        points=[(0.0, 0.0), (4.0, 0.0), (4.0, 2.0), (2.0, 2.0), (2.0, 4.0), (0.0, 4.0)],
    )


def random_simple_polygon(
    rng: np.random.Generator,
    slice_k: int,
    center: tuple[float, float],
    radius_range: tuple[float, float],
    n_range: tuple[int, int] = (3, 12),
) -> Contour:
    """Star-shaped simple polygon: sorted angles, random radii, 1e-3 grid coords."""
    cx, cy = center
    r_lo, r_hi = radius_range
    while True:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        angles = np.sort(rng.uniform(0.0, 2.0 * math.pi, n))
        gaps = np.diff(angles, append=angles[0] + 2.0 * math.pi)
        if float(np.min(gaps)) < 0.05:
            continue
        radii = rng.uniform(r_lo, r_hi, n)
        pts = np.round(
            np.column_stack([cx + radii * np.cos(angles), cy + radii * np.sin(angles)]), 3
        )
        try:
            contour = Contour(slice_k=slice_k, points=pts)
        except MalformedError:
            continue
        if contour_is_simple(contour):
            return contour


def oracle_mask_array(cs: ContourSet, meta: MetaDescriptor, fg: int = 1) -> np.ndarray:
    """Brute-force fill: every voxel center tested with the even-odd predicate."""
    nx, ny, nz = meta.sizes
    arr = np.zeros((nx, ny, nz), dtype=np.uint8)
    for contour in cs.contours:
        k = contour.slice_k
        for i in range(nx):
            for j in range(ny):
                if point_in_polygon((float(i), float(j)), contour):
                    arr[i, j, k] = fg
    return arr


_SIX_NEIGHBORS = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))


def oracle_boundary(vol: Volume) -> list[tuple[int, int, int]]:
    """Scalar 6-connectivity boundary scan, lexicographic order."""
    arr = vol.as_array() != 0
    nx, ny, nz = arr.shape
    out = []
    for i in range(nx):
        for j in range(ny):
            for k in range(nz):
                if not arr[i, j, k]:
                    continue
                for di, dj, dk in _SIX_NEIGHBORS:
                    ni, nj, nk = i + di, j + dj, k + dk
                    if not (0 <= ni < nx and 0 <= nj < ny and 0 <= nk < nz) or not arr[ni, nj, nk]:
                        out.append((i, j, k))
                        break
    return out


def oracle_hausdorff_mm(a: Volume, b: Volume) -> float:
    """Naive double-loop max-min over boundary voxel centers in world mm.

    Index-to-world mapping is shared with production (it is the
    coordinate engine under separate test); the distance search itself
    is independent.
    """
    pa = oracle_boundary(a)
    pb = oracle_boundary(b)
    if not pa or not pb:
        raise ValueError("oracle needs nonempty boundaries")
    wa = index_to_world(a.geometry, np.array(pa, dtype=float))
    wb = index_to_world(b.geometry, np.array(pb, dtype=float))
    best = -math.inf
    for xs, ys in ((wa, wb), (wb, wa)):
        for x in xs:
            nearest = math.inf
            for y in ys:
                dx = x[0] - y[0]
                dy = x[1] - y[1]
                dz = x[2] - y[2]
                d2 = dx * dx + dy * dy + dz * dz
                if d2 < nearest:
                    nearest = d2
            if nearest > best:
                best = nearest
    return math.sqrt(best)


def random_geometry(rng: np.random.Generator):
    """Well-conditioned random affine: rotation-ish directions, random origin."""
    from segstudio import VolumeGeometry

    while True:
        directions = rng.uniform(-2.0, 2.0, (3, 3))
        if abs(np.linalg.det(directions)) > 0.5:
            break
    sizes = tuple(int(s) for s in rng.integers(2, 9, 3))
    origin = rng.uniform(-100.0, 100.0, 3)
    return VolumeGeometry(sizes=sizes, directions=directions, origin=origin, basis="RAS")


def random_mask(rng: np.random.Generator, meta: MetaDescriptor, fill: float = 0.3):
    """Random blob-ish mask: a few solid boxes unioned, possibly empty."""
    from segstudio import Mask

    nx, ny, nz = meta.sizes
    arr = np.zeros((nx, ny, nz), dtype=np.uint8)
    for _ in range(int(rng.integers(1, 4))):
        if rng.random() > fill:
            continue
        x0, y0, z0 = (int(rng.integers(0, s)) for s in (nx, ny, nz))
        x1 = int(rng.integers(x0, nx))
        y1 = int(rng.integers(y0, ny))
        z1 = int(rng.integers(z0, nz))
        arr[x0 : x1 + 1, y0 : y1 + 1, z0 : z1 + 1] = 1
    return Mask(meta.to_geometry(), arr.reshape(-1, order="F"))
