"""Core grid model: volume geometry, voxel storage, index/world transforms.

Conventions used throughout the package:

* ``directions`` column j is the world displacement in millimeters per
  unit step along index axis j, so voxel spacing is the column norms.
* Voxel centers sit at integer continuous indices: the center of voxel
  (i, j, k) is ``index_to_world((i, j, k))``.
* The linear voxel buffer runs with the first index axis fastest:
  buffer position = i + nx*j + nx*ny*k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MalformedError, SingularGeometryError, UnknownBasisError

RAS = "RAS"
LPS = "LPS"

SCALAR_DTYPES = tuple(np.dtype(t) for t in ("uint8", "int16", "uint16", "float32"))

_DET_EPS = 1e-12


def _frozen_array(value, shape) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.shape != shape:
        raise MalformedError(f"expected array of shape {shape}, got {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class VolumeGeometry:
    """Voxel counts plus the affine mapping index space into world mm."""

    sizes: tuple[int, int, int]
    directions: np.ndarray  # 3x3; column j = mm step along index axis j
    origin: np.ndarray      # (3,) mm, world position of voxel (0, 0, 0)
    basis: str = RAS

    def __post_init__(self):
        try:
            sizes = tuple(int(s) for s in self.sizes)
        except (TypeError, ValueError) as exc:
            raise MalformedError(f"sizes must be integers, got {self.sizes!r}") from exc
        if len(sizes) != 3 or any(s < 1 for s in sizes):
            raise MalformedError(f"sizes must be 3 positive integers, got {self.sizes!r}")
        directions = _frozen_array(self.directions, (3, 3))
        origin = _frozen_array(self.origin, (3,))
        if self.basis not in (RAS, LPS):
            raise UnknownBasisError(f"unknown anatomical basis {self.basis!r}")
        det = float(np.linalg.det(directions))
        if abs(det) <= _DET_EPS:
            raise SingularGeometryError(f"direction matrix is singular (|det| = {abs(det):.3e})")
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "directions", directions)
        object.__setattr__(self, "origin", origin)
        inverse = np.linalg.inv(directions)
        inverse.setflags(write=False)
        object.__setattr__(self, "_inverse", inverse)

    @property
    def voxel_count(self) -> int:
        nx, ny, nz = self.sizes
        return nx * ny * nz

    @property
    def spacing(self) -> np.ndarray:
        """Per-axis voxel spacing in mm (column norms of ``directions``)."""
        return np.linalg.norm(self.directions, axis=0)

    def allclose(self, other: "VolumeGeometry", tol: float = 1e-9) -> bool:
        return (
            self.sizes == other.sizes
            and self.basis == other.basis
            and bool(np.allclose(self.directions, other.directions, rtol=0.0, atol=tol))
            and bool(np.allclose(self.origin, other.origin, rtol=0.0, atol=tol))
        )


def index_to_world(geom: VolumeGeometry, p) -> np.ndarray:
    """Map continuous index coordinates to world mm.

    Accepts a single (3,) point or an (N, 3) batch.  The point may lie
    outside the grid.
    """
    p = np.asarray(p, dtype=float)
    return geom.origin + p @ geom.directions.T


def world_to_index(geom: VolumeGeometry, w) -> np.ndarray:
    """Inverse of :func:`index_to_world` (single point or batch)."""
    w = np.asarray(w, dtype=float)
    return (w - geom.origin) @ geom._inverse.T


@dataclass(frozen=True, eq=False)
class Volume:
    """A geometry plus its linear scalar buffer (first axis fastest)."""

    geometry: VolumeGeometry
    voxels: np.ndarray

    def __post_init__(self):
        vox = np.array(self.voxels).reshape(-1)
        if vox.dtype not in SCALAR_DTYPES:
            raise MalformedError(
                f"unsupported scalar type {vox.dtype}; expected one of "
                + ", ".join(d.name for d in SCALAR_DTYPES)
            )
        if vox.size != self.geometry.voxel_count:
            raise MalformedError(
                f"voxel buffer has {vox.size} samples, geometry wants {self.geometry.voxel_count}"
            )
        vox.setflags(write=False)
        object.__setattr__(self, "voxels", vox)

    @property
    def scalar_type(self) -> str:
        return self.voxels.dtype.name

    def voxel(self, i: int, j: int, k: int):
        nx, ny, _ = self.geometry.sizes
        return self.voxels[i + nx * (j + ny * k)]

    def as_array(self) -> np.ndarray:
        """(nx, ny, nz) view; ``a[i, j, k]`` addresses voxel (i, j, k)."""
        return self.voxels.reshape(self.geometry.sizes, order="F")

    def slice_xy(self, k: int) -> np.ndarray:
        """(ny, nx) view of axial slice k (row = j, column = i)."""
        nx, ny, _ = self.geometry.sizes
        return self.voxels[nx * ny * k : nx * ny * (k + 1)].reshape(ny, nx)


@dataclass(frozen=True, eq=False)
class Mask(Volume):
    """Binary label volume: every voxel is 0 or ``foreground_value``."""

    foreground_value: int = 1

    def __post_init__(self):
        super().__post_init__()
        fg = int(self.foreground_value)
        if not 1 <= fg <= 255:
            raise MalformedError(f"foreground value must be in 1..255, got {fg}")
        if self.voxels.dtype != np.uint8:
            raise MalformedError(f"mask voxels must be uint8, got {self.scalar_type}")
        if self.voxels.size and not bool(np.all((self.voxels == 0) | (self.voxels == fg))):
            raise MalformedError(f"mask voxels must be 0 or {fg}")
        object.__setattr__(self, "foreground_value", fg)


def reorient_to_ras(v: Volume) -> Volume:
    """Re-express world coordinates in the RAS basis.

    RAS input comes back unchanged.  For LPS input the first two
    components of the origin and of every direction column flip sign, so
    every voxel keeps its physical position; the voxel buffer is shared
    untouched.
    """
    g = v.geometry
    if g.basis == RAS:
        return v
    if g.basis != LPS:
        raise UnknownBasisError(f"cannot reorient from basis {g.basis!r}")
    flip = np.diag([-1.0, -1.0, 1.0])
    geom = VolumeGeometry(g.sizes, flip @ g.directions, flip @ g.origin, RAS)
    if isinstance(v, Mask):
        return Mask(geom, v.voxels, v.foreground_value)
    return Volume(geom, v.voxels)
