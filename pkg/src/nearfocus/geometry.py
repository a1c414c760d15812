"""Points, planar arrays, and sampling grids.

All lengths are meters. Arrays are regular lattices of isotropic point
sources centered on `center`; grids are lines or planes addressed by
offsets along their axis vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

PLANE_AXES = {
    "xz": ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
    "xy": ((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
    "yz": ((0.0, 1.0, 0.0), (0.0, 0.0, 1.0)),
}


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        for c in (self.x, self.y, self.z):
            if not math.isfinite(c):
                raise ValueError(f"non-finite coordinate in {self!r}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @staticmethod
    def of(v) -> "Point3":
        a = np.asarray(v, dtype=float).reshape(3)
        return Point3(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class UniformPlanarArray:
    """Uniform planar array: `rows x cols` elements at spacing `spacing_m`.

    `plane` names the lattice plane ("xz", "xy", "yz"); element (i, j) sits at
    center + (i - (rows-1)/2) * spacing * u + (j - (cols-1)/2) * spacing * v
    with (u, v) the plane's in-plane unit vectors. The aperture diameter is
    the lattice diagonal spacing * sqrt((rows-1)^2 + (cols-1)^2).
    """

    rows: int
    cols: int
    spacing_m: float
    carrier_wavelength_m: float
    center: Point3 = field(default=Point3(0.0, 0.0, 0.0))
    plane: str = "xz"

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be >= 1")
        if not (self.spacing_m > 0):
            raise ValueError("spacing_m must be > 0")
        if not (self.carrier_wavelength_m > 0):
            raise ValueError("carrier_wavelength_m must be > 0")
        if self.plane not in PLANE_AXES:
            raise ValueError(f"plane must be one of {sorted(PLANE_AXES)}")

    @property
    def num_elements(self) -> int:
        return self.rows * self.cols

    @property
    def aperture_diameter_m(self) -> float:
        return self.spacing_m * math.hypot(self.rows - 1, self.cols - 1)


def element_positions(array: UniformPlanarArray) -> np.ndarray:
    """Element positions as an (N, 3) float array in row-major (i, j) order."""
    u, v = (np.array(a) for a in PLANE_AXES[array.plane])
    i = (np.arange(array.rows) - (array.rows - 1) / 2) * array.spacing_m
    j = (np.arange(array.cols) - (array.cols - 1) / 2) * array.spacing_m
    ii, jj = np.meshgrid(i, j, indexing="ij")
    pts = ii.ravel()[:, None] * u[None, :] + jj.ravel()[:, None] * v[None, :]
    return pts + array.center.as_array()[None, :]


def _unit(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(3)
    n = np.linalg.norm(a)
    if n == 0:
        raise ValueError("zero-length axis vector")
    return a / n


def _span(extent) -> tuple[float, float]:
    # scalar e spans [0, e]; a pair is (lo, hi) offsets from the origin
    if np.isscalar(extent):
        return (0.0, float(extent))
    lo, hi = (float(x) for x in extent)
    if not hi > lo:
        raise ValueError("extent upper bound must exceed lower bound")
    return (lo, hi)


@dataclass(frozen=True)
class SamplingGrid:
    """A line or plane of sample points.

    Points are origin + t1 * axes[0] (+ t2 * axes[1] for planes), with t_k
    running over `resolution[k]` evenly spaced values spanning `extents[k]`.
    An extent may be a scalar e (spanning [0, e]) or a (lo, hi) pair of
    signed offsets; a symmetric pair with odd resolution includes the origin.
    """

    kind: str
    origin: Point3
    axes: tuple
    extents: tuple
    resolution: tuple

    def __post_init__(self) -> None:
        if self.kind not in ("line", "plane"):
            raise ValueError("kind must be 'line' or 'plane'")
        naxes = 1 if self.kind == "line" else 2
        if len(self.axes) != naxes or len(self.extents) != naxes or len(self.resolution) != naxes:
            raise ValueError(f"{self.kind} grid needs {naxes} axis/extent/resolution entries")
        axes = tuple(_unit(a) for a in self.axes)
        if naxes == 2 and abs(float(axes[0] @ axes[1])) > 1e-12:
            raise ValueError("plane axes must be orthonormal")
        for r in self.resolution:
            if int(r) < 2:
                raise ValueError("resolution must be >= 2 per axis")
        object.__setattr__(self, "axes", tuple(tuple(a) for a in axes))
        object.__setattr__(self, "extents", tuple(_span(e) for e in self.extents))
        object.__setattr__(self, "resolution", tuple(int(r) for r in self.resolution))

    def axis_coords(self) -> list[np.ndarray]:
        """Per-axis offset values t_k in meters."""
        return [
            np.linspace(lo, hi, res)
            for (lo, hi), res in zip(self.extents, self.resolution)
        ]

    def shape(self) -> tuple:
        return self.resolution

    def num_points(self) -> int:
        return int(np.prod(self.resolution))

    def plane_coords(self, point: Point3) -> tuple[float, ...]:
        """Project a 3D point onto the grid axes (offsets from origin)."""
        rel = point.as_array() - self.origin.as_array()
        return tuple(float(rel @ np.array(a)) for a in self.axes)


def grid_points(grid: SamplingGrid) -> np.ndarray:
    """Sample points as a (P, 3) array, row-major over axis offsets."""
    coords = grid.axis_coords()
    origin = grid.origin.as_array()
    if grid.kind == "line":
        u = np.array(grid.axes[0])
        return origin[None, :] + coords[0][:, None] * u[None, :]
    u, v = (np.array(a) for a in grid.axes)
    t1, t2 = np.meshgrid(coords[0], coords[1], indexing="ij")
    return origin[None, :] + t1.ravel()[:, None] * u[None, :] + t2.ravel()[:, None] * v[None, :]
