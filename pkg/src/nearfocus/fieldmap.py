"""Power-density evaluation over sampling grids.

Per stream m, s_m(r) = |a(r)^T w_m|^2; independent streams add in power.
Evaluation is chunked over grid points and may fan out over threads; the
result is identical for any chunking or thread count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .beamforming import BeamWeights
from .channel import MIN_APERTURE_CLEARANCE_M, _check_gain, gain
from .errors import GridTooSmall, PointOnAperture
from .geometry import Point3, SamplingGrid, UniformPlanarArray, element_positions, grid_points

_CHUNK = 4096

NORMALIZATIONS = ("raw", "peak_one")


@dataclass(frozen=True)
class FieldMap:
    """Sampled power density over a grid, with optional per-stream split."""

    grid: SamplingGrid
    power: np.ndarray
    per_stream: np.ndarray
    normalization: str = "raw"

    @property
    def num_streams(self) -> int:
        return self.per_stream.shape[0]

    def as_grid(self) -> np.ndarray:
        """Combined power reshaped to the grid's (res1[, res2]) shape."""
        return self.power.reshape(self.grid.shape())

    def stream_grid(self, m: int) -> np.ndarray:
        return self.per_stream[m].reshape(self.grid.shape())


def _distances(pts, pos):
    # |p - e| via |p|^2 + |e|^2 - 2 p.e (BLAS); the expansion loses digits
    # only when d is tiny, so near-aperture entries are recomputed exactly
    d2 = (
        np.sum(pts * pts, axis=1)[:, None]
        + np.sum(pos * pos, axis=1)[None, :]
        - 2.0 * (pts @ pos.T)
    )
    d = np.sqrt(np.maximum(d2, 0.0))
    close = d < 1e-3
    if np.any(close):
        i, j = np.nonzero(close)
        d[i, j] = np.linalg.norm(pts[i] - pos[j], axis=1)
    return d


def _eval_chunk(pts, pos, wmat, lam, gain_model, out, lo):
    d = _distances(pts, pos)
    dmin = float(d.min())
    if dmin < MIN_APERTURE_CLEARANCE_M:
        raise PointOnAperture(
            f"grid point within {dmin:.3e} m of an element (< {MIN_APERTURE_CLEARANCE_M} m)"
        )
    a = gain(d, lam, gain_model) * np.exp(-2j * np.pi * d / lam)
    out[:, lo:lo + pts.shape[0]] = np.abs(a @ wmat.T).T ** 2


def evaluate_field(
    array: UniformPlanarArray,
    weights: BeamWeights,
    grid: SamplingGrid,
    gain_model: str = "inverse_distance",
    normalization: str = "raw",
    threads: int = 1,
) -> FieldMap:
    """Evaluate per-stream and combined power density over `grid`."""
    _check_gain(gain_model)
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    if weights.weights.shape[0] != array.num_elements:
        raise ValueError("weight length does not match the array")
    pos = element_positions(array)
    pts = grid_points(grid)
    wmat = weights.chain_matrix()
    lam = array.carrier_wavelength_m
    per_stream = np.empty((wmat.shape[0], pts.shape[0]), dtype=float)

    spans = [(lo, pts[lo:lo + _CHUNK]) for lo in range(0, pts.shape[0], _CHUNK)]
    if threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futs = [
                pool.submit(_eval_chunk, blk, pos, wmat, lam, gain_model, per_stream, lo)
                for lo, blk in spans
            ]
            for f in futs:
                f.result()
    else:
        for lo, blk in spans:
            _eval_chunk(blk, pos, wmat, lam, gain_model, per_stream, lo)

    power = per_stream.sum(axis=0)
    if normalization == "peak_one":
        # x / x is exactly 1.0 in IEEE arithmetic, so the peak lands on 1
        peak = float(power.max())
        if peak > 0:
            per_stream = per_stream / peak
            power = power / peak
    return FieldMap(grid=grid, power=power, per_stream=per_stream, normalization=normalization)


def find_focal_peaks(fmap: FieldMap, relative_threshold: float) -> list[tuple[Point3, float]]:
    """Interior 8-neighborhood maxima at or above `relative_threshold` of the map peak.

    Returns (location, power) pairs sorted by descending power. Maxima must
    exceed all eight neighbors strictly, so plateau cells are not reported.
    """
    if not (0.0 < relative_threshold <= 1.0):
        raise ValueError("relative_threshold must be in (0, 1]")
    if fmap.grid.kind != "plane":
        raise GridTooSmall("peak detection needs a 2D grid")
    r1, r2 = fmap.grid.shape()
    if r1 < 3 or r2 < 3:
        raise GridTooSmall(f"grid {r1}x{r2} too small for 8-neighborhood peaks")
    p = fmap.as_grid()
    cutoff = relative_threshold * float(p.max())
    inner = p[1:-1, 1:-1]
    mask = inner >= cutoff
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            mask &= inner > p[1 + di:r1 - 1 + di, 1 + dj:r2 - 1 + dj]
    t1, t2 = fmap.grid.axis_coords()
    origin = fmap.grid.origin.as_array()
    u, v = (np.array(a) for a in fmap.grid.axes)
    out = []
    for i, j in np.argwhere(mask):
        xyz = origin + t1[i + 1] * u + t2[j + 1] * v
        out.append((Point3.of(xyz), float(inner[i, j])))
    out.sort(key=lambda t: -t[1])
    return out
