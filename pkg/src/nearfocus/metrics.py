"""Spot-quality measures: HPBW, BFR, and spacing/size trade-off sweeps."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .beamforming import mrt_weights
from .channel import steering_vector
from .errors import MultiplePeaks, NoCrossing, WindowWarning
from .fieldmap import FieldMap, evaluate_field
from .geometry import Point3, SamplingGrid, UniformPlanarArray, grid_points


@dataclass(frozen=True)
class SpotMetrics:
    peak_power: float
    peak_location: Point3
    hpbw_m: float | None
    bfr_m: float | None
    eta: float | None
    num_significant_peaks: int
    normalization: str


def hpbw(positions_m: np.ndarray, powers: np.ndarray) -> float:
    """Half-power width of a 1D profile.

    Walks outward from the unique global maximum to the first crossing of
    half-peak on each side, locating each crossing by linear interpolation.
    Raises NoCrossing (naming the side) if a flank never falls below half
    power; warns MultiplePeaks when secondary maxima above 0.9 peak exist.
    """
    x = np.asarray(positions_m, dtype=float)
    p = np.asarray(powers, dtype=float)
    if x.ndim != 1 or x.shape != p.shape:
        raise ValueError("positions and powers must be matching 1D arrays")
    if x.size < 5:
        raise ValueError("profile needs at least 5 samples")
    if np.any(np.diff(x) <= 0):
        raise ValueError("positions must be strictly increasing")
    k = int(np.argmax(p))
    peak = p[k]
    if k == 0 or k == x.size - 1:
        raise ValueError("profile maximum must be at an interior sample")
    if np.count_nonzero(p == peak) > 1:
        raise ValueError("profile maximum is not unique")

    interior = p[1:-1]
    local_max = (interior > p[:-2]) & (interior > p[2:]) & (interior > 0.9 * peak)
    if np.count_nonzero(local_max) > 1:
        warnings.warn("multiple near-peak maxima in profile", MultiplePeaks)

    half = 0.5 * peak

    def cross(side: str) -> float:
        idx = range(k, 0, -1) if side == "left" else range(k, x.size - 1)
        for i in idx:
            j = i - 1 if side == "left" else i + 1
            if p[j] < half <= p[i]:
                # linear interpolation between samples i and j
                t = (half - p[i]) / (p[j] - p[i])
                return float(x[i] + t * (x[j] - x[i]))
        raise NoCrossing(side)

    return cross("right") - cross("left")


def bfr(fmap: FieldMap, dfp: Point3, eta: float) -> float:
    """Beamfocusing radius: smallest R whose disk around `dfp` holds eta of
    the window's power.

    Cells are sorted by distance to the DFP (row-major index breaks ties)
    and accumulated until the fraction is reached. Warns WindowWarning when
    boundary cells hold more than 10% of the total, which signals that the
    reference plane is truncated too tightly.
    """
    if not (0.0 < eta < 1.0):
        raise ValueError("eta must be in (0, 1)")
    if fmap.grid.kind != "plane":
        raise ValueError("bfr needs a 2D map")
    pts = grid_points(fmap.grid)
    p = fmap.power
    total = float(p.sum())
    if total <= 0:
        raise ValueError("map carries no power")

    r1, r2 = fmap.grid.shape()
    edge = np.zeros((r1, r2), dtype=bool)
    edge[0, :] = edge[-1, :] = True
    edge[:, 0] = edge[:, -1] = True
    leak = float(p[edge.ravel()].sum())
    if leak > 0.10 * total:
        warnings.warn(
            f"boundary cells hold {100 * leak / total:.1f}% of window power",
            WindowWarning,
        )

    d = np.linalg.norm(pts - dfp.as_array()[None, :], axis=1)
    order = np.lexsort((np.arange(d.size), d))
    cum = np.cumsum(p[order])
    k = int(np.searchsorted(cum, eta * total))
    return float(d[order][k])


def profile_through(fmap: FieldMap, dfp: Point3, axis: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Extract the 1D profile of a plane map along `axis` through the DFP's cell."""
    if fmap.grid.kind != "plane":
        raise ValueError("profile extraction needs a 2D map")
    t = fmap.grid.plane_coords(dfp)
    coords = fmap.grid.axis_coords()
    p = fmap.as_grid()
    if axis == 0:
        j = int(np.argmin(np.abs(coords[1] - t[1])))
        return coords[0], p[:, j]
    i = int(np.argmin(np.abs(coords[0] - t[0])))
    return coords[1], p[i, :]


def _line_through(dfp: Point3, axis: str, span: tuple[float, float], samples: int) -> SamplingGrid:
    if axis == "y-line":
        origin = Point3(dfp.x, 0.0, dfp.z)
        direction = (0.0, 1.0, 0.0)
        return SamplingGrid("line", origin, (direction,), (span,), (samples,))
    if axis == "radial":
        r = np.linalg.norm(dfp.as_array())
        if r == 0:
            raise ValueError("radial profile undefined for a DFP at the origin")
        u = dfp.as_array() / r
        return SamplingGrid("line", Point3(0.0, 0.0, 0.0), (tuple(u),), (span,), (samples,))
    raise ValueError("axis must be 'y-line' or 'radial'")


def line_profile(
    array: UniformPlanarArray,
    dfp: Point3,
    gain_model: str = "inverse_distance",
    axis: str = "y-line",
    span: tuple[float, float] = (0.6, 1.4),
    samples: int = 801,
) -> tuple[np.ndarray, np.ndarray]:
    """MRT power profile along a line through the DFP (positions, powers)."""
    line = _line_through(dfp, axis, span, samples)
    return _profile(array, dfp, gain_model, line)


def _profile(array, dfp, gain_model, line):
    w = mrt_weights(steering_vector(array, dfp, gain_model))
    fmap = evaluate_field(array, w, line, gain_model)
    return line.axis_coords()[0], fmap.power


def spacing_tradeoff(
    rows: int,
    cols: int,
    wavelength_m: float,
    dfp: Point3,
    spacing_ratios: list[float],
    gain_model: str = "inverse_distance",
    axis: str = "y-line",
    span: tuple[float, float] = (0.6, 1.4),
    samples: int = 801,
) -> list[tuple[float, float, float]]:
    """Sweep interelement spacing; returns (ratio, relative peak power, hpbw).

    Peak powers are reported relative to the first ratio in the list (the
    half-wavelength reference when the sweep is {0.5, 1, 1.5}).
    """
    if not spacing_ratios or any(r <= 0 for r in spacing_ratios):
        raise ValueError("spacing ratios must be positive")
    line = _line_through(dfp, axis, span, samples)
    rows_out = []
    for ratio in spacing_ratios:
        arr = UniformPlanarArray(rows, cols, ratio * wavelength_m, wavelength_m)
        x, p = _profile(arr, dfp, gain_model, line)
        rows_out.append((ratio, float(p.max()), hpbw(x, p)))
    # report peak powers relative to the half-wavelength case when swept
    ref = next((pk for r, pk, _ in rows_out if abs(r - 0.5) < 1e-12), rows_out[0][1])
    return [(r, pk / ref, w) for r, pk, w in rows_out]


def size_tradeoff(
    sizes: list[int],
    wavelength_m: float,
    dfp: Point3,
    spacing_ratio: float = 0.5,
    gain_model: str = "inverse_distance",
    axis: str = "y-line",
    span: tuple[float, float] = (0.3, 1.9),
    samples: int = 1601,
) -> list[tuple[int, float]]:
    """HPBW per square array size (rows = cols = size) at fixed spacing.

    If a profile never crosses half power inside the window, the window is
    doubled about its center and the measurement retried once.
    """
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be >= 1")
    out = []
    for s in sizes:
        arr = UniformPlanarArray(s, s, spacing_ratio * wavelength_m, wavelength_m)
        line = _line_through(dfp, axis, span, samples)
        try:
            x, p = _profile(arr, dfp, gain_model, line)
            out.append((s, hpbw(x, p)))
        except (NoCrossing, ValueError):
            mid = 0.5 * (span[0] + span[1])
            half = span[1] - span[0]
            wide = (mid - half, mid + half)
            line = _line_through(dfp, axis, wide, 2 * samples - 1)
            try:
                x, p = _profile(arr, dfp, gain_model, line)
                out.append((s, hpbw(x, p)))
            except (NoCrossing, ValueError) as exc:
                # degenerate profiles (flat or monotone) have no half-power width
                if isinstance(exc, NoCrossing):
                    raise
                raise NoCrossing("flat or monotone profile") from exc
    return out


def spot_metrics(
    fmap: FieldMap,
    dfp: Point3,
    eta: float = 0.9,
    peak_threshold: float = 0.5,
    hpbw_axis: int = 0,
) -> SpotMetrics:
    """Bundle the spot measures of a plane map around one DFP."""
    from .fieldmap import find_focal_peaks

    peaks = find_focal_peaks(fmap, peak_threshold)
    k = int(np.argmax(fmap.power))
    loc = Point3.of(grid_points(fmap.grid)[k])
    try:
        x, p = profile_through(fmap, dfp, axis=hpbw_axis)
        width = hpbw(x, p)
    except (NoCrossing, ValueError):
        width = None
    return SpotMetrics(
        peak_power=float(fmap.power[k]),
        peak_location=loc,
        hpbw_m=width,
        bfr_m=bfr(fmap, dfp, eta),
        eta=eta,
        num_significant_peaks=len(peaks),
        normalization=fmap.normalization,
    )
