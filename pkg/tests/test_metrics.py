"""Spot-quality measures: HPBW, BFR, and the trade-off sweeps."""
from __future__ import annotations

import numpy as np
import pytest

from nearfocus import (
    FieldMap,
    MultiplePeaks,
    NoCrossing,
    Point3,
    SamplingGrid,
    UniformPlanarArray,
    WindowWarning,
    bfr,
    evaluate_field,
    hpbw,
    line_profile,
    mrt_weights,
    size_tradeoff,
    spacing_tradeoff,
    spot_metrics,
    steering_vector,
)

WAVELENGTH = 299792458.0 / 28e9


def upa(n, ratio=0.5, plane="xz"):
    return UniformPlanarArray(n, n, ratio * WAVELENGTH, WAVELENGTH, plane=plane)


def transverse_map(arr, dfp, half, res, axes=((1.0, 0.0, 0.0), (0.0, 0.0, 1.0))):
    grid = SamplingGrid("plane", dfp, axes, ((-half, half), (-half, half)), (res, res))
    w = mrt_weights(steering_vector(arr, dfp, "inverse_distance"))
    return evaluate_field(arr, w, grid, "inverse_distance")


def test_hpbw_triangular_profile():
    w = 0.8
    x = np.linspace(-w, w, 33)
    p = 1.0 - np.abs(x) / w
    assert hpbw(x, p) == pytest.approx(w, rel=1e-12)


def test_hpbw_scale_invariant():
    x = np.linspace(-1.0, 1.0, 41)
    p = np.exp(-4.0 * x ** 2)
    assert hpbw(x, 7.3e5 * p) == pytest.approx(hpbw(x, p), rel=1e-12)


def test_hpbw_reports_missing_crossing_side():
    x = np.linspace(0.0, 1.0, 5)
    p = np.array([0.2, 0.8, 1.0, 0.9, 0.85])
    with pytest.raises(NoCrossing) as exc:
        hpbw(x, p)
    assert exc.value.side == "right"


def test_hpbw_warns_on_competing_peaks():
    x = np.linspace(0.0, 1.0, 7)
    p = np.array([0.1, 0.95, 0.2, 1.0, 0.2, 0.6, 0.1])
    with pytest.warns(MultiplePeaks):
        hpbw(x, p)


def test_hpbw_input_validation():
    with pytest.raises(ValueError):
        hpbw(np.linspace(0, 1, 4), np.array([0.1, 1.0, 0.5, 0.1]))
    with pytest.raises(ValueError):
        hpbw(np.linspace(0, 1, 5), np.array([1.0, 0.5, 0.4, 0.3, 0.2]))
    with pytest.raises(ValueError):
        hpbw(np.array([0.0, 0.5, 0.4, 0.7, 1.0]), np.array([0.1, 0.5, 1.0, 0.5, 0.1]))
    flat = np.array([0.1, 1.0, 0.3, 1.0, 0.1])
    with pytest.raises(ValueError):
        hpbw(np.linspace(0, 1, 5), flat)


def test_hpbw_matches_reported_spacing_values():
    """Half-wavelength spacing gives ~8.5 cm on the standard profile; full
    wavelength tightens it to ~4.9 cm."""
    dfp = Point3(0.0, 1.0, -0.5)
    x, p = line_profile(upa(60), dfp)
    assert hpbw(x, p) == pytest.approx(0.085, rel=0.15)
    x, p = line_profile(upa(60, ratio=1.0), dfp)
    assert hpbw(x, p) == pytest.approx(0.049, rel=0.15)


def synthetic_map(values, half=0.5, center=Point3(0.0, 1.0, 0.0)):
    values = np.asarray(values, dtype=float)
    r1, r2 = values.shape
    grid = SamplingGrid(
        "plane",
        center,
        ((1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
        ((-half, half), (-half, half)),
        (r1, r2),
    )
    return FieldMap(grid=grid, power=values.ravel(), per_stream=values.ravel()[None, :])


def test_bfr_degenerate_concentration():
    v = np.zeros((11, 11))
    v[5, 5] = 1.0
    cell = 1.0 / 10
    r = bfr(synthetic_map(v), Point3(0.03, 1.0, -0.02), 0.9)
    assert r <= np.sqrt(2) * cell


def test_bfr_uniform_disk_geometry():
    v = np.ones((101, 101))
    r = bfr(synthetic_map(v), Point3(0.0, 1.0, 0.0), 0.5)
    # half the window area: pi R^2 = 0.5 * 1.0 m^2
    assert np.pi * r * r == pytest.approx(0.5, rel=0.05)


def test_bfr_monotone_in_eta():
    fmap = transverse_map(upa(16), Point3(0.0, 1.0, 0.0), 0.5, 101)
    dfp = Point3(0.0, 1.0, 0.0)
    vals = [bfr(fmap, dfp, eta) for eta in (0.3, 0.6, 0.9)]
    assert vals[0] <= vals[1] <= vals[2]


def test_bfr_shrinks_with_aperture():
    dfp = Point3(0.0, 1.0, 0.0)
    r6 = bfr(transverse_map(upa(6), dfp, 0.5, 101), dfp, 0.9)
    r16 = bfr(transverse_map(upa(16), dfp, 0.5, 101), dfp, 0.9)
    assert r16 < r6


def test_bfr_warns_on_truncated_window():
    v = np.zeros((9, 9))
    v[0, :] = 1.0
    with pytest.warns(WindowWarning):
        bfr(synthetic_map(v), Point3(0.0, 1.0, 0.0), 0.5)


def test_bfr_eta_validation():
    v = np.ones((5, 5))
    with pytest.raises(ValueError):
        bfr(synthetic_map(v), Point3(0.0, 1.0, 0.0), 0.0)
    with pytest.raises(ValueError):
        bfr(synthetic_map(v), Point3(0.0, 1.0, 0.0), 1.0)


def test_rigid_rotation_leaves_metrics():
    """Rotating array, DFP, and window together must not move HPBW or BFR
    by more than two grid cells."""
    half, res = 0.4, 81
    fa = transverse_map(upa(12, plane="xz"), Point3(0.0, 1.0, 0.0), half, res)
    fb = transverse_map(
        upa(12, plane="xy"),
        Point3(0.0, 0.0, 1.0),
        half,
        res,
        axes=((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
    )
    sa = spot_metrics(fa, Point3(0.0, 1.0, 0.0))
    sb = spot_metrics(fb, Point3(0.0, 0.0, 1.0))
    cell = 2 * half / (res - 1)
    assert abs(sa.hpbw_m - sb.hpbw_m) < 2 * cell
    assert abs(sa.bfr_m - sb.bfr_m) < 2 * cell


def test_spacing_tradeoff_relative_to_half_wavelength():
    rows = spacing_tradeoff(40, 40, WAVELENGTH, Point3(0.0, 1.0, -0.5), [0.5, 1.0], samples=401)
    ratios = [r for r, _, _ in rows]
    assert ratios == [0.5, 1.0]
    assert rows[0][1] == 1.0
    widths = [w for _, _, w in rows]
    assert widths[1] < widths[0]


def test_spacing_tradeoff_rejects_bad_ratios():
    with pytest.raises(ValueError):
        spacing_tradeoff(4, 4, WAVELENGTH, Point3(0.0, 1.0, 0.0), [])
    with pytest.raises(ValueError):
        spacing_tradeoff(4, 4, WAVELENGTH, Point3(0.0, 1.0, 0.0), [0.5, -1.0])


def test_size_tradeoff_monotone_subset():
    out = size_tradeoff([10, 20, 40], WAVELENGTH, Point3(0.0, 1.0, -0.5), samples=801)
    widths = [w for _, w in out]
    assert widths[0] >= widths[1] >= widths[2]


def test_size_tradeoff_single_element_has_no_width():
    with pytest.raises(NoCrossing):
        size_tradeoff([1], WAVELENGTH, Point3(0.0, 1.0, -0.5), gain_model="unit", samples=801)


def test_spot_metrics_bundle():
    dfp = Point3(0.0, 1.0, 0.0)
    fmap = transverse_map(upa(16), dfp, 0.4, 81)
    sm = spot_metrics(fmap, dfp, eta=0.9, peak_threshold=0.5)
    assert sm.peak_power == fmap.power.max()
    assert sm.num_significant_peaks == 1
    assert sm.eta == 0.9
    assert sm.hpbw_m is not None and sm.hpbw_m > 0
    assert sm.bfr_m > 0
    assert np.linalg.norm(sm.peak_location.as_array() - dfp.as_array()) < 0.02
    assert sm.normalization == "raw"
