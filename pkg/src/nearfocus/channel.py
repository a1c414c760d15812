"""Near-field spherical-wavefront array responses and field-region bounds.

The response of element n to a point at exact Euclidean distance d_n is
a_n = g(d_n) * exp(-j 2 pi d_n / lambda), with g either unity or the
free-space amplitude lambda / (4 pi d).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, PointOnAperture
from .geometry import Point3, UniformPlanarArray, element_positions

GAIN_MODELS = ("unit", "inverse_distance")

MIN_APERTURE_CLEARANCE_M = 1e-9


def _check_gain(gain_model: str) -> None:
    if gain_model not in GAIN_MODELS:
        raise ValueError(f"gain_model must be one of {GAIN_MODELS}")


def gain(distances_m: np.ndarray, wavelength_m: float, gain_model: str) -> np.ndarray:
    _check_gain(gain_model)
    if gain_model == "unit":
        return np.ones_like(distances_m)
    return wavelength_m / (4.0 * np.pi * distances_m)


@dataclass(frozen=True)
class SteeringVector:
    """Per-element complex response of an array toward one point."""

    entries: np.ndarray
    distances_m: np.ndarray
    wavelength_m: float

    def __len__(self) -> int:
        return self.entries.shape[0]

    def normalized(self) -> np.ndarray:
        return self.entries / np.linalg.norm(self.entries)


@dataclass(frozen=True)
class FieldRegions:
    """Radiative near-field bounds: reactive limit D^N and Fraunhofer D^F."""

    reactive_bound_m: float
    fraunhofer_m: float


def fraunhofer_distance(array: UniformPlanarArray) -> float:
    """Far-field boundary 2 D^2 / lambda for aperture diagonal D."""
    d = array.aperture_diameter_m
    return 2.0 * d * d / array.carrier_wavelength_m


def field_regions(array: UniformPlanarArray) -> FieldRegions:
    # the reactive bound is taken at one wavelength; it only gates warnings
    return FieldRegions(
        reactive_bound_m=array.carrier_wavelength_m,
        fraunhofer_m=fraunhofer_distance(array),
    )


def distances_to(array: UniformPlanarArray, point: Point3) -> np.ndarray:
    pos = element_positions(array)
    return np.linalg.norm(pos - point.as_array()[None, :], axis=1)


def steering_vector(
    array: UniformPlanarArray,
    point: Point3,
    gain_model: str = "inverse_distance",
) -> SteeringVector:
    """Spherical-wavefront steering vector of `array` toward `point`."""
    _check_gain(gain_model)
    lam = array.carrier_wavelength_m
    d = distances_to(array, point)
    dmin = float(d.min())
    if dmin < MIN_APERTURE_CLEARANCE_M:
        raise PointOnAperture(
            f"point {point} is {dmin:.3e} m from an element (< {MIN_APERTURE_CLEARANCE_M} m)"
        )
    entries = gain(d, lam, gain_model) * np.exp(-2j * np.pi * d / lam)
    return SteeringVector(entries=entries, distances_m=d, wavelength_m=lam)


def correlation(a1: SteeringVector, a2: SteeringVector) -> float:
    """Normalized phase-only correlation (1/N) |a1^T a2*|.

    Computed from the stored distances, so the value is independent of the
    gain model either vector was built with.
    """
    if len(a1) != len(a2):
        raise LengthMismatch(f"steering vector lengths differ: {len(a1)} vs {len(a2)}")
    if abs(a1.wavelength_m - a2.wavelength_m) > 1e-15 * a1.wavelength_m:
        raise ValueError("steering vectors use different wavelengths")
    n = len(a1)
    phase = -2.0 * np.pi * (a1.distances_m - a2.distances_m) / a1.wavelength_m
    return float(np.abs(np.exp(1j * phase).sum()) / n)


def orthogonality_profile(
    r1: Point3,
    r2: Point3,
    sizes: list[tuple[int, int]],
    spacing_m: float,
    wavelength_m: float,
    center: Point3 = Point3(0.0, 0.0, 0.0),
    plane: str = "xz",
) -> list[tuple[int, float]]:
    """Correlation of the steering vectors toward r1 and r2 per array size."""
    if not sizes:
        raise ValueError("sizes must be nonempty")
    if r1 == r2:
        return [(rows * cols, 1.0) for rows, cols in sizes]
    out = []
    for rows, cols in sizes:
        arr = UniformPlanarArray(
            rows=rows, cols=cols, spacing_m=spacing_m,
            carrier_wavelength_m=wavelength_m, center=center, plane=plane,
        )
        a1 = steering_vector(arr, r1, "unit")
        a2 = steering_vector(arr, r2, "unit")
        out.append((rows * cols, correlation(a1, a2)))
    return out
