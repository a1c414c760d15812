"""Single- and multi-focal beamforming weights, with phase quantization.

Weights carry a unit total norm unless explicitly power-scaled; multi-focal
designs are per-chain conjugate matching summed in the analog domain.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SteeringVector
from .errors import DuplicateFocalPoint

FOCAL_COINCIDENCE_M = 1e-6


@dataclass(frozen=True)
class BeamWeights:
    """Per-element complex weights, kept per RF chain.

    `weights` is always the element-wise sum of `per_chain`. When
    `phase_bits` is set, every per-chain phase lies on the 2^b grid.
    """

    weights: np.ndarray
    per_chain: tuple
    phase_bits: int | None = None

    def __post_init__(self) -> None:
        if len(self.per_chain) < 1:
            raise ValueError("at least one RF chain required")
        for w in self.per_chain:
            if w.shape != self.weights.shape:
                raise ValueError("per-chain weight length mismatch")

    @property
    def rf_chains(self) -> int:
        return len(self.per_chain)

    def chain_matrix(self) -> np.ndarray:
        """Weights stacked as an (M, N) matrix."""
        return np.stack(self.per_chain, axis=0)


def mrt_weights(a: SteeringVector, phase_only: bool = False) -> BeamWeights:
    """Unit-norm conjugate-matched weights maximizing power at a's point."""
    w = np.conj(a.entries)
    if phase_only:
        w = w / np.abs(w)
    w = w / np.linalg.norm(w)
    return BeamWeights(weights=w, per_chain=(w,))


def multi_focal_weights(
    steering_vectors: list[SteeringVector],
    stream_powers: list[float] | None = None,
) -> BeamWeights:
    """Per-chain MRT toward each focal point, summed across chains.

    Chain m is conj(a_m) normalized then scaled to carry `stream_powers[m]`
    (‖w_m‖^2 = P_m; default: equal unit powers).
    """
    m = len(steering_vectors)
    if m < 1:
        raise ValueError("need at least one steering vector")
    n = len(steering_vectors[0])
    for a in steering_vectors[1:]:
        if len(a) != n:
            raise ValueError("steering vector lengths differ")
    for i in range(m):
        for j in range(i + 1, m):
            gap = float(
                np.max(np.abs(steering_vectors[i].distances_m - steering_vectors[j].distances_m))
            )
            if gap < FOCAL_COINCIDENCE_M:
                raise DuplicateFocalPoint(
                    f"focal points {i} and {j} coincide within {FOCAL_COINCIDENCE_M} m"
                )
    if stream_powers is None:
        stream_powers = [1.0] * m
    if len(stream_powers) != m:
        raise ValueError("one power per steering vector required")
    chains = []
    for a, p in zip(steering_vectors, stream_powers):
        if not (p > 0):
            raise ValueError("stream powers must be > 0")
        w = np.conj(a.entries)
        chains.append(np.sqrt(p) * w / np.linalg.norm(w))
    combined = np.sum(chains, axis=0)
    return BeamWeights(weights=combined, per_chain=tuple(chains))


def quantize_phases(w: BeamWeights, bits: int) -> BeamWeights:
    """Round every per-chain phase to the nearest of the 2^bits grid points.

    Ties round half-up toward the larger grid index, so results are
    bit-reproducible. Magnitudes are untouched; the max phase error is
    pi / 2^bits.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    levels = 2 ** bits
    step = 2.0 * np.pi / levels
    chains = []
    for wc in w.per_chain:
        ph = np.mod(np.angle(wc), 2.0 * np.pi)
        k = np.floor(ph / step + 0.5).astype(int) % levels
        chains.append(np.abs(wc) * np.exp(1j * step * k))
    combined = np.sum(chains, axis=0)
    return BeamWeights(weights=combined, per_chain=tuple(chains), phase_bits=bits)
