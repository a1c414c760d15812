"""CSI-free adaptive focusing over congruent sub-array tiles.

The optimizer sees the channel only through power feedback: a measurement
callable returning (combined power, per-tile powers p_m, per-tile arrival
phases theta_m) for a proposed phase vector. Per-element coordinate ascent
maximizes each tile's own power; a per-epoch synchronization step removes
the tile arrival-phase offsets so the tiles add coherently at the focal
point. The run keeps the best configuration seen, so its epoch log is
nondecreasing by construction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .beamforming import mrt_weights, quantize_phases
from .channel import steering_vector
from .errors import IndivisibleTiling, ShapeMismatch
from .geometry import Point3, UniformPlanarArray

REL_IMPROVEMENT_STOP = 1e-4
STOP_WINDOW_EPOCHS = 3


@dataclass(frozen=True)
class SubArrayPartition:
    """Disjoint congruent rectangular tiles covering the array's index grid."""

    array: UniformPlanarArray
    tile_rows: int
    tile_cols: int
    tiles: tuple = field(init=False)

    def __post_init__(self) -> None:
        r, c = self.array.rows, self.array.cols
        if self.tile_rows < 1 or self.tile_cols < 1:
            raise IndivisibleTiling("tile dimensions must be >= 1")
        if r % self.tile_rows or c % self.tile_cols:
            raise IndivisibleTiling(
                f"{self.tile_rows}x{self.tile_cols} tiles do not divide a {r}x{c} array"
            )
        idx = np.arange(r * c).reshape(r, c)
        tiles = []
        for bi in range(r // self.tile_rows):
            for bj in range(c // self.tile_cols):
                block = idx[
                    bi * self.tile_rows:(bi + 1) * self.tile_rows,
                    bj * self.tile_cols:(bj + 1) * self.tile_cols,
                ]
                tiles.append(block.ravel().copy())
        object.__setattr__(self, "tiles", tuple(tiles))

    @property
    def num_tiles(self) -> int:
        return len(self.tiles)

    @property
    def tile_size(self) -> int:
        return self.tile_rows * self.tile_cols

    def same_shape(self, other: "SubArrayPartition") -> bool:
        return (
            self.array.rows == other.array.rows
            and self.array.cols == other.array.cols
            and self.tile_rows == other.tile_rows
            and self.tile_cols == other.tile_cols
        )


def partition(array: UniformPlanarArray, tile_rows: int, tile_cols: int) -> SubArrayPartition:
    return SubArrayPartition(array=array, tile_rows=tile_rows, tile_cols=tile_cols)


def _tile_layout(part: SubArrayPartition):
    perm = np.concatenate(part.tiles)
    offsets = np.arange(0, perm.size, part.tile_size)
    return perm, offsets


def measure_power(
    part: SubArrayPartition,
    phases: np.ndarray,
    dfp: Point3,
    gain_model: str = "inverse_distance",
):
    """Simulated UE feedback for one phase vector or a (K, N) batch.

    Returns (combined power, per-tile powers, per-tile arrival phases) with
    a leading batch axis when the input has one. Combined power is the
    coherent sum over all elements; p_m and theta_m come from each tile's
    own partial sum.
    """
    a = steering_vector(part.array, dfp, gain_model).entries
    return _measure(a, _tile_layout(part), phases)


def _measure(a, layout, phases):
    perm, offsets = layout
    ph = np.asarray(phases, dtype=float)
    single = ph.ndim == 1
    ph2 = ph[None, :] if single else ph
    terms = a[perm][None, :] * np.exp(1j * ph2[:, perm])
    tile_sums = np.add.reduceat(terms, offsets, axis=1)
    combined = np.abs(tile_sums.sum(axis=1)) ** 2
    p = np.abs(tile_sums) ** 2
    theta = np.angle(tile_sums)
    if single:
        return float(combined[0]), p[0], theta[0]
    return combined, p, theta


class PowerFeedback:
    """Black-box measurement channel with a query counter.

    Each row of a proposed batch counts as one query; the optimizer has no
    other access to the channel.
    """

    def __init__(self, part: SubArrayPartition, dfp: Point3, gain_model: str) -> None:
        self._a = steering_vector(part.array, dfp, gain_model).entries
        self._layout = _tile_layout(part)
        self.queries = 0

    def __call__(self, phases: np.ndarray):
        ph = np.asarray(phases, dtype=float)
        self.queries += 1 if ph.ndim == 1 else ph.shape[0]
        return _measure(self._a, self._layout, ph)


def phase_grid(bits: int) -> np.ndarray:
    if bits < 1:
        raise ValueError("bits must be >= 1")
    return 2.0 * np.pi * np.arange(2 ** bits) / 2 ** bits


def grid_round(phases: np.ndarray, bits: int) -> np.ndarray:
    """Nearest grid phase, ties toward the larger index (half-up)."""
    levels = 2 ** bits
    step = 2.0 * np.pi / levels
    k = np.floor(np.mod(phases, 2.0 * np.pi) / step + 0.5).astype(int) % levels
    return step * k


def synchronize(
    phases: np.ndarray,
    theta: np.ndarray,
    part: SubArrayPartition,
    bits: int,
) -> np.ndarray:
    """Subtract each tile's arrival phase, re-rounded onto the phase grid.

    Post-sync, all tiles' responses at the focal point agree in phase to
    within the quantization error pi / 2^bits.
    """
    out = phases.copy()
    for m, tile in enumerate(part.tiles):
        out[tile] = grid_round(phases[tile] - theta[m], bits)
    return out


def optimize_tile(
    measure,
    part: SubArrayPartition,
    m: int,
    phases: np.ndarray,
    bits: int,
    budget: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    """Exhaustive per-element coordinate ascent on tile m's own power.

    Elements are visited in seeded-random order; for each, all 2^bits grid
    phases are probed in one batch (costing 2^bits queries) and a move is
    accepted only if it strictly improves p_m. Passes repeat until the
    budget cannot cover another element or a full pass accepts no move.
    Returns the updated full phase vector and the queries spent.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    grid = phase_grid(bits)
    levels = grid.size
    tile = part.tiles[m]
    out = phases.copy()
    used = 0
    while True:
        changed = False
        exhausted = False
        for n in rng.permutation(tile):
            if used + levels > budget:
                exhausted = True
                break
            batch = np.tile(out, (levels, 1))
            batch[:, n] = grid
            _, p, _ = measure(batch)
            used += levels
            pm = p[:, m]
            cur = int(np.floor(np.mod(out[n], 2 * np.pi) / (2 * np.pi / levels) + 0.5)) % levels
            best = int(np.argmax(pm))
            if pm[best] > pm[cur]:
                out[n] = grid[best]
                changed = True
        if exhausted or not changed:
            return out, used


@dataclass(frozen=True)
class AdaptiveRun:
    """Result of an adaptive focusing run (state at the best-seen epoch)."""

    partition: SubArrayPartition
    phase_bits: int
    phases: np.ndarray
    pre_sync_phases: np.ndarray
    tile_powers: np.ndarray
    arrival_phases: np.ndarray
    epoch_log: tuple
    rng_seed: int
    total_queries: int
    quantized_mrt_bound: float
    init_mode: str

    @property
    def final_power(self) -> float:
        return self.epoch_log[-1][1]

    @property
    def epochs(self) -> int:
        return self.epoch_log[-1][0]

    def epochs_to_reach(self, fraction: float) -> int:
        """First epoch whose logged power reaches `fraction` of the final power."""
        target = fraction * self.final_power
        for epoch, power in self.epoch_log:
            if power >= target:
                return epoch
        return self.epoch_log[-1][0]


def quantized_mrt_power(
    part: SubArrayPartition, dfp: Point3, bits: int, gain_model: str
) -> float:
    """Focal power of phase-only MRT after grid quantization (reporting bound)."""
    a = steering_vector(part.array, dfp, gain_model)
    w = quantize_phases(mrt_weights(a, phase_only=True), bits)
    ph = np.angle(w.weights)
    combined, _, _ = measure_power(part, ph, dfp, gain_model)
    return combined


def run_sbf(
    array: UniformPlanarArray,
    dfp: Point3,
    tile_rows: int,
    tile_cols: int,
    phase_bits: int,
    seed: int = 0,
    gain_model: str = "inverse_distance",
    max_epochs: int = 50,
    tile_budget: int | None = None,
    warm_start: AdaptiveRun | None = None,
    rough_csi_noise: float | None = None,
    measure=None,
) -> AdaptiveRun:
    """Run adaptive spot focusing and return the converged state.

    Initialization takes the warm start's phases when given, else noisy
    rough-CSI conjugate phases when `rough_csi_noise` is set, else seeded
    uniform-random grid phases. Each epoch every tile runs coordinate
    ascent against a frozen snapshot (tile power depends only on the tile's
    own phases), then the synchronization step aligns arrival phases; the
    incumbent best configuration is restored whenever an epoch fails to
    improve on it. Stops once the log gains less than 1e-4 relative over
    3 epochs, or at `max_epochs`.
    """
    part = partition(array, tile_rows, tile_cols)
    levels = 2 ** phase_bits
    if tile_budget is None:
        tile_budget = part.tile_size * levels
    rng = np.random.default_rng(seed)
    feedback = measure if measure is not None else PowerFeedback(part, dfp, gain_model)

    if warm_start is not None:
        if not part.same_shape(warm_start.partition):
            raise ShapeMismatch(
                "warm start partition shape differs from the requested run"
            )
        phases = warm_start.phases.copy()
        init_mode = "warm"
    elif rough_csi_noise is not None:
        a = steering_vector(array, dfp, gain_model)
        conj = np.mod(-np.angle(a.entries), 2.0 * np.pi)
        noisy = conj + rng.uniform(-rough_csi_noise, rough_csi_noise, conj.size)
        phases = grid_round(noisy, phase_bits)
        init_mode = "rough-csi"
    else:
        phases = phase_grid(phase_bits)[rng.integers(0, levels, array.num_elements)]
        init_mode = "random"

    queries = 0

    def call(batch):
        nonlocal queries
        ph = np.asarray(batch, dtype=float)
        queries += 1 if ph.ndim == 1 else ph.shape[0]
        return feedback(batch)

    combined, p, theta = call(phases)
    best = combined
    best_state = (phases.copy(), phases.copy(), p, theta)
    log = [(0, best)]

    for epoch in range(1, max_epochs + 1):
        for m in range(part.num_tiles):
            phases, _ = optimize_tile(call, part, m, phases, phase_bits, tile_budget, rng)
        pre_sync = phases.copy()
        combined, p, theta = call(phases)
        synced = synchronize(phases, theta, part, phase_bits)
        c2, p2, t2 = call(synced)
        if c2 >= combined:
            phases, combined, p, theta = synced, c2, p2, t2
        if combined > best:
            best = combined
            best_state = (phases.copy(), pre_sync, p, theta)
        else:
            phases = best_state[0].copy()
        log.append((epoch, best))
        if len(log) > STOP_WINDOW_EPOCHS:
            base = log[-1 - STOP_WINDOW_EPOCHS][1]
            if base > 0 and (log[-1][1] - base) < REL_IMPROVEMENT_STOP * base:
                break

    bound = quantized_mrt_power(part, dfp, phase_bits, gain_model)
    final_phases, pre_sync, p, theta = best_state
    return AdaptiveRun(
        partition=part,
        phase_bits=phase_bits,
        phases=final_phases,
        pre_sync_phases=pre_sync,
        tile_powers=p,
        arrival_phases=theta,
        epoch_log=tuple(log),
        rng_seed=seed,
        total_queries=queries,
        quantized_mrt_bound=bound,
        init_mode=init_mode,
    )


def exhaustive_max(
    part: SubArrayPartition, dfp: Point3, bits: int, gain_model: str
) -> float:
    """Brute-force maximum combined power over all (2^bits)^N phase choices.

    Only feasible for tiny arrays; used as the optimizer's oracle.
    """
    n = part.array.num_elements
    levels = 2 ** bits
    if levels ** n > 2_000_000:
        raise ValueError(f"{levels}^{n} combinations is too many to enumerate")
    grid = phase_grid(bits)
    a = steering_vector(part.array, dfp, gain_model).entries
    combos = np.stack(np.meshgrid(*([grid] * n), indexing="ij"), axis=-1).reshape(-1, n)
    vals = np.abs(np.exp(1j * combos) @ a) ** 2
    return float(vals.max())
