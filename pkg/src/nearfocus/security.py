"""SINR maps and secure-region geometry for multi-focal transmissions.

Stream m's SINR at r is P_m s_m(r) / (sum_{m'!=m} P_{m'} s_{m'}(r) + noise);
transmit powers are calibrated so every focal point sits at the target SNR,
and the secure region is where the best stream stays below the threshold.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beamforming import multi_focal_weights
from .channel import steering_vector
from .errors import CalibrationDiverged
from .fieldmap import evaluate_field
from .geometry import Point3, SamplingGrid, UniformPlanarArray

_DB_FLOOR = 1e-300


@dataclass(frozen=True)
class SecurityScenario:
    array: UniformPlanarArray
    dfps: tuple
    grid: SamplingGrid
    noise_power: float = 1.0
    target_snr_db: float = 10.0
    threshold_db: float = 5.0
    gain_model: str = "inverse_distance"

    def __post_init__(self) -> None:
        if len(self.dfps) < 1:
            raise ValueError("at least one DFP required")
        for i in range(len(self.dfps)):
            for j in range(i + 1, len(self.dfps)):
                gap = np.linalg.norm(self.dfps[i].as_array() - self.dfps[j].as_array())
                if gap < 1e-6:
                    raise ValueError(f"DFPs {i} and {j} coincide")
        if not (self.noise_power > 0):
            raise ValueError("noise_power must be > 0")
        if self.target_snr_db <= self.threshold_db:
            raise ValueError("target_snr_db must exceed threshold_db")


@dataclass(frozen=True)
class SecurityMap:
    grid: SamplingGrid
    sinr_db: np.ndarray
    secure_mask: np.ndarray
    secure_area_fraction: float
    stream_powers: np.ndarray
    threshold_db: float

    @property
    def num_streams(self) -> int:
        return self.sinr_db.shape[0]

    def max_sinr_db_grid(self) -> np.ndarray:
        return self.sinr_db.max(axis=0).reshape(self.grid.shape())


def _weights(scenario: SecurityScenario):
    vecs = [
        steering_vector(scenario.array, p, scenario.gain_model) for p in scenario.dfps
    ]
    return multi_focal_weights(vecs)


def _coupling_matrix(scenario: SecurityScenario) -> np.ndarray:
    """s[m', m]: unit-power response of chain m' at focal point m."""
    w = _weights(scenario)
    m = len(scenario.dfps)
    s = np.empty((m, m))
    for k, p in enumerate(scenario.dfps):
        a = steering_vector(scenario.array, p, scenario.gain_model)
        s[:, k] = np.abs(w.chain_matrix() @ a.entries) ** 2
    return s


def sinr_at(
    scenario: SecurityScenario, powers: np.ndarray, point: Point3
) -> np.ndarray:
    """Per-stream SINR (linear) at one point under the given stream powers."""
    w = _weights(scenario)
    a = steering_vector(scenario.array, point, scenario.gain_model)
    s = np.abs(w.chain_matrix() @ a.entries) ** 2
    rx = powers * s
    total = rx.sum()
    return rx / (total - rx + scenario.noise_power)


def calibrate_power(
    scenario: SecurityScenario, max_iter: int = 1000, tol_db: float = 0.01
) -> np.ndarray:
    """Per-stream transmit powers placing each DFP at the target SNR.

    Solves the coupled equations by fixed-point iteration
    P_m <- gamma (sum_{m'!=m} P_{m'} s_{m'm} + noise) / s_{mm}; raises
    CalibrationDiverged if the plug-back residual still exceeds `tol_db`
    after `max_iter` rounds.
    """
    gamma = 10.0 ** (scenario.target_snr_db / 10.0)
    noise = scenario.noise_power
    s = _coupling_matrix(scenario)
    m = s.shape[0]
    diag = np.diag(s)
    if np.any(diag <= 0):
        raise CalibrationDiverged("a stream has zero response at its own DFP")
    p = gamma * noise / diag
    for _ in range(max_iter):
        interference = s.T @ p - diag * p
        p_next = gamma * (interference + noise) / diag
        if np.max(np.abs(p_next - p) / p_next) < 1e-14:
            p = p_next
            break
        p = p_next
    achieved = np.array(
        [sinr_at(scenario, p, scenario.dfps[k])[k] for k in range(m)]
    )
    residual = np.abs(10.0 * np.log10(achieved) - scenario.target_snr_db)
    if np.max(residual) > tol_db:
        raise CalibrationDiverged(
            f"plug-back residual {residual.max():.4f} dB after {max_iter} iterations"
        )
    return p


def security_map(
    scenario: SecurityScenario,
    powers: np.ndarray | None = None,
    threads: int = 1,
) -> SecurityMap:
    """Evaluate per-stream SINR over the scenario grid and the secure mask."""
    if powers is None:
        powers = calibrate_power(scenario)
    w = _weights(scenario)
    fmap = evaluate_field(
        scenario.array, w, scenario.grid, scenario.gain_model, threads=threads
    )
    rx = powers[:, None] * fmap.per_stream
    total = rx.sum(axis=0)
    sinr = rx / (total[None, :] - rx + scenario.noise_power)
    sinr_db = 10.0 * np.log10(np.maximum(sinr, _DB_FLOOR))
    secure = sinr_db.max(axis=0) < scenario.threshold_db
    return SecurityMap(
        grid=scenario.grid,
        sinr_db=sinr_db,
        secure_mask=secure,
        secure_area_fraction=float(secure.mean()),
        stream_powers=np.asarray(powers, dtype=float),
        threshold_db=scenario.threshold_db,
    )


def _interp(t1a, t2a, va, t1b, t2b, vb, level):
    f = (level - va) / (vb - va)
    return (t1a + f * (t1b - t1a), t2a + f * (t2b - t2a))


def _cell_segments(f, i, j, t1, t2, level):
    """Marching-squares segments for cell (i, j); corners CCW from (i, j)."""
    corners = (
        (t1[i], t2[j], f[i, j]),
        (t1[i + 1], t2[j], f[i + 1, j]),
        (t1[i + 1], t2[j + 1], f[i + 1, j + 1]),
        (t1[i], t2[j + 1], f[i, j + 1]),
    )
    case = 0
    for bit, (_, _, v) in enumerate(corners):
        if v >= level:
            case |= 1 << bit
    if case in (0, 15):
        return []
    edges = {
        e: _interp(*corners[e], *corners[(e + 1) % 4], level)
        for e in range(4)
        if (corners[e][2] >= level) != (corners[(e + 1) % 4][2] >= level)
    }
    table = {
        1: [(3, 0)], 2: [(0, 1)], 4: [(1, 2)], 8: [(2, 3)],
        3: [(3, 1)], 6: [(0, 2)], 12: [(1, 3)], 9: [(2, 0)],
        7: [(3, 2)], 11: [(2, 1)], 13: [(1, 0)], 14: [(0, 3)],
    }
    if case in (5, 10):
        center = sum(v for _, _, v in corners) / 4.0
        high_center = center >= level
        if case == 5:
            pairs = [(3, 0), (1, 2)] if high_center else [(3, 2), (1, 0)]
        else:
            pairs = [(0, 1), (2, 3)] if high_center else [(0, 3), (2, 1)]
    else:
        pairs = table[case]
    return [(edges[a], edges[b]) for a, b in pairs]


def secure_boundary(smap: SecurityMap, level_db: float | None = None) -> list[np.ndarray]:
    """Iso-contours of max-stream SINR at the threshold, as (V, 2) polylines.

    Vertices are grid-axis offsets (t1, t2). A polyline whose first and last
    vertices coincide is closed; otherwise both ends rest on window edges.
    """
    t1, t2 = smap.grid.axis_coords()
    f = smap.max_sinr_db_grid()
    level = smap.threshold_db if level_db is None else level_db
    hi = f >= level
    some = hi[:-1, :-1] | hi[1:, :-1] | hi[1:, 1:] | hi[:-1, 1:]
    every = hi[:-1, :-1] & hi[1:, :-1] & hi[1:, 1:] & hi[:-1, 1:]
    segments = []
    for i, j in np.argwhere(some & ~every):
        segments.extend(_cell_segments(f, i, j, t1, t2, level))
    return _assemble(segments)


def _key(pt):
    return (round(pt[0], 9), round(pt[1], 9))


def _assemble(segments) -> list[np.ndarray]:
    by_end: dict = {}
    for seg in segments:
        for pt in (seg[0], seg[1]):
            by_end.setdefault(_key(pt), []).append(seg)
    used = set()
    chains = []
    for seg in segments:
        if id(seg) in used:
            continue
        chain = [seg[0], seg[1]]
        used.add(id(seg))
        for endpos in (1, 0):
            while True:
                tip = chain[-1] if endpos == 1 else chain[0]
                nxt = None
                for cand in by_end.get(_key(tip), []):
                    if id(cand) in used:
                        continue
                    nxt = cand
                    break
                if nxt is None:
                    break
                used.add(id(nxt))
                a, b = nxt
                joined = b if _key(a) == _key(tip) else a
                if endpos == 1:
                    chain.append(joined)
                else:
                    chain.insert(0, joined)
        chains.append(np.array(chain))
    return chains


def is_closed(polyline: np.ndarray) -> bool:
    return bool(np.allclose(polyline[0], polyline[-1], atol=1e-9))


def polygon_area(polyline: np.ndarray) -> float:
    """Shoelace area of a polyline closed by the chord from last to first vertex."""
    x = polyline[:, 0]
    y = polyline[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def encloses(polyline: np.ndarray, t1: float, t2: float) -> bool:
    """Ray-cast containment after chord closure of the polyline."""
    pts = polyline
    if not is_closed(pts):
        pts = np.vstack([pts, pts[:1]])
    x, y = pts[:, 0], pts[:, 1]
    inside = False
    for k in range(len(pts) - 1):
        x1, y1, x2, y2 = x[k], y[k], x[k + 1], y[k + 1]
        if (y1 > t2) != (y2 > t2):
            xc = x1 + (t2 - y1) * (x2 - x1) / (y2 - y1)
            if xc > t1:
                inside = not inside
    return inside
