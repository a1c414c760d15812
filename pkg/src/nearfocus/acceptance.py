"""Self-contained acceptance suite behind `nearfocus verify`.

Every check states its claim, the expected value with tolerance, and the
observed value, so the verify table reads as a reproduction report. Heavy
intermediates are cached on the Suite instance; the whole run finishes in
well under two minutes on a laptop.
"""
from __future__ import annotations

import os
import tempfile
import time
from dataclasses import dataclass

import numpy as np

from .adaptive import exhaustive_max, partition, run_sbf
from .beamforming import mrt_weights
from .channel import correlation, steering_vector
from .fieldmap import evaluate_field, find_focal_peaks
from .geometry import Point3, SamplingGrid, UniformPlanarArray
from .metrics import bfr, size_tradeoff, spacing_tradeoff
from .runio import sha256_file
from .security import (
    SecurityScenario,
    calibrate_power,
    encloses,
    secure_boundary,
    security_map,
    sinr_at,
)

WAVELENGTH_M = 299792458.0 / 28e9


def _upa(rows: int, cols: int, spacing_wavelengths: float = 0.5) -> UniformPlanarArray:
    return UniformPlanarArray(
        rows=rows,
        cols=cols,
        spacing_m=spacing_wavelengths * WAVELENGTH_M,
        carrier_wavelength_m=WAVELENGTH_M,
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    expected: str
    observed: str
    tolerance: str
    passed: bool


class Suite:
    """Acceptance checks with shared cached intermediates."""

    def __init__(self, threads: int = 1) -> None:
        self.threads = threads
        self._cache: dict = {}

    def _memo(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    # -- shared intermediates -------------------------------------------

    def fig4a_rows(self):
        """(ratio, relative peak, hpbw) for a 60x60 UPA, plus the wall time."""

        def build():
            dfp = Point3(0.0, 1.0, -0.5)
            t0 = time.perf_counter()
            rows = spacing_tradeoff(60, 60, WAVELENGTH_M, dfp, [0.5, 1.0, 1.5])
            return rows, time.perf_counter() - t0

        return self._memo("fig4a", build)

    def fig4b_rows(self):
        def build():
            dfp = Point3(0.0, 1.0, -0.5)
            return size_tradeoff(
                [10, 20, 30, 40, 50, 60], WAVELENGTH_M, dfp,
                span=(0.3, 1.9), samples=1601,
            )

        return self._memo("fig4b", build)

    def transverse_maps(self):
        """Raw-power maps for 6x6 and 60x60 on the focal transverse plane."""

        def build():
            dfp = Point3(0.0, 1.0, 0.0)
            grid = SamplingGrid(
                kind="plane",
                origin=dfp,
                axes=((1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
                extents=((-1.0, 1.0), (-1.0, 1.0)),
                resolution=(201, 201),
            )
            maps = {}
            for n in (6, 60):
                arr = _upa(n, n)
                w = mrt_weights(steering_vector(arr, dfp))
                maps[n] = evaluate_field(arr, w, grid, threads=self.threads)
            return dfp, maps

        return self._memo("transverse", build)

    def fig2_results(self):
        def build():
            dfps = (Point3(-0.3, 1.0, 0.0), Point3(0.3, 1.0, 0.0))
            grid = SamplingGrid(
                kind="plane",
                origin=Point3(0.0, 1.45, 0.0),
                axes=((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
                extents=((-2.5, 2.5), (-1.445, 1.55)),
                resolution=(251, 150),
            )
            out = {}
            for n in (5, 15, 60):
                scen = SecurityScenario(array=_upa(n, n), dfps=dfps, grid=grid)
                powers = calibrate_power(scen)
                smap = security_map(scen, powers, threads=self.threads)
                sinr_db = [
                    10.0 * np.log10(sinr_at(scen, powers, p)[m])
                    for m, p in enumerate(dfps)
                ]
                polylines = secure_boundary(smap)
                enclosed = all(
                    any(
                        encloses(poly, *grid.plane_coords(p))
                        for poly in polylines
                    )
                    for p in dfps
                )
                out[n] = {
                    "sinr_db": sinr_db,
                    "fraction": smap.secure_area_fraction,
                    "enclosed": enclosed,
                }
            return out

        return self._memo("fig2", build)

    def oracle_runs(self):
        def build():
            arr = _upa(2, 2)
            dfp = Point3(0.004, 0.01, -0.003)
            brute = exhaustive_max(partition(arr, 2, 2), dfp, 2, "inverse_distance")
            gaps = []
            for seed in range(10):
                run = run_sbf(arr, dfp, 2, 2, 2, seed=seed)
                gaps.append(abs(run.final_power - brute) / brute)
            return gaps

        return self._memo("oracle", build)

    def quality_runs(self):
        def build():
            arr = _upa(16, 16)
            dfp = Point3(0.0, 1.0, 0.0)
            return [run_sbf(arr, dfp, 4, 4, 4, seed=s) for s in range(10)]

        return self._memo("quality", build)

    def transfer_pairs(self):
        """(warm, cold) epochs to reach 95% of final power, per seed."""

        def build():
            arr = _upa(16, 16)
            solved = Point3(0.0, 1.0, 0.0)
            moved = Point3(0.0, 1.05, 0.0)
            pairs = []
            for seed in range(10):
                base = run_sbf(arr, solved, 4, 4, 4, seed=seed)
                warm = run_sbf(arr, moved, 4, 4, 4, seed=seed, warm_start=base)
                cold = run_sbf(arr, moved, 4, 4, 4, seed=seed)
                pairs.append((warm.epochs_to_reach(0.95), cold.epochs_to_reach(0.95)))
            return pairs

        return self._memo("transfer", build)

    # -- checks ----------------------------------------------------------

    def check_fig4a_hpbw(self) -> CheckResult:
        rows, elapsed = self.fig4a_rows()
        by_ratio = {r: h for r, _, h in rows}
        ok_half = abs(by_ratio[0.5] - 0.085) <= 0.15 * 0.085
        ok_one = abs(by_ratio[1.0] - 0.049) <= 0.15 * 0.049
        ok_time = elapsed < 60.0
        return CheckResult(
            name="fig4a-hpbw",
            expected="8.5cm, 4.9cm, <60s",
            observed=f"{by_ratio[0.5] * 100:.2f}cm, {by_ratio[1.0] * 100:.2f}cm, {elapsed:.1f}s",
            tolerance="15%",
            passed=ok_half and ok_one and ok_time,
        )

    def check_fig4a_peak(self) -> CheckResult:
        rows, _ = self.fig4a_rows()
        peaks = {r: p for r, p, _ in rows}
        argmax = max(peaks, key=peaks.get)
        drop = 1.0 - peaks[1.0] / peaks[0.5]
        return CheckResult(
            name="fig4a-peak",
            expected="argmax 0.5, drop 4%",
            observed=f"argmax {argmax}, drop {drop * 100:.2f}%",
            tolerance="3pp on drop",
            passed=argmax == 0.5 and abs(drop - 0.04) <= 0.03,
        )

    def check_fig4b_trend(self) -> CheckResult:
        rows = self.fig4b_rows()
        widths = [h for _, h in rows]
        decreasing = all(b < a for a, b in zip(widths, widths[1:]))
        h60 = dict(rows)[60]
        ok60 = abs(h60 - 0.085) <= 0.15 * 0.085
        return CheckResult(
            name="fig4b-trend",
            expected="strictly decreasing, h(60) 8.5cm",
            observed=f"{'ok' if decreasing else 'NOT decreasing'}, h(60) {h60 * 100:.2f}cm",
            tolerance="15% on h(60)",
            passed=decreasing and ok60,
        )

    def check_fig1b_contrast(self) -> CheckResult:
        dfp, maps = self.transverse_maps()
        r6 = bfr(maps[6], dfp, 0.9)
        r60 = bfr(maps[60], dfp, 0.9)
        p6 = float(maps[6].power.max())
        p60 = float(maps[60].power.max())
        return CheckResult(
            name="fig1b-contrast",
            expected="BFR60 < 0.5*BFR6, peak60 > peak6",
            observed=f"{r60:.4f} vs 0.5*{r6:.4f}, {p60:.3g} vs {p6:.3g}",
            tolerance="factor 0.5",
            passed=r60 < 0.5 * r6 and p60 > p6,
        )

    def check_correlation(self) -> CheckResult:
        r1 = Point3(0.0, 1.0, 0.0)
        r2 = Point3(0.3, 1.0, 0.0)
        vals = {}
        for n in (6, 60):
            arr = _upa(n, n)
            vals[n] = correlation(
                steering_vector(arr, r1, "unit"), steering_vector(arr, r2, "unit")
            )
        return CheckResult(
            name="correlation",
            expected="c(60) < c(6) and c(60) < 0.1",
            observed=f"c(60)={vals[60]:.4f}, c(6)={vals[6]:.4f}",
            tolerance="exact",
            passed=vals[60] < vals[6] and vals[60] < 0.1,
        )

    def check_fig2_suite(self) -> CheckResult:
        res = self.fig2_results()
        resid = max(
            abs(s - 10.0) for r in res.values() for s in r["sinr_db"]
        )
        fracs = [res[n]["fraction"] for n in (5, 15, 60)]
        increasing = fracs[0] < fracs[1] < fracs[2]
        enclosed = all(r["enclosed"] for r in res.values())
        return CheckResult(
            name="fig2-suite",
            expected="SINR 10dB, fracs increasing, DFPs enclosed",
            observed=(
                f"resid {resid:.1e}dB, fracs "
                + "<".join(f"{f:.3f}" for f in fracs)
                + (", enclosed" if enclosed else ", NOT enclosed")
            ),
            tolerance="0.01dB",
            passed=resid < 0.01 and increasing and enclosed,
        )

    def check_adaptive_oracle(self) -> CheckResult:
        gaps = self.oracle_runs()
        worst = max(gaps)
        hits = sum(g <= 1e-12 for g in gaps)
        return CheckResult(
            name="adaptive-oracle",
            expected="10/10 seeds at exhaustive max",
            observed=f"{hits}/10, worst rel gap {worst:.1e}",
            tolerance="rel 1e-12",
            passed=hits == 10,
        )

    def check_adaptive_quality(self) -> CheckResult:
        runs = self.quality_runs()
        ratios = [r.final_power / r.quantized_mrt_bound for r in runs]
        med = float(np.median(ratios))
        monotone = all(
            all(b[1] >= a[1] for a, b in zip(r.epoch_log, r.epoch_log[1:]))
            for r in runs
        )
        return CheckResult(
            name="adaptive-quality",
            expected="median >= 0.9x bound, log nondecreasing",
            observed=f"median {med:.4f}" + (", monotone" if monotone else ", NOT monotone"),
            tolerance="0.9 floor",
            passed=med >= 0.9 and monotone,
        )

    def check_transfer(self) -> CheckResult:
        pairs = self.transfer_pairs()
        warm = float(np.median([w for w, _ in pairs]))
        cold = float(np.median([c for _, c in pairs]))
        return CheckResult(
            name="transfer-speedup",
            expected="median warm < median cold",
            observed=f"warm {warm:g}, cold {cold:g} epochs to 95%",
            tolerance="strict",
            passed=warm < cold,
        )

    def check_mrt_optimality(self) -> CheckResult:
        arr = _upa(16, 16)
        dfp = Point3(0.05, 0.8, -0.1)
        a = steering_vector(arr, dfp)
        best = float(np.abs(a.entries @ mrt_weights(a).weights) ** 2)
        rng = np.random.default_rng(7)
        n = arr.num_elements
        draws = rng.standard_normal((10_000, n)) + 1j * rng.standard_normal((10_000, n))
        draws /= np.linalg.norm(draws, axis=1, keepdims=True)
        rand = np.abs(draws @ a.entries) ** 2
        margin = best / float(rand.max())
        return CheckResult(
            name="mrt-optimality",
            expected="MRT >= 10^4 random draws",
            observed=f"best random at {1 / margin:.4f} of MRT",
            tolerance="exact",
            passed=bool(np.all(rand <= best * (1 + 1e-12))),
        )

    def check_global_phase(self) -> CheckResult:
        arr = _upa(8, 8)
        dfp = Point3(0.0, 0.7, 0.1)
        grid = SamplingGrid(
            kind="plane",
            origin=Point3(0.0, 0.7, 0.0),
            axes=((1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
            extents=((-0.4, 0.4), (-0.4, 0.4)),
            resolution=(41, 41),
        )
        w = mrt_weights(steering_vector(arr, dfp))
        base = evaluate_field(arr, w, grid).power
        worst = 0.0
        for phi in (0.3, 1.7, 4.4):
            from .beamforming import BeamWeights

            rot = BeamWeights(
                weights=w.weights * np.exp(1j * phi),
                per_chain=tuple(c * np.exp(1j * phi) for c in w.per_chain),
            )
            p = evaluate_field(arr, rot, grid).power
            worst = max(worst, float(np.max(np.abs(p - base) / base.max())))
        return CheckResult(
            name="global-phase",
            expected="field invariant under e^{j phi}",
            observed=f"worst rel deviation {worst:.1e}",
            tolerance="rel 1e-12",
            passed=worst < 1e-12,
        )

    def check_mirror_symmetry(self) -> CheckResult:
        arr = _upa(16, 16)
        dfp = Point3(0.0, 0.9, 0.0)
        grid = SamplingGrid(
            kind="plane",
            origin=Point3(0.0, 0.9, 0.0),
            axes=((1.0, 0.0, 0.0), (0.0, 0.0, 1.0)),
            extents=((-0.5, 0.5), (-0.5, 0.5)),
            resolution=(51, 51),
        )
        w = mrt_weights(steering_vector(arr, dfp))
        p = evaluate_field(arr, w, grid).as_grid()
        dev = max(
            float(np.max(np.abs(p - p[::-1, :]) / p.max())),
            float(np.max(np.abs(p - p[:, ::-1]) / p.max())),
        )
        return CheckResult(
            name="mirror-symmetry",
            expected="map symmetric about boresight",
            observed=f"worst rel deviation {dev:.1e}",
            tolerance="rel 1e-9",
            passed=dev < 1e-9,
        )

    def check_grating_lobes(self) -> CheckResult:
        dfp = Point3(0.0, 1.0, 0.0)
        grid = SamplingGrid(
            kind="plane",
            origin=Point3(0.0, 0.0, 0.0),
            axes=((1.0, 0.0, 0.0), (0.0, 1.0, 0.0)),
            extents=((-1.5, 1.5), (0.3, 1.7)),
            resolution=(301, 141),
        )
        counts = {}
        for ratio in (0.5, 1.5):
            arr = _upa(16, 16, ratio)
            w = mrt_weights(steering_vector(arr, dfp, "unit"))
            fmap = evaluate_field(arr, w, grid, "unit")
            counts[ratio] = len(find_focal_peaks(fmap, 0.5))
        return CheckResult(
            name="grating-lobes",
            expected=">=2 peaks at 1.5, exactly 1 at 0.5",
            observed=f"{counts[1.5]} at 1.5, {counts[0.5]} at 0.5",
            tolerance="peak threshold 0.5",
            passed=counts[1.5] >= 2 and counts[0.5] == 1,
        )

    def check_determinism(self) -> CheckResult:
        from . import cli

        sums = []
        with tempfile.TemporaryDirectory() as tmp:
            for rep in ("a", "b"):
                out = os.path.join(tmp, rep)
                code = cli.main(["field-map", "--scenario", "fig1b", "--out", out])
                if code != 0:
                    return CheckResult(
                        name="determinism",
                        expected="byte-identical rerun",
                        observed=f"fig1b exited {code}",
                        tolerance="exact",
                        passed=False,
                    )
                sums.append(
                    {
                        f: sha256_file(os.path.join(out, f))
                        for f in sorted(os.listdir(out))
                        if f.endswith(".csv")
                    }
                )
        same = sums[0] == sums[1]
        return CheckResult(
            name="determinism",
            expected="byte-identical rerun",
            observed=f"{len(sums[0])} files " + ("identical" if same else "DIFFER"),
            tolerance="exact",
            passed=same,
        )

    CHECKS = (
        "check_fig4a_hpbw",
        "check_fig4a_peak",
        "check_fig4b_trend",
        "check_fig1b_contrast",
        "check_correlation",
        "check_fig2_suite",
        "check_adaptive_oracle",
        "check_adaptive_quality",
        "check_transfer",
        "check_mrt_optimality",
        "check_global_phase",
        "check_mirror_symmetry",
        "check_grating_lobes",
        "check_determinism",
    )

    def run_all(self) -> list[CheckResult]:
        return [getattr(self, name)() for name in self.CHECKS]


def run_all(threads: int = 1) -> list[CheckResult]:
    return Suite(threads=threads).run_all()
