"""Command-line front-end: scenario files in, datasets and manifests out.

Exit codes: 0 success, 1 acceptance failure, 2 validation error,
3 internal numerical error.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from .adaptive import exhaustive_max, partition, run_sbf
from .beamforming import mrt_weights
from .channel import steering_vector
from .errors import NearfocusError, ScenarioError
from .fieldmap import evaluate_field, find_focal_peaks
from .geometry import UniformPlanarArray, grid_points
from .metrics import line_profile, size_tradeoff, spacing_tradeoff, spot_metrics
from .runio import RunManifest, write_csv
from .scenarios import (
    BUILTIN_SCENARIOS,
    Scenario,
    build_config,
    load_scenario,
    scenario_sha256,
)
from .security import (
    SecurityScenario,
    calibrate_power,
    secure_boundary,
    security_map,
    sinr_at,
)


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("NEARFOCUS_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        return 1


def _map_rows(fmap):
    t1, t2 = fmap.grid.axis_coords()
    n2 = t2.size
    p = fmap.power
    streams = fmap.per_stream if fmap.num_streams > 1 else None
    for k in range(p.size):
        i, j = divmod(k, n2)
        row = [t1[i], t2[j], p[k]]
        if streams is not None:
            row.extend(streams[:, k])
        yield row


def _map_header(num_streams: int) -> list[str]:
    header = ["axis1_m", "axis2_m", "power"]
    if num_streams > 1:
        header.extend(f"stream_{m}" for m in range(num_streams))
    return header


def cmd_field_map(sc: Scenario, out: str, threads: int, manifest: RunManifest) -> int:
    cfg = build_config(sc)
    metric_rows = []
    for arr in cfg.arrays:
        a = steering_vector(arr, cfg.dfp, cfg.gain_model)
        w = mrt_weights(a)
        fmap = evaluate_field(
            arr, w, cfg.grid, cfg.gain_model, normalization=cfg.normalization,
            threads=threads,
        )
        tag = f"{arr.rows}x{arr.cols}"
        path = os.path.join(out, f"{sc.id}_{tag}_map.csv")
        write_csv(path, _map_header(fmap.num_streams), _map_rows(fmap))
        manifest.add_output(path)
        sm = spot_metrics(fmap, cfg.dfp, eta=cfg.eta, peak_threshold=cfg.peak_threshold)
        loc = sm.peak_location
        metric_rows.extend(
            [
                (sc.id, f"{tag}/peak_power", sm.peak_power, cfg.normalization),
                (sc.id, f"{tag}/peak_x", loc.x, "m"),
                (sc.id, f"{tag}/peak_y", loc.y, "m"),
                (sc.id, f"{tag}/peak_z", loc.z, "m"),
                (sc.id, f"{tag}/bfr_m", sm.bfr_m, "m"),
                (sc.id, f"{tag}/eta", sm.eta, "fraction"),
                (sc.id, f"{tag}/num_significant_peaks", sm.num_significant_peaks, "count"),
            ]
        )
        if sm.hpbw_m is not None:
            metric_rows.append((sc.id, f"{tag}/hpbw_m", sm.hpbw_m, "m"))
    mpath = os.path.join(out, f"{sc.id}_metrics.csv")
    write_csv(mpath, ["scenario_id", "metric", "value", "unit"], metric_rows)
    manifest.add_output(mpath)
    manifest.extras["gain_model"] = cfg.gain_model
    manifest.extras["normalization"] = cfg.normalization
    return 0


def cmd_tradeoffs(sc: Scenario, out: str, threads: int, manifest: RunManifest) -> int:
    cfg = build_config(sc)
    if cfg.mode == "spacing":
        for ratio in cfg.spacings:
            arr = UniformPlanarArray(
                cfg.rows, cfg.cols, ratio * cfg.wavelength_m, cfg.wavelength_m
            )
            x, p = line_profile(
                arr, cfg.dfp, cfg.gain_model, cfg.axis, cfg.span, cfg.samples
            )
            tag = f"dd{str(ratio).replace('.', 'p')}"
            path = os.path.join(out, f"{sc.id}_{tag}_profile.csv")
            write_csv(path, ["position_m", "power"], zip(x, p))
            manifest.add_output(path)
        rows = spacing_tradeoff(
            cfg.rows, cfg.cols, cfg.wavelength_m, cfg.dfp, list(cfg.spacings),
            cfg.gain_model, cfg.axis, cfg.span, cfg.samples,
        )
        path = os.path.join(out, f"{sc.id}_summary.csv")
        write_csv(path, ["spacing_over_lambda", "peak_power_rel", "hpbw_m"], rows)
        manifest.add_output(path)
    else:
        rows = size_tradeoff(
            list(cfg.sizes), cfg.wavelength_m, cfg.dfp, 0.5, cfg.gain_model,
            cfg.axis, cfg.span, cfg.samples,
        )
        path = os.path.join(out, f"{sc.id}_hpbw.csv")
        write_csv(path, ["sqrt_n", "hpbw_m"], rows)
        manifest.add_output(path)
    manifest.extras["mode"] = cfg.mode
    return 0


def cmd_security(sc: Scenario, out: str, threads: int, manifest: RunManifest) -> int:
    cfg = build_config(sc)
    summary = []
    for rows, cols in cfg.sizes:
        arr = UniformPlanarArray(
            rows, cols, cfg.spacing_wavelengths * cfg.wavelength_m, cfg.wavelength_m
        )
        scen = SecurityScenario(
            array=arr,
            dfps=cfg.dfps,
            grid=cfg.grid,
            noise_power=cfg.noise_power,
            target_snr_db=cfg.target_snr_db,
            threshold_db=cfg.threshold_db,
            gain_model=cfg.gain_model,
        )
        powers = calibrate_power(scen)
        smap = security_map(scen, powers, threads=threads)
        tag = f"{rows}x{cols}"

        t1, t2 = cfg.grid.axis_coords()
        n2 = t2.size
        maxdb = smap.sinr_db.max(axis=0)
        header = ["axis1_m", "axis2_m"]
        header.extend(f"sinr_db_stream_{m}" for m in range(smap.num_streams))
        header.extend(["max_sinr_db", "secure"])

        def rows_iter(smap=smap, maxdb=maxdb, n2=n2, t1=t1, t2=t2):
            for k in range(maxdb.size):
                i, j = divmod(k, n2)
                row = [t1[i], t2[j]]
                row.extend(smap.sinr_db[:, k])
                row.extend([maxdb[k], bool(smap.secure_mask[k])])
                yield row

        path = os.path.join(out, f"{sc.id}_{tag}_sinr.csv")
        write_csv(path, header, rows_iter())
        manifest.add_output(path)

        polylines = secure_boundary(smap)
        brows = []
        for pid, poly in enumerate(polylines):
            for vi, (a, b) in enumerate(poly):
                brows.append((pid, vi, a, b))
        path = os.path.join(out, f"{sc.id}_{tag}_boundary.csv")
        write_csv(path, ["polyline_id", "vertex_index", "axis1_m", "axis2_m"], brows)
        manifest.add_output(path)

        for m, dfp in enumerate(cfg.dfps):
            sdb = 10.0 * np.log10(sinr_at(scen, powers, dfp)[m])
            summary.append(
                (rows, cols, m, powers[m], sdb, smap.secure_area_fraction)
            )
    path = os.path.join(out, f"{sc.id}_summary.csv")
    write_csv(
        path,
        ["rows", "cols", "stream", "tx_power", "sinr_at_dfp_db", "secure_area_fraction"],
        summary,
    )
    manifest.add_output(path)
    manifest.extras["dfps"] = [[p.x, p.y, p.z] for p in cfg.dfps]
    manifest.extras["power_split"] = "per-stream calibrated, equal-norm chains"
    return 0


def cmd_adaptive(sc: Scenario, out: str, threads: int, manifest: RunManifest, seed_override=None) -> int:
    cfg = build_config(sc)
    arr = cfg.array()
    seeds = [seed_override] if seed_override is not None else list(cfg.seeds)
    noise = cfg.rough_csi_noise if cfg.init == "rough-csi" else None
    summary = []
    failures = []
    for seed in seeds:
        run = run_sbf(
            arr, cfg.dfp, cfg.tile_rows, cfg.tile_cols, cfg.phase_bits,
            seed=seed, gain_model=cfg.gain_model, max_epochs=cfg.max_epochs,
            rough_csi_noise=noise,
        )
        path = os.path.join(out, f"{sc.id}_seed{seed}_epochs.csv")
        write_csv(
            path,
            ["epoch", "combined_power", "quantized_mrt_bound"],
            ((e, p, run.quantized_mrt_bound) for e, p in run.epoch_log),
        )
        manifest.add_output(path)
        ratio = run.final_power / run.quantized_mrt_bound
        summary.append(
            (seed, run.final_power, run.quantized_mrt_bound, ratio,
             run.epochs, run.total_queries)
        )
        if cfg.oracle:
            brute = exhaustive_max(run.partition, cfg.dfp, cfg.phase_bits, cfg.gain_model)
            gap = abs(run.final_power - brute) / brute
            if gap > 1e-12:
                failures.append((seed, run.final_power, brute))
    path = os.path.join(out, f"{sc.id}_summary.csv")
    write_csv(
        path,
        ["seed", "final_power", "quantized_mrt_bound", "ratio", "epochs", "total_queries"],
        summary,
    )
    manifest.add_output(path)
    manifest.extras["tiling"] = [cfg.tile_rows, cfg.tile_cols]
    manifest.extras["phase_bits"] = cfg.phase_bits
    manifest.extras["init"] = cfg.init
    manifest.extras["seeds"] = list(seeds)
    if cfg.oracle:
        manifest.extras["oracle_mismatches"] = len(failures)
        if failures:
            for seed, got, want in failures:
                print(
                    f"oracle mismatch at seed {seed}: reached {got:.12e}, "
                    f"exhaustive max {want:.12e}",
                    file=sys.stderr,
                )
            return 1
    if cfg.quality_threshold is not None:
        med = float(np.median([s[3] for s in summary]))
        manifest.extras["median_bound_ratio"] = med
        if med < cfg.quality_threshold:
            print(
                f"median power ratio {med:.4f} below threshold {cfg.quality_threshold}",
                file=sys.stderr,
            )
            return 1
    return 0


def cmd_verify(args) -> int:
    from .acceptance import run_all

    results = run_all(threads=_threads(args))
    rows = [
        (r.name, r.expected, r.observed, r.tolerance, "pass" if r.passed else "FAIL")
        for r in results
    ]
    header = ("claim", "expected", "observed", "tolerance", "verdict")
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(5)]
    for row in [header, *rows]:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    ok = all(r.passed for r in results)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_csv(
            os.path.join(args.out, "verify_report.csv"),
            ["claim", "expected", "observed", "tolerance", "verdict"],
            [
                (r.name, r.expected, r.observed, r.tolerance, "pass" if r.passed else "fail")
                for r in results
            ],
        )
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return 0 if ok else 1


COMMANDS = {
    "field-map": cmd_field_map,
    "tradeoffs": cmd_tradeoffs,
    "security": cmd_security,
    "adaptive": cmd_adaptive,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nearfocus",
        description="Near-field spot beamfocusing: reproducible datasets from scenario files.",
        epilog=f"builtin scenarios: {', '.join(BUILTIN_SCENARIOS)}",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, help=f"run a '{name}' scenario")
        sp.add_argument("--scenario", required=True, help="scenario file or builtin name")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override scenario seeds")
        sp.add_argument("--threads", type=int, default=None)
    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--out", default=None, help="optional directory for the report CSV")
    sp.add_argument("--threads", type=int, default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return cmd_verify(args)
    try:
        sc = load_scenario(args.scenario)
        if sc.kind != args.command:
            raise ScenarioError(
                f"scenario kind '{sc.kind}' does not match command '{args.command}'",
                path=sc.path,
                line=sc.line_of("kind"),
            )
        started = time.perf_counter()
        manifest = RunManifest(
            scenario=sc.raw,
            tool_version=__version__,
            input_sha256=scenario_sha256(sc),
        )
        os.makedirs(args.out, exist_ok=True)
        if args.command == "adaptive":
            code = cmd_adaptive(sc, args.out, _threads(args), manifest, args.seed)
        else:
            code = COMMANDS[args.command](sc, args.out, _threads(args), manifest)
        manifest.wall_clock_s = time.perf_counter() - started
        manifest.write(os.path.join(args.out, f"{sc.id}_manifest.json"))
        return code
    except ScenarioError as exc:
        print(exc.locate(), file=sys.stderr)
        return 2
    except NearfocusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
