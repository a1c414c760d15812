"""Command line: render a spec file, or datasets named directly."""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import SchemaMismatch
from .render import KINDS, PlotSpec, infer_kind, load_spec, render

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plotviews",
        description="Render nearfocus CSV datasets into figures.",
    )
    parser.add_argument("datasets", nargs="*", help="dataset CSV paths")
    parser.add_argument("--spec", help="PlotSpec file (TOML or JSON)")
    parser.add_argument("--kind", choices=KINDS, help="override the sniffed figure kind")
    parser.add_argument("--output", help="image path (.png or .svg)")
    parser.add_argument("--title", help="figure title")
    parser.add_argument("--dpi", type=int, default=150)
    return parser


def spec_from_args(args) -> PlotSpec:
    if args.spec:
        if args.datasets:
            raise ValueError("pass either --spec or dataset paths, not both")
        return load_spec(args.spec)
    if not args.datasets:
        raise ValueError("no input: pass dataset paths or --spec")
    kind = args.kind or infer_kind(args.datasets[0])
    if kind == "boundary":
        raise ValueError(
            "a boundary file accompanies a contour dataset; list the SINR map first"
        )
    if kind == "table":
        raise ValueError(f"{args.datasets[0]}: not a plottable dataset")
    output = args.output or os.path.splitext(args.datasets[0])[0] + ".png"
    return PlotSpec(
        kind=kind,
        datasets=tuple(args.datasets),
        output=output,
        title=args.title,
        dpi=args.dpi,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        spec = spec_from_args(args)
        out = render(spec)
    except SchemaMismatch as exc:
        print(f"schema mismatch: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
