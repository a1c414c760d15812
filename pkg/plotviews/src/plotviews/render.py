"""PlotSpec and the four figure kinds."""
from __future__ import annotations

import json
import os
import sys
import warnings
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "plotviews"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import EmptyPlotWarning, SchemaMismatch  # noqa: E402
from .datasets import (  # noqa: E402
    as_grid,
    axis_label,
    polylines,
    read_header,
    read_table,
    require_columns,
    sniff_kind,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

KINDS = ("heatmap", "contour", "lines", "convergence")


@dataclass(frozen=True)
class PlotSpec:
    kind: str
    datasets: tuple[str, ...]
    output: str
    title: str | None = None
    xlabel: str | None = None
    ylabel: str | None = None
    labels: tuple[str, ...] = field(default=())
    dpi: int = 150

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {', '.join(KINDS)}, got '{self.kind}'")
        if not self.datasets:
            raise ValueError("at least one dataset is required")
        for path in self.datasets:
            if not os.path.isfile(path):
                raise FileNotFoundError(path)
        if self.labels and len(self.labels) != len(self.datasets):
            raise ValueError("labels, when given, must match datasets one to one")
        if self.dpi < 10:
            raise ValueError("dpi must be >= 10")


def load_spec(path: str) -> PlotSpec:
    """PlotSpec from a TOML or JSON file; dataset paths resolve beside it."""
    with open(path, "rb") as f:
        raw = json.load(f) if path.endswith(".json") else tomllib.load(f)
    here = os.path.dirname(os.path.abspath(path))

    def resolve(p: str) -> str:
        return p if os.path.isabs(p) else os.path.join(here, p)

    try:
        datasets = tuple(resolve(p) for p in raw.pop("datasets"))
        output = resolve(raw.pop("output"))
        kind = raw.pop("kind")
    except KeyError as exc:
        raise ValueError(f"{path}: missing required field {exc}") from None
    if "labels" in raw:
        raw["labels"] = tuple(raw["labels"])
    return PlotSpec(kind=kind, datasets=datasets, output=output, **raw)


def _dataset_label(path: str) -> str:
    stem = os.path.splitext(os.path.basename(path))[0]
    for part in stem.split("_"):
        if part.startswith("dd") and part[2:].replace("p", "", 1).isdigit():
            return f"spacing {part[2:].replace('p', '.')} lambda"
        if part.startswith("seed") and part[4:].isdigit():
            return f"seed {part[4:]}"
    return stem


def _finish(fig, ax, spec: PlotSpec) -> str:
    if spec.title:
        ax.set_title(spec.title)
    if spec.xlabel:
        ax.set_xlabel(spec.xlabel)
    if spec.ylabel:
        ax.set_ylabel(spec.ylabel)
    out_dir = os.path.dirname(spec.output)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    # strip volatile metadata so byte-identical inputs give identical files
    if spec.output.endswith(".svg"):
        metadata = {"Date": None}
    else:
        metadata = {"Software": "plotviews"}
    fig.savefig(spec.output, dpi=spec.dpi, metadata=metadata)
    plt.close(fig)
    return spec.output


def _empty(ax, path: str) -> None:
    warnings.warn(EmptyPlotWarning(f"{path}: no data rows, rendering empty axes"))
    ax.text(0.5, 0.5, "no data", ha="center", va="center", transform=ax.transAxes)


def _render_heatmap(spec: PlotSpec) -> str:
    path = spec.datasets[0]
    header, data = read_table(path)
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    if data.shape[0] == 0:
        require_columns(path, header, ("axis1_m", "axis2_m", "power"))
        _empty(ax, path)
    else:
        a1, a2, grid = as_grid(path, header, data, "power")
        mesh = ax.pcolormesh(a1, a2, grid.T, shading="nearest", cmap="inferno")
        fig.colorbar(mesh, ax=ax, label="power")
        ax.set_aspect("equal")
    ax.set_xlabel(axis_label("axis1_m"))
    ax.set_ylabel(axis_label("axis2_m"))
    return _finish(fig, ax, spec)


def _render_contour(spec: PlotSpec) -> str:
    path = spec.datasets[0]
    header, data = read_table(path)
    fig, ax = plt.subplots(figsize=(6.5, 5.0))
    if data.shape[0] == 0:
        require_columns(path, header, ("axis1_m", "axis2_m", "max_sinr_db"))
        _empty(ax, path)
    else:
        a1, a2, grid = as_grid(path, header, data, "max_sinr_db")
        mesh = ax.pcolormesh(a1, a2, grid.T, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label=axis_label("max_sinr_db"))
        ax.set_aspect("equal")
    # boundary vertices are drawn verbatim, never re-derived from the field
    for extra in spec.datasets[1:]:
        bh, bd = read_table(extra)
        for line in polylines(extra, bh, bd):
            ax.plot(line[:, 0], line[:, 1], color="red", linewidth=1.5)
    ax.set_xlabel(axis_label("axis1_m"))
    ax.set_ylabel(axis_label("axis2_m"))
    return _finish(fig, ax, spec)


def _render_lines(spec: PlotSpec) -> str:
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    first_header: list[str] | None = None
    drew = False
    for i, path in enumerate(spec.datasets):
        header, data = read_table(path)
        if len(header) < 2:
            raise SchemaMismatch(
                "header", f"{path}: a line chart needs at least two columns"
            )
        if first_header is None:
            first_header = header
        if data.shape[0] == 0:
            _empty(ax, path)
            continue
        label = spec.labels[i] if spec.labels else _dataset_label(path)
        ax.plot(data[:, 0], data[:, 1], label=label)
        drew = True
    assert first_header is not None
    ax.set_xlabel(axis_label(first_header[0]))
    ax.set_ylabel(axis_label(first_header[1]))
    if drew and (len(spec.datasets) > 1 or spec.labels):
        ax.legend()
    return _finish(fig, ax, spec)


def _render_convergence(spec: PlotSpec) -> str:
    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    bound: float | None = None
    drew = False
    for i, path in enumerate(spec.datasets):
        header, data = read_table(path)
        require_columns(path, header, ("epoch", "combined_power", "quantized_mrt_bound"))
        if data.shape[0] == 0:
            _empty(ax, path)
            continue
        label = spec.labels[i] if spec.labels else _dataset_label(path)
        ax.plot(
            data[:, header.index("epoch")],
            data[:, header.index("combined_power")],
            label=label,
        )
        if bound is None:
            bound = float(data[-1, header.index("quantized_mrt_bound")])
        drew = True
    if bound is not None:
        ax.axhline(bound, color="black", linestyle="--", linewidth=1.0,
                   label="quantized MRT bound")
    ax.set_xlabel("epoch")
    ax.set_ylabel("combined power")
    if drew:
        ax.legend()
    return _finish(fig, ax, spec)


_RENDERERS = {
    "heatmap": _render_heatmap,
    "contour": _render_contour,
    "lines": _render_lines,
    "convergence": _render_convergence,
}


def render(spec: PlotSpec) -> str:
    """Write the figure for `spec` and return its output path."""
    return _RENDERERS[spec.kind](spec)


def infer_kind(path: str) -> str:
    """Figure kind for a dataset file, via its header alone."""
    return sniff_kind(read_header(path))
