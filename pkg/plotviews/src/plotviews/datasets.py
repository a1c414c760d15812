"""CSV loading and schema sniffing for the documented dataset formats."""
from __future__ import annotations

import csv

import numpy as np

from . import SchemaMismatch

MAP_PREFIX = ("axis1_m", "axis2_m")
BOUNDARY_HEADER = ("polyline_id", "vertex_index", "axis1_m", "axis2_m")
CONVERGENCE_HEADER = ("epoch", "combined_power", "quantized_mrt_bound")


def read_header(path: str) -> list[str]:
    """Just the header row, without touching the data body."""
    with open(path, newline="") as f:
        try:
            header = next(csv.reader(f), None)
        except UnicodeDecodeError:
            raise SchemaMismatch("header", f"{path}: not a text CSV file")
    if header is None:
        raise SchemaMismatch("header", f"{path}: file is empty, no header row")
    return header


def read_table(path: str) -> tuple[list[str], np.ndarray]:
    """Header and an (n, k) float array; raises SchemaMismatch on bad cells."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
            rows = list(reader)
        except StopIteration:
            raise SchemaMismatch("header", f"{path}: file is empty, no header row")
        except UnicodeDecodeError:
            raise SchemaMismatch("header", f"{path}: not a text CSV file")
    if not rows:
        return header, np.empty((0, len(header)))
    try:
        data = np.array(rows, dtype=float)
    except ValueError:
        bad = _first_non_numeric(header, rows)
        raise SchemaMismatch(bad, f"{path}: column '{bad}' holds non-numeric values")
    if data.shape[1] != len(header):
        raise SchemaMismatch(
            "header", f"{path}: rows have {data.shape[1]} fields, header has {len(header)}"
        )
    return header, data


def _first_non_numeric(header: list[str], rows: list[list[str]]) -> str:
    for row in rows:
        for j, cell in enumerate(row):
            try:
                float(cell)
            except ValueError:
                return header[j] if j < len(header) else f"field {j}"
    return "header"


def sniff_kind(header: list[str]) -> str:
    """Figure kind implied by a documented header, or 'table' for the rest."""
    cols = tuple(header)
    if cols[: len(CONVERGENCE_HEADER)] == CONVERGENCE_HEADER:
        return "convergence"
    if cols == BOUNDARY_HEADER:
        return "boundary"
    if cols[:2] == MAP_PREFIX:
        if any(c == "max_sinr_db" or c.startswith("sinr_db_stream_") for c in cols):
            return "contour"
        if "power" in cols:
            return "heatmap"
        return "table"
    if len(cols) >= 2 and not set(cols) & {"scenario_id", "metric", "unit"}:
        return "lines"
    return "table"


def require_columns(path: str, header: list[str], needed: tuple[str, ...]) -> None:
    for col in needed:
        if col not in header:
            raise SchemaMismatch(col, f"{path}: required column '{col}' is missing")


def as_grid(path: str, header: list[str], data: np.ndarray, value_col: str) -> tuple:
    """Reshape an axis1-major map table to (a1, a2, values) grid form."""
    require_columns(path, header, ("axis1_m", "axis2_m", value_col))
    c1 = data[:, header.index("axis1_m")]
    c2 = data[:, header.index("axis2_m")]
    a1 = np.unique(c1)
    a2 = np.unique(c2)
    values = data[:, header.index(value_col)]
    if values.size != a1.size * a2.size:
        raise SchemaMismatch(
            value_col,
            f"{path}: {values.size} rows do not fill a {a1.size}x{a2.size} grid",
        )
    # tolerate arbitrary row order as long as the grid is complete
    order = np.lexsort((c2, c1))
    return a1, a2, values[order].reshape(a1.size, a2.size)


def polylines(path: str, header: list[str], data: np.ndarray) -> list[np.ndarray]:
    """Vertex runs grouped by polyline_id, in file order, exactly as stored."""
    require_columns(path, header, BOUNDARY_HEADER)
    ids = data[:, header.index("polyline_id")]
    xy = data[:, [header.index("axis1_m"), header.index("axis2_m")]]
    return [xy[ids == i] for i in np.unique(ids)]


def axis_label(column: str) -> str:
    """Human-readable axis label with the unit suffix folded into brackets."""
    for suffix, unit in (("_m", "m"), ("_db", "dB"), ("_hz", "Hz"), ("_s", "s")):
        if column.endswith(suffix):
            return f"{column[: -len(suffix)].replace('_', ' ')} ({unit})"
    return column.replace("_", " ")
