"""Rendering behavior on synthetic datasets, plus the command line."""
from __future__ import annotations

import hashlib

import numpy as np
import pytest

from plotviews import EmptyPlotWarning, PlotSpec, SchemaMismatch, render
from plotviews.cli import main


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def map_csv(tmp_path, name="m.csv", n1=5, n2=4):
    lines = ["axis1_m,axis2_m,power"]
    for i in range(n1):
        for j in range(n2):
            lines.append(f"{i * 0.1:.1f},{j * 0.1:.1f},{np.hypot(i - 2, j - 1.5):.6f}")
    return write(tmp_path, name, "\n".join(lines) + "\n")


def sinr_csv(tmp_path, name="s.csv"):
    lines = ["axis1_m,axis2_m,sinr_db_stream_0,max_sinr_db,secure"]
    for i in range(4):
        for j in range(4):
            db = 10.0 - 3.0 * (i + j)
            lines.append(f"{i},{j},{db},{db},{int(db < 5.0)}")
    return write(tmp_path, name, "\n".join(lines) + "\n")


def boundary_csv(tmp_path, name="b.csv"):
    rows = ["polyline_id,vertex_index,axis1_m,axis2_m"]
    square = [(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)]
    rows += [f"0,{k},{x},{y}" for k, (x, y) in enumerate(square)]
    rows += [f"1,{k},{x + 2},{y}" for k, (x, y) in enumerate(square[:3])]
    return write(tmp_path, name, "\n".join(rows) + "\n")


def epochs_csv(tmp_path, name="e.csv"):
    rows = ["epoch,combined_power,quantized_mrt_bound"]
    rows += [f"{k},{1.0 - 0.5 ** (k + 1):.6f},1.05" for k in range(6)]
    return write(tmp_path, name, "\n".join(rows) + "\n")


def sha(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


def test_heatmap_renders(tmp_path):
    out = render(PlotSpec("heatmap", (map_csv(tmp_path),), str(tmp_path / "h.png")))
    assert out.endswith("h.png")
    assert (tmp_path / "h.png").stat().st_size > 1000


def test_contour_with_boundary_overlay(tmp_path):
    spec = PlotSpec(
        "contour",
        (sinr_csv(tmp_path), boundary_csv(tmp_path)),
        str(tmp_path / "c.png"),
        title="secure region",
    )
    assert (tmp_path / "c.png").exists() is False
    render(spec)
    assert (tmp_path / "c.png").stat().st_size > 1000


def test_lines_multiple_curves(tmp_path):
    a = write(tmp_path, "p_dd0p5_profile.csv", "position_m,power\n0,1\n1,0.5\n2,0.1\n")
    b = write(tmp_path, "p_dd1p0_profile.csv", "position_m,power\n0,0.9\n1,0.7\n2,0.2\n")
    render(PlotSpec("lines", (a, b), str(tmp_path / "l.png")))
    assert (tmp_path / "l.png").stat().st_size > 1000


def test_convergence_with_bound(tmp_path):
    render(PlotSpec("convergence", (epochs_csv(tmp_path),), str(tmp_path / "v.png")))
    assert (tmp_path / "v.png").stat().st_size > 1000


def test_renders_are_byte_identical(tmp_path):
    data = map_csv(tmp_path)
    p1 = str(tmp_path / "r1.png")
    p2 = str(tmp_path / "r2.png")
    render(PlotSpec("heatmap", (data,), p1))
    render(PlotSpec("heatmap", (data,), p2))
    assert sha(p1) == sha(p2)


def test_svg_output_is_deterministic(tmp_path):
    data = epochs_csv(tmp_path)
    p1 = str(tmp_path / "r1.svg")
    p2 = str(tmp_path / "r2.svg")
    render(PlotSpec("convergence", (data,), p1))
    render(PlotSpec("convergence", (data,), p2))
    assert sha(p1) == sha(p2)


def test_empty_map_warns_but_renders(tmp_path):
    p = write(tmp_path, "e.csv", "axis1_m,axis2_m,power\n")
    with pytest.warns(EmptyPlotWarning):
        render(PlotSpec("heatmap", (p,), str(tmp_path / "e.png")))
    assert (tmp_path / "e.png").stat().st_size > 1000


def test_corrupted_header_names_column(tmp_path):
    p = map_csv(tmp_path)
    text = open(p).read().replace("power", "pwr", 1)
    bad = write(tmp_path, "bad.csv", text)
    with pytest.raises(SchemaMismatch) as exc:
        render(PlotSpec("heatmap", (bad,), str(tmp_path / "x.png")))
    assert exc.value.column == "power"
    assert "power" in str(exc.value)


def test_contour_requires_sinr_column(tmp_path):
    with pytest.raises(SchemaMismatch) as exc:
        render(PlotSpec("contour", (map_csv(tmp_path),), str(tmp_path / "x.png")))
    assert exc.value.column == "max_sinr_db"


def test_incomplete_grid_rejected(tmp_path):
    p = write(tmp_path, "g.csv", "axis1_m,axis2_m,power\n0,0,1\n0,1,1\n1,0,1\n")
    with pytest.raises(SchemaMismatch):
        render(PlotSpec("heatmap", (p,), str(tmp_path / "x.png")))


def test_cli_positional_sniffs_kind(tmp_path, capsys):
    data = map_csv(tmp_path)
    assert main([data, "--output", str(tmp_path / "o.png")]) == 0
    assert "wrote" in capsys.readouterr().out
    assert (tmp_path / "o.png").stat().st_size > 1000


def test_cli_default_output_beside_input(tmp_path):
    data = map_csv(tmp_path)
    assert main([data]) == 0
    assert (tmp_path / "m.png").stat().st_size > 1000


def test_cli_spec_file(tmp_path):
    map_csv(tmp_path)
    spec = write(
        tmp_path,
        "plot.toml",
        'kind = "heatmap"\ndatasets = ["m.csv"]\noutput = "fig.png"\n',
    )
    assert main(["--spec", spec]) == 0
    assert (tmp_path / "fig.png").stat().st_size > 1000


def test_cli_rejects_spec_plus_paths(tmp_path, capsys):
    data = map_csv(tmp_path)
    spec = write(tmp_path, "plot.toml", 'kind = "heatmap"\ndatasets = ["m.csv"]\noutput = "f.png"\n')
    assert main(["--spec", spec, data]) == 2
    assert "not both" in capsys.readouterr().err


def test_cli_exit_codes(tmp_path, capsys):
    assert main([]) == 2
    metrics = write(tmp_path, "t.csv", "scenario_id,metric,value,unit\nx,peak,1,raw\n")
    assert main([metrics]) == 2
    boundary = boundary_csv(tmp_path)
    assert main([boundary]) == 2
    corrupt = write(tmp_path, "c.csv", "axis1_m,axis2_m,pwr\n0,0,1\n")
    assert main([corrupt, "--kind", "heatmap"]) == 2
    assert "schema mismatch" in capsys.readouterr().err
    assert main([str(tmp_path / "missing.csv")]) == 2
