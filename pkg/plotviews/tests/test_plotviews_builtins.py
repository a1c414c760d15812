"""Integration: every builtin nearfocus dataset renders without error.

Runs the primary CLI as a subprocess (never importing it) so these tests
exercise exactly the file-level contract. The dataset generation dominates
the runtime at a couple of minutes.
"""
from __future__ import annotations

import glob
import os
import shutil
import subprocess

import pytest

from plotviews import PlotSpec, render
from plotviews.render import infer_kind

BUILTINS = {
    "fig1b": "field-map",
    "fig1b-bfr": "field-map",
    "fig2": "security",
    "fig4a": "tradeoffs",
    "fig4b": "tradeoffs",
    "adaptive-16x16": "adaptive",
    "adaptive-oracle-2x2": "adaptive",
}

pytestmark = pytest.mark.skipif(
    shutil.which("nearfocus") is None, reason="nearfocus CLI not installed"
)


@pytest.fixture(scope="session")
def datasets(tmp_path_factory):
    root = tmp_path_factory.mktemp("builtins")
    for name, command in BUILTINS.items():
        out = root / name
        res = subprocess.run(
            ["nearfocus", command, "--scenario", name, "--out", str(out)],
            capture_output=True,
            text=True,
        )
        assert res.returncode == 0, f"{name}: {res.stderr}"
    return root


def render_all(folder, out_dir) -> int:
    """Render every plottable CSV in `folder`; contours get their boundary."""
    count = 0
    for path in sorted(glob.glob(os.path.join(folder, "*.csv"))):
        kind = infer_kind(path)
        if kind in ("table", "boundary"):
            continue
        files = [path]
        if kind == "contour":
            companion = path.replace("_sinr.csv", "_boundary.csv")
            if os.path.isfile(companion):
                files.append(companion)
        stem = os.path.splitext(os.path.basename(path))[0]
        out = os.path.join(out_dir, f"{stem}.png")
        render(PlotSpec(kind, tuple(files), out))
        assert os.path.getsize(out) > 1000
        count += 1
    return count


@pytest.mark.parametrize("name", sorted(BUILTINS))
def test_builtin_datasets_render(datasets, tmp_path, name):
    rendered = render_all(str(datasets / name), str(tmp_path))
    assert rendered >= 1


def test_fig4a_profiles_as_one_chart(datasets, tmp_path):
    profiles = sorted(glob.glob(str(datasets / "fig4a" / "*_profile.csv")))
    assert len(profiles) == 3
    out = str(tmp_path / "fig4a.png")
    render(PlotSpec("lines", tuple(profiles), out, title="HPBW vs spacing"))
    assert os.path.getsize(out) > 1000


def test_adaptive_seeds_as_one_chart(datasets, tmp_path):
    epochs = sorted(glob.glob(str(datasets / "adaptive-16x16" / "*_epochs.csv")))
    assert len(epochs) == 10
    out = str(tmp_path / "convergence.png")
    render(PlotSpec("convergence", tuple(epochs), out))
    assert os.path.getsize(out) > 1000
