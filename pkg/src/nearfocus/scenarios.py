"""Scenario files: parsing, validation, and builtin reproduction parameter sets.

Scenarios are TOML or JSON. Validation happens before any computation and
failures carry a best-effort line number pointing into the source file.
Builtin scenarios ship as package data so the reproduction parameters are
auditable and editable.
"""
from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from importlib import resources

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

from .errors import ScenarioError
from .geometry import Point3, SamplingGrid, UniformPlanarArray

C_LIGHT_M_S = 299792458.0

KINDS = ("field-map", "tradeoffs", "security", "adaptive")

BUILTIN_SCENARIOS = (
    "fig1b",
    "fig1b-bfr",
    "fig2",
    "fig4a",
    "fig4b",
    "adaptive-16x16",
    "adaptive-oracle-2x2",
)


@dataclass(frozen=True)
class Scenario:
    id: str
    kind: str
    raw: dict
    path: str
    text: str

    def line_of(self, key: str) -> int:
        """Best-effort line number of a key in the source text."""
        leaf = key.split(".")[-1]
        pat = re.compile(rf"(^|[\[\s\"']){re.escape(leaf)}([\]\s\"']|\s*=)")
        for i, ln in enumerate(self.text.splitlines(), 1):
            if pat.search(ln):
                return i
        return 0

    def fail(self, key: str, message: str) -> ScenarioError:
        return ScenarioError(message, path=self.path, line=self.line_of(key))

    def require(self, key: str, within: dict | None = None):
        node = self.raw if within is None else within
        cur = node
        for part in key.split("."):
            if not isinstance(cur, dict) or part not in cur:
                raise self.fail(key, f"missing required field '{key}'")
            cur = cur[part]
        return cur

    def get(self, key: str, default=None):
        cur = self.raw
        for part in key.split("."):
            if not isinstance(cur, dict) or part not in cur:
                return default
            cur = cur[part]
        return cur


def builtin_text(name: str) -> str:
    ref = resources.files("nearfocus.data").joinpath(f"{name}.toml")
    return ref.read_text(encoding="utf-8")


def load_scenario(path_or_name: str) -> Scenario:
    """Load a scenario from a file path or a builtin name."""
    if os.path.exists(path_or_name):
        path = path_or_name
        with open(path, "rb") as f:
            data = f.read()
        text = data.decode("utf-8")
        try:
            if path.endswith(".json"):
                raw = json.loads(text)
            else:
                raw = tomllib.loads(text)
        except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
            line = getattr(exc, "lineno", 0)
            m = re.search(r"line (\d+)", str(exc))
            if not line and m:
                line = int(m.group(1))
            raise ScenarioError(f"parse error: {exc}", path=path, line=line) from exc
    elif path_or_name in BUILTIN_SCENARIOS:
        path = f"builtin:{path_or_name}"
        text = builtin_text(path_or_name)
        raw = tomllib.loads(text)
    else:
        raise ScenarioError(
            f"'{path_or_name}' is neither a file nor a builtin scenario "
            f"(builtins: {', '.join(BUILTIN_SCENARIOS)})",
            path=path_or_name,
        )
    if not isinstance(raw, dict) or not raw:
        raise ScenarioError("missing required field 'id'", path=path)
    sc = Scenario(
        id=str(raw.get("id", "")),
        kind=str(raw.get("kind", "")),
        raw=raw,
        path=path,
        text=text,
    )
    if not sc.id:
        raise sc.fail("id", "missing required field 'id'")
    if sc.kind not in KINDS:
        raise sc.fail("kind", f"field 'kind' must be one of {KINDS}, got '{sc.kind}'")
    return sc


def scenario_sha256(sc: Scenario) -> str:
    from .runio import sha256_bytes

    return sha256_bytes(sc.text.encode("utf-8"))


def _point(sc: Scenario, key: str, node) -> Point3:
    try:
        return Point3(float(node["x"]), float(node["y"]), float(node["z"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise sc.fail(key, f"field '{key}' must have numeric x, y, z") from exc


def _wavelength(sc: Scenario) -> float:
    f = float(sc.require("frequency_hz"))
    if f <= 0:
        raise sc.fail("frequency_hz", "frequency_hz must be > 0")
    return C_LIGHT_M_S / f


def _array(sc: Scenario, node: dict, lam: float, key: str) -> UniformPlanarArray:
    try:
        rows = int(node["rows"])
        cols = int(node["cols"])
    except (KeyError, TypeError, ValueError) as exc:
        raise sc.fail(key, f"'{key}' entries need integer rows and cols") from exc
    if "spacing_m" in node:
        spacing = float(node["spacing_m"])
    elif "spacing_wavelengths" in node:
        spacing = float(node["spacing_wavelengths"]) * lam
    else:
        spacing = float(sc.get("spacing_wavelengths", 0.5)) * lam
    plane = str(node.get("plane", sc.get("plane", "xz")))
    center = node.get("center", [0.0, 0.0, 0.0])
    try:
        return UniformPlanarArray(
            rows=rows,
            cols=cols,
            spacing_m=spacing,
            carrier_wavelength_m=lam,
            center=Point3(*(float(c) for c in center)),
            plane=plane,
        )
    except ValueError as exc:
        raise sc.fail(key, f"invalid array: {exc}") from exc


def _grid(sc: Scenario, key: str = "grid") -> SamplingGrid:
    node = sc.require(key)
    try:
        origin = node["origin"]
        grid = SamplingGrid(
            kind=str(node["kind"]),
            origin=Point3(*(float(c) for c in origin)),
            axes=tuple(tuple(float(c) for c in a) for a in node["axes"]),
            extents=tuple(
                tuple(float(c) for c in e) if isinstance(e, (list, tuple)) else float(e)
                for e in node["extents"]
            ),
            resolution=tuple(int(r) for r in node["resolution"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise sc.fail(key, f"invalid grid: {exc}") from exc
    return grid


def _gain(sc: Scenario) -> str:
    g = str(sc.get("gain_model", "inverse_distance"))
    if g not in ("unit", "inverse_distance"):
        raise sc.fail("gain_model", f"gain_model must be 'unit' or 'inverse_distance', got '{g}'")
    return g


@dataclass(frozen=True)
class FieldMapConfig:
    arrays: tuple
    dfp: Point3
    grid: SamplingGrid
    gain_model: str
    normalization: str
    eta: float
    peak_threshold: float

    @staticmethod
    def from_scenario(sc: Scenario) -> "FieldMapConfig":
        lam = _wavelength(sc)
        nodes = sc.require("arrays")
        if not isinstance(nodes, list) or not nodes:
            raise sc.fail("arrays", "field 'arrays' must be a nonempty list of tables")
        arrays = tuple(_array(sc, n, lam, "arrays") for n in nodes)
        norm = str(sc.get("normalization", "peak_one"))
        if norm not in ("raw", "peak_one"):
            raise sc.fail("normalization", f"normalization must be 'raw' or 'peak_one', got '{norm}'")
        eta = float(sc.get("metrics.eta", 0.9))
        thr = float(sc.get("metrics.peak_threshold", 0.5))
        if not (0.0 < eta < 1.0):
            raise sc.fail("eta", "metrics.eta must be in (0, 1)")
        if not (0.0 < thr <= 1.0):
            raise sc.fail("peak_threshold", "metrics.peak_threshold must be in (0, 1]")
        return FieldMapConfig(
            arrays=arrays,
            dfp=_point(sc, "dfp", sc.require("dfp")),
            grid=_grid(sc),
            gain_model=_gain(sc),
            normalization=norm,
            eta=eta,
            peak_threshold=thr,
        )


@dataclass(frozen=True)
class TradeoffsConfig:
    mode: str
    rows: int
    cols: int
    wavelength_m: float
    dfp: Point3
    spacings: tuple
    sizes: tuple
    gain_model: str
    axis: str
    span: tuple
    samples: int

    @staticmethod
    def from_scenario(sc: Scenario) -> "TradeoffsConfig":
        lam = _wavelength(sc)
        mode = str(sc.require("mode"))
        if mode not in ("spacing", "size"):
            raise sc.fail("mode", f"mode must be 'spacing' or 'size', got '{mode}'")
        spacings: tuple = ()
        sizes: tuple = ()
        if mode == "spacing":
            vals = sc.require("spacings")
            if not isinstance(vals, list) or not vals or any(
                not isinstance(v, (int, float)) or v <= 0 for v in vals
            ):
                raise sc.fail("spacings", "field 'spacings' must be a list of positive numbers")
            spacings = tuple(float(v) for v in vals)
        else:
            vals = sc.require("sizes")
            if not isinstance(vals, list) or not vals or any(
                not isinstance(v, int) or v < 1 for v in vals
            ):
                raise sc.fail("sizes", "field 'sizes' must be a list of integers >= 1")
            sizes = tuple(int(v) for v in vals)
        prof = sc.get("profile", {})
        span = tuple(float(v) for v in prof.get("span", (0.6, 1.4)))
        if len(span) != 2 or span[1] <= span[0]:
            raise sc.fail("span", "profile.span must be an increasing [lo, hi] pair")
        return TradeoffsConfig(
            mode=mode,
            rows=int(sc.get("rows", 60)),
            cols=int(sc.get("cols", 60)),
            wavelength_m=lam,
            dfp=_point(sc, "dfp", sc.require("dfp")),
            spacings=spacings,
            sizes=sizes,
            gain_model=_gain(sc),
            axis=str(prof.get("axis", "y-line")),
            span=span,
            samples=int(prof.get("samples", 801)),
        )


@dataclass(frozen=True)
class SecurityConfig:
    sizes: tuple
    spacing_wavelengths: float
    wavelength_m: float
    dfps: tuple
    grid: SamplingGrid
    noise_power: float
    target_snr_db: float
    threshold_db: float
    gain_model: str

    @staticmethod
    def from_scenario(sc: Scenario) -> "SecurityConfig":
        lam = _wavelength(sc)
        nodes = sc.require("dfps")
        if not isinstance(nodes, list) or len(nodes) < 1:
            raise sc.fail("dfps", "field 'dfps' must be a nonempty list of tables")
        dfps = tuple(_point(sc, "dfps", n) for n in nodes)
        for i in range(len(dfps)):
            for j in range(i + 1, len(dfps)):
                gap = sum((a - b) ** 2 for a, b in zip(
                    (dfps[i].x, dfps[i].y, dfps[i].z), (dfps[j].x, dfps[j].y, dfps[j].z)
                )) ** 0.5
                if gap < 1e-6:
                    raise sc.fail("dfps", f"dfps {i} and {j} coincide")
        sizes_node = sc.require("sizes")
        try:
            sizes = tuple((int(r), int(c)) for r, c in sizes_node)
        except (TypeError, ValueError) as exc:
            raise sc.fail("sizes", "field 'sizes' must be a list of [rows, cols] pairs") from exc
        target = float(sc.get("target_snr_db", 10.0))
        thr = float(sc.get("threshold_db", 5.0))
        if target <= thr:
            raise sc.fail("target_snr_db", "target_snr_db must exceed threshold_db")
        return SecurityConfig(
            sizes=sizes,
            spacing_wavelengths=float(sc.get("spacing_wavelengths", 0.5)),
            wavelength_m=lam,
            dfps=dfps,
            grid=_grid(sc),
            noise_power=float(sc.get("noise_power", 1.0)),
            target_snr_db=target,
            threshold_db=thr,
            gain_model=_gain(sc),
        )


@dataclass(frozen=True)
class AdaptiveConfig:
    rows: int
    cols: int
    spacing_wavelengths: float
    wavelength_m: float
    tile_rows: int
    tile_cols: int
    phase_bits: int
    dfp: Point3
    seeds: tuple
    init: str
    rough_csi_noise: float
    max_epochs: int
    gain_model: str
    oracle: bool
    quality_threshold: float | None

    @staticmethod
    def from_scenario(sc: Scenario) -> "AdaptiveConfig":
        lam = _wavelength(sc)
        rows = int(sc.require("rows"))
        cols = int(sc.require("cols"))
        tr = int(sc.require("tile_rows"))
        tc = int(sc.require("tile_cols"))
        if tr < 1 or tc < 1 or rows % tr or cols % tc:
            raise sc.fail(
                "tile_rows", f"{tr}x{tc} tiles do not divide a {rows}x{cols} array"
            )
        bits = int(sc.require("phase_bits"))
        if bits < 1:
            raise sc.fail("phase_bits", "phase_bits must be >= 1")
        seeds = sc.get("seeds", [0])
        if not isinstance(seeds, list) or not seeds or any(not isinstance(s, int) for s in seeds):
            raise sc.fail("seeds", "field 'seeds' must be a list of integers")
        init = str(sc.get("init", "random"))
        if init not in ("random", "rough-csi"):
            raise sc.fail("init", f"init must be 'random' or 'rough-csi', got '{init}'")
        qt = sc.get("quality_threshold")
        return AdaptiveConfig(
            rows=rows,
            cols=cols,
            spacing_wavelengths=float(sc.get("spacing_wavelengths", 0.5)),
            wavelength_m=lam,
            tile_rows=tr,
            tile_cols=tc,
            phase_bits=bits,
            dfp=_point(sc, "dfp", sc.require("dfp")),
            seeds=tuple(int(s) for s in seeds),
            init=init,
            rough_csi_noise=float(sc.get("rough_csi_noise", 0.2)),
            max_epochs=int(sc.get("max_epochs", 50)),
            gain_model=_gain(sc),
            oracle=bool(sc.get("oracle", False)),
            quality_threshold=None if qt is None else float(qt),
        )

    def array(self) -> UniformPlanarArray:
        return UniformPlanarArray(
            rows=self.rows,
            cols=self.cols,
            spacing_m=self.spacing_wavelengths * self.wavelength_m,
            carrier_wavelength_m=self.wavelength_m,
        )


CONFIG_BY_KIND = {
    "field-map": FieldMapConfig.from_scenario,
    "tradeoffs": TradeoffsConfig.from_scenario,
    "security": SecurityConfig.from_scenario,
    "adaptive": AdaptiveConfig.from_scenario,
}


def build_config(sc: Scenario):
    return CONFIG_BY_KIND[sc.kind](sc)
