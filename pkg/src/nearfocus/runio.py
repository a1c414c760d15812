"""Deterministic dataset output: atomic CSV/JSON writers and run manifests.

Floats are serialized with 9 significant digits, which keeps round-trip
error orders of magnitude below every tolerance used by the test suite.
Files are written to a temp name in the target directory and renamed into
place, so readers never observe partial output.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np


def fmt(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.9g}"


def _atomic_write(path: str, data: str) -> None:
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", newline="\n") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for blk in iter(lambda: f.read(1 << 20), b""):
            h.update(blk)
    return h.hexdigest()


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass
class RunManifest:
    """Provenance of one CLI run: inputs, outputs with checksums, timing."""

    scenario: dict
    tool_version: str
    input_sha256: str
    outputs: list = field(default_factory=list)
    wall_clock_s: float = 0.0
    extras: dict = field(default_factory=dict)

    def add_output(self, path: str) -> None:
        self.outputs.append(
            {
                "file": os.path.basename(path),
                "sha256": sha256_file(path),
                "bytes": os.path.getsize(path),
            }
        )

    def write(self, path: str) -> None:
        write_json(
            path,
            {
                "scenario": self.scenario,
                "tool_version": self.tool_version,
                "input_sha256": self.input_sha256,
                "outputs": self.outputs,
                "wall_clock_s": round(self.wall_clock_s, 3),
                "extras": self.extras,
            },
        )
