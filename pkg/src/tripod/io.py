"""Deterministic CSV/JSON emission with sidecar run manifests.

Every output file is written atomically (temp file + rename) and is
accompanied by a manifest recording the resolved parameters, grids,
code version, wall-clock duration and SHA-256 digests of the outputs,
so identical configs reproduce byte-identical artifacts.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time

from . import __version__
from .params import LatticeParams, params_to_dict

# 17 significant digits round-trip IEEE doubles exactly
_FLOAT_FMT = "%.17g"


def format_value(value) -> str:
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return _FLOAT_FMT % value
    return str(value)


def _atomic_write_bytes(path: str, data: bytes) -> str:
    """Write bytes atomically; returns the SHA-256 hex digest."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-tripod-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return hashlib.sha256(data).hexdigest()


def write_csv(path: str, header, rows) -> str:
    """Write a CSV with fixed float formatting; returns its digest."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    data = ("\n".join(lines) + "\n").encode("utf-8")
    return _atomic_write_bytes(path, data)


def write_json(path: str, payload: dict) -> str:
    data = (json.dumps(payload, indent=2, sort_keys=True) + "\n").encode()
    return _atomic_write_bytes(path, data)


class RunManifest:
    """Collects run metadata and writes the sidecar JSON."""

    def __init__(self, command: str, params: LatticeParams | None,
                 extra: dict | None = None):
        self.command = command
        self.params = params
        self.extra = extra or {}
        self.digests: dict[str, str] = {}
        self._t0 = time.monotonic()

    def add_output(self, path: str, digest: str) -> None:
        self.digests[os.path.basename(path)] = digest

    def write(self, out_path: str) -> str:
        payload = {
            "command": self.command,
            "version": __version__,
            "params": params_to_dict(self.params) if self.params else None,
            "duration_s": round(time.monotonic() - self._t0, 3),
            "outputs": self.digests,
        }
        payload.update(self.extra)
        manifest_path = out_path + ".manifest.json"
        write_json(manifest_path, payload)
        return manifest_path
