"""File output: CSV tables, JSON reports and binary snapshots."""
from __future__ import annotations

import csv
import json
import subprocess
from functools import lru_cache
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .model import StateUV

__all__ = ["build_id", "write_csv", "write_json", "write_snapshot", "read_snapshot"]


@lru_cache(maxsize=1)
def build_id() -> str:
    """``git describe`` of the source tree, or the package version outside a checkout."""
    from . import __version__

    here = Path(__file__).resolve().parent
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"], cwd=here,
                             capture_output=True, text=True, timeout=10, check=True)
        return out.stdout.strip() or __version__
    except (OSError, subprocess.SubprocessError):
        return __version__


def _fmt(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row has {len(row)} fields, header has {len(header)}")
            w.writerow([_fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else repr(x)
    return obj


def write_json(path: Path, payload: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def write_snapshot(directory: Path, index: int, s: StateUV, scheme: str) -> Path:
    """Write ``snap_<index>.json`` and its ``.bin`` sidecar.

    The sidecar holds ``u`` then ``v`` as little-endian float64, each
    ``(Ny, Nx)`` in row-major order (y outer, x inner).
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = f"snap_{index:06d}"
    grid = s.grid
    u = s.u.to_physical().astype("<f8")
    v = s.v.to_physical().astype("<f8")
    with open(directory / f"{stem}.bin", "wb") as fh:
        fh.write(u.tobytes(order="C"))
        fh.write(v.tobytes(order="C"))
    nbytes = u.nbytes
    meta = {
        "grid": {"Nx": grid.Nx, "Ny": grid.Ny, "Lx": grid.Lx, "Ly": grid.Ly},
        "t": s.t,
        "index": index,
        "scheme": scheme,
        "build": build_id(),
        "data": f"{stem}.bin",
        "arrays": [
            {"name": "u", "offset": 0, "shape": [grid.Ny, grid.Nx], "dtype": "<f8", "order": "C"},
            {"name": "v", "offset": nbytes, "shape": [grid.Ny, grid.Nx], "dtype": "<f8", "order": "C"},
        ],
    }
    return write_json(directory / f"{stem}.json", meta)


def read_snapshot(json_path: Path) -> tuple[dict, dict[str, np.ndarray]]:
    json_path = Path(json_path)
    meta = json.loads(json_path.read_text(encoding="utf-8"))
    raw = (json_path.parent / meta["data"]).read_bytes()
    arrays = {}
    for a in meta["arrays"]:
        count = int(np.prod(a["shape"]))
        arrays[a["name"]] = np.frombuffer(raw, dtype=a["dtype"], count=count,
                                          offset=a["offset"]).reshape(a["shape"])
    return meta, arrays
