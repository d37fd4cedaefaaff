"""Plain-text serialization with reproducible bytes.

All writers are atomic (temp file + rename) and deterministic: JSON is
UTF-8 with sorted keys, CSV uses 15 significant digits with LF endings,
and rasters are 16-bit ASCII PGM (P2).  Wall-clock timestamps never enter
the payload; they go to a `<out>.meta.json` sidecar so golden-file
comparisons can ignore them.
"""
from __future__ import annotations

import json
import math
import os
import tempfile
from datetime import datetime, timezone

import numpy as np

from .husimi import HusimiField


def atomic_write(path: str, data: str) -> None:
    """Write text to `path` via a temp file in the same directory + rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-quasiweb-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_sidecar(path: str) -> None:
    """Record the wall-clock timestamp next to `path`, outside the payload."""
    stamp = datetime.now(timezone.utc).isoformat()
    atomic_write(
        path + ".meta.json",
        json.dumps({"written_at": stamp}, sort_keys=True) + "\n",
    )


def fmt_float(x: float) -> str:
    """15-significant-digit decimal rendering used by all text formats."""
    return f"{x:.15g}"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def write_json(path: str, payload: dict) -> None:
    """Deterministic JSON: UTF-8, sorted keys, 2-space indent, LF."""
    text = json.dumps(_jsonable(payload), sort_keys=True, indent=2,
                      ensure_ascii=False)
    atomic_write(path, text + "\n")
    write_sidecar(path)


def write_csv(path: str, header: list[str], rows, preamble: dict | None = None) -> None:
    """CSV with a header row; floats at 15 significant digits, LF endings.

    `preamble` (usually the run config) is embedded as leading `#` comment
    lines so the file stays self-describing.
    """
    lines = []
    if preamble:
        blob = json.dumps(_jsonable(preamble), sort_keys=True)
        lines.append(f"# config: {blob}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(
            fmt_float(v) if isinstance(v, (float, np.floating)) else str(v)
            for v in row
        ))
    atomic_write(path, "\n".join(lines) + "\n")
    write_sidecar(path)


def rasterize_cartesian(field: HusimiField, size: int = 256) -> np.ndarray:
    """Resample a polar field onto a size x size Cartesian grid.

    Bilinear interpolation in (r, phi) with periodic wraparound in phi;
    points beyond the outermost radius map to 0.
    """
    if size < 2:
        raise ValueError("raster size must be at least 2")
    r_vals = field.grid.r_values
    phi_vals = field.grid.phi_values
    n_phi = phi_vals.size
    dphi = 2.0 * math.pi / n_phi
    r_max = r_vals[-1]

    axis = np.linspace(-r_max, r_max, size)
    xx, yy = np.meshgrid(axis, axis)
    rr = np.hypot(xx, yy)
    pp = np.mod(np.arctan2(yy, xx), 2.0 * math.pi)

    inside = rr <= r_max
    r = np.clip(rr, r_vals[0], r_max)
    i = np.clip(np.searchsorted(r_vals, r) - 1, 0, r_vals.size - 2)
    tr = (r - r_vals[i]) / (r_vals[i + 1] - r_vals[i])
    j = np.clip((pp / dphi).astype(int), 0, n_phi - 1)
    tp = pp / dphi - j
    j1 = (j + 1) % n_phi

    v = field.values
    out = ((1 - tr) * (1 - tp) * v[i, j]
           + tr * (1 - tp) * v[i + 1, j]
           + (1 - tr) * tp * v[i, j1]
           + tr * tp * v[i + 1, j1])
    out[~inside] = 0.0
    return out


def write_pgm(path: str, field: HusimiField, size: int = 256) -> None:
    """16-bit ASCII PGM (P2, maxval 65535), min-max scaled raster."""
    img = rasterize_cartesian(field, size)
    lo, hi = float(img.min()), float(img.max())
    if hi > lo:
        scaled = np.round((img - lo) / (hi - lo) * 65535).astype(int)
    else:
        scaled = np.zeros_like(img, dtype=int)
    lines = ["P2", f"{size} {size}", "65535"]
    # image rows top-down: flip so +P points up
    for row in scaled[::-1]:
        lines.append(" ".join(str(v) for v in row))
    atomic_write(path, "\n".join(lines) + "\n")
    write_sidecar(path)


def read_config(path: str) -> dict[str, str]:
    """key=value configuration file; `#` comments and blank lines ignored."""
    out: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            key, val = line.split("=", 1)
            out[key.strip()] = val.strip()
    return out


def read_initial_conditions(path: str) -> list[tuple[float, float]]:
    """CSV of X,P initial conditions, one orbit per line; header optional."""
    points = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [p.strip() for p in line.split(",")]
            if lineno == 1 and parts[:2] == ["X", "P"]:
                continue
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected X,P")
            points.append((float(parts[0]), float(parts[1])))
    if not points:
        raise ValueError(f"{path}: no initial conditions found")
    return points
