"""Command-line front end.

Subcommands: cells, qe, husimi, classical, report.  Values come from flags,
falling back to an optional key=value config file (--config), falling back
to built-in defaults.  Exit codes: 0 success, 1 numeric failure, 2 config
error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import fileio
from .classical import (
    ClassicalState,
    SectionSet,
    poincare_section,
    ring_ensemble,
    section_symmetry_error,
    web_ensemble,
)
from .floquet import (
    DegenerateSpectrumError,
    build_cell_hamiltonian,
    edge_spacing,
    gaussian_ansatz,
    gaussian_overlap,
    ground_states,
    packet_width_quasiclassical,
    parity_transform,
    solve_cell,
)
from .husimi import (
    HusimiField,
    PolarGrid,
    find_maxima,
    husimi_qe,
    rotational_symmetry_error,
)
from .specfun import Cell, Params, bessel_zeros, cell_boundaries

_NUMERIC_ERRORS = (
    DegenerateSpectrumError,
    RuntimeError,
    ZeroDivisionError,
    FloatingPointError,
    np.linalg.LinAlgError,
)

_FORMATS = {
    "cells": ("json",),
    "qe": ("json",),
    "husimi": ("json", "csv", "pgm"),
    "classical": ("csv", "json"),
    "report": ("json",),
}

_DEFAULTS = {
    "mu": 4,
    "hbar0": 0.12,
    "nmax": 600,
    "ladder": 0,
    "cell": 1,
    "state": "all",
    "s": 0,
    "r_max": None,
    "steps_per_period": 256,
    "ic_file": None,
    "out": None,
    "fold": None,
    "config": None,
}
# per-command defaults where one size does not fit all
_PER_COMMAND = {
    "cells": {"eps": 0.002},
    "qe": {"eps": 0.002},
    "husimi": {"eps": 0.002, "nr": 400, "nphi": None},
    "classical": {"eps": 0.05, "nr": 12, "nphi": 16, "periods": 2000},
    "report": {"eps": 0.002, "nr": 400, "nphi": None, "periods": 10000},
}

_CONVERTERS = {
    "mu": int, "nmax": int, "ladder": int, "cell": int, "s": int,
    "nr": int, "nphi": int, "periods": int, "steps_per_period": int,
    "fold": int,
    "eps": float, "hbar0": float, "r_max": float,
    "state": str, "ic_file": str, "out": str, "format": str,
}


class ConfigError(Exception):
    """Invalid flag, config-file entry, or parameter combination."""


@dataclass
class RunConfig:
    """Effective settings of one CLI run; embedded in every output."""

    command: str
    mu: int
    eps: float
    hbar0: float
    nmax: int
    ladder: int
    cell: int
    state: str
    s: int
    r_max: float | None
    nr: int
    nphi: int | None
    periods: int
    steps_per_period: int
    ic_file: str | None
    out: str | None
    format: str
    fold: int | None

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def params(self) -> Params:
        return Params(self.mu, self.eps, self.hbar0, self.nmax)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasiweb",
        description=(
            "Quasienergy states, Husimi fields and stochastic-web sections "
            "of a resonantly driven harmonic oscillator."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        "cells": "list resonance cells (ladder, m/n ranges, boundary radii)",
        "qe": "quasienergy spectrum and Gaussian-ansatz summary of one cell",
        "husimi": "Husimi field(s) of a cell's ground state(s)",
        "classical": "stroboscopic section of a classical orbit ensemble",
        "report": "combined quantum/classical symmetry report",
    }
    for name, desc in descriptions.items():
        p = sub.add_parser(name, help=desc)
        p.add_argument("--config", help="key=value config file; flags override")
        p.add_argument("--mu", type=int)
        p.add_argument("--eps", type=float)
        p.add_argument("--hbar0", type=float)
        p.add_argument("--nmax", type=int)
        p.add_argument("--ladder", type=int)
        p.add_argument("--cell", type=int)
        p.add_argument("--state", choices=["upper", "lower", "all"])
        p.add_argument("--s", type=int, help="stroboscopic snapshot index")
        p.add_argument("--r-max", dest="r_max", type=float)
        p.add_argument("--nr", type=int,
                       help="radial grid points / ensemble rings")
        p.add_argument("--nphi", type=int,
                       help="angular grid points / ensemble angles")
        p.add_argument("--periods", type=int)
        p.add_argument("--steps-per-period", dest="steps_per_period", type=int)
        p.add_argument("--ic-file", dest="ic_file")
        p.add_argument("--out")
        p.add_argument("--format", choices=["csv", "json", "pgm"])
        if name == "report":
            p.add_argument("--fold", type=int,
                           help="override the symmetry fold under test")
    return parser


def _effective(args: argparse.Namespace) -> RunConfig:
    cmd = args.command
    defaults = dict(_DEFAULTS)
    defaults.update(_PER_COMMAND[cmd])
    defaults.setdefault("nr", 400)
    defaults.setdefault("nphi", None)
    defaults.setdefault("periods", 2000)
    defaults["format"] = _FORMATS[cmd][0]

    from_file: dict = {}
    if getattr(args, "config", None):
        try:
            raw = fileio.read_config(args.config)
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        for key, val in raw.items():
            dest = key.replace("-", "_")
            if dest not in _CONVERTERS:
                raise ConfigError(f"unknown config key: {key}")
            try:
                from_file[dest] = _CONVERTERS[dest](val)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {val}") from exc

    merged = {}
    for key in defaults:
        if key == "config":
            continue
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            merged[key] = cli_val
        elif key in from_file:
            merged[key] = from_file[key]
        else:
            merged[key] = defaults[key]

    if merged["format"] not in _FORMATS[cmd]:
        raise ConfigError(
            f"format {merged['format']!r} not supported by {cmd!r} "
            f"(choose from {', '.join(_FORMATS[cmd])})"
        )
    cfg = RunConfig(command=cmd, fold=merged.get("fold"), **{
        k: merged[k] for k in merged if k != "fold"
    })
    try:
        cfg.params  # validate the physics parameters eagerly
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


# ---------------------------------------------------------------------------
# shared computation helpers
# ---------------------------------------------------------------------------

def _find_cell(cfg: RunConfig) -> Cell:
    params = cfg.params
    m_max = (params.n_max - params.mu - cfg.ladder) // params.mu
    cells = cell_boundaries(params, cfg.ladder, m_max)
    for c in cells:
        if c.index == cfg.cell:
            return c
    raise ConfigError(
        f"cell {cfg.cell} not found (ladder {cfg.ladder} has "
        f"{len(cells)} cells up to n_max={params.n_max})"
    )


def _cell_record(params: Params, cell: Cell, truncated: bool) -> dict:
    levels = cell.levels(params.mu)
    return {
        "index": cell.index,
        "ladder": cell.ladder,
        "m_lo": cell.m_lo,
        "m_hi": cell.m_hi,
        "n_lo": int(levels[0]),
        "n_hi": int(levels[-1]),
        "n_states": cell.n_states,
        "r_lo": math.sqrt(2.0 * levels[0] * params.hbar0),
        "r_hi": math.sqrt(2.0 * levels[-1] * params.hbar0),
        "truncated": truncated,
    }


def _grid_for(cfg: RunConfig, cell: Cell) -> PolarGrid:
    params = cfg.params
    n_phi = cfg.nphi if cfg.nphi else 120 * params.mu
    if cfg.r_max is not None:
        r_hi = cfg.r_max
    else:
        n_top = int(cell.levels(params.mu)[-1])
        r_hi = 1.5 * math.sqrt(2.0 * n_top * params.hbar0)
    return PolarGrid.regular(r_hi, cfg.nr, n_phi)


def _selected_states(cfg: RunConfig, cell: Cell):
    states = solve_cell(build_cell_hamiltonian(cfg.params, cell))
    upper, lower = ground_states(states)
    chosen = {"upper": [upper], "lower": [lower],
              "all": [upper, lower]}[cfg.state]
    return states, chosen


def _emit(cfg: RunConfig, payload: dict) -> None:
    if cfg.out:
        fileio.write_json(cfg.out, payload)
    else:
        print(json.dumps(fileio._jsonable(payload), sort_keys=True, indent=2))


def _suffixed(path: str, tag: str) -> str:
    root, dot, ext = path.rpartition(".")
    if not dot:
        return f"{path}.{tag}"
    return f"{root}.{tag}.{ext}"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_cells(cfg: RunConfig) -> int:
    params = cfg.params
    m_max = (params.n_max - params.mu - cfg.ladder) // params.mu
    cells = cell_boundaries(params, cfg.ladder, m_max)
    records = [
        _cell_record(params, c, truncated=(c.index == len(cells)))
        for c in cells
    ]
    payload = {"config": cfg.as_dict(), "cells": records}
    if len(cells) == 1:
        payload["warning"] = (
            "basis truncation sits inside the first cell; "
            "no coupling sign change before n_max"
        )
    _emit(cfg, payload)
    return 0


def cmd_qe(cfg: RunConfig) -> int:
    params = cfg.params
    cell = _find_cell(cfg)
    states = solve_cell(build_cell_hamiltonian(params, cell))
    upper, lower = ground_states(states)
    ansatz = gaussian_ansatz(params, cell)
    a_e_bessel = packet_width_quasiclassical(params, ansatz.r_e)
    mean_gap, rel_std = edge_spacing(states, 3)
    payload = {
        "config": cfg.as_dict(),
        "cell": _cell_record(params, cell, truncated=False),
        "energies": [s.energy for s in states],
        "upper": {"energy": upper.energy, "coeffs": upper.coeffs},
        "lower": {"energy": lower.energy, "coeffs": lower.coeffs},
        "gaussian_ansatz": {
            "n_e": ansatz.n_e,
            "r_e": ansatz.r_e,
            "a_e_discrete": ansatz.a_e,
            "a_e_bessel": a_e_bessel,
            "delta_m": ansatz.delta_m,
            "action_half_width": ansatz.action_half_width(params.hbar0),
            "overlap_upper": gaussian_overlap(upper, ansatz),
        },
        "edge_spacing": {"mean_gap": mean_gap, "rel_std": rel_std},
    }
    _emit(cfg, payload)
    return 0


def cmd_husimi(cfg: RunConfig) -> int:
    params = cfg.params
    cell = _find_cell(cfg)
    _, chosen = _selected_states(cfg, cell)
    grid = _grid_for(cfg, cell)

    fields: dict[str, HusimiField] = {}
    for st in chosen:
        tag = "upper" if st.kind == "upper-ground" else "lower"
        fields[tag] = husimi_qe(params, st, grid, s=cfg.s)

    if cfg.format == "csv":
        if not cfg.out:
            raise ConfigError("--out is required for csv output")
        for tag, field in fields.items():
            path = _suffixed(cfg.out, tag) if len(fields) > 1 else cfg.out
            rows = (
                (float(r), float(phi), float(field.values[i, j]))
                for i, r in enumerate(grid.r_values)
                for j, phi in enumerate(grid.phi_values)
            )
            fileio.write_csv(path, ["r", "phi", "value"], rows,
                             preamble=cfg.as_dict())
        return 0

    if cfg.format == "pgm":
        if not cfg.out:
            raise ConfigError("--out is required for pgm output")
        for tag, field in fields.items():
            path = _suffixed(cfg.out, tag) if len(fields) > 1 else cfg.out
            fileio.write_pgm(path, field)
        return 0

    payload = {"config": cfg.as_dict(), "fields": {}}
    for tag, field in fields.items():
        folds = [f for f in (params.mu, 3) if grid.n_phi % f == 0]
        payload["fields"][tag] = {
            "values": field.values,
            "r_values": grid.r_values,
            "phi_values": grid.phi_values,
            "maxima": find_maxima(field),
            "symmetry_error": {
                str(f): rotational_symmetry_error(field, f) for f in folds
            },
        }
    _emit(cfg, payload)
    return 0


def _classical_initials(cfg: RunConfig) -> list[ClassicalState]:
    if cfg.ic_file:
        try:
            pts = fileio.read_initial_conditions(cfg.ic_file)
        except (OSError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return [ClassicalState(x, p) for x, p in pts]
    # default: nr rings x nphi angles spanning the first two cells
    z = bessel_zeros(cfg.mu, 2)
    return ring_ensemble(cfg.nr, cfg.nphi or 16, 0.15 * z[0], z[1])


def _section_report(sections: SectionSet, mu: int) -> dict:
    report: dict = {
        "n_points": int(sections.points().shape[0]),
        "escaped_orbits": [
            [int(i), int(s)]
            for i, s in enumerate(sections.escaped_at) if s >= 0
        ],
    }
    if report["n_points"] >= 1000:
        report["symmetry_error"] = {
            str(f): section_symmetry_error(sections, f) for f in (mu, 3)
        }
    return report


def cmd_classical(cfg: RunConfig) -> int:
    params = cfg.params
    initials = _classical_initials(cfg)
    sections = poincare_section(
        params, initials, cfg.periods, cfg.steps_per_period
    )
    report = _section_report(sections, params.mu)
    if report["escaped_orbits"]:
        print(
            f"warning: {len(report['escaped_orbits'])} orbit(s) escaped",
            file=sys.stderr,
        )
    if cfg.format == "csv":
        if not cfg.out:
            raise ConfigError("--out is required for csv output")
        rows = (
            (o, s, float(sections.xs[o, s]), float(sections.ps[o, s]))
            for o in range(sections.n_orbits)
            for s in range(sections.xs.shape[1])
            if np.isfinite(sections.xs[o, s])
        )
        preamble = {"config": cfg.as_dict(), "report": report}
        fileio.write_csv(cfg.out, ["orbit_id", "s", "X", "P"], rows,
                         preamble=preamble)
        return 0
    payload = {
        "config": cfg.as_dict(),
        "report": report,
        "orbits": [
            {
                "X": sections.xs[o][np.isfinite(sections.xs[o])],
                "P": sections.ps[o][np.isfinite(sections.ps[o])],
            }
            for o in range(sections.n_orbits)
        ],
    }
    _emit(cfg, payload)
    return 0


def cmd_report(cfg: RunConfig) -> int:
    params = cfg.params
    mu = params.mu
    fold = cfg.fold if cfg.fold else mu
    cell = _find_cell(cfg)
    states = solve_cell(build_cell_hamiltonian(params, cell))
    upper, lower = ground_states(states)
    energies = np.sort([s.energy for s in states])
    pairing_defect = float(np.max(np.abs(energies + energies[::-1])))
    parity_overlap = float(
        abs(np.dot(parity_transform(upper).coeffs, lower.coeffs))
    )

    grid = _grid_for(cfg, cell)
    f_upper = husimi_qe(params, upper, grid, s=cfg.s)
    f_lower = husimi_qe(params, lower, grid, s=cfg.s)
    fold_upper = rotational_symmetry_error(f_upper, fold)
    fold_lower = rotational_symmetry_error(f_lower, fold)
    combined = HusimiField(grid, f_upper.values + f_lower.values,
                           cfg.s, params)
    fold_combined_2mu = rotational_symmetry_error(combined, 2 * fold)

    ansatz = gaussian_ansatz(params, cell)
    maxima = find_maxima(f_upper)
    max_radius_err = max(
        abs(r - ansatz.r_e) / ansatz.r_e for r, _, _ in maxima
    )

    web = web_ensemble(Params(mu, 0.05, params.hbar0, params.n_max))
    sections = poincare_section(
        Params(mu, 0.05, params.hbar0, params.n_max),
        web, cfg.periods, 64,
    )
    cls_fold = section_symmetry_error(sections, fold)
    cls_fold3 = section_symmetry_error(sections, 3)

    checks = {
        "pairing_defect": (pairing_defect, pairing_defect < 1e-10),
        "parity_overlap": (parity_overlap, parity_overlap > 1.0 - 1e-10),
        "field_fold_upper": (fold_upper, fold_upper < 1e-6),
        "field_fold_lower": (fold_lower, fold_lower < 1e-6),
        "field_fold_combined_2mu": (fold_combined_2mu,
                                    fold_combined_2mu < 1e-6),
        "maxima_radius_rel_err": (max_radius_err, max_radius_err < 0.02),
        "classical_fold": (cls_fold, cls_fold < 0.05),
        "classical_fold3_ratio": (
            cls_fold3 / cls_fold if cls_fold > 0 else math.inf,
            cls_fold3 >= 5.0 * cls_fold,
        ),
    }
    payload = {
        "config": cfg.as_dict(),
        "fold_under_test": fold,
        "checks": {
            name: {"value": val, "passed": ok}
            for name, (val, ok) in checks.items()
        },
        "all_passed": all(ok for _, ok in checks.values()),
    }
    _emit(cfg, payload)
    if not payload["all_passed"]:
        failed = [n for n, (_, ok) in checks.items() if not ok]
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


_HANDLERS = {
    "cells": cmd_cells,
    "qe": cmd_qe,
    "husimi": cmd_husimi,
    "classical": cmd_classical,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _effective(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        return _HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
