"""Command-line interface: spectrum runs, sweeps, analytic tables, validation.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    ConfigError,
    RunConfig,
    apply_overrides,
    build_system,
    config_to_dict,
    config_to_toml,
    load_config,
    parse_config_dict,
)
from .hierarchy import BasisSizeError
from .oracle import chain_modes, ring_modes, ring_strength_printed
from .model import Geometry
from .solver import SolverError, SweepPlan, sweep_frequency, sweep_parameter
from .spectrum import spectrum_from_blocks, sweep_from_rows

__all__ = ["main", "entry"]


def _float_repr(x: float) -> str:
    """Shortest representation that parses back to the same double."""
    return repr(float(x))


def _resolve_config(args) -> RunConfig:
    if getattr(args, "config", None):
        raw = config_to_dict(load_config(args.config))
    else:
        raw = config_to_dict(RunConfig())
    raw = apply_overrides(raw, getattr(args, "set", None) or [])
    return parse_config_dict(raw, source=args.config or "<defaults>")


def _effective_workers(cfg: RunConfig, args) -> int:
    workers = cfg.numerics.workers
    threads = getattr(args, "threads", None)
    if threads is not None:
        workers = min(workers, max(1, threads))
    return workers


def _plan_from(cfg: RunConfig, workers: int, with_axis: bool) -> SweepPlan:
    n = cfg.numerics
    axis = None
    if with_axis:
        axis = (cfg.sweep.axis, tuple(float(v) for v in cfg.sweep.values))
    return SweepPlan(
        omega_grid=np.linspace(n.omega_min, n.omega_max, n.omega_points),
        epsilon=n.epsilon,
        parameter_axis=axis,
        e_max=n.e_max,
        workers=workers,
        residual_tol=n.residual_tol,
        direct_limit=n.direct_limit,
        max_unknowns=n.max_unknowns,
    )


def _output_paths(cfg: RunConfig, args):
    stem = getattr(args, "output", None)
    if stem:
        base = Path(stem)
    else:
        base = Path(cfg.output.directory) / cfg.output.stem
    base.parent.mkdir(parents=True, exist_ok=True)
    return base.with_suffix(".csv"), base.with_name(base.name + ".meta.json")


def _write_meta(path, cfg, result, wall_time, workers):
    meta = {
        "config": config_to_dict(cfg),
        "provenance": {
            "package": "vibrospec",
            "version": __version__,
            "residual_max": result.meta.get("residual_max", 0.0),
            "wall_time_s": wall_time,
            "workers": workers,
        },
    }
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2)
        fh.write("\n")


def _base_meta(cfg: RunConfig) -> dict:
    return {"numerics": {"epsilon": cfg.numerics.epsilon}}


def cmd_spectrum(args) -> int:
    cfg = _resolve_config(args)
    if args.print_config:
        print(config_to_toml(cfg), end="")
        return 0
    if cfg.sweep.axis is not None:
        raise ConfigError("config defines a sweep axis; use the 'sweep' command")
    workers = _effective_workers(cfg, args)
    system = build_system(cfg)
    plan = _plan_from(cfg, workers, with_axis=False)

    t0 = time.perf_counter()
    blocks = sweep_frequency(system, plan)
    result = spectrum_from_blocks(blocks, system.aggregate.dipoles, _base_meta(cfg))
    wall = time.perf_counter() - t0

    csv_path, meta_path = _output_paths(cfg, args)
    with open(csv_path, "w", newline="") as fh:
        fh.write("omega,F\n")
        for w, f in zip(result.omega, result.f):
            fh.write(f"{_float_repr(w)},{_float_repr(f)}\n")
    _write_meta(meta_path, cfg, result, wall, workers)
    print(f"wrote {csv_path} and {meta_path}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _resolve_config(args)
    if args.print_config:
        print(config_to_toml(cfg), end="")
        return 0
    if cfg.sweep.axis is None:
        raise ConfigError("the 'sweep' command needs sweep.axis and sweep.values")
    workers = _effective_workers(cfg, args)
    system = build_system(cfg)
    plan = _plan_from(cfg, workers, with_axis=True)

    t0 = time.perf_counter()
    rows = sweep_parameter(system, plan)
    result = sweep_from_rows(
        rows, plan.parameter_axis[1], system.aggregate.dipoles, _base_meta(cfg)
    )
    wall = time.perf_counter() - t0

    csv_path, meta_path = _output_paths(cfg, args)
    with open(csv_path, "w", newline="") as fh:
        fh.write("axis_value,omega,F\n")
        for value, row in zip(result.axis_values, result.f):
            vtxt = _float_repr(value)
            for w, f in zip(result.omega, row):
                fh.write(f"{vtxt},{_float_repr(w)},{_float_repr(f)}\n")
    _write_meta(meta_path, cfg, result, wall, workers)
    print(f"wrote {csv_path} and {meta_path}")
    return 0


def analytic_table(geometry, n, coupling, angle):
    """Rows (j, omega_j, f_j[, f_printed]) for the requested aggregate."""
    geometry = Geometry.parse(geometry)
    if geometry is Geometry.RING:
        table = ring_modes(n, coupling, angle)
        return geometry, [
            (j, w, f, ring_strength_printed(j, n)) for (j, w, f) in table.entries
        ]
    table = chain_modes(n, coupling, angle)
    return geometry, list(table.entries)


def cmd_analytic(args) -> int:
    geometry, rows = analytic_table(args.geometry, args.n, args.coupling, args.angle)
    if geometry is Geometry.RING:
        header = ["j", "omega", "f_eigvec", "f_closed_form"]
    else:
        header = ["j", "omega", "f"]
    lines = [" ".join(header)]
    for row in rows:
        lines.append(" ".join([str(row[0])] + [_float_repr(v) for v in row[1:]]))
    print("\n".join(lines))
    if args.csv:
        path = Path(args.csv)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join([str(row[0])] + [_float_repr(v) for v in row[1:]]) + "\n")
        print(f"wrote {path}")
    return 0


def cmd_validate(args) -> int:
    from .validate import run_profile

    out_dir = Path(args.output_dir) if args.output_dir else None
    results = run_profile(args.profile, grid_dir=out_dir, workers=args.threads or 1)
    failures = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"[{status}] criterion {res.criterion}: {res.name} -- {res.detail}")
        failures += 0 if res.passed else 1
    print(f"{len(results) - failures}/{len(results)} criteria passed")
    return 0 if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vibrospec",
        description=(
            "Linear absorption spectra of small quantum aggregates coupled to "
            "Lorentzian vibrational baths, solved in the Laplace domain."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_run_options(p):
        p.add_argument("--config", help="TOML config file (or a .meta.json sidecar)")
        p.add_argument(
            "--set", action="append", metavar="SECTION.KEY=VALUE",
            help="override one config entry (repeatable)",
        )
        p.add_argument("--print-config", action="store_true",
                       help="print the effective config and exit")
        p.add_argument("--threads", type=int, help="cap the solver worker count")
        p.add_argument("--output", help="output path stem (overrides [output])")

    p_spec = sub.add_parser("spectrum", help="single spectrum -> CSV + metadata")
    add_run_options(p_spec)
    p_spec.set_defaults(func=cmd_spectrum)

    p_sweep = sub.add_parser("sweep", help="parameter sweep -> long-format CSV")
    add_run_options(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_an = sub.add_parser("analytic", help="analytic mode table of the bare aggregate")
    p_an.add_argument("geometry", choices=["linear", "ring"])
    p_an.add_argument("n", type=int)
    p_an.add_argument("--coupling", type=float, default=1.0)
    p_an.add_argument("--angle", type=float, default=0.0)
    p_an.add_argument("--csv", help="also write the table to this CSV path")
    p_an.set_defaults(func=cmd_analytic)

    p_val = sub.add_parser("validate", help="run the validation matrix")
    p_val.add_argument("--profile", choices=["quick", "full"], default="quick")
    p_val.add_argument("--output-dir",
                       help="directory for full-profile reference data grids")
    p_val.add_argument("--threads", type=int, help="cap the solver worker count")
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, BasisSizeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())
