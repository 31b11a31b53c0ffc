"""Command-line sweep driver.

Exit codes: 0 success, 1 invalid configuration, 2 solver failure, 3 I/O failure.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .eigensolver import SolverOptions
from .sweep import (
    DEFAULT_SUBSYSTEMS,
    ConfigError,
    SweepConfig,
    SweepSolverError,
    check_ground_sector,
    detect_critical_points,
    run_sweep,
    write_csv,
    write_report,
)

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

# flag name -> (SweepConfig/SolverOptions field, type)
_SCALARS = {
    "n_rungs": int,
    "j_leg": float,
    "delta": float,
    "jrung_min": float,
    "jrung_max": float,
    "jrung_step": float,
    "fid_delta": float,
    "sz_twice": int,
    "workers": int,
    "seed": int,
    "output": str,
    "report": str,
    "dense_threshold": int,
    "tolerance": float,
    "max_iterations": int,
    "krylov_size": int,
    "chunk_size": int,
}
_SWITCHES = ("allow_large", "scan_sectors")


class _ArgumentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ArgumentError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="xxzladder",
        description="Sweep the rung coupling of a two-leg XXZ ladder and record "
        "ground-state fidelity, fidelity susceptibility and entanglement entropies.",
    )
    p.add_argument("--config", help="flat key = value file; flags override its values")
    p.add_argument("--n-rungs", type=int)
    p.add_argument("--j-leg", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--jrung-min", type=float)
    p.add_argument("--jrung-max", type=float)
    p.add_argument("--jrung-step", type=float)
    p.add_argument("--fid-delta", type=float)
    p.add_argument("--sz-twice", type=int)
    p.add_argument(
        "--subsystem", action="append", metavar="NAME=SITES",
        help="repeatable; SITES is a comma-separated site list or one of "
        "central_rung, diag_pair, diag_pair_left",
    )
    p.add_argument("--workers", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--output", help="CSV path (default: stdout)")
    p.add_argument("--report", help="critical-point report path")
    p.add_argument("--dense-threshold", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--krylov-size", type=int)
    p.add_argument("--chunk-size", type=int)
    p.add_argument("--allow-large", action="store_true", default=None,
                   help="permit n_rungs >= 12 (long-running)")
    p.add_argument("--scan-sectors", action="store_true", default=None,
                   help="first confirm the chosen Sz sector holds the ground state")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    Keys may use dashes or underscores. ``subsystem`` may repeat.
    """
    values: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key == "subsystem":
            values.setdefault("subsystem", []).append(value)
        elif key in _SCALARS:
            try:
                values[key] = _SCALARS[key](value)
            except ValueError:
                raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
        elif key in _SWITCHES:
            values[key] = value.lower() in ("1", "true", "yes", "on")
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def _parse_subsystems(items) -> tuple[tuple[str, str], ...]:
    out = []
    for item in items:
        if "=" in item:
            name, spec = (s.strip() for s in item.split("=", 1))
        else:
            name = spec = item.strip()
        out.append((name, spec))
    return tuple(out)


def merged_settings(args: argparse.Namespace) -> dict:
    settings = read_config_file(args.config) if args.config else {}
    for key in list(_SCALARS) + list(_SWITCHES) + ["subsystem"]:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def config_from_settings(s: dict) -> tuple[SweepConfig, int]:
    base = SweepConfig()
    solver = SolverOptions(
        tolerance=s.get("tolerance", base.solver.tolerance),
        max_iterations=s.get("max_iterations", base.solver.max_iterations),
        dense_threshold=s.get("dense_threshold", base.solver.dense_threshold),
        seed=s.get("seed", base.solver.seed),
        krylov_size=s.get("krylov_size", base.solver.krylov_size),
    )
    config = SweepConfig(
        n_rungs=s.get("n_rungs", base.n_rungs),
        j_leg=s.get("j_leg", base.j_leg),
        delta=s.get("delta", base.delta),
        j_rung_min=s.get("jrung_min", base.j_rung_min),
        j_rung_max=s.get("jrung_max", base.j_rung_max),
        j_rung_step=s.get("jrung_step", base.j_rung_step),
        fid_delta=s.get("fid_delta", base.fid_delta),
        subsystems=_parse_subsystems(s["subsystem"]) if s.get("subsystem") else DEFAULT_SUBSYSTEMS,
        sz_twice=s.get("sz_twice", base.sz_twice),
        output_path=s.get("output"),
        solver=solver,
        chunk_size=s.get("chunk_size", base.chunk_size),
        allow_large=bool(s.get("allow_large", False)),
    )
    config.validate()
    return config, int(s.get("workers", 1))


def _check_writable(path: str):
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write to {path}")
    if Path(path).is_dir():
        raise OSError(f"{path} is a directory")


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _ArgumentError as exc:
        print(f"xxzladder: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        settings = merged_settings(args)
        config, workers = config_from_settings(settings)
    except (ConfigError, ValueError) as exc:
        print(f"xxzladder: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"xxzladder: {exc}", file=sys.stderr)
        return EXIT_IO

    report_path = settings.get("report")
    try:
        for path in (config.output_path, report_path):
            if path:
                _check_writable(path)
    except OSError as exc:
        print(f"xxzladder: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        if settings.get("scan_sectors"):
            if 2 * config.n_rungs > 16:
                print("xxzladder: sector scan skipped above 16 sites", file=sys.stderr)
            else:
                for lam, sz in check_ground_sector(config):
                    print(f"xxzladder: warning: at j_rung={lam:g} the ground state lies "
                          f"in sz_twice={sz}, not {config.sz_twice}", file=sys.stderr)
        series = run_sweep(config, workers=workers)
    except SweepSolverError as exc:
        print(f"xxzladder: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    report = detect_critical_points(series) if len(series) >= 5 else None
    try:
        write_csv(series, config.output_path or sys.stdout)
        if report is not None:
            if report_path:
                write_report(report, report_path)
            else:
                write_report(report, sys.stdout if config.output_path else sys.stderr)
    except OSError as exc:
        print(f"xxzladder: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
