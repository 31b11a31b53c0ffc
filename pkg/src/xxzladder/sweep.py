"""Rung-coupling sweeps, CSV series and critical-point detection.

The grid is split into fixed-size chunks. Inside a chunk each ground state
warm-starts from the previous grid point, and the shifted point
``j_rung + fid_delta`` warm-starts from the unshifted one. Chunks depend only
on the configuration, so the output does not depend on the worker count.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .eigensolver import SolverOptions, ground_state, ground_state_warm, scan_sectors
from .hamiltonian import build_hamiltonian
from .lattice import CouplingParams, build_geometry, enumerate_sector
from .observables import (
    entropy_derivative,
    fidelity,
    fidelity_susceptibility,
    reduced_density_matrix,
    von_neumann_entropy,
)

log = logging.getLogger(__name__)

DEFAULT_SUBSYSTEMS = (("central_rung", "central_rung"), ("diag_pair", "diag_pair"))
LARGE_N_RUNGS = 12


class ConfigError(ValueError):
    pass


class SweepSolverError(RuntimeError):
    def __init__(self, j_rung: float, cause: Exception):
        super().__init__(f"solver failed at j_rung={j_rung!r}: {cause}")
        self.j_rung = j_rung
        self.cause = cause


def central_rung(n_rungs: int) -> int:
    return n_rungs // 2


def resolve_subsystem(spec: str, n_rungs: int) -> tuple[int, ...]:
    """Site indices for a keyword or a comma-separated site list.

    ``central_rung`` is both sites of rung ``c = n_rungs // 2``; ``diag_pair``
    is leg 0 of rung ``c`` with leg 1 of rung ``c + 1``; ``diag_pair_left``
    pairs leg 0 of rung ``c`` with leg 1 of rung ``c - 1``.
    """
    c = central_rung(n_rungs)
    spec = spec.strip()
    if spec == "central_rung":
        sites = (2 * c, 2 * c + 1)
    elif spec == "diag_pair":
        sites = (2 * c, 2 * (c + 1) + 1)
    elif spec == "diag_pair_left":
        sites = (2 * c, 2 * (c - 1) + 1)
    else:
        try:
            sites = tuple(int(s) for s in spec.split(",") if s.strip())
        except ValueError:
            raise ConfigError(f"bad subsystem spec {spec!r}") from None
    n_sites = 2 * n_rungs
    if not sites or len(set(sites)) != len(sites):
        raise ConfigError(f"subsystem {spec!r} must list distinct sites")
    if min(sites) < 0 or max(sites) >= n_sites or len(sites) >= n_sites:
        raise ConfigError(
            f"subsystem {spec!r} -> {sites} does not fit a ladder of {n_rungs} rungs"
        )
    return sites


@dataclass(frozen=True)
class SweepConfig:
    n_rungs: int = 8
    j_leg: float = 1.0
    delta: float = -0.5
    j_rung_min: float = -1.0
    j_rung_max: float = 1.0
    j_rung_step: float = 0.01
    fid_delta: float = 0.001
    subsystems: tuple[tuple[str, str], ...] = DEFAULT_SUBSYSTEMS
    sz_twice: int = 0
    output_path: str | None = None
    solver: SolverOptions = field(default_factory=SolverOptions)
    chunk_size: int = 10
    allow_large: bool = False

    def validate(self) -> None:
        if self.n_rungs < 1:
            raise ConfigError("n_rungs must be >= 1")
        if self.n_rungs >= LARGE_N_RUNGS and not self.allow_large:
            raise ConfigError(
                f"n_rungs >= {LARGE_N_RUNGS} is a long-running mode; pass --allow-large"
            )
        for name in ("j_leg", "delta", "j_rung_min", "j_rung_max", "j_rung_step", "fid_delta"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if not self.j_rung_min < self.j_rung_max:
            raise ConfigError("j_rung_min must be < j_rung_max")
        if not self.j_rung_step > 0:
            raise ConfigError("j_rung_step must be > 0")
        if not 0 < self.fid_delta < self.j_rung_step:
            raise ConfigError("fid_delta must satisfy 0 < fid_delta < j_rung_step")
        if self.chunk_size < 1:
            raise ConfigError("chunk_size must be >= 1")
        n_sites = 2 * self.n_rungs
        if abs(self.sz_twice) > n_sites or (n_sites + self.sz_twice) % 2:
            raise ConfigError(f"sz_twice={self.sz_twice} is not a sector of {n_sites} spins")
        names = [name for name, _ in self.subsystems]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate subsystem names {names}")
        for name, spec in self.subsystems:
            if not name or "," in name or any(c.isspace() for c in name):
                raise ConfigError(f"bad subsystem name {name!r}")
            resolve_subsystem(spec, self.n_rungs)

    @property
    def params(self) -> CouplingParams:
        return CouplingParams(self.j_leg, self.delta, 0.0)

    def grid(self) -> np.ndarray:
        n = int(round((self.j_rung_max - self.j_rung_min) / self.j_rung_step))
        pts = self.j_rung_min + self.j_rung_step * np.arange(n + 1)
        pts = pts[pts <= self.j_rung_max + 1e-9 * self.j_rung_step]
        # round away representation noise (0.30000000000000004) and -0.0
        return np.round(pts, 12) + 0.0

    def site_sets(self) -> dict[str, tuple[int, ...]]:
        return {name: resolve_subsystem(spec, self.n_rungs) for name, spec in self.subsystems}


@dataclass(eq=False)
class SweepSeries:
    j_rung: np.ndarray
    energy: np.ndarray
    gap: np.ndarray
    fidelity: np.ndarray
    susceptibility: np.ndarray
    entropy: dict[str, np.ndarray]
    derivative: dict[str, np.ndarray]
    degenerate: np.ndarray

    @property
    def names(self) -> list[str]:
        return list(self.entropy)

    def __len__(self) -> int:
        return len(self.j_rung)

    def header(self) -> list[str]:
        return (
            ["j_rung", "energy", "gap", "fidelity", "susceptibility"]
            + [f"E_{n}" for n in self.names]
            + [f"dE_{n}" for n in self.names]
            + ["degenerate"]
        )

    def slice(self, lo: float, hi: float) -> "SweepSeries":
        """Rows with ``lo <= j_rung <= hi``; derivatives recomputed on the slice."""
        m = (self.j_rung >= lo - 1e-12) & (self.j_rung <= hi + 1e-12)
        ent = {k: v[m] for k, v in self.entropy.items()}
        return SweepSeries(
            self.j_rung[m], self.energy[m], self.gap[m], self.fidelity[m],
            self.susceptibility[m], ent,
            {k: entropy_derivative(self.j_rung[m], v) for k, v in ent.items()},
            self.degenerate[m],
        )

    def equals(self, other: "SweepSeries") -> bool:
        """Bitwise equality of all columns."""
        if self.header() != other.header():
            return False
        pairs = [
            (self.j_rung, other.j_rung), (self.energy, other.energy),
            (self.gap, other.gap), (self.fidelity, other.fidelity),
            (self.susceptibility, other.susceptibility),
            (self.degenerate, other.degenerate),
        ]
        pairs += [(self.entropy[n], other.entropy[n]) for n in self.names]
        pairs += [(self.derivative[n], other.derivative[n]) for n in self.names]
        return all(np.array_equal(a, b) for a, b in pairs)


def _solve(h, start, opts):
    return ground_state(h, opts) if start is None else ground_state_warm(h, start, opts)


def _run_chunk(config: SweepConfig, points: list[float]) -> list[tuple]:
    geom = build_geometry(config.n_rungs)
    basis = enumerate_sector(geom.n_sites, config.sz_twice)
    sites = config.site_sets()
    opts = config.solver
    rows = []
    prev = None
    for lam in points:
        try:
            gs = _solve(build_hamiltonian(geom, config.params.with_j_rung(lam), basis), prev, opts)
            shifted = ground_state_warm(
                build_hamiltonian(geom, config.params.with_j_rung(lam + config.fid_delta), basis),
                gs.amplitudes,
                opts,
            )
        except Exception as exc:  # noqa: BLE001 - re-raised with the offending point
            raise SweepSolverError(lam, exc) from exc
        f = fidelity(gs.amplitudes, shifted.amplitudes)
        s = fidelity_susceptibility(f, config.fid_delta, config.n_rungs)
        entropies = [
            von_neumann_entropy(reduced_density_matrix(gs.amplitudes, basis, sites[name]))
            for name in sites
        ]
        rows.append((lam, gs.energy, gs.gap, f, s, entropies, gs.degenerate or shifted.degenerate))
        log.info("j_rung=%+.4f E0=%.12f F=%.12f S=%.6g", lam, gs.energy, f, s)
        prev = gs.amplitudes
    return rows


def run_sweep(config: SweepConfig, workers: int = 1) -> SweepSeries:
    config.validate()
    grid = config.grid()
    if len(grid) < 3:
        raise ConfigError("sweep grid needs at least 3 points")
    chunks = [
        [float(x) for x in grid[i : i + config.chunk_size]]
        for i in range(0, len(grid), config.chunk_size)
    ]
    if workers <= 1 or len(chunks) == 1:
        results = [_run_chunk(config, c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, [config] * len(chunks), chunks))
    rows = [r for chunk in results for r in chunk]
    names = [name for name, _ in config.subsystems]
    j = np.array([r[0] for r in rows])
    entropy = {n: np.array([r[5][k] for r in rows]) for k, n in enumerate(names)}
    return SweepSeries(
        j_rung=j,
        energy=np.array([r[1] for r in rows]),
        gap=np.array([r[2] for r in rows]),
        fidelity=np.array([r[3] for r in rows]),
        susceptibility=np.array([r[4] for r in rows]),
        entropy=entropy,
        derivative={n: entropy_derivative(j, e) for n, e in entropy.items()},
        degenerate=np.array([r[6] for r in rows], dtype=bool),
    )


def check_ground_sector(config: SweepConfig, n_points: int = 5) -> list[tuple[float, int]]:
    """Lowest-energy sector at ``n_points`` evenly spaced grid points.

    Returns ``(j_rung, sz_twice)`` pairs where the configured sector is NOT
    the ground-state sector (empty when the sector choice is confirmed).
    """
    config.validate()
    geom = build_geometry(config.n_rungs)
    grid = config.grid()
    picks = np.unique(np.linspace(0, len(grid) - 1, min(n_points, len(grid))).round().astype(int))
    bad = []
    for lam in grid[picks]:
        energies = scan_sectors(geom, config.params.with_j_rung(float(lam)), config.solver)
        lowest = min(energies.values())
        if energies[config.sz_twice] > lowest + 1e-10:
            bad.append((float(lam), min(energies, key=energies.get)))
    return bad


def _fmt(x: float) -> str:
    return "%.17g" % x


def write_csv(series: SweepSeries, path) -> None:
    lines = [",".join(series.header())]
    for i in range(len(series)):
        vals = [series.j_rung[i], series.energy[i], series.gap[i],
                series.fidelity[i], series.susceptibility[i]]
        vals += [series.entropy[n][i] for n in series.names]
        vals += [series.derivative[n][i] for n in series.names]
        lines.append(",".join(_fmt(v) for v in vals) + "," + str(int(series.degenerate[i])))
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def read_csv(path) -> SweepSeries:
    text = Path(path).read_text()
    lines = text.rstrip("\n").split("\n")
    header = lines[0].split(",")
    cols = list(zip(*[line.split(",") for line in lines[1:]])) if len(lines) > 1 else [()] * len(header)
    data = dict(zip(header, cols))
    names = [h[2:] for h in header if h.startswith("E_")]

    def arr(key):
        return np.array([float(v) for v in data[key]])

    return SweepSeries(
        j_rung=arr("j_rung"),
        energy=arr("energy"),
        gap=arr("gap"),
        fidelity=arr("fidelity"),
        susceptibility=arr("susceptibility"),
        entropy={n: arr(f"E_{n}") for n in names},
        derivative={n: arr(f"dE_{n}") for n in names},
        degenerate=np.array([v == "1" for v in data["degenerate"]], dtype=bool),
    )


@dataclass(frozen=True)
class CriticalFeature:
    kind: str
    subsystem: str | None
    j_rung: float
    value: float

    def line(self) -> str:
        return f"{self.kind} {self.subsystem or '-'} {_fmt(self.j_rung)} {_fmt(self.value)}"


@dataclass
class CriticalReport:
    features: list[CriticalFeature]

    def of_kind(self, kind: str, subsystem: str | None = None) -> list[CriticalFeature]:
        return [f for f in self.features
                if f.kind == kind and (subsystem is None or f.subsystem == subsystem)]

    def lines(self) -> list[str]:
        return [f.line() for f in self.features]


def local_extrema(values, maxima: bool = True) -> list[int]:
    """Indices of strict interior local extrema.

    A run of equal values counts as one extremum, reported at its first
    (smallest j_rung) index, when both neighbours of the run are strictly
    lower (maxima) or higher (minima). Endpoints are never reported.
    """
    v = np.asarray(values, dtype=np.float64)
    if not maxima:
        v = -v
    found = []
    i = 1
    n = len(v)
    while i < n - 1:
        j = i
        while j + 1 < n and v[j + 1] == v[i]:
            j += 1
        if j < n - 1 and v[i - 1] < v[i] and v[j + 1] < v[i]:
            found.append(i)
        i = j + 1
    return found


def detect_critical_points(series: SweepSeries) -> CriticalReport:
    if len(series) < 5:
        raise ValueError("need at least 5 rows to detect critical points")
    j = series.j_rung
    feats = []

    def add(kind, column, maxima, name=None):
        feats.extend(
            CriticalFeature(kind, name, float(j[i]), float(column[i]))
            for i in local_extrema(column, maxima)
        )

    add("susceptibility_peak", series.susceptibility, True)
    add("fidelity_valley", series.fidelity, False)
    for name in series.names:
        add("entropy_peak", series.entropy[name], True, name)
        add("entropy_valley", series.entropy[name], False, name)
        add("entropy_derivative_peak", series.derivative[name], True, name)
    return CriticalReport(feats)


def write_report(report: CriticalReport, path) -> None:
    text = "".join(line + "\n" for line in report.lines())
    if hasattr(path, "write"):
        path.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def with_solver(config: SweepConfig, **kwargs) -> SweepConfig:
    return replace(config, solver=replace(config.solver, **kwargs))
