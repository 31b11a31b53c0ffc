"""Ground states of sparse symmetric Hamiltonians.

Lanczos iteration with full reorthogonalization against every stored Krylov
vector. The Krylov basis is capped at ``SolverOptions.krylov_size`` vectors;
when a cycle fills it without converging, the iteration restarts from the
current Ritz vector. Small problems go to a dense symmetric eigensolver.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la

from .hamiltonian import SparseHamiltonian, apply, build_hamiltonian
from .lattice import CouplingParams, LadderGeometry, enumerate_sector, sector_values

log = logging.getLogger(__name__)

DEGENERACY_GAP = 1e-8
MIN_RELIABLE_ITERATIONS = 10


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, iterations: int, residual: float):
        super().__init__(message)
        self.iterations = iterations
        self.residual = residual


@dataclass(frozen=True)
class SolverOptions:
    tolerance: float = 1e-12
    max_iterations: int = 1000
    dense_threshold: int = 4096
    seed: int = 0
    krylov_size: int = 120

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.dense_threshold < 1:
            raise ValueError("dense_threshold must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.krylov_size < 2:
            raise ValueError("krylov_size must be >= 2")


@dataclass(frozen=True, eq=False)
class GroundStateResult:
    """Lowest eigenpair plus an estimate of the gap to the next level.

    ``gap`` is the spacing of the two lowest Ritz values of the final Lanczos
    cycle (exact on the dense path). ``gap_reliable`` is False when that cycle
    was shorter than ten steps.
    """

    energy: float
    amplitudes: np.ndarray = field(repr=False)
    gap: float
    iterations: int
    residual: float
    gap_reliable: bool = True
    method: str = "lanczos"

    @property
    def degenerate(self) -> bool:
        return self.gap < DEGENERACY_GAP


def _fix_sign(v: np.ndarray) -> np.ndarray:
    """Make the largest-magnitude entry positive.

    Entries within a relative 1e-10 of the maximum count as tied and the
    first one wins, so round-off cannot flip the choice.
    """
    mag = np.abs(v)
    i = int(np.argmax(mag >= mag.max() * (1 - 1e-10)))
    return -v if v[i] < 0 else v


def _residual(h: SparseHamiltonian, v: np.ndarray):
    hv = apply(h, v)
    energy = float(v @ hv)
    return energy, float(np.linalg.norm(hv - energy * v))


def _lowest_ritz(alpha, beta, k):
    """Two lowest eigenvalues of the k x k tridiagonal and the lowest vector."""
    if k == 1:
        return np.array([alpha[0]]), np.array([1.0])
    vals, vecs = la.eigh_tridiagonal(
        alpha[:k], beta[: k - 1], select="i", select_range=(0, 1)
    )
    return vals, vecs[:, 0]


def _lanczos_cycle(h, v0, m, tolerance):
    """One Lanczos run of at most ``m`` steps from the unit vector ``v0``.

    Returns (ritz values, Ritz vector, steps taken).
    """
    n = h.dimension
    basis = np.empty((m, n))
    alpha = np.zeros(m)
    beta = np.zeros(m)
    q = v0
    k = 0
    for j in range(m):
        basis[j] = q
        w = apply(h, q)
        alpha[j] = q @ w
        w -= alpha[j] * q
        if j > 0:
            w -= beta[j - 1] * basis[j - 1]
        # two Gram-Schmidt passes keep the basis orthogonal to working precision
        for _ in range(2):
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
        beta[j] = np.linalg.norm(w)
        k = j + 1
        vals, s = _lowest_ritz(alpha, beta, k)
        if beta[j] * abs(s[-1]) <= 0.5 * tolerance or beta[j] == 0.0 or k == m:
            break
        q = w / beta[j]
    ritz = basis[:k].T @ s
    return vals, ritz / np.linalg.norm(ritz), k


def _lanczos(h: SparseHamiltonian, start: np.ndarray, opts: SolverOptions) -> GroundStateResult:
    m_cap = min(opts.krylov_size, h.dimension)
    v = start / np.linalg.norm(start)
    total = 0
    while True:
        m = min(m_cap, opts.max_iterations - total)
        vals, v, k = _lanczos_cycle(h, v, m, opts.tolerance)
        total += k
        energy, residual = _residual(h, v)
        if residual <= opts.tolerance:
            break
        if total >= opts.max_iterations:
            raise ConvergenceError(
                f"Lanczos did not converge in {total} iterations "
                f"(residual {residual:.3e} > {opts.tolerance:.1e})",
                iterations=total,
                residual=residual,
            )
        log.debug("lanczos restart after %d iterations, residual %.3e", total, residual)
    gap = float(vals[1] - vals[0]) if len(vals) > 1 else math.inf
    return GroundStateResult(
        energy=energy,
        amplitudes=_fix_sign(v),
        gap=max(gap, 0.0),
        iterations=total,
        residual=residual,
        gap_reliable=len(vals) > 1 and k >= MIN_RELIABLE_ITERATIONS,
    )


def _dense(h: SparseHamiltonian, opts: SolverOptions) -> GroundStateResult:
    n = h.dimension
    vals, vecs = la.eigh(h.to_dense(), subset_by_index=[0, min(1, n - 1)])
    v = vecs[:, 0] / np.linalg.norm(vecs[:, 0])
    energy, residual = _residual(h, v)
    if residual > opts.tolerance:
        # polish the LAPACK vector; rarely needed
        return _lanczos(h, v, opts)
    return GroundStateResult(
        energy=energy,
        amplitudes=_fix_sign(v),
        gap=float(vals[1] - vals[0]) if n > 1 else math.inf,
        iterations=0,
        residual=residual,
        method="dense",
    )


def start_vector(dimension: int, seed: int) -> np.ndarray:
    v = np.random.default_rng(seed).standard_normal(dimension)
    return v / np.linalg.norm(v)


def ground_state(h: SparseHamiltonian, opts: SolverOptions = SolverOptions()) -> GroundStateResult:
    """Lowest eigenpair of ``h``, started from a seeded random vector."""
    if h.dimension < 1:
        raise ValueError("cannot diagonalize a zero-dimensional operator")
    if h.dimension <= opts.dense_threshold:
        return _dense(h, opts)
    return _lanczos(h, start_vector(h.dimension, opts.seed), opts)


def ground_state_warm(
    h: SparseHamiltonian, start: np.ndarray, opts: SolverOptions = SolverOptions()
) -> GroundStateResult:
    """Like :func:`ground_state` but Lanczos starts from ``start``."""
    if h.dimension < 1:
        raise ValueError("cannot diagonalize a zero-dimensional operator")
    start = np.asarray(start, dtype=np.float64)
    if start.shape != (h.dimension,):
        raise ValueError(f"start has shape {start.shape}, expected ({h.dimension},)")
    norm = np.linalg.norm(start)
    if not norm > 0 or not math.isfinite(norm):
        raise ValueError("start vector must have a finite nonzero norm")
    if h.dimension <= opts.dense_threshold:
        return _dense(h, opts)
    return _lanczos(h, start / norm, opts)


def scan_sectors(
    geom: LadderGeometry,
    params: CouplingParams,
    opts: SolverOptions = SolverOptions(),
    max_sites: int = 16,
) -> dict[int, float]:
    """Ground energy of every Sz sector, keyed by ``sz_twice``.

    Used to confirm which sector holds the global ground state before a
    sweep restricted to one sector.
    """
    if geom.n_sites > max_sites:
        raise ValueError(f"sector scan limited to {max_sites} sites")
    energies = {}
    for sz in sector_values(geom.n_sites):
        basis = enumerate_sector(geom.n_sites, sz)
        energies[sz] = ground_state(build_hamiltonian(geom, params, basis), opts).energy
    return energies
