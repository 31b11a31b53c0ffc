"""Ground-state fidelity, fidelity susceptibility and entanglement entropies."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .lattice import SectorBasis

NORM_TOL = 1e-10
EIGEN_FLOOR = 1e-14
RDM_TOL = 1e-10


def _check_unit(psi: np.ndarray, name: str):
    norm = np.linalg.norm(psi)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"{name} is not normalized (norm {norm!r})")


def fidelity(psi_a, psi_b) -> float:
    """Absolute overlap of two real unit vectors.

    Evaluated as ``1 - min(|a - b|^2, |a + b|^2) / 2`` so that ``1 - F`` keeps
    full relative precision when the states are nearly parallel.
    """
    psi_a = np.asarray(psi_a, dtype=np.float64)
    psi_b = np.asarray(psi_b, dtype=np.float64)
    if psi_a.shape != psi_b.shape:
        raise ValueError(f"length mismatch: {psi_a.shape} vs {psi_b.shape}")
    _check_unit(psi_a, "psi_a")
    _check_unit(psi_b, "psi_b")
    a = psi_a / np.linalg.norm(psi_a)
    b = psi_b / np.linalg.norm(psi_b)
    gap = min(float(np.sum((a - b) ** 2)), float(np.sum((a + b) ** 2)))
    return min(max(1.0 - 0.5 * gap, 0.0), 1.0)


def fidelity_susceptibility(f: float, delta: float, n: int) -> float:
    """Finite-step estimate ``2 (1 - f) / (n delta**2)``.

    ``n`` is the number of rungs.
    """
    if delta == 0:
        raise ValueError("delta must be nonzero")
    if n < 1:
        raise ValueError("n must be a positive integer")
    if not 0.0 <= f <= 1.0 + 1e-12:
        raise ValueError(f"fidelity must lie in [0, 1], got {f!r}")
    return 2.0 * (1.0 - min(f, 1.0)) / (n * delta * delta)


@dataclass(frozen=True)
class FidelityPoint:
    lam: float
    f: float
    s: float
    degenerate_flag: bool = False


def fidelity_point(psi_a, psi_b, lam: float, delta: float, n: int,
                   degenerate: bool = False) -> FidelityPoint:
    f = fidelity(psi_a, psi_b)
    return FidelityPoint(lam, f, fidelity_susceptibility(f, delta, n), degenerate)


@dataclass(frozen=True, eq=False)
class ReducedDensityMatrix:
    """Density matrix of the sites in ``subsystem_sites``.

    Row/column index bit ``k`` is the spin on ``subsystem_sites[k]``.
    """

    subsystem_sites: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        k = len(self.subsystem_sites)
        if self.matrix.shape != (1 << k, 1 << k):
            raise ValueError(f"matrix shape {self.matrix.shape} does not fit {k} sites")
        if not np.allclose(self.matrix, self.matrix.T, rtol=0, atol=RDM_TOL):
            raise ValueError("density matrix is not symmetric")
        tr = float(np.trace(self.matrix))
        if abs(tr - 1.0) > RDM_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")

    @property
    def n_sites(self) -> int:
        return len(self.subsystem_sites)


def reduced_density_matrix(psi, basis: SectorBasis, subsystem_sites) -> ReducedDensityMatrix:
    """Trace out every site not in ``subsystem_sites``."""
    psi = np.asarray(psi, dtype=np.float64)
    sites = tuple(int(s) for s in subsystem_sites)
    if psi.shape != (basis.dimension,):
        raise ValueError(f"psi has shape {psi.shape}, expected ({basis.dimension},)")
    _check_unit(psi, "psi")
    if not 1 <= len(sites) <= basis.n_sites - 1:
        raise ValueError("subsystem must be a nonempty proper subset of the sites")
    if len(set(sites)) != len(sites):
        raise ValueError(f"duplicate sites in {sites}")
    if min(sites) < 0 or max(sites) >= basis.n_sites:
        raise ValueError(f"sites {sites} out of range for {basis.n_sites} sites")

    sub, env = kernels.subsystem_split(basis.states, np.array(sites, dtype=np.int64))
    _, env_index = np.unique(env, return_inverse=True)
    # amplitude matrix psi[env, sub]; rho = M^T M sums over environments
    amp = np.zeros((int(env_index.max()) + 1, 1 << len(sites)))
    amp[env_index.ravel(), sub] = psi
    rho = amp.T @ amp
    rho = 0.5 * (rho + rho.T)
    return ReducedDensityMatrix(sites, rho)


def entanglement_spectrum(rho: ReducedDensityMatrix) -> np.ndarray:
    p = np.linalg.eigvalsh(rho.matrix)
    if p[0] < -RDM_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {p[0]!r}")
    return p


def von_neumann_entropy(rho: ReducedDensityMatrix) -> float:
    """Entropy in bits; eigenvalues below 1e-14 are dropped."""
    p = entanglement_spectrum(rho)
    p = p[p > EIGEN_FLOOR]
    entropy = float(-(p * np.log2(p)).sum())
    return min(max(entropy, 0.0), float(rho.n_sites))


def entropy_derivative(j_rung, entropy) -> np.ndarray:
    """dE/dJ on a uniform grid.

    Central differences inside, second-order one-sided differences at the
    two ends.
    """
    j_rung = np.asarray(j_rung, dtype=np.float64)
    entropy = np.asarray(entropy, dtype=np.float64)
    if j_rung.shape != entropy.shape or j_rung.ndim != 1:
        raise ValueError("j_rung and entropy must be 1-d arrays of equal length")
    if len(j_rung) < 3:
        raise ValueError("need at least 3 grid points")
    steps = np.diff(j_rung)
    h = float(steps.mean())
    if not h > 0:
        raise ValueError("grid must be strictly increasing")
    if np.max(np.abs(steps - h)) > 1e-9 * h:
        raise ValueError("grid spacing is not uniform")
    return np.gradient(entropy, h, edge_order=2)
