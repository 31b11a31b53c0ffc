"""Sector-restricted XXZ ladder Hamiltonian in compressed sparse row form."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from ._backend import kernels
from .lattice import BondKind, CouplingParams, LadderGeometry, SectorBasis


@dataclass(frozen=True, eq=False)
class SparseHamiltonian:
    """Real symmetric operator stored row-compressed.

    Each row holds its entries sorted by column, and the diagonal is always
    present even when it is zero.
    """

    dimension: int
    indptr: np.ndarray = field(repr=False)
    indices: np.ndarray = field(repr=False)
    data: np.ndarray = field(repr=False)
    num_threads: int = 1

    def row(self, r: int) -> list[tuple[int, float]]:
        lo, hi = self.indptr[r], self.indptr[r + 1]
        return list(zip(self.indices[lo:hi].tolist(), self.data[lo:hi].tolist()))

    @property
    def nnz(self) -> int:
        return len(self.data)

    @cached_property
    def diagonal(self) -> np.ndarray:
        return self.to_scipy().diagonal()

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix(
            (self.data, self.indices, self.indptr), shape=(self.dimension, self.dimension)
        )

    def to_dense(self) -> np.ndarray:
        return self.to_scipy().toarray()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return apply(self, x)


def bond_weights(geom: LadderGeometry, params: CouplingParams):
    """Per-bond (site_a, site_b, diagonal weight, flip weight) arrays.

    A leg bond carries ``J * Delta`` on the Sz Sz term; a rung bond is
    isotropic. The flip weight is half the exchange since
    ``SxSx + SySy = (S+S- + S-S+) / 2``.
    """
    site_a = np.array([b.site_a for b in geom.bonds], dtype=np.int64)
    site_b = np.array([b.site_b for b in geom.bonds], dtype=np.int64)
    exchange = np.array(
        [params.j_leg if b.kind is BondKind.LEG else params.j_rung for b in geom.bonds],
        dtype=np.float64,
    )
    anisotropy = np.array(
        [params.delta if b.kind is BondKind.LEG else 1.0 for b in geom.bonds],
        dtype=np.float64,
    )
    return site_a, site_b, exchange * anisotropy, 0.5 * exchange


def build_hamiltonian(
    geom: LadderGeometry,
    params: CouplingParams,
    basis: SectorBasis,
    backend=None,
) -> SparseHamiltonian:
    if basis.n_sites != geom.n_sites:
        raise ValueError(
            f"basis has {basis.n_sites} sites but the ladder has {geom.n_sites}"
        )
    k = kernels if backend is None else backend
    site_a, site_b, w_diag, w_flip = bond_weights(geom, params)
    indptr, indices, data = k.build_csr(
        np.ascontiguousarray(basis.states), geom.n_sites, site_a, site_b, w_diag, w_flip
    )
    return SparseHamiltonian(
        dimension=basis.dimension, indptr=indptr, indices=indices, data=data
    )


def apply(h: SparseHamiltonian, x: np.ndarray) -> np.ndarray:
    """Return ``H @ x``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (h.dimension,):
        raise ValueError(f"vector has shape {x.shape}, expected ({h.dimension},)")
    return kernels.csr_matvec(h.indptr, h.indices, h.data, x, h.num_threads)
