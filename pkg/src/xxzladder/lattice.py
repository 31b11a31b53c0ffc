"""Ladder geometry, coupling constants and fixed-magnetization bases.

Sites are numbered rung-major: ``site(leg, rung) = 2 * rung + leg`` with
``leg`` in {0, 1}. A basis state is an integer whose bit ``k`` is the spin on
site ``k`` (1 = up, 0 = down).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels

MAX_SITES = 62


class BondKind(enum.Enum):
    LEG = "leg"
    RUNG = "rung"


@dataclass(frozen=True)
class Bond:
    site_a: int
    site_b: int
    kind: BondKind


@dataclass(frozen=True)
class LadderGeometry:
    """Two-leg ladder with open boundaries along the legs."""

    n_rungs: int
    bonds: tuple[Bond, ...]
    boundary: str = "open"

    @property
    def n_sites(self) -> int:
        return 2 * self.n_rungs

    @staticmethod
    def site(leg: int, rung: int) -> int:
        return 2 * rung + leg

    @property
    def leg_bonds(self) -> tuple[Bond, ...]:
        return tuple(b for b in self.bonds if b.kind is BondKind.LEG)

    @property
    def rung_bonds(self) -> tuple[Bond, ...]:
        return tuple(b for b in self.bonds if b.kind is BondKind.RUNG)


def build_geometry(n_rungs: int) -> LadderGeometry:
    """Bond list of a ``2 x n_rungs`` ladder.

    Rung bonds come first in rung order, followed by the leg bonds of leg 0
    and then leg 1.
    """
    if int(n_rungs) != n_rungs or n_rungs < 1:
        raise ValueError(f"n_rungs must be a positive integer, got {n_rungs!r}")
    n_rungs = int(n_rungs)
    if 2 * n_rungs > MAX_SITES:
        raise ValueError(f"at most {MAX_SITES // 2} rungs are supported")
    site = LadderGeometry.site
    bonds = [Bond(site(0, i), site(1, i), BondKind.RUNG) for i in range(n_rungs)]
    for leg in (0, 1):
        bonds.extend(
            Bond(site(leg, i), site(leg, i + 1), BondKind.LEG)
            for i in range(n_rungs - 1)
        )
    return LadderGeometry(n_rungs=n_rungs, bonds=tuple(bonds))


@dataclass(frozen=True)
class CouplingParams:
    """Leg exchange ``j_leg``, leg anisotropy ``delta`` and rung exchange ``j_rung``."""

    j_leg: float = 1.0
    delta: float = -0.5
    j_rung: float = 0.0

    def __post_init__(self):
        for name in ("j_leg", "delta", "j_rung"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")

    def with_j_rung(self, j_rung: float) -> "CouplingParams":
        return CouplingParams(self.j_leg, self.delta, j_rung)


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Computational basis states with fixed total Sz, in ascending order.

    ``sz_twice`` is ``2 * Sz = 2 * n_up - n_sites`` so it is always integral.
    """

    n_sites: int
    sz_twice: int
    states: np.ndarray = field(repr=False)

    @property
    def n_up(self) -> int:
        return (self.n_sites + self.sz_twice) // 2

    @property
    def dimension(self) -> int:
        return len(self.states)

    def unrank(self, index: int) -> int:
        if not 0 <= index < self.dimension:
            raise IndexError(f"index {index} out of range for dimension {self.dimension}")
        return int(self.states[index])

    def rank(self, bits) -> int:
        return rank_state(self, bits)

    def rank_many(self, words) -> np.ndarray:
        """Vectorized rank; entries not in the sector map to -1."""
        words = np.ascontiguousarray(words, dtype=np.int64)
        return kernels.rank_states(self.states, words, self.n_sites)


def enumerate_sector(n_sites: int, sz_twice: int) -> SectorBasis:
    if n_sites < 1 or n_sites > MAX_SITES:
        raise ValueError(f"n_sites must be in [1, {MAX_SITES}], got {n_sites}")
    if abs(sz_twice) > n_sites:
        raise ValueError(f"|sz_twice| = {abs(sz_twice)} exceeds n_sites = {n_sites}")
    if (n_sites + sz_twice) % 2:
        raise ValueError(f"n_sites + sz_twice must be even, got {n_sites} + {sz_twice}")
    n_up = (n_sites + sz_twice) // 2
    states = np.ascontiguousarray(kernels.enumerate_states(n_sites, n_up), dtype=np.int64)
    states.flags.writeable = False
    return SectorBasis(n_sites=n_sites, sz_twice=sz_twice, states=states)


def _parse_bits(bits) -> int:
    if isinstance(bits, str):
        return int(bits, 2)
    return int(bits)


def rank_state(basis: SectorBasis, bits) -> int:
    """Index of ``bits`` in ``basis.states``.

    ``bits`` is an integer or a binary string written most significant site
    first, so ``"10"`` is site 1 up and site 0 down.
    """
    word = _parse_bits(bits)
    if word < 0 or word >= (1 << basis.n_sites) or bin(word).count("1") != basis.n_up:
        raise ValueError(f"state {bits!r} is not in the sector sz_twice={basis.sz_twice}")
    index = int(basis.rank_many(np.array([word], dtype=np.int64))[0])
    if index < 0:
        raise ValueError(f"state {bits!r} is not in the sector sz_twice={basis.sz_twice}")
    return index


def sector_values(n_sites: int) -> range:
    """All admissible ``sz_twice`` for ``n_sites`` spins."""
    return range(-n_sites, n_sites + 1, 2)
