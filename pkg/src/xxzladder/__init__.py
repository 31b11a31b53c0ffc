"""Exact diagonalization of the two-leg spin-1/2 XXZ ladder.

Ground-state fidelity, fidelity susceptibility and von Neumann entanglement
entropies as functions of the rung coupling.
"""
from ._backend import COMPILED
from .eigensolver import (
    ConvergenceError,
    GroundStateResult,
    SolverOptions,
    ground_state,
    ground_state_warm,
    scan_sectors,
)
from .hamiltonian import SparseHamiltonian, apply, build_hamiltonian
from .lattice import (
    Bond,
    BondKind,
    CouplingParams,
    LadderGeometry,
    SectorBasis,
    build_geometry,
    enumerate_sector,
    rank_state,
)
from .observables import (
    FidelityPoint,
    ReducedDensityMatrix,
    entropy_derivative,
    fidelity,
    fidelity_susceptibility,
    reduced_density_matrix,
    von_neumann_entropy,
)
from .sweep import (
    ConfigError,
    CriticalReport,
    SweepConfig,
    SweepSeries,
    detect_critical_points,
    read_csv,
    run_sweep,
    write_csv,
)

__version__ = "0.1.0"
