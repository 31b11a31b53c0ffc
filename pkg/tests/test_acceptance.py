"""Acceptance gate: one test per criterion, each at its stated tolerance.

A PASS/FAIL line per criterion is printed in the pytest terminal summary.
"""
from contextlib import contextmanager
from functools import lru_cache

import numpy as np
import pytest

import conftest
from oracles import embed, ladder_dense, naive_partial_trace, popcounts
from xxzladder import (
    CouplingParams,
    SolverOptions,
    SweepConfig,
    build_geometry,
    build_hamiltonian,
    detect_critical_points,
    enumerate_sector,
    fidelity,
    fidelity_susceptibility,
    ground_state,
    rank_state,
    reduced_density_matrix,
    run_sweep,
    von_neumann_entropy,
    write_csv,
)
from xxzladder._backend import get_backend
from xxzladder.hamiltonian import bond_weights
from xxzladder.lattice import sector_values
from xxzladder.sweep import local_extrema

pytestmark = pytest.mark.slow

STEP = 0.01
C2_PAPER = 0.373


@contextmanager
def criterion(number, title):
    notes = []
    try:
        yield notes
    except BaseException:
        conftest.ACCEPTANCE_RESULTS[number] = (False, title, "; ".join(notes) or "see traceback")
        raise
    conftest.ACCEPTANCE_RESULTS[number] = (True, title, "; ".join(notes))


@lru_cache(maxsize=None)
def sweep(n_rungs, lo, hi):
    cfg = SweepConfig(n_rungs=n_rungs, j_rung_min=lo, j_rung_max=hi, j_rung_step=STEP)
    return run_sweep(cfg)


def nearest(grid, x):
    return float(grid[np.argmin(np.abs(grid - x))])


def interior_max_in(j, column, lo, hi):
    """Location of the largest strict interior local maximum with lo <= j <= hi."""
    idx = [i for i in local_extrema(column, True) if lo <= j[i] <= hi]
    return float(j[max(idx, key=lambda i: column[i])]) if idx else None


def interior_min_in(j, column, lo, hi):
    idx = [i for i in local_extrema(column, False) if lo <= j[i] <= hi]
    return float(j[min(idx, key=lambda i: column[i])]) if idx else None


@pytest.mark.parametrize("n_rungs", [8, 10])
def test_c1_fidelity_locates_xy1_xy2(n_rungs):
    with criterion(f"1 (n={n_rungs})", "fidelity valley / susceptibility peak at J_rung=0") as notes:
        s = sweep(n_rungs, -0.3, 0.3)
        target = nearest(s.j_rung, 0.0)
        f_min = float(s.j_rung[np.argmin(s.fidelity)])
        s_max = float(s.j_rung[np.argmax(s.susceptibility)])
        notes.append(f"F min at {f_min:+.2f}, S max at {s_max:+.2f} (S={s.susceptibility.max():.4g})")
        assert abs(f_min - target) <= STEP + 1e-12
        assert abs(s_max - target) <= STEP + 1e-12


@pytest.mark.parametrize("n_rungs", [8, 10])
def test_c2_entropy_peak_at_zero(n_rungs):
    with criterion(f"2 (n={n_rungs})", "central-rung entropy peak at J_rung=0") as notes:
        s = sweep(n_rungs, -0.3, 0.3)
        e = s.entropy["central_rung"]
        peaks = [float(s.j_rung[i]) for i in local_extrema(e, True)]
        notes.append(f"interior maxima at {peaks}")
        target = nearest(s.j_rung, 0.0)
        assert any(abs(p - target) <= STEP + 1e-12 for p in peaks)


def test_c3_entropy_derivative_peak_near_c2():
    with criterion("3", "dE_rung/dJ_rung peak in [0.25, 0.50], moving toward 0.373") as notes:
        locs = {}
        for n in (8, 10):
            s = sweep(n, 0.1, 0.7)
            locs[n] = interior_max_in(s.j_rung, s.derivative["central_rung"], 0.25, 0.50)
            notes.append(f"n={n}: peak at {locs[n]}")
        assert locs[8] is not None and locs[10] is not None
        assert abs(locs[10] - C2_PAPER) <= abs(locs[8] - C2_PAPER) + 1e-12


def test_c4_diagonal_pair_structure():
    with criterion("4", "diag_pair entropy peak at 0 and valley in [0.25, 0.55], n=8") as notes:
        s = sweep(8, -1.0, 1.0)
        e = s.entropy["diag_pair"]
        peaks = [float(s.j_rung[i]) for i in local_extrema(e, True)]
        valley = interior_min_in(s.j_rung, e, 0.25, 0.55)
        notes.append(f"maxima at {peaks}, valley at {valley}")
        assert any(abs(p - nearest(s.j_rung, 0.0)) <= STEP + 1e-12 for p in peaks)
        assert valley is not None
        # default-grid examples of the sweep operations ride on the same series
        assert abs(float(s.j_rung[np.argmax(s.susceptibility)])) <= STEP + 1e-12
        report = detect_critical_points(s)
        assert any(0.25 <= f.j_rung <= 0.50
                   for f in report.of_kind("entropy_derivative_peak", "central_rung"))


def test_c5_oracle_equivalence():
    with criterion("5", "sector Lanczos vs dense full space; partial traces vs naive") as notes:
        rng = np.random.default_rng(2024)
        lanczos = SolverOptions(dense_threshold=1)
        worst_e = worst_rho = 0.0
        count = 0
        for n_rungs in (1, 2, 3, 4):
            g = build_geometry(n_rungs)
            n = g.n_sites
            for j_leg, delta, j_rung in rng.uniform(-1, 1, (20, 3)):
                params = CouplingParams(j_leg, delta, j_rung)
                full = np.linalg.eigvalsh(ladder_dense(n_rungs, j_leg, delta, j_rung))[0]
                best = np.inf
                for sz in sector_values(n):
                    b = enumerate_sector(n, sz)
                    r = ground_state(build_hamiltonian(g, params, b), lanczos)
                    best = min(best, r.energy)
                    if b.dimension < 2:
                        continue
                    psi_full = embed(r.amplitudes, b.states, n)
                    for k in range(1, n):
                        sites = list(rng.choice(n, size=k, replace=False))
                        rho = reduced_density_matrix(r.amplitudes, b, sites).matrix
                        worst_rho = max(worst_rho, np.abs(rho - naive_partial_trace(psi_full, n, sites)).max())
                worst_e = max(worst_e, abs(best - full))
                count += 1
        notes.append(f"{count} cases, max |dE|={worst_e:.2e}, max |d rho|={worst_rho:.2e}")
        assert worst_e <= 1e-10
        assert worst_rho <= 1e-12


def test_c6_properties(tmp_path):
    with criterion("6", "property suite") as notes:
        rng = np.random.default_rng(6)
        python_kernels = get_backend("python")
        # Hermiticity and Sz conservation of built Hamiltonians
        for n_rungs in range(1, 7):
            g = build_geometry(n_rungs)
            for _ in range(3):
                params = CouplingParams(*rng.uniform(-1, 1, 3))
                for sz in sector_values(g.n_sites):
                    a = build_hamiltonian(g, params, enumerate_sector(g.n_sites, sz)).to_scipy()
                    assert (a != a.T).nnz == 0
                if g.n_sites <= 10:
                    every = np.arange(1 << g.n_sites, dtype=np.int64)
                    indptr, indices, _ = python_kernels.build_csr(
                        every, g.n_sites, *bond_weights(g, params))
                    rows = np.repeat(every, np.diff(indptr))
                    pc = popcounts(g.n_sites)
                    assert np.all(pc[rows] == pc[indices])
        notes.append("hermitian+Sz ok")
        # fidelity and susceptibility bounds
        for _ in range(200):
            a, b = rng.standard_normal((2, 50))
            a /= np.linalg.norm(a)
            b /= np.linalg.norm(b)
            f = fidelity(a, b)
            assert 0.0 <= f <= 1.0 and fidelity(a, a) == 1.0
            assert fidelity_susceptibility(f, 0.001, 8) >= 0.0
        notes.append("F,S bounds ok")
        # entropy bounds and bipartite symmetry
        for n_rungs in (2, 3, 4, 5, 6):
            g = build_geometry(n_rungs)
            b = enumerate_sector(g.n_sites, 0)
            psi = ground_state(build_hamiltonian(g, CouplingParams(*rng.uniform(-1, 1, 3)), b)).amplitudes
            for k in range(1, g.n_sites):
                sites = list(rng.choice(g.n_sites, size=k, replace=False))
                rest = [x for x in range(g.n_sites) if x not in sites]
                ea = von_neumann_entropy(reduced_density_matrix(psi, b, sites))
                eb = von_neumann_entropy(reduced_density_matrix(psi, b, rest))
                assert 0.0 <= ea <= k and abs(ea - eb) <= 1e-10
        notes.append("entropy ok")
        # rank/unrank exhaustive
        for n in range(1, 13):
            for sz in sector_values(n):
                b = enumerate_sector(n, sz)
                np.testing.assert_array_equal(b.rank_many(b.states), np.arange(b.dimension))
                assert all(rank_state(b, b.unrank(k)) == k for k in range(b.dimension))
        notes.append("rank/unrank ok")
        # byte-identical CSV across runs and worker counts
        cfg = SweepConfig(n_rungs=5, j_rung_min=-0.1, j_rung_max=0.1, j_rung_step=0.02,
                          solver=SolverOptions(dense_threshold=1), chunk_size=4)
        paths = []
        for i, workers in enumerate((1, 1, 3)):
            paths.append(tmp_path / f"run{i}.csv")
            write_csv(run_sweep(cfg, workers=workers), paths[-1])
        blobs = [p.read_bytes() for p in paths]
        assert blobs[0] == blobs[1] == blobs[2]
        notes.append("CSV deterministic")


def test_c7_known_values():
    with criterion("7", "known values") as notes:
        g1 = build_geometry(1)
        b1 = enumerate_sector(2, 0)
        singlet = ground_state(build_hamiltonian(g1, CouplingParams(j_rung=1.0), b1))
        assert abs(singlet.energy + 0.75) <= 1e-12
        e_site = von_neumann_entropy(reduced_density_matrix(singlet.amplitudes, b1, [0]))
        assert abs(e_site - 1.0) <= 1e-12
        oracle = np.linalg.eigvalsh(ladder_dense(2, 1.0, -0.5, 0.0))[0]
        g2 = build_geometry(2)
        e2 = min(ground_state(build_hamiltonian(g2, CouplingParams(1.0, -0.5, 0.0),
                                                enumerate_sector(4, sz))).energy
                 for sz in sector_values(4))
        assert abs(e2 - oracle) <= 1e-10 and abs(oracle + 0.75) <= 1e-12
        g4 = build_geometry(4)
        b4 = enumerate_sector(8, 0)
        strong = ground_state(build_hamiltonian(g4, CouplingParams(1.0, -0.5, 50.0), b4))
        c = 4 // 2
        e_rung = von_neumann_entropy(reduced_density_matrix(strong.amplitudes, b4, [2 * c, 2 * c + 1]))
        notes.append(f"E_singlet={singlet.energy:.15f}, E(n=2)={e2:.15f}, "
                     f"E_rung(J_rung=50)={e_rung:.3e}")
        assert e_rung < 1e-3
