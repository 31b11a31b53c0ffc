"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py --n-rungs 8 10
"""
import argparse
import time

import numpy as np

from xxzladder._backend import available_backends, get_backend
from xxzladder.hamiltonian import bond_weights
from xxzladder.lattice import CouplingParams, build_geometry


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench(n_rungs, repeat):
    g = build_geometry(n_rungs)
    n = g.n_sites
    weights = bond_weights(g, CouplingParams(1.0, -0.5, 0.37))
    ref = get_backend("python")
    states = ref.enumerate_states(n, n // 2)
    indptr, indices, data = ref.build_csr(states, n, *weights)
    x = np.random.default_rng(0).standard_normal(len(states))
    centre = n_rungs // 2
    sites = np.array([2 * centre, 2 * centre + 1], dtype=np.int64)

    rows = {}
    for name in available_backends():
        k = get_backend(name)
        rows[name] = {
            "enumerate": best_of(lambda: k.enumerate_states(n, n // 2), repeat),
            "rank": best_of(lambda: k.rank_states(states, states, n), repeat),
            "build": best_of(lambda: k.build_csr(states, n, *weights), repeat),
            "matvec": best_of(lambda: k.csr_matvec(indptr, indices, data, x), repeat),
            "split": best_of(lambda: k.subsystem_split(states, sites), repeat),
        }
    print(f"\nn_rungs={n_rungs}  dimension={len(states)}  nnz={len(data)}")
    print(f"{'kernel':<10}" + "".join(f"{b:>12}" for b in rows) + f"{'speedup':>10}")
    for kernel in rows["python"]:
        line = f"{kernel:<10}" + "".join(f"{rows[b][kernel] * 1e3:>10.2f}ms" for b in rows)
        if "compiled" in rows:
            line += f"{rows['python'][kernel] / rows['compiled'][kernel]:>9.1f}x"
        print(line)


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--n-rungs", type=int, nargs="+", default=[6, 8, 10])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    print("backends:", ", ".join(available_backends()))
    for n in args.n_rungs:
        bench(n, args.repeat)


if __name__ == "__main__":
    main()
