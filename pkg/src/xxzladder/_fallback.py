"""Pure numpy/scipy versions of the compiled kernels.

Signatures and outputs match :mod:`xxzladder._kernels` exactly, including the
floating-point summation order of the Hamiltonian diagonal, so the two
backends produce bit-identical matrices.
"""
import numpy as np
import scipy.sparse as sp
from math import comb

_CHUNK = 1 << 20


def binomial_table(n_max):
    table = np.zeros((n_max + 1, n_max + 2), dtype=np.int64)
    for p in range(n_max + 1):
        for j in range(p + 1):
            table[p, j] = comb(p, j)
    return table


def _popcount(words):
    if hasattr(np, "bitwise_count"):
        return np.bitwise_count(words)
    out = np.zeros(words.shape, dtype=np.int64)
    w = words.copy()
    while np.any(w):
        out += w & 1
        w >>= 1
    return out


def enumerate_states(n_sites, n_up):
    chunks = []
    total = 1 << n_sites
    for start in range(0, total, _CHUNK):
        words = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        chunks.append(words[_popcount(words) == n_up])
    return np.concatenate(chunks)


def rank_states(states, queries, n_sites):
    queries = np.asarray(queries, dtype=np.int64)
    idx = np.searchsorted(states, queries)
    idx_clipped = np.minimum(idx, len(states) - 1)
    found = (idx < len(states)) & (states[idx_clipped] == queries)
    return np.where(found, idx, -1).astype(np.int64)


def build_csr(states, n_sites, site_a, site_b, diag_weight, flip_weight):
    dim = len(states)
    rows, cols, vals = [], [], []
    diag = np.zeros(dim)
    for a, b, wd, wf in zip(site_a, site_b, diag_weight, flip_weight):
        anti = ((states >> a) ^ (states >> b)) & 1 == 1
        diag += wd * np.where(anti, -0.25, 0.25)
        src = np.flatnonzero(anti)
        flipped = states[src] ^ ((1 << int(a)) | (1 << int(b)))
        rows.append(src)
        cols.append(np.searchsorted(states, flipped))
        vals.append(np.full(len(src), wf))
    rows.append(np.arange(dim))
    cols.append(np.arange(dim))
    vals.append(diag)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    v = np.concatenate(vals)
    order = np.lexsort((c, r))
    indptr = np.zeros(dim + 1, dtype=np.int64)
    np.cumsum(np.bincount(r, minlength=dim), out=indptr[1:])
    return indptr, c[order].astype(np.int32), v[order]


def csr_matvec(indptr, indices, data, x, num_threads=1):
    n = len(indptr) - 1
    mat = sp.csr_matrix((data, indices, indptr), shape=(n, n))
    return mat @ np.asarray(x, dtype=np.float64)


def subsystem_split(states, sites):
    sub = np.zeros(len(states), dtype=np.int64)
    mask = 0
    for k, site in enumerate(sites):
        sub |= ((states >> int(site)) & 1) << k
        mask |= 1 << int(site)
    return sub, states & ~np.int64(mask)
