# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for sector enumeration, Hamiltonian assembly, matvec and
partial-trace bookkeeping.

Every function here has a drop-in twin in :mod:`xxzladder._fallback` with the
same signature and bit-identical output.
"""
import numpy as np

cimport numpy as cnp
from cython.parallel cimport prange
from libc.stdint cimport int32_t, int64_t, uint64_t

cnp.import_array()


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil
    int __builtin_popcountll(unsigned long long) nogil


def binomial_table(int n_max):
    """Pascal triangle ``C[p, j]`` for ``0 <= p, j <= n_max`` as int64."""
    table = np.zeros((n_max + 1, n_max + 2), dtype=np.int64)
    cdef int64_t[:, ::1] t = table
    cdef int p, j
    for p in range(n_max + 1):
        t[p, 0] = 1
        for j in range(1, p + 1):
            t[p, j] = t[p - 1, j - 1] + t[p - 1, j]
    return table


def enumerate_states(int n_sites, int n_up):
    """All ``n_sites``-bit words with ``n_up`` set bits, ascending."""
    table = binomial_table(n_sites)
    cdef int64_t dim = table[n_sites, n_up]
    out = np.empty(dim, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef uint64_t v, t
    cdef int64_t i
    if n_up == 0:
        o[0] = 0
        return out
    v = (<uint64_t>1 << n_up) - 1
    with nogil:
        for i in range(dim):
            o[i] = <int64_t>v
            if i + 1 < dim:
                # Gosper's hack: next word with the same popcount.
                t = v | (v - 1)
                v = (t + 1) | (((~t & (t + 1)) - 1) >> (__builtin_ctzll(v) + 1))
    return out


cdef inline int64_t _rank(uint64_t s, const int64_t[:, ::1] binom) noexcept nogil:
    cdef int64_t r = 0
    cdef int j = 1
    cdef int p
    while s:
        p = __builtin_ctzll(s)
        r += binom[p, j]
        j += 1
        s &= s - 1
    return r


def rank_states(const int64_t[::1] states, const int64_t[::1] queries, int n_sites):
    """Combinadic rank of each query within ``states``; -1 when absent."""
    cdef int64_t n = queries.shape[0]
    cdef int64_t dim = states.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    cdef int64_t i, r
    cdef uint64_t q
    cdef int n_up = __builtin_popcountll(<uint64_t>states[0]) if dim > 0 else 0
    table = binomial_table(max(n_sites, 1))
    cdef const int64_t[:, ::1] binom = table
    cdef uint64_t limit = (<uint64_t>1) << n_sites
    with nogil:
        for i in range(n):
            q = <uint64_t>queries[i]
            if queries[i] < 0 or q >= limit or __builtin_popcountll(q) != n_up:
                o[i] = -1
                continue
            r = _rank(q, binom)
            o[i] = r if (r < dim and states[r] == queries[i]) else -1
    return out


def build_csr(
    const int64_t[::1] states,
    int n_sites,
    const int64_t[::1] site_a,
    const int64_t[::1] site_b,
    const double[::1] diag_weight,
    const double[::1] flip_weight,
):
    """Assemble the sector Hamiltonian in CSR form.

    Bond ``k`` adds ``diag_weight[k] * (+-1/4)`` to the diagonal and, for
    antiparallel spins, ``flip_weight[k]`` at the column of the swapped state.
    Columns are sorted within each row; the diagonal is always stored.
    """
    cdef int64_t dim = states.shape[0]
    cdef int n_bonds = site_a.shape[0]
    cdef int n_up = __builtin_popcountll(<uint64_t>states[0])
    table = binomial_table(n_sites)
    cdef const int64_t[:, ::1] binom = table
    indptr = np.empty(dim + 1, dtype=np.int64)
    cdef int64_t[::1] ip = indptr
    cdef int64_t r, pos, nnz = 0
    cdef uint64_t s, m
    cdef int k, cnt, u, w
    cdef double d, tmp_v
    cdef int32_t tmp_c

    ip[0] = 0
    with nogil:
        for r in range(dim):
            s = <uint64_t>states[r]
            cnt = 1
            for k in range(n_bonds):
                if ((s >> site_a[k]) ^ (s >> site_b[k])) & 1:
                    cnt += 1
            nnz += cnt
            ip[r + 1] = nnz

    indices = np.empty(nnz, dtype=np.int32)
    data = np.empty(nnz, dtype=np.float64)
    cdef int32_t[::1] ix = indices
    cdef double[::1] dv = data

    with nogil:
        for r in range(dim):
            s = <uint64_t>states[r]
            pos = ip[r]
            d = 0.0
            cnt = 0
            for k in range(n_bonds):
                if ((s >> site_a[k]) ^ (s >> site_b[k])) & 1:
                    d += diag_weight[k] * -0.25
                    m = ((<uint64_t>1) << site_a[k]) | ((<uint64_t>1) << site_b[k])
                    ix[pos + cnt] = <int32_t>_rank(s ^ m, binom)
                    dv[pos + cnt] = flip_weight[k]
                    cnt += 1
                else:
                    d += diag_weight[k] * 0.25
            ix[pos + cnt] = <int32_t>r
            dv[pos + cnt] = d
            cnt += 1
            # insertion sort by column; rows hold at most n_bonds + 1 entries
            for u in range(1, cnt):
                tmp_c = ix[pos + u]
                tmp_v = dv[pos + u]
                w = u - 1
                while w >= 0 and ix[pos + w] > tmp_c:
                    ix[pos + w + 1] = ix[pos + w]
                    dv[pos + w + 1] = dv[pos + w]
                    w -= 1
                ix[pos + w + 1] = tmp_c
                dv[pos + w + 1] = tmp_v
    return indptr, indices, data


def csr_matvec(
    const int64_t[::1] indptr,
    const int32_t[::1] indices,
    const double[::1] data,
    const double[::1] x,
    int num_threads=1,
):
    """``y = A @ x`` for a CSR matrix; rows are split across threads."""
    cdef int64_t n = indptr.shape[0] - 1
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef int64_t r, j
    cdef double acc
    if num_threads <= 1:
        with nogil:
            for r in range(n):
                acc = 0.0
                for j in range(indptr[r], indptr[r + 1]):
                    acc = acc + data[j] * x[indices[j]]
                y[r] = acc
    else:
        for r in prange(n, nogil=True, schedule="static", num_threads=num_threads):
            acc = 0.0
            for j in range(indptr[r], indptr[r + 1]):
                acc = acc + data[j] * x[indices[j]]
            y[r] = acc
    return out


def subsystem_split(const int64_t[::1] states, const int64_t[::1] sites):
    """Split each state into (subsystem index, environment bits).

    Bit ``k`` of the subsystem index is the spin on ``sites[k]``; the
    environment key is the state with the subsystem bits cleared.
    """
    cdef int64_t dim = states.shape[0]
    cdef int n_sub = sites.shape[0]
    sub = np.empty(dim, dtype=np.int64)
    env = np.empty(dim, dtype=np.int64)
    cdef int64_t[::1] so = sub
    cdef int64_t[::1] eo = env
    cdef uint64_t mask = 0, s
    cdef int64_t i, a
    cdef int k
    for k in range(n_sub):
        mask |= (<uint64_t>1) << sites[k]
    with nogil:
        for i in range(dim):
            s = <uint64_t>states[i]
            a = 0
            for k in range(n_sub):
                a |= <int64_t>((s >> sites[k]) & 1) << k
            so[i] = a
            eo[i] = <int64_t>(s & ~mask)
    return sub, env
