# cython: boundscheck=False, wraparound=False, nonecheck=False, cdivision=True
"""Compiled contraction kernels.

Reference semantics live in pyfallback.py; this module exists because the
engine performs very many contractions of very small tensors, where per-call
numpy overhead dominates.  All legs have dimension 2, so flat indices are
bit masks and a pairwise contraction is a table-driven gather loop.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef void _fill_table(cnp.npy_intp[::1] table, Py_ssize_t n_bits,
                      cnp.npy_intp[::1] bit_weight):
    """table[i] = sum of bit_weight[p] over set bits p of i (p = 0 is LSB)."""
    cdef Py_ssize_t size = 1 << n_bits
    cdef Py_ssize_t i, p
    table[0] = 0
    for i in range(1, size):
        p = 0
        while not (i >> p) & 1:
            p += 1
        table[i] = table[i & (i - 1)] + bit_weight[p]


def contract_pair(a, list legs_a, b, list legs_b):
    """Contract two flat qubit-leg tensors over all shared legs."""
    cdef cnp.ndarray am = np.ascontiguousarray(a, dtype=np.complex128)
    cdef cnp.ndarray bm = np.ascontiguousarray(b, dtype=np.complex128)
    shared_set = set(legs_a) & set(legs_b)
    cdef list shared = [l for l in legs_a if l in shared_set]
    cdef list out_legs = [l for l in legs_a if l not in shared_set] \
        + [l for l in legs_b if l not in shared_set]
    cdef Py_ssize_t ka = len(legs_a)
    cdef Py_ssize_t kb = len(legs_b)
    cdef Py_ssize_t kc = len(out_legs)
    cdef Py_ssize_t ns = len(shared)
    if kc > 28 or ns > 28:
        raise ValueError("tensor network too large for the dense kernel")

    pos_a = {leg: i for i, leg in enumerate(legs_a)}
    pos_b = {leg: i for i, leg in enumerate(legs_b)}

    cdef cnp.npy_intp[::1] wca = np.zeros(max(kc, 1), dtype=np.intp)
    cdef cnp.npy_intp[::1] wcb = np.zeros(max(kc, 1), dtype=np.intp)
    cdef cnp.npy_intp[::1] wsa = np.zeros(max(ns, 1), dtype=np.intp)
    cdef cnp.npy_intp[::1] wsb = np.zeros(max(ns, 1), dtype=np.intp)
    cdef Py_ssize_t p
    for p in range(kc):
        leg = out_legs[kc - 1 - p]
        wca[p] = (1 << (ka - 1 - pos_a[leg])) if leg in pos_a else 0
        wcb[p] = (1 << (kb - 1 - pos_b[leg])) if leg in pos_b else 0
    for p in range(ns):
        leg = shared[ns - 1 - p]
        wsa[p] = 1 << (ka - 1 - pos_a[leg])
        wsb[p] = 1 << (kb - 1 - pos_b[leg])

    cdef Py_ssize_t nc = 1 << kc
    cdef Py_ssize_t nst = 1 << ns
    cdef cnp.npy_intp[::1] base_a = np.empty(nc, dtype=np.intp)
    cdef cnp.npy_intp[::1] base_b = np.empty(nc, dtype=np.intp)
    cdef cnp.npy_intp[::1] off_a = np.empty(nst, dtype=np.intp)
    cdef cnp.npy_intp[::1] off_b = np.empty(nst, dtype=np.intp)
    _fill_table(base_a, kc, wca)
    _fill_table(base_b, kc, wcb)
    _fill_table(off_a, ns, wsa)
    _fill_table(off_b, ns, wsb)

    out = np.empty(nc, dtype=np.complex128)
    cdef double complex[::1] av = am
    cdef double complex[::1] bv = bm
    cdef double complex[::1] cv = out
    cdef Py_ssize_t i, s
    cdef cnp.npy_intp ia, ib
    cdef double complex acc
    for i in range(nc):
        ia = base_a[i]
        ib = base_b[i]
        acc = 0
        for s in range(nst):
            acc = acc + av[ia + off_a[s]] * bv[ib + off_b[s]]
        cv[i] = acc
    return out, out_legs


def contract_many(list arrays, list leg_lists):
    """Fused greedy contraction of a whole network.

    Repeatedly contracts the connected tensor pair whose result has the
    smallest rank until no two tensors share a leg.  Returns the remaining
    (array, legs) pieces; disconnected pieces are left for the caller.
    Inputs must already be self-traced (no repeated legs within a tensor).
    """
    cdef Py_ssize_t n = len(arrays)
    cdef Py_ssize_t cap = 2 * n + 1
    cdef list bufs = list(arrays) + [None] * (cap - n)
    cdef list legs = [list(l) for l in leg_lists] + [None] * (cap - n)
    cdef cnp.npy_intp[::1] alive = np.zeros(cap, dtype=np.intp)
    cdef Py_ssize_t i, j, t, k, m
    for i in range(n):
        alive[i] = 1
    cdef Py_ssize_t max_leg = -1
    for i in range(n):
        for leg in leg_lists[i]:
            if leg > max_leg:
                max_leg = leg
    cdef Py_ssize_t E = max_leg + 1
    if E == 0:
        return [(bufs[i], legs[i]) for i in range(n) if alive[i]]
    cdef cnp.npy_intp[::1] own = np.empty(E, dtype=np.intp)
    cdef cnp.npy_intp[::1] pair_i = np.empty(E, dtype=np.intp)
    cdef cnp.npy_intp[::1] pair_j = np.empty(E, dtype=np.intp)
    cdef Py_ssize_t n_pairs, used, best_rank, best_i, best_j, rank, shared
    cdef Py_ssize_t li, lj
    cdef list la, lb
    used = n
    while True:
        for k in range(E):
            own[k] = -1
        n_pairs = 0
        best_rank = -1
        best_i = -1
        best_j = -1
        for t in range(used):
            if not alive[t]:
                continue
            la = legs[t]
            for k in range(len(la)):
                leg = la[k]
                i = own[leg]
                if i < 0:
                    own[leg] = t
                    continue
                # candidate pair (i, t); evaluate once
                for m in range(n_pairs):
                    if pair_i[m] == i and pair_j[m] == t:
                        break
                else:
                    pair_i[n_pairs] = i
                    pair_j[n_pairs] = t
                    n_pairs += 1
                    lb = legs[i]
                    shared = 0
                    for m in range(len(lb)):
                        if lb[m] in la:
                            shared += 1
                    rank = len(la) + len(lb) - 2 * shared
                    if best_rank < 0 or rank < best_rank:
                        best_rank = rank
                        best_i = i
                        best_j = t
        if best_i < 0:
            break
        c, legs_c = contract_pair(bufs[best_i], legs[best_i], bufs[best_j], legs[best_j])
        alive[best_i] = 0
        alive[best_j] = 0
        bufs[best_i] = None
        bufs[best_j] = None
        legs[best_i] = None
        legs[best_j] = None
        bufs[used] = c
        legs[used] = legs_c
        alive[used] = 1
        used += 1
        if used >= cap:  # pragma: no cover - each step reduces tensor count
            raise RuntimeError("contraction bookkeeping overflow")
    return [(bufs[t], legs[t]) for t in range(used) if alive[t]]


def self_trace(a, list legs):
    """Sum over legs repeated within one tensor."""
    cdef cnp.ndarray am = np.ascontiguousarray(a, dtype=np.complex128)
    counts = {}
    for leg in legs:
        counts[leg] = counts.get(leg, 0) + 1
    cdef list out_legs = [leg for leg in legs if counts[leg] == 1]
    cdef list traced = sorted({leg for leg in legs if counts[leg] == 2})
    for leg, c in counts.items():
        if c > 2:
            raise ValueError("a leg may occur at most twice in a tensor")
    if not traced:
        return am, list(legs)

    cdef Py_ssize_t ka = len(legs)
    cdef Py_ssize_t kc = len(out_legs)
    cdef Py_ssize_t nt = len(traced)
    cdef cnp.npy_intp[::1] wc = np.zeros(max(kc, 1), dtype=np.intp)
    cdef cnp.npy_intp[::1] wt = np.zeros(max(nt, 1), dtype=np.intp)
    cdef Py_ssize_t p, i
    for p in range(kc):
        leg = out_legs[kc - 1 - p]
        wc[p] = 1 << (ka - 1 - legs.index(leg))
    for p in range(nt):
        leg = traced[nt - 1 - p]
        i = legs.index(leg)
        wt[p] = (1 << (ka - 1 - i)) + (1 << (ka - 1 - legs.index(leg, i + 1)))

    cdef Py_ssize_t nc = 1 << kc
    cdef Py_ssize_t ntt = 1 << nt
    cdef cnp.npy_intp[::1] base = np.empty(nc, dtype=np.intp)
    cdef cnp.npy_intp[::1] offs = np.empty(ntt, dtype=np.intp)
    _fill_table(base, kc, wc)
    _fill_table(offs, nt, wt)

    out = np.empty(nc, dtype=np.complex128)
    cdef double complex[::1] av = am
    cdef double complex[::1] cv = out
    cdef Py_ssize_t s
    cdef cnp.npy_intp ia
    cdef double complex acc
    for i in range(nc):
        ia = base[i]
        acc = 0
        for s in range(ntt):
            acc = acc + av[ia + offs[s]]
        cv[i] = acc
    return out, out_legs
