# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring and MinHash kernels (hot inner loops).

Semantics match ``tacticforge.kernels.pure`` exactly; the pure module is
the import-time fallback when this extension is unavailable.
"""

from libc.math cimport sqrt
from libc.stdint cimport int64_t, uint64_t

import numpy as np

COSINE = 0
EUCLID_SIM = 1
JACCARD = 2
WEIGHTED_JACCARD = 3


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = z + <uint64_t>0x9E3779B97F4A7C15
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


def minhash_signature(features, seeds):
    """values[i] = min over x in features of mix64(seeds[i] ^ x)."""
    cdef int64_t[::1] f = np.ascontiguousarray(features, dtype=np.int64)
    cdef uint64_t[::1] s = np.ascontiguousarray(seeds, dtype=np.uint64)
    out = np.empty(len(s), dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef Py_ssize_t i, j
    cdef uint64_t best, h, seed
    cdef Py_ssize_t nf = f.shape[0], ns = s.shape[0]
    with nogil:
        for i in range(ns):
            seed = s[i]
            best = <uint64_t>0xFFFFFFFFFFFFFFFF
            for j in range(nf):
                h = _mix64(seed ^ <uint64_t>f[j])
                if h < best:
                    best = h
            o[i] = best
    return out


def score_batch(query, entries, int metric, weights=None):
    """Similarity of the query feature-id array against each entry array.

    Arrays are sorted int64 feature ids. Euclid is returned as the
    similarity 1/(1+d) so higher is uniformly better.
    """
    cdef int64_t[::1] q = np.ascontiguousarray(query, dtype=np.int64)
    cdef double[::1] w
    cdef bint has_w = weights is not None
    if has_w:
        w = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.empty(len(entries), dtype=np.float64)
    cdef double[::1] o = out
    cdef int64_t[::1] e
    cdef Py_ssize_t i, a, b, nq, ne
    cdef long inter, union
    cdef double w_inter, w_union, sim
    nq = q.shape[0]
    for i in range(len(entries)):
        e = entries[i]
        ne = e.shape[0]
        inter = 0
        w_inter = 0.0
        w_union = 0.0
        a = 0
        b = 0
        while a < nq and b < ne:
            if q[a] == e[b]:
                inter += 1
                if has_w:
                    w_inter += w[q[a]]
                    w_union += w[q[a]]
                a += 1
                b += 1
            elif q[a] < e[b]:
                if has_w:
                    w_union += w[q[a]]
                a += 1
            else:
                if has_w:
                    w_union += w[e[b]]
                b += 1
        if has_w:
            while a < nq:
                w_union += w[q[a]]
                a += 1
            while b < ne:
                w_union += w[e[b]]
                b += 1
        union = nq + ne - inter
        if metric == COSINE:
            sim = inter / sqrt(<double>nq * ne) if nq > 0 and ne > 0 else 0.0
        elif metric == EUCLID_SIM:
            sim = 1.0 / (1.0 + sqrt(<double>(union - inter)))
        elif metric == JACCARD:
            sim = (<double>inter) / union if union > 0 else 0.0
        elif metric == WEIGHTED_JACCARD:
            sim = w_inter / w_union if w_union > 0.0 else 0.0
        else:
            raise ValueError(f"unknown metric code {metric}")
        o[i] = sim
    return out
