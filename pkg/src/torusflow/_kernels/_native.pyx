# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled containment-distance kernel with early-exit inner loops."""

from libc.math cimport INFINITY, sqrt

import numpy as np


def min_distance_batch(points, offsets, nodes):
    """Same contract as the fallback: (dists, node_index) per point."""
    pts = np.ascontiguousarray(points, dtype=np.float64)
    offs = np.ascontiguousarray(offsets, dtype=np.float64)
    nds = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef double[:, ::1] p = pts
    cdef double[:, ::1] o = offs
    cdef double[:, ::1] c = nds
    cdef Py_ssize_t M = p.shape[0]
    cdef Py_ssize_t q = p.shape[1]
    cdef Py_ssize_t T = o.shape[0]
    cdef Py_ssize_t P = c.shape[0]
    dists = np.empty(M, dtype=np.float64)
    node_idx = np.zeros(M, dtype=np.intp)
    cdef double[::1] out = dists
    cdef Py_ssize_t[::1] out_idx = node_idx
    cdef Py_ssize_t m, t, k, j
    cdef double best, acc, d
    cdef Py_ssize_t best_node
    if M == 0:
        return dists, node_idx
    if T == 0 or P == 0:
        dists[:] = np.inf
        return dists, node_idx
    with nogil:
        for m in range(M):
            best = INFINITY
            best_node = 0
            for t in range(T):
                for j in range(P):
                    acc = 0.0
                    for k in range(q):
                        d = p[m, k] - o[t, k] - c[j, k]
                        acc += d * d
                        if acc >= best:
                            break
                    if acc < best:
                        best = acc
                        best_node = j
            out[m] = sqrt(best)
            out_idx[m] = best_node
    return dists, node_idx
