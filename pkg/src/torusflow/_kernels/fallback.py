"""Pure-numpy kernels; reference implementation for the compiled extension.

The chunked matmul trick (|x|^2 + |c|^2 - 2 x.c) trades ~1e-10 absolute
accuracy on near-zero distances for vectorization; the compiled kernel
computes differences directly and is the more accurate of the two.
"""

import numpy as np

# chunk size keeps each broadcast workspace around 32 MB
_CHUNK_ELEMS = 4_000_000


def min_distance_batch(points, offsets, nodes):
    """Min distance from each point to {offset + node} over all pairs.

    points:  (M, q) float64
    offsets: (T, q) float64 (e.g. projected lattice translates)
    nodes:   (P, q) float64 (e.g. projected base-set nodes)

    Returns (dists, node_index): per-point minimal Euclidean distance and the
    index of the node achieving it.
    """
    points = np.ascontiguousarray(points, dtype=float)
    offsets = np.ascontiguousarray(offsets, dtype=float)
    nodes = np.ascontiguousarray(nodes, dtype=float)
    M, q = points.shape
    T, P = len(offsets), len(nodes)
    if M == 0:
        return np.zeros(0), np.zeros(0, dtype=np.intp)
    if T == 0 or P == 0:
        return np.full(M, np.inf), np.zeros(M, dtype=np.intp)
    best = np.full(M, np.inf)
    best_node = np.zeros(M, dtype=np.intp)
    node_sq = np.einsum("ij,ij->i", nodes, nodes)
    chunk = max(64, _CHUNK_ELEMS // M)
    for t in range(T):
        shifted = points - offsets[t]
        shifted_sq = np.einsum("ij,ij->i", shifted, shifted)
        for p0 in range(0, P, chunk):
            blk = nodes[p0 : p0 + chunk]
            d2 = (
                shifted_sq[:, None]
                + node_sq[p0 : p0 + chunk][None, :]
                - 2.0 * (shifted @ blk.T)
            )
            idx = np.argmin(d2, axis=1)
            vals = d2[np.arange(M), idx]
            better = vals < best
            best[better] = vals[better]
            best_node[better] = idx[better] + p0
    np.maximum(best, 0.0, out=best)
    return np.sqrt(best), best_node
