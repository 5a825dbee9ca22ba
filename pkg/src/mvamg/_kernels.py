"""Numba-compiled inner loops.

Everything here operates on raw CSR arrays or small dense blocks so the
hot paths (relaxation sweeps, matching acceptance, per-aggregate Jacobi
SVD) run at compiled speed.  All kernels are deterministic and release
the GIL.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def gs_forward(indptr, indices, data, diag, b, x):
    """One forward Gauss-Seidel sweep on A x = b, updating x in place."""
    n = b.shape[0]
    for i in range(n):
        s = b[i]
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j != i:
                s -= data[k] * x[j]
        x[i] = s / diag[i]


@njit(cache=True, nogil=True)
def gs_backward(indptr, indices, data, diag, b, x):
    """One backward Gauss-Seidel sweep on A x = b, updating x in place."""
    n = b.shape[0]
    for i in range(n - 1, -1, -1):
        s = b[i]
        for k in range(indptr[i], indptr[i + 1]):
            j = indices[k]
            if j != i:
                s -= data[k] * x[j]
        x[i] = s / diag[i]


@njit(cache=True, nogil=True)
def greedy_accept(edge_i, edge_j, n_vertices):
    """Accept vertex-disjoint edges in the given (already sorted) order.

    Returns (pair_i, pair_j, n_pairs, partner); partner[v] is the matched
    vertex of v, or -1.
    """
    partner = np.full(n_vertices, -1, dtype=np.int64)
    pair_i = np.empty(edge_i.shape[0], dtype=np.int64)
    pair_j = np.empty(edge_j.shape[0], dtype=np.int64)
    n_pairs = 0
    for k in range(edge_i.shape[0]):
        i = edge_i[k]
        j = edge_j[k]
        if partner[i] < 0 and partner[j] < 0:
            partner[i] = j
            partner[j] = i
            pair_i[n_pairs] = i
            pair_j[n_pairs] = j
            n_pairs += 1
    return pair_i[:n_pairs], pair_j[:n_pairs], n_pairs, partner


@njit(cache=True, nogil=True)
def jacobi_orthogonalize(B, V, max_sweeps, tol):
    """One-sided Jacobi column orthogonalization of B, accumulating V.

    Rotates column pairs of B (m x k) until the off-diagonal of the Gram
    matrix is negligible: a pair is left alone once
    |b_p . b_q| <= tol * ||b_p|| * ||b_q||  (orthogonal relative to the
    pair) or |b_p . b_q| <= tol * ||B||_F^2 (below the noise floor of the
    whole Gram matrix; without this, numerically zero columns cycle
    forever).  V (k x k) starts as the identity and collects the
    rotations, so on exit B_in = B_out @ V.T.  Returns
    (sweeps_used, converged).
    """
    m, k = B.shape
    if k < 2:
        return 0, True
    # The pairwise criterion cannot be tighter than the rounding noise of
    # a length-m dot product, so the requested tolerance is floored at
    # 2 m eps; a small absolute floor guards exactly degenerate columns.
    rel_tol = max(tol, 2.0 * m * 2.220446049250313e-16)
    for sweep in range(max_sweeps):
        total = 0.0
        for p in range(k):
            for r in range(m):
                total += B[r, p] * B[r, p]
        floor = tol * total
        rotated = 0
        for p in range(k - 1):
            for q in range(p + 1, k):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for r in range(m):
                    alpha += B[r, p] * B[r, p]
                    beta += B[r, q] * B[r, q]
                    gamma += B[r, p] * B[r, q]
                if gamma == 0.0:
                    continue
                if abs(gamma) <= rel_tol * math.sqrt(alpha * beta) or abs(gamma) <= floor:
                    continue
                rotated += 1
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                for r in range(m):
                    bp = B[r, p]
                    bq = B[r, q]
                    B[r, p] = c * bp - s * bq
                    B[r, q] = s * bp + c * bq
                for r in range(k):
                    vp = V[r, p]
                    vq = V[r, q]
                    V[r, p] = c * vp - s * vq
                    V[r, q] = s * vp + c * vq
        if rotated == 0:
            return sweep + 1, True
    return max_sweeps, False
