"""Core sparse kernels: CSR products, transposes and energy norms.

CSR via ``scipy.sparse.csr_matrix`` (float64) is the single sparse format
used everywhere in the package; prolongators are stored the same way.
"""

import numpy as np
import scipy.sparse as sp

from .exceptions import NotSpdError


def as_csr(A):
    """Return ``A`` as a canonical float64 CSR matrix.

    Canonical means sorted column indices and summed duplicates.  Accepts
    any scipy sparse matrix or a dense 2-d array.
    """
    if not sp.issparse(A):
        A = np.asarray(A)
        if A.ndim != 2:
            raise ValueError(f"expected a 2-d operator, got shape {A.shape}")
        A = sp.csr_matrix(A)
    A = A.tocsr().astype(np.float64, copy=False)
    A.sum_duplicates()
    A.sort_indices()
    return A


def spmv(A, x):
    """Sparse matrix-vector product A @ x.

    Raises ValueError on a column/length mismatch.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or A.shape[1] != x.shape[0]:
        raise ValueError(
            f"dimension mismatch: A is {A.shape[0]}x{A.shape[1]}, x has length {x.shape[0] if x.ndim == 1 else x.shape}"
        )
    return A @ x


def transpose(A):
    """Transpose of a CSR matrix, returned in canonical CSR form."""
    At = A.transpose().tocsr()
    At.sort_indices()
    return At


def galerkin_product(P, A):
    """Coarse operator P' A P for a symmetric A.

    The triple product is computed sparsely and then symmetrized as
    (G + G') / 2, which makes the result exactly symmetric; the shift is
    within round-off of the unsymmetrized product.  A itself is assumed
    symmetric (callers validate once at pipeline entry).
    """
    if P.shape[0] != A.shape[0] or A.shape[0] != A.shape[1]:
        raise ValueError(
            f"dimension mismatch: P is {P.shape[0]}x{P.shape[1]}, A is {A.shape[0]}x{A.shape[1]}"
        )
    G = (P.T @ (A @ P)).tocsr()
    G = ((G + G.T) * 0.5).tocsr()
    G.sum_duplicates()
    G.sort_indices()
    return G


def a_norm(A, x):
    """Energy norm sqrt(x' A x) of x for SPD A.

    A small negative quadratic form (round-off) is clamped to zero; a
    genuinely negative one raises NotSpdError.
    """
    Ax = spmv(A, x)
    quad = float(np.dot(x, Ax))
    if quad < 0.0:
        scale = float(np.linalg.norm(x) * np.linalg.norm(Ax))
        if quad < -1e-10 * max(scale, np.finfo(np.float64).tiny):
            raise NotSpdError(f"negative quadratic form x'Ax = {quad:.3e}; matrix is not SPD")
        quad = 0.0
    return float(np.sqrt(quad))
