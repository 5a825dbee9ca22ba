"""Small dense SVD via one-sided Jacobi rotations.

The per-aggregate matrices this package factorizes are tiny (at most a
few dozen rows and about ten columns), where one-sided Jacobi is simple,
accurate to high relative precision and has no external dependency.
"""

import numpy as np

from . import _kernels
from .exceptions import SvdConvergenceError

MAX_SWEEPS = 60
PAIR_TOL = 1e-14


def jacobi_svd(a, max_sweeps=MAX_SWEEPS, tol=PAIR_TOL):
    """Full SVD ``a = U @ diag(sigma) @ Vt`` by one-sided Jacobi.

    Parameters
    ----------
    a : ndarray, shape (m, k)
        Matrix to factor; m and k are both at least 1.
    max_sweeps : int
        Sweep cap; exceeding it raises SvdConvergenceError.
    tol : float
        Relative column-pair orthogonality threshold.

    Returns
    -------
    U : ndarray, shape (m, k)
        Left singular vectors; columns belonging to zero singular values
        are zero.
    sigma : ndarray, shape (k,)
        Singular values, sorted descending.
    Vt : ndarray, shape (k, k)
        Transposed right singular vectors (orthogonal).
    """
    a = np.array(a, dtype=np.float64, order="C", copy=True)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise ValueError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    k = a.shape[1]
    V = np.eye(k)
    sweeps, converged = _kernels.jacobi_orthogonalize(a, V, max_sweeps, tol)
    if not converged:
        raise SvdConvergenceError(f"Jacobi SVD did not converge within {max_sweeps} sweeps")
    sigma = np.linalg.norm(a, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    a = a[:, order]
    V = V[:, order]
    U = np.zeros_like(a)
    nonzero = sigma > 0.0
    U[:, nonzero] = a[:, nonzero] / sigma[nonzero]
    return U, sigma, V.T
