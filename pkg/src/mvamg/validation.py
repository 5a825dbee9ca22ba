"""Input validation helpers for the public entry points."""

import numpy as np
import scipy.sparse as sp

from .exceptions import NotSpdError
from .sparse import as_csr


def check_operator(A, require_symmetric=True, require_positive_diagonal=True):
    """Validate and canonicalize a system matrix.

    Returns the matrix as float64 CSR.  Checks: square shape, finite
    stored values, exact stored-pair symmetry (a_ij == a_ji) and a
    strictly positive diagonal.
    """
    A = as_csr(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"operator must be square, got {A.shape[0]}x{A.shape[1]}")
    if A.nnz and not np.all(np.isfinite(A.data)):
        raise ValueError("operator contains NaN or Inf entries")
    if require_symmetric and (A != A.T).nnz != 0:
        raise NotSpdError("operator is not symmetric")
    if require_positive_diagonal and (A.diagonal() <= 0.0).any():
        raise NotSpdError("operator diagonal must be strictly positive")
    return A


def check_vector(x, n=None, name="vector"):
    """Validate a dense 1-d float vector, optionally of length n."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"{name} must be 1-d, got shape {x.shape}")
    if n is not None and x.shape[0] != n:
        raise ValueError(f"{name} has length {x.shape[0]}, expected {n}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return x


def is_sparse(A):
    return sp.issparse(A)
