"""Smoothers, coarsest-level solver and multigrid cycle application.

A prepared ``MultigridOperator`` realizes z = B^{-1} r for a hierarchy of
Galerkin matrices and prolongators.  The V-cycle pre-smooths with forward
Gauss-Seidel, restricts the residual, recurses, corrects and post-smooths
with backward Gauss-Seidel, so the operator is symmetric and positive
definite and valid inside conjugate gradients.  The K-cycle replaces each
coarse-level solve (except onto the coarsest level) by a few flexible-CG
steps preconditioned by the next-coarser cycle.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg as spla

from . import _kernels
from .exceptions import NotSpdError
from .krylov import fcg
from .sparse import as_csr

GS_FORWARD = "gauss_seidel_forward"
GS_BACKWARD = "gauss_seidel_backward"
WEIGHTED_JACOBI = "weighted_jacobi"


@dataclass(frozen=True)
class SmootherSpec:
    kind: str = GS_FORWARD
    sweeps: int = 1
    omega: float = 1.0  # weighted Jacobi only

    def __post_init__(self):
        if self.kind not in (GS_FORWARD, GS_BACKWARD, WEIGHTED_JACOBI):
            raise ValueError(f"unknown smoother kind {self.kind!r}")
        if self.kind == WEIGHTED_JACOBI and not 0.0 < self.omega < 2.0:
            raise ValueError("weighted Jacobi requires omega in (0, 2)")
        if self.sweeps < 0:
            raise ValueError("sweeps must be >= 0")


@dataclass(frozen=True)
class CycleSpec:
    kind: str = "V"
    inner_fcg_iters: int = 2

    def __post_init__(self):
        if self.kind not in ("V", "K"):
            raise ValueError(f"unknown cycle kind {self.kind!r}")
        if self.inner_fcg_iters < 0:
            raise ValueError("inner_fcg_iters must be >= 0")


def _checked_diagonal(A):
    d = A.diagonal()
    if np.any(d == 0.0):
        raise NotSpdError("zero diagonal entry; Gauss-Seidel/Jacobi undefined")
    return d


def gauss_seidel_sweep(A, b, x, direction="forward"):
    """One lexicographic Gauss-Seidel sweep on A x = b.

    Updates x in place and returns it.
    """
    A = as_csr(A)
    d = _checked_diagonal(A)
    b = np.asarray(b, dtype=np.float64)
    if x.shape != b.shape or b.shape[0] != A.shape[0]:
        raise ValueError("shape mismatch in Gauss-Seidel sweep")
    if direction == "forward":
        _kernels.gs_forward(A.indptr, A.indices, A.data, d, b, x)
    elif direction == "backward":
        _kernels.gs_backward(A.indptr, A.indices, A.data, d, b, x)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return x


def weighted_jacobi_sweep(A, b, x, omega=1.0):
    """One weighted Jacobi sweep, in place."""
    d = _checked_diagonal(A)
    x += omega * (b - A @ x) / d
    return x


class CoarseSolver:
    """Dense LU with partial pivoting for the coarsest-level systems."""

    def __init__(self, A):
        self.n = A.shape[0]
        dense = A.toarray() if hasattr(A, "toarray") else np.asarray(A, dtype=np.float64)
        self.lu, self.piv = scipy.linalg.lu_factor(dense)

    def solve(self, b):
        return scipy.linalg.lu_solve((self.lu, self.piv), b)


class MultigridOperator:
    """Prepared B^{-1} for a hierarchy of (matrices, prolongators).

    ``matrices[k]`` is the level-k Galerkin matrix and ``prolongators[k]``
    maps level k+1 to level k.  The coarsest matrix is LU-factored once;
    level diagonals are cached for the smoothing kernels.
    """

    def __init__(
        self,
        matrices,
        prolongators,
        cycle=None,
        pre_smoother=None,
        post_smoother=None,
    ):
        if len(matrices) != len(prolongators) + 1:
            raise ValueError("need exactly one prolongator per coarse level")
        self.matrices = [as_csr(A) for A in matrices]
        self.prolongators = [as_csr(P) for P in prolongators]
        self.restrictions = [P.T.tocsr() for P in self.prolongators]
        for k, P in enumerate(self.prolongators):
            if P.shape[0] != self.matrices[k].shape[0] or P.shape[1] != self.matrices[k + 1].shape[0]:
                raise ValueError(f"prolongator {k} does not chain the level dimensions")
        self.cycle = cycle or CycleSpec()
        self.pre_smoother = pre_smoother or SmootherSpec(GS_FORWARD)
        self.post_smoother = post_smoother or SmootherSpec(GS_BACKWARD)
        self.diagonals = [_checked_diagonal(A) for A in self.matrices[:-1]]
        self.coarse = CoarseSolver(self.matrices[-1])

    @property
    def n_levels(self):
        return len(self.matrices)

    @property
    def shape(self):
        n = self.matrices[0].shape[0]
        return (n, n)

    def _smooth(self, spec, k, b, x):
        A = self.matrices[k]
        d = self.diagonals[k]
        for _ in range(spec.sweeps):
            if spec.kind == GS_FORWARD:
                _kernels.gs_forward(A.indptr, A.indices, A.data, d, b, x)
            elif spec.kind == GS_BACKWARD:
                _kernels.gs_backward(A.indptr, A.indices, A.data, d, b, x)
            else:
                x += spec.omega * (b - A @ x) / d

    def _descend(self, k, r):
        if k == self.n_levels - 1:
            return self.coarse.solve(r)
        A = self.matrices[k]
        x = np.zeros_like(r)
        self._smooth(self.pre_smoother, k, r, x)
        rc = self.restrictions[k] @ (r - A @ x)
        if (
            self.cycle.kind == "K"
            and self.cycle.inner_fcg_iters >= 1
            and k + 1 < self.n_levels - 1
        ):
            xc = fcg(
                self.matrices[k + 1],
                rc,
                precond=lambda v: self._descend(k + 1, v),
                iters=self.cycle.inner_fcg_iters,
            )
        else:
            xc = self._descend(k + 1, rc)
        x += self.prolongators[k] @ xc
        self._smooth(self.post_smoother, k, r, x)
        return x

    def apply(self, r):
        """z approximating B^{-1} r (one cycle)."""
        r = np.asarray(r, dtype=np.float64)
        if r.shape[0] != self.matrices[0].shape[0]:
            raise ValueError("residual length does not match the hierarchy")
        return self._descend(0, r)

    def error_propagation(self, x):
        """(I - B^{-1} A) x for the finest-level matrix."""
        x = np.asarray(x, dtype=np.float64)
        return x - self.apply(self.matrices[0] @ x)

    def as_linear_operator(self):
        """scipy LinearOperator view, usable as an external preconditioner."""
        return spla.LinearOperator(self.shape, matvec=self.apply, dtype=np.float64)

    __call__ = apply


def apply_cycle(operator, r):
    """Functional alias for ``operator.apply(r)``."""
    return operator.apply(r)


def error_propagation_apply(operator, x):
    """Functional alias for ``operator.error_propagation(x)``."""
    return operator.error_propagation(x)
