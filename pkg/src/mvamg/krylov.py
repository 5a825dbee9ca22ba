"""Preconditioned conjugate gradients and its flexible inner variant."""

from dataclasses import dataclass

import numpy as np

from .exceptions import NotSpdError


@dataclass
class SolveReport:
    iterations: int
    final_relative_residual: float
    converged: bool
    residual_history: np.ndarray  # length iterations + 1


def _as_precond(precond):
    if precond is None:
        return lambda r: r
    if callable(precond):
        return precond
    if hasattr(precond, "matvec"):
        return precond.matvec
    raise TypeError("preconditioner must be callable, have .matvec, or be None")


def pcg(A, b, precond=None, rtol=1e-6, itmax=1000, x0=None, callback=None):
    """Preconditioned CG on SPD A, stopping at ||r|| <= rtol * ||r0||.

    Returns (x, SolveReport).  ``callback``, if given, is invoked with
    the current iterate after every step.  Raises NotSpdError on
    breakdown (p'Ap <= 0 or r'z <= 0), which signals an indefinite
    matrix or preconditioner.
    """
    b = np.asarray(b, dtype=np.float64)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.float64)
    M = _as_precond(precond)
    r = b - A @ x if x.any() else b.copy()
    r0_norm = float(np.linalg.norm(r))
    history = [r0_norm]
    if r0_norm == 0.0:
        return x, SolveReport(0, 0.0, True, np.asarray(history))
    z = M(r)
    rz = float(np.dot(r, z))
    if rz <= 0.0:
        raise NotSpdError(f"preconditioner breakdown: r'z = {rz:.3e}")
    p = z.copy()
    converged = False
    k = 0
    while k < itmax:
        q = A @ p
        pq = float(np.dot(p, q))
        if pq <= 0.0:
            raise NotSpdError(f"CG breakdown: p'Ap = {pq:.3e}")
        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        k += 1
        history.append(float(np.linalg.norm(r)))
        if callback is not None:
            callback(x.copy())
        if history[-1] <= rtol * r0_norm:
            converged = True
            break
        z = M(r)
        rz_next = float(np.dot(r, z))
        if rz_next <= 0.0:
            raise NotSpdError(f"preconditioner breakdown: r'z = {rz_next:.3e}")
        p = z + (rz_next / rz) * p
        rz = rz_next
    return x, SolveReport(k, history[-1] / r0_norm, converged, np.asarray(history))


def fcg(A, b, precond=None, iters=2, x0=None):
    """Flexible CG for a fixed number of steps.

    The new search direction is orthogonalized (in the A-inner product)
    against the previous one only, which tolerates the nonlinear
    preconditioners arising from inner multigrid cycles; with a fixed
    linear SPD preconditioner the iterates coincide with PCG.
    """
    b = np.asarray(b, dtype=np.float64)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.float64)
    if iters <= 0:
        return x
    M = _as_precond(precond)
    r = b - A @ x if x.any() else b.copy()
    p_prev = None
    Ap_prev = None
    pAp_prev = 0.0
    for _ in range(iters):
        z = M(r)
        if p_prev is None:
            p = z
        else:
            beta = float(np.dot(z, Ap_prev)) / pAp_prev
            p = z - beta * p_prev
        Ap = A @ p
        pAp = float(np.dot(p, Ap))
        if pAp <= 0.0:
            raise NotSpdError(f"FCG breakdown: p'Ap = {pAp:.3e}")
        alpha = float(np.dot(p, r)) / pAp
        x += alpha * p
        r -= alpha * Ap
        p_prev, Ap_prev, pAp_prev = p, Ap, pAp
    return x
