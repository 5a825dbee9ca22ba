"""Pairwise aggregation driven by compatible weighted matching.

Given a symmetric matrix A and a smooth vector w, each matched pair
(i, j) contributes one coarse variable carrying the local profile of w
and one fine variable carrying its diagonally-orthogonal complement:

    w_e    = (w_i, w_j) / sqrt(w_i^2 + w_j^2)
    w_e_perp = (-w_j/a_ii, w_i/a_jj) / sqrt(w_j^2/a_ii + w_i^2/a_jj)

Unmatched vertices become coarse singletons with entry sign(w_k).  The
coarse prolongator P_c has unit, disjointly supported columns, its range
contains w exactly, and P_c' diag(A) P_f = 0, so relaxation on the fine
block P_f' A P_f is a compatible relaxation for the coarse space.
Repeating the construction on the Galerkin coarse matrix and restricted
vector yields aggregates of size 2^steps per level and a full hierarchy.
"""

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .exceptions import CoarseningStagnationError
from .matching import WEIGHT_FLOOR, Matching, build_edge_weights, greedy_max_product_matching
from .sparse import as_csr, galerkin_product

#: Relative size for perturbing a zero smooth-vector entry at an
#: unmatched vertex, where the sign entry sign(w_k) is undefined.
ZERO_ENTRY_PERTURBATION = 1e-8


@dataclass
class CoarseningParams:
    """Knobs for pairwise hierarchy construction."""

    steps_per_level: int = 2
    max_levels: int = 20
    min_coarse_size: int = 40
    weight_floor: float = WEIGHT_FLOOR
    #: Stop coarsening when a level shrinks by less than 10%.
    min_shrink: float = 0.10


@dataclass
class PairProlongators:
    """Coarse/fine prolongator pair of one pairwise aggregation step.

    pair_order maps each coarse column to its source: row k is (i, j) for
    a matched pair and (k, -1) for a singleton.  Matched pairs come first
    in matching order, then singletons in ascending vertex order.
    """

    P_c: sp.csr_matrix
    P_f: sp.csr_matrix
    pair_order: np.ndarray
    perturbed: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))


@dataclass
class PairwiseStepResult:
    """Output of one multi-step pairwise composition."""

    P: sp.csr_matrix
    A_c: sp.csr_matrix
    w_c: np.ndarray
    aggregates: list
    stagnated: bool
    steps_done: int


@dataclass
class PairwiseLevel:
    """One level of a pairwise hierarchy.

    P and aggregates describe the transfer from this level to the
    previous (finer) one; both are None on the finest level.
    """

    A: sp.csr_matrix
    P: sp.csr_matrix | None
    aggregates: list | None
    w: np.ndarray


@dataclass
class PairwiseHierarchy:
    levels: list
    params: CoarseningParams
    build_seconds: float = 0.0

    @property
    def nl(self):
        return len(self.levels)

    @property
    def matrices(self):
        return [lvl.A for lvl in self.levels]

    @property
    def prolongators(self):
        return [lvl.P for lvl in self.levels[1:]]

    def sizes(self):
        return [lvl.A.shape[0] for lvl in self.levels]


def build_pair_prolongators(A, w, m: Matching):
    """Build (P_c, P_f) from a matching per the local-vector formulas.

    Zero w entries at unmatched vertices are perturbed to
    ZERO_ENTRY_PERTURBATION * ||w||_inf (recorded in ``perturbed``) so
    the sign entry is defined; an identically zero w is rejected.
    """
    w = np.asarray(w, dtype=np.float64)
    n = A.shape[0]
    d = A.diagonal()
    if np.any(d <= 0.0):
        raise ValueError("matrix diagonal must be positive")
    n_p = m.n_pairs
    n_s = m.unmatched.shape[0]
    n_c = n_p + n_s

    pi = m.pairs[:, 0] if n_p else np.empty(0, dtype=np.int64)
    pj = m.pairs[:, 1] if n_p else np.empty(0, dtype=np.int64)
    wi, wj = w[pi], w[pj]
    scale_c = np.sqrt(wi**2 + wj**2)
    if np.any(scale_c == 0.0):
        raise ValueError("matched pair with w_i = w_j = 0; weights should have excluded it")
    scale_f = np.sqrt(wj**2 / d[pi] + wi**2 / d[pj])

    singles = np.sort(m.unmatched)
    w_single = w[singles]
    perturbed = singles[w_single == 0.0]
    if perturbed.shape[0]:
        w_inf = float(np.max(np.abs(w)))
        if w_inf == 0.0:
            raise ValueError("smooth vector is identically zero")
        w_single = w_single.copy()
        w_single[w[singles] == 0.0] = ZERO_ENTRY_PERTURBATION * w_inf

    rows_c = np.concatenate([pi, pj, singles])
    cols_c = np.concatenate([np.arange(n_p), np.arange(n_p), n_p + np.arange(n_s)])
    vals_c = np.concatenate([wi / scale_c, wj / scale_c, np.sign(w_single)])
    P_c = sp.csr_matrix((vals_c, (rows_c, cols_c)), shape=(n, n_c))
    P_c.sort_indices()

    rows_f = np.concatenate([pi, pj])
    cols_f = np.concatenate([np.arange(n_p), np.arange(n_p)])
    vals_f = np.concatenate([-wj / d[pi] / scale_f, wi / d[pj] / scale_f])
    P_f = sp.csr_matrix((vals_f, (rows_f, cols_f)), shape=(n, n_p))
    P_f.sort_indices()

    pair_order = np.empty((n_c, 2), dtype=np.int64)
    pair_order[:n_p, 0] = pi
    pair_order[:n_p, 1] = pj
    pair_order[n_p:, 0] = singles
    pair_order[n_p:, 1] = -1
    return PairProlongators(P_c=P_c, P_f=P_f, pair_order=pair_order, perturbed=perturbed)


def _aggregates_of(pair_order):
    return [row[row >= 0].copy() for row in pair_order]


def _compose_aggregates(fine_aggs, coarse_aggs):
    return [np.sort(np.concatenate([fine_aggs[u] for u in members])) for members in coarse_aggs]


def compose_pairwise_steps(A, w, steps, weight_floor=WEIGHT_FLOOR):
    """Compose ``steps`` pairwise aggregation sweeps into one transfer.

    Each sweep matches on the current matrix/vector, coarsens with the
    pair prolongator and restricts the vector; the returned P is the
    product of the per-sweep coarse prolongators, giving aggregates of
    size at most 2^steps.  If some sweep finds no pairs the composition
    stops there and the result carries ``stagnated=True``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    A_cur = A
    w_cur = np.asarray(w, dtype=np.float64)
    P = None
    aggregates = None
    stagnated = False
    done = 0
    for _ in range(steps):
        graph = build_edge_weights(A_cur, w_cur)
        m = greedy_max_product_matching(graph, weight_floor=weight_floor)
        if m.n_pairs == 0:
            stagnated = True
            break
        pp = build_pair_prolongators(A_cur, w_cur, m)
        step_aggs = _aggregates_of(pp.pair_order)
        aggregates = step_aggs if aggregates is None else _compose_aggregates(aggregates, step_aggs)
        P = pp.P_c if P is None else (P @ pp.P_c).tocsr()
        A_cur = galerkin_product(pp.P_c, A_cur)
        w_cur = pp.P_c.T @ w_cur
        done += 1
    if P is None:
        # No coarsening at all: the identity-like transfer of singletons.
        n = A.shape[0]
        signs = np.where(w_cur >= 0.0, 1.0, -1.0)
        P = sp.csr_matrix((signs, (np.arange(n), np.arange(n))), shape=(n, n))
        aggregates = [np.array([k], dtype=np.int64) for k in range(n)]
        A_cur = galerkin_product(P, A)
        w_cur = P.T @ np.asarray(w, dtype=np.float64)
    return PairwiseStepResult(
        P=P, A_c=A_cur, w_c=w_cur, aggregates=aggregates, stagnated=stagnated, steps_done=done
    )


def build_pairwise_hierarchy(A, w, params: CoarseningParams | None = None):
    """Coarsen (A, w) level by level until the coarse grid is small.

    Levels are added while the size exceeds ``min_coarse_size`` and fewer
    than ``max_levels`` exist; a level that shrinks by less than
    ``min_shrink`` is discarded and coarsening stops.  A finest level on
    which matching finds no pairs at all raises
    CoarseningStagnationError.
    """
    params = params or CoarseningParams()
    A = as_csr(A)
    w = np.asarray(w, dtype=np.float64)
    if A.shape[0] != w.shape[0]:
        raise ValueError("w length must match A")
    t0 = time.perf_counter()
    levels = [PairwiseLevel(A=A, P=None, aggregates=None, w=w)]
    while levels[-1].A.shape[0] > params.min_coarse_size and len(levels) < params.max_levels:
        cur = levels[-1]
        res = compose_pairwise_steps(cur.A, cur.w, params.steps_per_level, params.weight_floor)
        if res.steps_done == 0:
            if len(levels) == 1:
                raise CoarseningStagnationError(
                    "matching produced no pairs at the finest level", level=0
                )
            break
        if res.A_c.shape[0] > (1.0 - params.min_shrink) * cur.A.shape[0]:
            break
        levels.append(PairwiseLevel(A=res.A_c, P=res.P, aggregates=res.aggregates, w=res.w_c))
        if res.stagnated:
            break
    return PairwiseHierarchy(levels=levels, params=params, build_seconds=time.perf_counter() - t0)


def compatible_relaxation_quality(A, pp: PairProlongators, sweeps=20, seed=0):
    """Estimated convergence factor of Jacobi relaxation on the fine block.

    Forms A_f = P_f' A P_f and runs ``sweeps`` power iterations of
    I - D_f^{-1} A_f on a seeded random vector, returning the final
    norm ratio.  Small values mean the coarse space defined by P_c is
    good.  Diagnostic only.
    """
    if pp.P_f.shape[0] != A.shape[0]:
        raise ValueError("P_f row count must match A")
    n_f = pp.P_f.shape[1]
    if n_f == 0:
        return 0.0
    A_f = galerkin_product(pp.P_f, A)
    d_f = A_f.diagonal()
    if np.any(d_f == 0.0):
        raise ValueError("fine block has a zero diagonal entry")
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=n_f)
    x /= np.linalg.norm(x)
    ratio = 0.0
    for _ in range(sweeps):
        y = x - (A_f @ x) / d_f
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        ratio = float(ny)  # x was unit length
        x = y / ny
    return ratio
