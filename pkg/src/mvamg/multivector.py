"""Single-hierarchy multi-vector aggregation.

Rather than keeping one AMG hierarchy per smooth vector, this module
folds a whole set of smooth vectors into one hierarchy.  Consecutive
pairwise-aggregation levels are merged into large aggregates (three
double-pairwise levels give aggregates of size at most 64); on each
aggregate the restrictions of the smooth vectors are compressed by a
truncated SVD, and the kept left singular vectors form one orthonormal
block of a block-diagonal prolongator.  Each aggregate keeps at least
one basis vector, and locally dependent vectors cost nothing: their
near-zero singular values fall below the truncation threshold.
"""

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import SvdConvergenceError
from .sparse import as_csr, galerkin_product
from .svd import jacobi_svd

#: Default truncation parameter; the per-aggregate threshold is
#: TOL * aggregate_size / n_finest.
DEFAULT_TOL = 0.1

DEFAULT_MERGE_LEVELS = 3


@dataclass
class AggregateSet:
    """Partition of one level's index set into aggregates."""

    level: int
    aggregates: list
    n_prev: int

    @property
    def n_agg(self):
        return len(self.aggregates)

    def membership(self):
        """Owning-aggregate index for every fine dof."""
        owner = np.full(self.n_prev, -1, dtype=np.int64)
        for a, members in enumerate(self.aggregates):
            owner[members] = a
        return owner


@dataclass
class LocalSvdRecord:
    """Truncation bookkeeping for one aggregate."""

    aggregate_id: int
    singular_values: np.ndarray
    kept_count: int
    tol_used: float


@dataclass
class BlockProlongator:
    """Block-diagonal orthonormal prolongator, one SVD block per aggregate."""

    P: sp.csr_matrix
    records: list
    col_offsets: np.ndarray  # length n_agg + 1

    def owner_of_columns(self):
        """Owning aggregate of every coarse column (the transfer map Q)."""
        counts = np.diff(self.col_offsets)
        return np.repeat(np.arange(len(counts)), counts)


@dataclass
class TransferOperator:
    """Maps multi-vector coarse dofs to their owning aggregate."""

    owner: np.ndarray

    def compose(self, next_aggset: AggregateSet):
        """Re-aggregate coarse dofs by their aggregate's parent group.

        All SVD dofs of an aggregate travel together to the aggregate's
        parent in ``next_aggset``, realizing the composite transfer
        without materializing a binary matrix.
        """
        parent_of_agg = next_aggset.membership()
        parent = parent_of_agg[self.owner]
        aggregates = [
            np.flatnonzero(parent == g).astype(np.int64) for g in range(next_aggset.n_agg)
        ]
        return AggregateSet(
            level=next_aggset.level, aggregates=aggregates, n_prev=self.owner.shape[0]
        )


@dataclass
class MultiVectorHierarchy:
    """Levels of Galerkin matrices and block prolongators plus the
    per-level restrictions of the smooth vectors."""

    matrices: list
    prolongators: list  # BlockProlongator per coarse level
    vectors_per_level: list
    aggregate_sets: list
    stalled: bool = False
    build_seconds: float = 0.0
    svd_seconds: float = 0.0

    @property
    def nl(self):
        return len(self.matrices)

    @property
    def prolongator_matrices(self):
        return [bp.P for bp in self.prolongators]

    def sizes(self):
        return [A.shape[0] for A in self.matrices]


def merge_aggregate_levels(hierarchy, merge_levels=DEFAULT_MERGE_LEVELS):
    """Compose the first ``merge_levels`` aggregate maps of a pairwise
    hierarchy into one fine-level AggregateSet.

    Returns the merged set followed by the untouched deeper levels.  With
    double-pairwise levels each merge multiplies aggregate size by 4, so
    the default of 3 gives aggregates of size at most 64.  A hierarchy
    shallower than ``merge_levels`` is merged in full (with a warning).
    """
    if merge_levels < 1:
        raise ValueError("merge_levels must be >= 1")
    per_level = [lvl.aggregates for lvl in hierarchy.levels[1:]]
    if not per_level:
        return []
    if len(per_level) < merge_levels:
        warnings.warn(
            f"hierarchy has {len(per_level)} aggregate levels, fewer than "
            f"merge_levels={merge_levels}; merging all of them",
            stacklevel=2,
        )
        merge_levels = len(per_level)
    merged = per_level[0]
    for aggs in per_level[1:merge_levels]:
        merged = [
            np.sort(np.concatenate([merged[u] for u in members])) for members in aggs
        ]
    sets = [AggregateSet(level=1, aggregates=merged, n_prev=hierarchy.levels[0].A.shape[0])]
    for k, aggs in enumerate(per_level[merge_levels:], start=2):
        sets.append(
            AggregateSet(
                level=k,
                aggregates=aggs,
                n_prev=hierarchy.levels[merge_levels + k - 2].A.shape[0],
            )
        )
    return sets


def assemble_local_matrix(agg, vectors):
    """Restrict every vector to the aggregate's indices, one per column."""
    if len(agg) < 1:
        raise ValueError("empty aggregate")
    return np.column_stack([np.asarray(v)[agg] for v in vectors])


def aggregate_tolerance(agg_size, n_fine, tol=DEFAULT_TOL):
    """Per-aggregate singular value threshold tol * agg_size / n_fine.

    ``n_fine`` is the finest-level dimension, so deeper (smaller) levels
    truncate less aggressively in absolute terms.
    """
    if n_fine <= 0:
        raise ValueError("n_fine must be positive")
    return tol * agg_size / n_fine


def truncated_local_svd(P_a, tol, aggregate_id=0):
    """SVD of a local matrix, keeping columns with sigma above ``tol``.

    Singular values at or below the numerical-rank floor
    sigma_0 * 50 * max(shape) * eps are treated as zero regardless of
    ``tol``: below that level the Jacobi iteration cannot distinguish a
    direction from rounding noise.  Every aggregate keeps at least one
    basis vector: if nothing survives, the leading left singular vector
    is kept; a fully zero local matrix falls back to the first
    coordinate vector.

    Returns (record, U_kept) with U_kept'U_kept = I.
    """
    if tol < 0.0:
        raise ValueError("tol must be >= 0")
    try:
        U, sigma, _ = jacobi_svd(P_a)
    except SvdConvergenceError as exc:
        raise SvdConvergenceError(
            f"local SVD failed on aggregate {aggregate_id}: {exc}", aggregate_id=aggregate_id
        ) from exc
    floor = sigma[0] * 50.0 * max(P_a.shape) * np.finfo(np.float64).eps
    kept = int(np.count_nonzero(sigma > max(tol, floor)))
    if kept == 0:
        kept = 1
        if sigma[0] == 0.0:
            U = U.copy()
            U[0, 0] = 1.0
    record = LocalSvdRecord(
        aggregate_id=aggregate_id, singular_values=sigma, kept_count=kept, tol_used=tol
    )
    return record, U[:, :kept]


def build_block_prolongator(aggset, vectors, n_fine, tol=DEFAULT_TOL, workers=1):
    """Per-aggregate truncated SVD bases assembled block-diagonally.

    ``vectors`` are this level's smooth vectors (length aggset.n_prev);
    ``n_fine`` is the finest-level dimension entering the truncation
    threshold.  SVDs of distinct aggregates are independent; with
    ``workers > 1`` they run on a thread pool, and results are placed by
    aggregate index so the output does not depend on scheduling.
    """
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    for v in vectors:
        if v.shape[0] != aggset.n_prev:
            raise ValueError("vector length does not match the aggregate set")

    def factor(item):
        a, agg = item
        return truncated_local_svd(
            assemble_local_matrix(agg, vectors), aggregate_tolerance(len(agg), n_fine, tol), a
        )

    items = list(enumerate(aggset.aggregates))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(factor, items))
    else:
        results = [factor(it) for it in items]

    records = [rec for rec, _ in results]
    col_offsets = np.zeros(aggset.n_agg + 1, dtype=np.int64)
    col_offsets[1:] = np.cumsum([rec.kept_count for rec in records])
    n_c = int(col_offsets[-1])

    rows = np.concatenate(
        [np.repeat(agg, results[a][1].shape[1]) for a, agg in items]
    ) if items else np.empty(0, dtype=np.int64)
    cols = np.concatenate(
        [
            col_offsets[a] + np.tile(np.arange(results[a][1].shape[1]), len(agg))
            for a, agg in items
        ]
    ) if items else np.empty(0, dtype=np.int64)
    vals = np.concatenate([results[a][1].ravel() for a, _ in items]) if items else np.empty(0)
    P = sp.csr_matrix((vals, (rows, cols)), shape=(aggset.n_prev, n_c))
    P.sort_indices()
    return BlockProlongator(P=P, records=records, col_offsets=col_offsets)


def build_multivector_hierarchy(
    A,
    pairwise,
    vectors,
    merge_levels=DEFAULT_MERGE_LEVELS,
    tol=DEFAULT_TOL,
    min_coarse_size=40,
    workers=1,
):
    """Assemble the multi-vector hierarchy from a pairwise substrate.

    ``pairwise`` supplies the aggregate levels (normally the hierarchy of
    the last adaptive-setup stage) and ``vectors`` the finest-level
    smooth vectors.  Level 1 coarsens the merged fine aggregates; deeper
    levels re-aggregate coarse dofs through the grouped transfer map and
    project the vectors with the orthonormal prolongators.  Construction
    stops at ``min_coarse_size``, when aggregate levels run out, or when
    the size stops decreasing (flagged as ``stalled``).
    """
    t0 = time.perf_counter()
    A = as_csr(A)
    vectors = [np.asarray(v, dtype=np.float64) for v in vectors]
    if not vectors:
        raise ValueError("at least one smooth vector is required")
    aggsets = merge_aggregate_levels(pairwise, merge_levels)

    matrices = [A]
    prolongators = []
    vectors_per_level = [vectors]
    used_sets = []
    stalled = False
    svd_seconds = 0.0
    n_fine = A.shape[0]
    for idx, aggset in enumerate(aggsets):
        if matrices[-1].shape[0] <= min_coarse_size:
            break
        t_svd = time.perf_counter()
        bp = build_block_prolongator(aggset, vectors_per_level[-1], n_fine, tol, workers)
        svd_seconds += time.perf_counter() - t_svd
        n_c = bp.P.shape[1]
        if n_c >= matrices[-1].shape[0]:
            stalled = True
            break
        prolongators.append(bp)
        used_sets.append(aggset)
        matrices.append(galerkin_product(bp.P, matrices[-1]))
        vectors_per_level.append([bp.P.T @ v for v in vectors_per_level[-1]])
        # Re-aggregate the new coarse dofs for the next level.
        if idx + 1 < len(aggsets):
            transfer = TransferOperator(owner=bp.owner_of_columns())
            aggsets[idx + 1] = transfer.compose(aggsets[idx + 1])
    return MultiVectorHierarchy(
        matrices=matrices,
        prolongators=prolongators,
        vectors_per_level=vectors_per_level,
        aggregate_sets=used_sets,
        stalled=stalled,
        build_seconds=time.perf_counter() - t0,
        svd_seconds=svd_seconds,
    )


def format_hierarchy_info(hierarchy):
    """Human-readable per-level summary (size, nnz, kept counts)."""
    lines = []
    for k, A in enumerate(hierarchy.matrices):
        lines.append(f"level {k}: size={A.shape[0]} nnz={A.nnz}")
        if k > 0:
            bp = hierarchy.prolongators[k - 1]
            kept = " ".join(str(rec.kept_count) for rec in bp.records)
            lines.append(f"  aggregates={len(bp.records)} kept_per_aggregate: {kept}")
    return "\n".join(lines)
