"""Edge weighting and approximate maximum-product matching.

A smooth vector w turns the sparsity graph of a symmetric matrix A into
a weighted graph: the weight of edge (i, j) measures how well pairing i
with j decouples the complementary (fine) variable, so a matching with a
large weight product yields a well-conditioned fine block and therefore
fast compatible relaxation.  The default matcher is a deterministic
greedy 1/2-approximation of the maximum product matching; an exhaustive
solver is provided as a small-instance oracle.
"""

from dataclasses import dataclass
from math import log

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .exceptions import NotSpdError

#: Edges at or below this weight are never matched.  A near-zero weight
#: marks an edge whose pairing would create an ill-conditioned diagonal
#: entry in the fine block; the vertices stay unmatched instead.
WEIGHT_FLOOR = 1e-12

#: Sentinel weight for edges whose weight formula is degenerate
#: (vanishing denominator); always below WEIGHT_FLOOR.
DEGENERATE_WEIGHT = -np.inf


@dataclass(frozen=True)
class EdgeWeightGraph:
    """Undirected weighted graph, edges stored once with i < j."""

    n_vertices: int
    i: np.ndarray
    j: np.ndarray
    weight: np.ndarray

    def __post_init__(self):
        if not (self.i.shape == self.j.shape == self.weight.shape):
            raise ValueError("edge arrays must have equal length")
        if self.n_edges:
            if self.i.min() < 0 or self.j.max() >= self.n_vertices:
                raise ValueError("edge endpoint outside vertex range")
            if np.any(self.i >= self.j):
                raise ValueError("edges must satisfy i < j (no self-loops)")
            key = self.i.astype(np.int64) * self.n_vertices + self.j
            if np.unique(key).shape[0] != key.shape[0]:
                raise ValueError("duplicate edges")
            if np.any(np.isnan(self.weight)) or np.any(self.weight == np.inf):
                raise ValueError("weights must not be NaN or +inf")

    @property
    def n_edges(self):
        return int(self.i.shape[0])


@dataclass(frozen=True)
class Matching:
    """Vertex-disjoint pair set plus the vertices left unmatched."""

    pairs: np.ndarray  # shape (n_pairs, 2)
    unmatched: np.ndarray

    @property
    def n_pairs(self):
        return int(self.pairs.shape[0])


def validate_matching(m, n_vertices):
    """Check that pairs and unmatched vertices partition the vertex set."""
    seen = np.concatenate([m.pairs.ravel(), m.unmatched]) if m.n_pairs else m.unmatched
    if seen.shape[0] != n_vertices or np.unique(seen).shape[0] != n_vertices:
        raise ValueError("matching does not partition the vertex set")


def build_edge_weights(A, w):
    """Edge-weight graph of (A, w) for maximum product matching.

    For every stored off-diagonal pair (i, j),

        c_ij = 1 - 2 a_ij w_i w_j / (a_ii w_i^2 + a_jj w_j^2),

    which is the diagonal entry the decoupled complement of edge (i, j)
    contributes to the fine block, so maximizing the product of the c_ij
    maximizes the product of the fine-block diagonal.  Pairs with a
    vanishing denominator get DEGENERATE_WEIGHT and are never matched.
    """
    w = np.asarray(w, dtype=np.float64)
    if A.shape[0] != A.shape[1] or w.shape[0] != A.shape[0]:
        raise ValueError("A must be square and w of matching length")
    d = A.diagonal()
    if np.any(d == 0.0):
        raise NotSpdError("zero diagonal entry; edge weights are undefined")
    upper = sp.triu(A, 1).tocoo()
    i = upper.row.astype(np.int64)
    j = upper.col.astype(np.int64)
    den = d[i] * w[i] ** 2 + d[j] * w[j] ** 2
    ok = den != 0.0
    c = np.full(i.shape[0], DEGENERATE_WEIGHT)
    c[ok] = 1.0 - 2.0 * upper.data[ok] * w[i[ok]] * w[j[ok]] / den[ok]
    return EdgeWeightGraph(A.shape[0], i, j, c)


def greedy_max_product_matching(graph, weight_floor=WEIGHT_FLOOR):
    """Greedy 1/2-approximate maximum product matching.

    Edges are visited in order of descending weight (ties broken by the
    (i, j) lexicographic order) and accepted whenever both endpoints are
    still free; edges with weight <= weight_floor are ineligible.  Since
    log is monotone this is the classical greedy on the log-transformed
    (sum) objective.
    """
    keep = graph.weight > weight_floor
    ei = graph.i[keep]
    ej = graph.j[keep]
    ew = graph.weight[keep]
    order = np.lexsort((ej, ei, -ew))
    pi, pj, n_pairs, partner = _kernels.greedy_accept(ei[order], ej[order], graph.n_vertices)
    pairs = np.stack([pi, pj], axis=1) if n_pairs else np.empty((0, 2), dtype=np.int64)
    return Matching(pairs=pairs, unmatched=np.flatnonzero(partner < 0).astype(np.int64))


def exact_max_product_matching(graph, weight_floor=WEIGHT_FLOOR):
    """Exhaustive maximum product matching (oracle, n_vertices <= 16).

    Maximizes the product of matched-edge weights over all matchings,
    with the empty product equal to 1 (so edges with weight < 1 are only
    taken when forced by nothing: never).  Only edges above weight_floor
    are eligible.  Ties are broken toward the lexicographically smallest
    sorted pair list.  Implemented as dynamic programming over vertex
    subsets, which enumerates exactly the set of all matchings.
    """
    n = graph.n_vertices
    if n > 16:
        raise ValueError(f"exact matching limited to 16 vertices, got {n}")
    adj = [[] for _ in range(n)]
    for i, j, c in zip(graph.i, graph.j, graph.weight):
        if c > weight_floor:
            adj[int(i)].append((int(j), log(c)))
            adj[int(j)].append((int(i), log(c)))
    for lst in adj:
        lst.sort()

    memo = {}

    def best(mask):
        if mask == 0:
            return 0.0, ()
        cached = memo.get(mask)
        if cached is not None:
            return cached
        v = (mask & -mask).bit_length() - 1
        # v unmatched
        val, pairs = best(mask & ~(1 << v))
        for u, logw in adj[v]:
            if not (mask >> u) & 1:
                continue
            sub_val, sub_pairs = best(mask & ~(1 << v) & ~(1 << u))
            cand_val = sub_val + logw
            cand_pairs = tuple(sorted(sub_pairs + ((min(v, u), max(v, u)),)))
            if cand_val > val or (cand_val == val and cand_pairs < pairs):
                val, pairs = cand_val, cand_pairs
        memo[mask] = (val, pairs)
        return val, pairs

    _, pairs = best((1 << n) - 1)
    pairs_arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    matched = np.zeros(n, dtype=bool)
    matched[pairs_arr.ravel()] = True
    return Matching(pairs=pairs_arr, unmatched=np.flatnonzero(~matched).astype(np.int64))


def log_product(matching, graph):
    """Sum of log-weights of the matched edges (log of the weight product)."""
    lookup = {(int(a), int(b)): float(c) for a, b, c in zip(graph.i, graph.j, graph.weight)}
    total = 0.0
    for a, b in matching.pairs:
        total += log(lookup[(int(min(a, b)), int(max(a, b)))])
    return total
