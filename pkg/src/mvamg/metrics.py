"""Hierarchy quality metrics shared by the setup loop and the benchmark."""

import numpy as np


def operator_complexity(matrices):
    """Sum of per-level nonzeros relative to the finest level."""
    if not matrices:
        raise ValueError("empty hierarchy")
    return float(sum(A.nnz for A in matrices) / matrices[0].nnz)


def coarsening_factor(sizes):
    """Arithmetic mean of successive size ratios n(A^{k-1}) / n(A^k)."""
    sizes = list(sizes)
    if len(sizes) < 2:
        return 1.0
    ratios = [sizes[k - 1] / sizes[k] for k in range(1, len(sizes))]
    return float(np.mean(ratios))
