"""Scikit-learn style facade over the solver pipeline.

``MultiVectorAMG`` follows the estimator protocol: hyperparameters in
``__init__`` (so ``get_params`` / ``set_params`` / ``clone`` work),
``fit(A)`` runs the whole setup (adaptive vector generation plus the
single multi-vector hierarchy) and stores learned state in trailing-
underscore attributes, and ``solve`` / ``aspreconditioner`` apply it.
"""

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .bench import estimate_rho
from .bootstrap import BootstrapParams, bootstrap_run
from .cycles import CycleSpec, MultigridOperator
from .krylov import pcg
from .metrics import coarsening_factor, operator_complexity
from .multivector import build_multivector_hierarchy
from .pairwise import CoarseningParams, build_pairwise_hierarchy
from .validation import check_operator, check_vector


class MultiVectorAMG(BaseEstimator):
    """AMG preconditioner folding adaptively generated smooth vectors
    into one aggregation hierarchy.

    Parameters
    ----------
    nsv : int
        Total number of smooth vectors (the all-ones start vector plus
        nsv - 1 adaptively generated ones).
    merge_levels : int
        Pairwise aggregate levels composed into the fine aggregates.
    svd_tol : float
        Truncation parameter of the per-aggregate SVD.
    rho_des, maxstage, nu : float, int, int
        Adaptive-setup controls: target convergence factor, stage cap
        and test iterations per stage.
    steps_per_level, min_coarse_size, max_levels : int
        Pairwise coarsening controls (2 pairwise sweeps per level gives
        aggregates of 4).
    seed : int
        Seed for the setup's random test vectors.
    workers : int
        Thread count for the per-aggregate SVDs.

    Attributes
    ----------
    hierarchy_ : MultiVectorHierarchy
    operator_ : MultigridOperator
        The V-cycle preconditioner.
    composite_ : CompositeAMG or None
        The adaptive setup's composite (None when nsv == 1).
    smooth_vectors_ : list of ndarray
    n_levels_ : int
    operator_complexity_ : float
    coarsening_factor_ : float
    """

    def __init__(
        self,
        nsv=5,
        merge_levels=3,
        svd_tol=0.1,
        rho_des=0.8,
        maxstage=15,
        nu=15,
        steps_per_level=2,
        min_coarse_size=40,
        max_levels=20,
        seed=0,
        workers=1,
    ):
        self.nsv = nsv
        self.merge_levels = merge_levels
        self.svd_tol = svd_tol
        self.rho_des = rho_des
        self.maxstage = maxstage
        self.nu = nu
        self.steps_per_level = steps_per_level
        self.min_coarse_size = min_coarse_size
        self.max_levels = max_levels
        self.seed = seed
        self.workers = workers

    def _coarsening_params(self):
        return CoarseningParams(
            steps_per_level=self.steps_per_level,
            max_levels=self.max_levels,
            min_coarse_size=self.min_coarse_size,
        )

    def fit(self, A, y=None):
        """Build the preconditioner for the SPD matrix A."""
        if self.nsv < 1:
            raise ValueError("nsv must be >= 1")
        A = check_operator(A)
        w0 = np.ones(A.shape[0])
        if self.nsv == 1:
            pairwise = build_pairwise_hierarchy(A, w0, self._coarsening_params())
            self.composite_ = None
            vectors = [w0]
        else:
            params = BootstrapParams(
                rho_des=self.rho_des,
                maxstage=max(self.maxstage, self.nsv - 1),
                nu=self.nu,
                rng_seed=self.seed,
                min_stages=self.nsv - 1,
                coarsening=self._coarsening_params(),
            )
            self.composite_ = bootstrap_run(A, w0, params)
            n_use = min(self.nsv, self.composite_.n_components + 1)
            pairwise = self.composite_.components[n_use - 2].hierarchy
            vectors = self.composite_.smooth_vectors[:n_use]
        self.hierarchy_ = build_multivector_hierarchy(
            A,
            pairwise,
            vectors,
            merge_levels=self.merge_levels,
            tol=self.svd_tol,
            min_coarse_size=self.min_coarse_size,
            workers=self.workers,
        )
        self.operator_ = MultigridOperator(
            self.hierarchy_.matrices,
            self.hierarchy_.prolongator_matrices,
            cycle=CycleSpec("V"),
        )
        self.smooth_vectors_ = vectors
        self.matrix_ = A
        self.n_levels_ = self.hierarchy_.nl
        self.operator_complexity_ = operator_complexity(self.hierarchy_.matrices)
        self.coarsening_factor_ = coarsening_factor(self.hierarchy_.sizes())
        return self

    def solve(self, b, rtol=1e-6, itmax=1000, x0=None):
        """Solve A x = b by PCG with the fitted V-cycle preconditioner.

        Returns (x, SolveReport).
        """
        check_is_fitted(self, "operator_")
        b = check_vector(b, n=self.matrix_.shape[0], name="right-hand side")
        return pcg(self.matrix_, b, self.operator_.apply, rtol=rtol, itmax=itmax, x0=x0)

    def aspreconditioner(self):
        """The fitted B^{-1} as a scipy LinearOperator."""
        check_is_fitted(self, "operator_")
        return self.operator_.as_linear_operator()

    def estimate_convergence_factor(self, applications=10, seed=None):
        """Measured error-propagation factor of the fitted V-cycle."""
        check_is_fitted(self, "operator_")
        seed = self.seed + 1 if seed is None else seed
        return estimate_rho(self.operator_, self.matrix_, seed=seed, applications=applications)
