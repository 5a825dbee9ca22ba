"""Benchmark harness: setup, solve and report the standard metrics.

For each requested number of smooth vectors (nsv) the harness builds the
multi-vector hierarchy from the adaptively generated vectors, solves
A x = 1 with V-cycle-preconditioned CG and reports one CSV row:

    nsv,nl,opc,cr,rho,tb_seconds,mvtb_seconds,nit,ts_seconds

nl is the level count, opc the operator complexity, cr the mean
coarsening factor, rho a measured convergence-factor estimate, tb the
total setup time attributable to the row (vector generation plus
hierarchy construction), mvtb the multi-vector part of tb, nit/ts the
CG iteration count and solve time.
"""

import time
from dataclasses import dataclass, fields, replace

import numpy as np

from .bootstrap import BootstrapParams, bootstrap_run
from .cycles import CycleSpec, MultigridOperator
from .metrics import coarsening_factor, operator_complexity
from .mmio import read_matrix_market
from .multivector import build_multivector_hierarchy
from .pairwise import CoarseningParams, build_pairwise_hierarchy
from .problems import AnisotropySpec, generate_anisotropic_2d
from .krylov import pcg
from .sparse import a_norm, as_csr

CSV_FIELDS = ("nsv", "nl", "opc", "cr", "rho", "tb_seconds", "mvtb_seconds", "nit", "ts_seconds")

#: Number of error-propagation applications behind the reported rho.
RHO_APPLICATIONS = 10


@dataclass
class RunConfig:
    problem: str = "ani1"  # ani1 | ani2 | mtx:<path>
    grid_n: int = 64
    nsv: tuple = (5,)
    merge_levels: int = 3
    svd_tol: float = 0.1
    rho_des: float = 0.8
    maxstage: int = 15
    nu: int = 15
    steps: int = 2
    min_coarse_size: int = 40
    max_levels: int = 20
    seed: int = 0
    rtol: float = 1e-6
    itmax: int = 1000
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if isinstance(self.nsv, int):
            self.nsv = (self.nsv,)
        self.nsv = tuple(int(v) for v in self.nsv)
        if min(self.nsv) < 1:
            raise ValueError("nsv values must be >= 1")


@dataclass
class MetricsRow:
    nsv: int
    nl: int
    opc: float
    cr: float
    rho: float
    tb_seconds: float
    mvtb_seconds: float
    nit: int
    ts_seconds: float

    def csv_line(self):
        return (
            f"{self.nsv},{self.nl},{self.opc:.6f},{self.cr:.6f},{self.rho:.6f},"
            f"{self.tb_seconds:.3f},{self.mvtb_seconds:.3f},{self.nit},{self.ts_seconds:.3f}"
        )


def compute_opc(hierarchy):
    """Operator complexity sum(nnz(A^k)) / nnz(A^0) of a built hierarchy."""
    return operator_complexity(hierarchy.matrices)


def compute_cr(hierarchy):
    """Mean coarsening factor over the hierarchy's successive levels."""
    return coarsening_factor([A.shape[0] for A in hierarchy.matrices])


def resolve_problem(cfg: RunConfig):
    if cfg.problem == "ani1":
        return generate_anisotropic_2d(AnisotropySpec(0.001, 0.0, cfg.grid_n))
    if cfg.problem == "ani2":
        return generate_anisotropic_2d(AnisotropySpec(0.001, np.pi / 8.0, cfg.grid_n))
    if cfg.problem.startswith("mtx:"):
        return read_matrix_market(cfg.problem[4:])
    raise ValueError(f"unknown problem {cfg.problem!r} (expected ani1, ani2 or mtx:<path>)")


def estimate_rho(operator, A, seed, applications=RHO_APPLICATIONS):
    """Last-ratio energy-norm estimate of the error propagation factor."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(-1.0, 1.0, size=A.shape[0])
    prev = a_norm(A, x)
    ratio = 0.0
    for _ in range(applications):
        x = operator.error_propagation(x)
        cur = a_norm(A, x)
        if cur == 0.0:
            return 0.0
        ratio = cur / prev
        prev = cur
    return float(ratio)


def _coarsening_params(cfg: RunConfig):
    return CoarseningParams(
        steps_per_level=cfg.steps,
        max_levels=cfg.max_levels,
        min_coarse_size=cfg.min_coarse_size,
    )


def build_solver(cfg: RunConfig, A=None, nsv=None):
    """Build the preconditioner for one nsv value.

    Returns (operator, hierarchy, composite, tb, mvtb).  The pairwise
    substrate is the hierarchy of the row's last setup stage; nsv = 1
    skips the adaptive loop and coarsens the all-ones vector directly.
    """
    A = resolve_problem(cfg) if A is None else as_csr(A)
    nsv = max(cfg.nsv) if nsv is None else nsv
    w0 = np.ones(A.shape[0])
    if nsv == 1:
        pair_t0 = time.perf_counter()
        pairwise = build_pairwise_hierarchy(A, w0, _coarsening_params(cfg))
        boot_seconds = time.perf_counter() - pair_t0
        composite = None
        vectors = [w0]
    else:
        params = BootstrapParams(
            rho_des=cfg.rho_des,
            maxstage=max(cfg.maxstage, nsv - 1),
            nu=cfg.nu,
            rng_seed=cfg.seed,
            min_stages=nsv - 1,
            coarsening=_coarsening_params(cfg),
        )
        t0 = time.perf_counter()
        composite = bootstrap_run(A, w0, params)
        boot_seconds = time.perf_counter() - t0
        if composite.n_components < nsv - 1:
            # Hit maxstage or an exact composite before enough vectors.
            nsv = composite.n_components + 1
        pairwise = composite.components[nsv - 2].hierarchy
        vectors = composite.smooth_vectors[:nsv]
    hierarchy = build_multivector_hierarchy(
        A,
        pairwise,
        vectors,
        merge_levels=cfg.merge_levels,
        tol=cfg.svd_tol,
        min_coarse_size=cfg.min_coarse_size,
        workers=cfg.workers,
    )
    operator = MultigridOperator(
        hierarchy.matrices, hierarchy.prolongator_matrices, cycle=CycleSpec("V")
    )
    mvtb = hierarchy.build_seconds
    return operator, hierarchy, composite, boot_seconds + mvtb, mvtb


def run_benchmark(cfg: RunConfig):
    """Run the full protocol for every nsv in cfg.nsv.

    Returns the list of MetricsRow.  When cfg.out is set the CSV is
    written incrementally (header first, one flushed line per row), so a
    failure mid-run leaves the completed rows on disk; the per-stage
    setup log goes to ``<out>.stages.csv``.
    """
    A = resolve_problem(cfg)
    max_nsv = max(cfg.nsv)
    composite = None
    boot_stage_seconds = []
    if max_nsv > 1:
        params = BootstrapParams(
            rho_des=cfg.rho_des,
            maxstage=max(cfg.maxstage, max_nsv - 1),
            nu=cfg.nu,
            rng_seed=cfg.seed,
            min_stages=max_nsv - 1,
            coarsening=_coarsening_params(cfg),
        )
        composite = bootstrap_run(A, np.ones(A.shape[0]), params)
        boot_stage_seconds = [rec.build_seconds for rec in composite.stage_records]
        if cfg.out:
            with open(f"{cfg.out}.stages.csv", "w", encoding="ascii") as f:
                f.write(composite.stage_log() + "\n")

    rows = []
    out = open(cfg.out, "w", encoding="ascii") if cfg.out else None
    try:
        if out:
            out.write(",".join(CSV_FIELDS) + "\n")
            out.flush()
        for nsv in cfg.nsv:
            nsv_eff = nsv
            if composite is not None and nsv > composite.n_components + 1:
                nsv_eff = composite.n_components + 1
            if nsv_eff == 1:
                t0 = time.perf_counter()
                pairwise = build_pairwise_hierarchy(A, np.ones(A.shape[0]), _coarsening_params(cfg))
                boot_part = time.perf_counter() - t0
                vectors = [np.ones(A.shape[0])]
            else:
                pairwise = composite.components[nsv_eff - 2].hierarchy
                vectors = composite.smooth_vectors[:nsv_eff]
                boot_part = float(sum(boot_stage_seconds[: nsv_eff - 1]))
            hierarchy = build_multivector_hierarchy(
                A,
                pairwise,
                vectors,
                merge_levels=cfg.merge_levels,
                tol=cfg.svd_tol,
                min_coarse_size=cfg.min_coarse_size,
                workers=cfg.workers,
            )
            operator = MultigridOperator(
                hierarchy.matrices, hierarchy.prolongator_matrices, cycle=CycleSpec("V")
            )
            mvtb = hierarchy.build_seconds
            rho = estimate_rho(operator, A, seed=cfg.seed + 1)
            b = np.ones(A.shape[0])
            t0 = time.perf_counter()
            _, report = pcg(A, b, operator.apply, rtol=cfg.rtol, itmax=cfg.itmax)
            ts = time.perf_counter() - t0
            row = MetricsRow(
                nsv=nsv,
                nl=hierarchy.nl,
                opc=compute_opc(hierarchy),
                cr=compute_cr(hierarchy),
                rho=rho,
                tb_seconds=boot_part + mvtb,
                mvtb_seconds=mvtb,
                nit=report.iterations,
                ts_seconds=ts,
            )
            rows.append(row)
            if out:
                out.write(row.csv_line() + "\n")
                out.flush()
    finally:
        if out:
            out.close()
    return rows


_CONFIG_TYPES = {f.name: f for f in fields(RunConfig)}


def load_config(path, overrides=None):
    """Parse a flat ``key = value`` config file into a RunConfig.

    Blank lines and '#' comments are ignored; the nsv key accepts a
    comma-separated list.  Unknown keys are rejected.
    """
    values = {}
    with open(path, "r", encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in _CONFIG_TYPES:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, value)
    cfg = RunConfig(**values)
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def _parse_value(key, value):
    if key == "nsv":
        return tuple(int(v) for v in value.split(","))
    if key in ("problem", "out"):
        return value
    if key in ("grid_n", "merge_levels", "maxstage", "nu", "steps", "min_coarse_size",
               "max_levels", "seed", "itmax", "workers"):
        return int(value)
    return float(value)
