import numpy as np
import pytest

from mvamg.bench import (
    CSV_FIELDS,
    MetricsRow,
    RunConfig,
    compute_cr,
    compute_opc,
    load_config,
    resolve_problem,
    run_benchmark,
)
from mvamg.pairwise import build_pairwise_hierarchy

from conftest import laplacian_1d


class FakeHierarchy:
    def __init__(self, sizes, nnzs):
        import scipy.sparse as sp

        self.matrices = [
            sp.random(n, n, density=0.0, format="csr") + sp.eye(n, format="csr") * 0
            for n in sizes
        ]
        # give each matrix the requested nnz by planting a dense first row
        self.matrices = []
        for n, nnz in zip(sizes, nnzs):
            rows = np.zeros(nnz, dtype=np.int64)
            cols = np.arange(nnz) % n
            data = np.ones(nnz)
            self.matrices.append(sp.csr_matrix((data, (rows, cols)), shape=(n, n)))


class TestMetrics:
    def test_opc_single_level(self):
        h = build_pairwise_hierarchy(laplacian_1d(8), np.ones(8))
        assert compute_opc(h) == 1.0

    def test_opc_two_levels(self):
        h = FakeHierarchy([100, 30], [100, 30])
        assert compute_opc(h) == pytest.approx(1.3)

    def test_cr_values(self):
        assert compute_cr(FakeHierarchy([64, 16, 4], [3, 2, 1])) == pytest.approx(4.0)
        assert compute_cr(FakeHierarchy([100, 25], [2, 1])) == pytest.approx(4.0)
        assert compute_cr(FakeHierarchy([100, 50, 10], [3, 2, 1])) == pytest.approx(3.5)

    def test_cr_single_level(self):
        assert compute_cr(FakeHierarchy([64], [10])) == 1.0


class TestRunConfig:
    def test_nsv_scalar_normalized(self):
        assert RunConfig(nsv=4).nsv == (4,)

    def test_nsv_must_be_positive(self):
        with pytest.raises(ValueError):
            RunConfig(nsv=(0,))

    def test_resolve_problems(self):
        assert resolve_problem(RunConfig(problem="ani1", grid_n=8)).shape == (64, 64)
        assert resolve_problem(RunConfig(problem="ani2", grid_n=8)).shape == (64, 64)
        with pytest.raises(ValueError, match="unknown problem"):
            resolve_problem(RunConfig(problem="nope"))

    def test_resolve_mtx(self, tmp_path):
        from mvamg.mmio import write_matrix_market

        path = tmp_path / "m.mtx"
        write_matrix_market(laplacian_1d(5), path)
        A = resolve_problem(RunConfig(problem=f"mtx:{path}"))
        assert A.shape == (5, 5)


class TestConfigFile:
    def test_full_round_trip(self, tmp_path):
        cfg_text = (
            "# benchmark configuration\n"
            "problem = ani2\n"
            "grid_n = 32\n"
            "nsv = 3,4,5\n"
            "svd_tol = 0.05   # tighter truncation\n"
            "seed = 7\n"
            "out = results.csv\n"
        )
        path = tmp_path / "run.cfg"
        path.write_text(cfg_text)
        cfg = load_config(path)
        assert cfg.problem == "ani2"
        assert cfg.grid_n == 32
        assert cfg.nsv == (3, 4, 5)
        assert cfg.svd_tol == 0.05
        assert cfg.seed == 7
        assert cfg.out == "results.csv"

    def test_overrides(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("problem = ani1\nnsv = 5\n")
        cfg = load_config(path, overrides={"seed": 3})
        assert cfg.seed == 3

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("wibble = 3\n")
        with pytest.raises(ValueError, match="unknown key"):
            load_config(path)

    def test_malformed_line_rejected(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("problem ani1\n")
        with pytest.raises(ValueError, match="key = value"):
            load_config(path)


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("bench") / "rows.csv"
    cfg = RunConfig(problem="ani1", grid_n=16, nsv=(1, 2, 3), seed=1, out=str(out),
                    min_coarse_size=16, merge_levels=2)
    rows = run_benchmark(cfg)
    return cfg, rows, out


class TestRunBenchmark:
    def test_row_per_nsv(self, small_run):
        _, rows, _ = small_run
        assert [r.nsv for r in rows] == [1, 2, 3]

    def test_all_solves_converged(self, small_run):
        _, rows, _ = small_run
        assert all(r.nit < 1000 for r in rows)

    def test_time_accounting(self, small_run):
        _, rows, _ = small_run
        for r in rows:
            assert r.tb_seconds >= r.mvtb_seconds >= 0.0

    def test_opc_and_cr_sane(self, small_run):
        _, rows, _ = small_run
        for r in rows:
            assert r.opc >= 1.0
            if r.nl > 1:
                assert r.cr > 1.0

    def test_csv_schema(self, small_run):
        _, rows, out = small_run
        lines = out.read_text().strip().splitlines()
        assert lines[0] == ",".join(CSV_FIELDS)
        assert len(lines) == 1 + len(rows)
        assert all(len(line.split(",")) == len(CSV_FIELDS) for line in lines[1:])

    def test_deterministic_apart_from_wall_times(self, small_run, tmp_path):
        cfg, rows, _ = small_run
        out2 = tmp_path / "again.csv"
        cfg2 = RunConfig(problem=cfg.problem, grid_n=cfg.grid_n, nsv=cfg.nsv, seed=cfg.seed,
                         out=str(out2), min_coarse_size=cfg.min_coarse_size,
                         merge_levels=cfg.merge_levels)
        rows2 = run_benchmark(cfg2)
        time_fields = {"tb_seconds", "mvtb_seconds", "ts_seconds"}
        for a, b in zip(rows, rows2):
            for name in CSV_FIELDS:
                if name not in time_fields:
                    assert getattr(a, name) == getattr(b, name), name

    def test_metrics_row_csv_field_order(self):
        row = MetricsRow(3, 2, 1.5, 4.0, 0.9, 1.0, 0.5, 10, 0.1)
        parts = row.csv_line().split(",")
        assert parts[0] == "3" and parts[1] == "2"
        assert float(parts[2]) == 1.5
        assert parts[7] == "10"
