import numpy as np
import pytest

from mvamg.cli import cli_entry
from mvamg.mmio import write_matrix_market
from mvamg.problems import AnisotropySpec, generate_anisotropic_2d


@pytest.fixture(scope="module")
def small_mtx(tmp_path_factory):
    path = tmp_path_factory.mktemp("mtx") / "ani1_16.mtx"
    write_matrix_market(generate_anisotropic_2d(AnisotropySpec(0.001, 0.0, 16)), path)
    return str(path)


def test_unknown_flag_exits_one(capsys):
    with pytest.raises(SystemExit) as exc:
        cli_entry(["bench", "--wibble"])
    assert exc.value.code == 1
    assert "usage" in capsys.readouterr().err


def test_missing_subcommand_exits_one():
    with pytest.raises(SystemExit) as exc:
        cli_entry([])
    assert exc.value.code == 1


def test_bench_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "rows.csv"
    cfg.write_text(
        "problem = ani1\ngrid_n = 16\nnsv = 1,2\nmin_coarse_size = 16\nmerge_levels = 2\n"
        f"out = {out}\n"
    )
    assert cli_entry(["bench", "--config", str(cfg)]) == 0
    captured = capsys.readouterr()
    assert out.exists()
    assert len(out.read_text().strip().splitlines()) == 3
    assert len(captured.out.strip().splitlines()) == 2


def test_bench_cli_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("problem = ani1\ngrid_n = 16\nnsv = 1,2\nmin_coarse_size = 16\nmerge_levels = 2\n")
    out = tmp_path / "o.csv"
    assert cli_entry(["bench", "--config", str(cfg), "--nsv", "1", "--out", str(out)]) == 0
    assert len(out.read_text().strip().splitlines()) == 2


def test_bench_missing_config_file(tmp_path, capsys):
    code = cli_entry(["bench", "--config", str(tmp_path / "absent.cfg")])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_solve_prints_report(small_mtx, capsys):
    assert cli_entry(["solve", "--matrix", small_mtx, "--nsv", "2"]) == 0
    out = capsys.readouterr().out
    assert "nit=" in out
    assert "converged=True" in out
    assert "tb=" in out

def test_solve_writes_solution(small_mtx, tmp_path):
    out = tmp_path / "x.txt"
    assert cli_entry(["solve", "--matrix", small_mtx, "--nsv", "2", "--out", str(out)]) == 0
    x = np.loadtxt(out)
    assert x.shape == (256,)


def test_solve_nonconvergence_exits_two(small_mtx, capsys):
    code = cli_entry(["solve", "--matrix", small_mtx, "--nsv", "1", "--itmax", "1", "--rtol", "1e-12"])
    assert code == 2
    assert "tolerance" in capsys.readouterr().err


def test_solve_numerical_failure_exits_two(tmp_path, capsys):
    # indefinite matrix: PCG breaks down
    path = tmp_path / "indef.mtx"
    path.write_text(
        "%%MatrixMarket matrix coordinate real symmetric\n"
        "2 2 2\n1 1 1.0\n2 2 -1.0\n"
    )
    code = cli_entry(["solve", "--matrix", str(path), "--nsv", "1"])
    assert code == 2
    assert "numerical failure" in capsys.readouterr().err


def test_info_prints_levels(small_mtx, capsys):
    assert cli_entry(["info", "--matrix", small_mtx, "--nsv", "2"]) == 0
    out = capsys.readouterr().out
    assert "level 0" in out
    assert "kept_per_aggregate" in out


def test_info_generated_problem(capsys):
    assert cli_entry(["info", "--problem", "ani1", "--grid", "16", "--nsv", "1"]) == 0
    assert "level 0: size=256" in capsys.readouterr().out
