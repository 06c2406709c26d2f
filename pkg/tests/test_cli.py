import csv

import pytest

from bbportfolio.cli import ladder_subset, main, parse_int_list
from bbportfolio.records import STANDARD_LADDER, TrialRecord, write_records


def run_cli(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


RUN_EG = ["run", "--portfolio", "NelderMead,Powell,CG,BFGS,CMA", "--strategy", "eg", "--eps", "0.5",
          "--functions", "1", "--dims", "2", "--instances", "2", "--maxfev", "10000", "--seed", "42"]


def test_run_portfolio(tmp_path, capsys):
    assert run_cli(RUN_EG + ["--out", str(tmp_path / "r")]) == 0
    out = capsys.readouterr().out.splitlines()
    assert sum(line.startswith("f1 d2 i") for line in out) == 2
    assert len(list((tmp_path / "r").glob("*.mlog.csv"))) == 2


@pytest.mark.parametrize("argv", [
    ["run", "--strategy", "eg", "--solver", "CMA"],
    ["run", "--strategy", "eg"],
    ["run", "--portfolio", "CMA,BFGS", "--strategy", "eg", "--eps", "1.5"],
    ["run", "--portfolio", "CMA,BFGS"],
    ["run", "--portfolio", "CMA,SLSQP", "--strategy", "unif"],
    ["run", "--solver", "CMA", "--portfolio", "CMA", "--strategy", "unif"],
    ["run", "--solver", "CMA", "--bogus", "1"],
    ["run", "--solver", "CMA", "--dims", "1"],
    ["run", "--solver", "Simplex"],
    ["frobnicate"],
])
def test_flag_errors_exit_2(argv, tmp_path):
    assert run_cli(argv + ["--out", str(tmp_path)] if argv[0] == "run" else argv) == 2


def test_run_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert run_cli(["run", "--solver", "CMA", "--functions", "1", "--dims", "2", "--instances", "1",
                    "--maxfev", "50", "--out", str(blocker / "sub")]) == 1


def fixture_dir(path, records):
    path.mkdir()
    write_records(path / "records.csv", records)
    return path


def rec(inst, total, hit):
    hits = {d: hit for d in STANDARD_LADDER}
    return TrialRecord(1, 2, inst, "S", total, 0.0 if hit else 1.0, hits)


def test_ert_worked_example(tmp_path, capsys):
    d = fixture_dir(tmp_path / "in", [rec(1, 150, 100), rec(2, 210, 200), rec(3, 1000, None)])
    assert run_cli(["ert", "--in", str(d), "--delta", "1e-8"]) == 0
    assert "ert=650,n_success=2,n_trials=3" in capsys.readouterr().out
    rows = list(csv.DictReader(open(d / "ert.csv")))
    assert float(rows[0]["ert"]) == 650.0


def test_ert_all_failed(tmp_path, capsys):
    d = fixture_dir(tmp_path / "in", [rec(1, 100, None), rec(2, 100, None)])
    assert run_cli(["ert", "--in", str(d), "--delta", "1e-8"]) == 0
    assert "ert=inf,n_success=0" in capsys.readouterr().out


def test_ert_ladder(tmp_path):
    d = fixture_dir(tmp_path / "in", [rec(1, 100, 10)])
    assert run_cli(["ert", "--in", str(d), "--ladder", "50"]) == 0
    assert len(list(csv.DictReader(open(d / "ert.csv")))) == 50


def test_ert_off_ladder_delta_is_a_usage_error(tmp_path):
    d = fixture_dir(tmp_path / "in", [rec(1, 100, 10)])
    assert run_cli(["ert", "--in", str(d), "--delta", "1e-6"]) == 2


def test_ert_missing_or_corrupt(tmp_path):
    (tmp_path / "empty").mkdir()
    assert run_cli(["ert", "--in", str(tmp_path / "empty"), "--delta", "1e-8"]) == 1
    bad = tmp_path / "bad"
    bad.mkdir()
    (bad / "records.csv").write_text("nonsense\n1,2\n")
    assert run_cli(["ert", "--in", str(bad), "--delta", "1e-8"]) == 1
    assert run_cli(["ecdf", "--in", str(bad)]) == 1


def test_ecdf_files_and_determinism(tmp_path):
    out = tmp_path / "r"
    assert run_cli(["run", "--solver", "Powell", "--functions", "1-10", "--dims", "2,3", "--instances", "1",
                    "--maxfev", "300", "--out", str(out)]) == 0
    assert run_cli(["ecdf", "--in", str(out), "--seed", "3", "--out", str(tmp_path / "e1")]) == 0
    assert run_cli(["ecdf", "--in", str(out), "--seed", "3", "--out", str(tmp_path / "e2")]) == 0
    files = sorted(p.name for p in (tmp_path / "e1").iterdir())
    assert len(files) == 6 * 2
    assert "ecdf_all_2D.csv" in files and "ecdf_weakly-structured_3D.csv" in files
    for name in files:
        assert (tmp_path / "e1" / name).read_bytes() == (tmp_path / "e2" / name).read_bytes()
    header = (tmp_path / "e1" / "ecdf_all_2D.csv").read_text().splitlines()
    assert header[0] == "budget_fevals_per_dim,Powell" and len(header) == 62


def test_ecdf_degenerate_settings(tmp_path):
    d = fixture_dir(tmp_path / "in", [rec(1, 100, 10)])
    assert run_cli(["ecdf", "--in", str(d), "--targets", "1", "--samples", "1"]) == 0
    assert run_cli(["ecdf", "--in", str(d), "--targets", "0"]) == 2


def test_helpers():
    assert parse_int_list("1-3,7") == [1, 2, 3, 7]
    assert ladder_subset(50) == STANDARD_LADDER
    assert ladder_subset(2) == [1e2, 1e-8]
    assert ladder_subset(1) == [1e-8]
