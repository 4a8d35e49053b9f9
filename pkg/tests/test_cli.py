import io

import pytest

from transport_simplex.bench import BenchRecord, write_csv
from transport_simplex.cli import run


def call(argv):
    out = io.StringIO()
    code = run(argv, out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    one = tmp_path / "one.txt"
    one.write_text("1 1\n5\n5\n7\n")
    two = tmp_path / "two.txt"
    two.write_text("2 2\n3 2\n2 3\n1 2\n4 3\n")
    return tmp_path, one, two


def line(text, prefix):
    return next(l for l in text.splitlines() if l.startswith(prefix))


def test_solve_single_cell(files):
    _, one, _ = files
    code, out = call(["solve", "--input", str(one), "--method", "leastcost", "--pivot", "modrow"])
    assert code == 0
    assert line(out, "objective:") == "objective: 35"
    assert line(out, "config:").startswith("config: command=solve")


def test_solve_methods_agree(files):
    _, _, two = files
    _, a = call(["solve", "--input", str(two), "--method", "shortlist"])
    _, b = call(["solve", "--input", str(two), "--method", "leastcost", "--pivot", "matrix"])
    assert line(a, "objective:") == line(b, "objective:") == "objective: 10"
    assert "time shortlists:" in a and "time full:" in a
    assert "pivots:" in b and "cells scanned:" in b


def test_solve_emd(files):
    _, _, two = files
    _, out = call(["solve", "--input", str(two), "--method", "vogel", "--emd"])
    assert line(out, "emd:") == "emd: 2"


def test_solve_deterministic(files):
    _, _, two = files
    strip = lambda s: [l for l in s.splitlines() if not l.startswith("time ")]
    a = call(["solve", "--input", str(two), "--method", "shortlist", "--s", "1", "--k", "1"])[1]
    b = call(["solve", "--input", str(two), "--method", "shortlist", "--s", "1", "--k", "1"])[1]
    assert strip(a) == strip(b)


def test_solve_then_verify(files):
    tmp, _, two = files
    plan = tmp / "plan.txt"
    call(["solve", "--input", str(two), "--method", "northwest", "--plan-out", str(plan)])
    code, out = call(["verify", "--input", str(two), "--plan", str(plan)])
    assert code == 0
    assert line(out, "optimal:") == "optimal: yes"
    assert line(out, "min relative cost:") == "min relative cost: 2"


def test_verify_suboptimal(files):
    tmp, _, two = files
    plan = tmp / "plan.txt"
    plan.write_text("2 2 3\n0 1 3\n1 0 2\n1 1 0\n")
    _, out = call(["verify", "--input", str(two), "--plan", str(plan)])
    assert line(out, "worst cell:") == "worst cell: (0, 0)"
    assert line(out, "optimal:") == "optimal: no"


def test_usage_errors(files, capsys):
    _, _, two = files
    assert call(["solve", "--input", str(two), "--method", "nosuch"])[0] == 1
    assert call(["solve", "--input", str(two), "--method", "vogel", "--bogus"])[0] == 1
    assert call(["solve", "--input", str(two), "--method", "vogel", "--s", "3"])[0] == 1
    assert call(["frobnicate"])[0] == 1
    assert call([])[0] == 1
    assert call(["solve", "--input", "/nonexistent", "--method", "vogel"])[0] == 1
    err = capsys.readouterr().err
    assert err.count("error:") == 6


def test_invalid_instance_is_usage_error(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 1\n5\n4\n7\n")
    assert call(["solve", "--input", str(bad), "--method", "vogel"])[0] == 1


def test_solver_abort_exit_code(files, monkeypatch):
    from transport_simplex import cli
    from transport_simplex.exceptions import SolverAbort

    def boom(*a, **k):
        raise SolverAbort("cap", pivots=3)

    monkeypatch.setattr(cli, "solve_to_optimality", boom)
    monkeypatch.setattr(cli.bench, "_warm_up", lambda *a: None)
    _, _, two = files
    assert call(["solve", "--input", str(two), "--method", "vogel"])[0] == 2


def test_generate(tmp_path):
    out = tmp_path / "g.txt"
    code, _ = call(["generate", "--n", "12", "--seed", "4", "--out", str(out)])
    assert code == 0
    assert out.read_text().splitlines()[0] == "12 12"


def test_bench_and_fit(tmp_path):
    out = tmp_path / "b.csv"
    code, text = call(["bench", "--sizes", "8,12", "--reps", "1", "--methods", "shortlist,rowmin",
                       "--seed", "3", "--out", str(out)])
    assert code == 0 and "wrote 4 records" in text
    code, text = call(["fit", "--in", str(out), "--method", "shortlist"])
    assert code == 0 and "q=" in text


def test_bench_rejects_unknown_method(tmp_path):
    code, _ = call(["bench", "--sizes", "8", "--methods", "nosuch", "--out", str(tmp_path / "x.csv")])
    assert code == 1


def test_fit_synthetic(tmp_path):
    recs = [BenchRecord("shortlist", "modrow", n, 0, 0, 0.0, 2.0 * n ** 3, 0, 0, 1.0)
            for n in (100, 200, 400)]
    path = tmp_path / "syn.csv"
    write_csv(recs, path)
    code, out = call(["fit", "--in", str(path), "--method", "shortlist"])
    assert code == 0
    assert "c=2.000000" in out and "q=3.000000" in out
