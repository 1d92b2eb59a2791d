import json

import pytest

from spni.cli import main
from spni.instance import write_instance
from spni.qubo import read_qubo


@pytest.fixture
def p3_file(tmp_path, p3):
    path = tmp_path / "p3.json"
    write_instance(p3, path)
    return path


def test_generate(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["generate", "--rows", "3", "--cols", "3", "--seed", "1", "--budget", "1", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["arcs"]) == 18 and doc["budget"] == 1
    assert "arcs 18" in capsys.readouterr().out


def test_generate_budget_fraction(tmp_path):
    out = tmp_path / "g.json"
    main(["generate", "--rows", "3", "--cols", "3", "--budget-frac", "0.0025", "--out", str(out)])
    assert json.loads(out.read_text())["budget"] == 1


def test_generate_usage_error(tmp_path):
    with pytest.raises(SystemExit) as e:
        main(["generate", "--rows", "1", "--cols", "3", "--out", str(tmp_path / "g.json")])
    assert e.value.code == 2


def test_solve(p3_file, tmp_path, capsys):
    assert main(["solve", "--instance", str(p3_file), "--subsolver", "bb", "--n", "3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {"interdicted": [0], "length": 9, "budget_used": 1}
    trace = tmp_path / "trace.csv"
    out = tmp_path / "sol.json"
    main(["solve", "--instance", str(p3_file), "--lambda", "0", "--trace-out", str(trace), "--out", str(out)])
    assert len(trace.read_text().splitlines()) == 2
    start = tmp_path / "start.json"
    start.write_text(json.dumps({"interdicted": [1]}))
    main(["solve", "--instance", str(p3_file), "--start", str(start), "--n", "3", "--lambda", "3", "--out", str(out)])
    assert json.loads(out.read_text())["length"] == 9


def test_solve_bad_instance(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["solve", "--instance", str(bad)]) == 3
    assert main(["solve", "--instance", str(tmp_path / "missing.json")]) == 3


def test_baseline(p3_file, tmp_path, capsys):
    assert main(["baseline", "--instance", str(p3_file)]) == 0
    assert "f=9 optimal=true" in capsys.readouterr().out
    assert main(["baseline", "--instance", str(p3_file), "--timeout", "0"]) == 0
    assert "optimal=false" in capsys.readouterr().out
    assert main(["baseline", "--instance", str(p3_file), "--timeout", "0", "--fail-on-timeout"]) == 4
    assert main(["baseline", "--instance", str(p3_file), "--mode", "bruteforce", "--cap", "1"]) == 4
    assert "capacity" in capsys.readouterr().err


def test_export_qubo(p3_file, tmp_path, capsys):
    out = tmp_path / "q.txt"
    assert main(["export-qubo", "--instance", str(p3_file), "--out", str(out)]) == 0
    full = read_qubo(out)
    assert full.var_count == 21
    main(["export-qubo", "--instance", str(p3_file), "--sense", "min", "--out", str(out)])
    neg = read_qubo(out)
    assert neg.linear == {k: -v for k, v in full.linear.items()}
    main(["export-qubo", "--instance", str(p3_file), "--sub", "1 2,2", "--out", str(out)])
    sub = read_qubo(out)
    # pi_s leaves scope but the slack on the entering arc takes its place
    assert sub.pi_nodes == (1, 2) and sub.source == -1
    with pytest.raises(SystemExit):
        main(["export-qubo", "--instance", str(p3_file), "--sub", "1 2"])


def test_bench(tmp_path, capsys):
    out = tmp_path / "b.csv"
    args = ["bench", "--sizes", "3", "--seeds", "0-1", "--budget", "2", "--n", "6", "--lambda", "2"]
    assert main(args + ["--timeout-mode", "oracle", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    for line in lines[1:]:
        assert float(line.split(",")[5]) <= 0
    with pytest.raises(SystemExit) as e:
        main(["bench", "--sizes", ""])
    assert e.value.code == 2
