import csv
import io
import json
import subprocess
import sys

import pytest

from maxcut_sdp.cli import CSV_COLUMNS, build_parser, main

COMMANDS = ["solve", "analyze-cycle", "analyze-diamond", "compose-vertex-sum", "sample",
            "probe-conjecture", "round"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_k3_file(capsys, tmp_path):
    p = tmp_path / "k3.json"
    p.write_text('{"n": 3, "edges": [[0, 1, 1], [0, 2, 1], [1, 2, 1]]}')
    code, out, _ = run(capsys, "solve", "--graph", str(p))
    rep = json.loads(out)
    assert code == 0
    assert rep["solution"]["primal_value"] == pytest.approx(9 / 4)
    assert rep["solution"]["status"] == "Converged"
    assert rep["rank"]["rank_X"] == 2 and rep["optimality"]["ok"]


def test_solve_named_with_weights(capsys):
    code, out, _ = run(capsys, "solve", "--graph", "k2", "--weights", "2.5")
    assert code == 0 and json.loads(out)["solution"]["primal_value"] == pytest.approx(2.5)


def test_analyze_cycle(capsys):
    code, out, _ = run(capsys, "analyze-cycle", "--weights", "1,1,-1")
    rep = json.loads(out)
    assert code == 0 and rep["has_rank1"] and rep["reason"] == "EvenPositives"


def test_analyze_cycle_zero_weight(capsys):
    code, out, err = run(capsys, "analyze-cycle", "--weights", "1,0,1")
    assert code == 1 and out == "" and len(err.strip().splitlines()) == 1


def test_analyze_diamond(capsys):
    code, out, _ = run(capsys, "analyze-diamond", "--weights", "1,0.3333333333333333,10,1,0.3333333333333333")
    rep = json.loads(out)
    assert code == 0 and rep["regime"] == "Flipped" and rep["x_star"] == [1, -1, 1, 1]
    code, _, err = run(capsys, "analyze-diamond", "--weights", "1,1,1,1,1")
    assert code == 1 and "agree" in err
    code, out, _ = run(capsys, "analyze-diamond", "--weights", "1,1,1,1,1", "--skip-precondition")
    assert code == 0 and json.loads(out)["stated_regime"] == "Neither"


def test_compose(capsys):
    code, out, _ = run(capsys, "compose-vertex-sum", "--graph1", "k3", "--graph2", "k3")
    rep = json.loads(out)
    assert code == 0 and rep["optimality_ok"]
    assert rep["rank_X_composed"] == rep["rank_formula_value"] == 3
    assert rep["min_rank_achievable"] == 2


def test_sample_csv(capsys):
    code, out, _ = run(capsys, "sample", "--graph", "butterfly", "--mode", "arbitrary",
                       "--samples", "60", "--seed", "7")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0].keys()) == CSV_COLUMNS
    assert [r["rank"] for r in rows] == ["1", "2", "3"]
    assert sum(int(r["count"]) for r in rows) + int(rows[0]["excluded"]) == 60
    assert {r["seed"] for r in rows} == {"7"}


def test_sample_json_embeds_config(capsys):
    code, out, _ = run(capsys, "sample", "--graph", "k3", "--samples", "20", "--seed", "1",
                       "--format", "json", "--mode", "both")
    rep = json.loads(out)
    assert code == 0 and len(rep["results"]) == 2
    cfg = rep["results"][0]["config"]
    assert cfg == {"graph": "k3", "samples": 20, "mode": "arbitrary", "seed": 1,
                   "rank_tol": 1e-6, "solver_tol": 1e-10}
    assert set(rep["results"][0]["sensitivity"]) == {"1e-05", "1e-06", "1e-07"}
    assert len(rep["results"][0]["reference_table"]) == 3


def test_round(capsys):
    code, out, _ = run(capsys, "round", "--graph", "c4", "--seed", "3")
    rep = json.loads(out)
    assert code == 0 and rep["value"] == 4 and rep["seed"] == 3
    assert rep["value"] <= rep["sdp_value"] + 1e-6


def test_probe(capsys):
    code, out, _ = run(capsys, "probe-conjecture", "--samples", "30", "--seed", "2")
    rep = json.loads(out)
    assert code == 0 and rep["samples"] == 30 and rep["config"]["seed"] == 2


@pytest.mark.parametrize("argv", [
    ["sample", "--graph", "k3"],                       # seed required
    ["round", "--graph", "k3"],
    ["probe-conjecture"],
    ["solve", "--graph", "k3", "--bogus"],             # unknown flag
    ["solve", "--graph", "k3", "--tol", "-1"],         # tolerance must be positive
    ["sample", "--graph", "k3", "--seed", "1", "--samples", "0"],
    ["frobnicate"],
    [],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""


@pytest.mark.parametrize("content", [
    "{",
    '{"n": 3, "edges": [[0, 0, 1]]}',
    '{"n": 2, "edges": [[0, 1, 1], [1, 0, 1]]}',
    '{"edges": []}',
    "",
])
def test_malformed_graph_files(capsys, tmp_path, content):
    p = tmp_path / "g.json"
    p.write_text(content)
    code, out, err = run(capsys, "solve", "--graph-file", str(p))
    assert code == 1 and out == ""
    assert len(err.strip().splitlines()) == 1 and "g.json" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "solve", "--graph-file", str(tmp_path / "none.json"))
    assert code == 1 and "none.json" in err


def test_unknown_graph_name(capsys):
    code, _, err = run(capsys, "solve", "--graph", "petersen")
    assert code == 1 and "petersen" in err


def test_diamond_rejects_other_graphs(capsys):
    code, _, err = run(capsys, "analyze-diamond", "--graph", "k4")
    assert code == 1


@pytest.mark.parametrize("cmd", COMMANDS)
def test_help(capsys, cmd):
    with pytest.raises(SystemExit) as exc:
        build_parser().parse_args([cmd, "--help"])
    assert exc.value.code == 0
    assert cmd in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["solve", "--graph", "butterfly"],
    ["analyze-cycle", "--weights", "0.1,1,1"],
    ["analyze-diamond", "--weights", "1,1,0.3,1,1"],
    ["compose-vertex-sum", "--graph1", "c4", "--graph2", "k3"],
    ["round", "--graph", "c5", "--seed", "1"],
    ["probe-conjecture", "--samples", "10", "--seed", "1"],
    ["sample", "--graph", "k3", "--samples", "10", "--seed", "1", "--format", "json"],
])
def test_json_roundtrip(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    obj = json.loads(out)
    assert obj["command"] == argv[0]
    assert json.dumps(obj, indent=2) + "\n" == out


def test_output_file_and_determinism(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sample", "--graph", "fish", "--mode", "both", "--samples", "40", "--seed", "9"]
    assert main(args + ["--output", str(a)]) == 0
    assert main(args + ["--output", str(b), "--threads", "4"]) == 0
    assert capsys.readouterr().out == ""
    assert a.read_bytes() == b.read_bytes()


def test_text_format(capsys):
    code, out, _ = run(capsys, "analyze-cycle", "--weights", "1,1,1", "--format", "text")
    assert code == 0 and "has_rank1: False" in out


def test_entry_point():
    out = subprocess.run([sys.executable, "-m", "maxcut_sdp.cli", "analyze-cycle", "--weights", "1,1,-1"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["has_rank1"]
