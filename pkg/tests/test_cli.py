import json

import pytest
from typer.testing import CliRunner

from src.main import app

runner = CliRunner()


def _payload(result) -> dict:
    return json.loads(result.stdout)


def test_regular_check_prints_witness():
    result = runner.invoke(app, ["regular", "check", "1,1,-1"])
    assert result.exit_code == 0
    payload = _payload(result)
    assert payload["result"]["partition_regular"] is True
    assert payload["result"]["witness"]["index_set"] == [1, 3]
    assert payload["manifest"]["subcommand"] == "regular check"


def test_regular_check_on_non_regular_equation():
    result = runner.invoke(app, ["regular", "check", "1,2"])
    assert result.exit_code == 1
    assert _payload(result)["result"]["partition_regular"] is False


def test_malformed_equation_exits_with_input_error():
    result = runner.invoke(app, ["regular", "check", "1,a"])
    assert result.exit_code == 2


def test_regular_reduce():
    result = runner.invoke(app, ["regular", "reduce", "1,1,-2"])
    assert result.exit_code == 0
    assert _payload(result)["result"]["b"] == 0
    assert _payload(result)["result"]["invariant"] is True


def test_rado_number_of_schur_equation():
    result = runner.invoke(app, ["rado", "number", "--eq", "1,1,-1", "--colours", "2", "--max", "20"])
    assert result.exit_code == 0
    assert _payload(result)["result"]["value"] == 5


def test_rado_number_budget_exhausted():
    result = runner.invoke(app, ["rado", "number", "--eq", "1,1,-1", "--max", "4"])
    assert result.exit_code == 3
    assert _payload(result)["result"]["value"] is None


def test_rado_number_csv_carries_manifest_hash():
    result = runner.invoke(app, ["rado", "number", "--eq", "1,1,-1", "--max", "20", "--csv"])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0].startswith("# manifest sha256=")
    assert lines[1].startswith("equation,r,n_max,value")
    assert lines[2].split(",")[3] == "5"


def test_output_is_reproducible():
    args = ["rado", "number", "--eq", "1,1,-1", "--max", "20"]
    assert runner.invoke(app, args).stdout == runner.invoke(app, args).stdout


def test_rado_witness_and_verify(tmp_path):
    result = runner.invoke(app, ["rado", "witness", "--eq", "1,1,-1", "--n", "4"])
    assert result.exit_code == 0
    colouring = _payload(result)["result"]
    path = tmp_path / "colouring.json"
    path.write_text(json.dumps(colouring))

    verified = runner.invoke(app, ["rado", "verify", "--eq", "1,1,-1", "--colouring", str(path)])
    assert verified.exit_code == 0
    assert _payload(verified)["result"]["avoiding"] is True

    assert runner.invoke(app, ["rado", "witness", "--eq", "1,1,-1", "--n", "5"]).exit_code == 1


def test_rado_verify_reports_a_solution(tmp_path):
    path = tmp_path / "colouring.json"
    path.write_text(json.dumps({"labels": [0, 0, 1, 1]}))
    result = runner.invoke(app, ["rado", "verify", "--eq", "1,1,-1", "--colouring", str(path)])
    assert result.exit_code == 1
    assert _payload(result)["result"]["solution"] == [1, 1, 2]


def test_count_mono_agrees_with_oracle():
    result = runner.invoke(app, ["count", "mono", "--group", "zp:101", "--density", "0.3", "--a", "2", "--b", "3"])
    assert result.exit_code == 0
    payload = _payload(result)["result"]
    assert payload["count"] == payload["oracle"]


def test_count_mono_needs_a_set():
    assert runner.invoke(app, ["count", "mono"]).exit_code == 2


def test_count_interval(tmp_path):
    path = tmp_path / "colouring.json"
    path.write_text(json.dumps({"n": 50, "classes": [list(range(1, 51))]}))
    result = runner.invoke(app, ["count", "interval", "--colouring", str(path)])
    assert result.exit_code == 0
    assert _payload(result)["result"] == [{"colour": 0, "size": 50, "count": 1225}]


def test_bohr_build():
    result = runner.invoke(app, ["bohr", "build", "--p", "101", "--freq", "1", "--width", "2.0"])
    assert result.exit_code == 0
    assert _payload(result)["result"]["size"] == 101


def test_bohr_build_bad_width():
    assert runner.invoke(app, ["bohr", "build", "--p", "101", "--freq", "1", "--width", "3"]).exit_code == 2


def test_bohr_regularize_budget():
    result = runner.invoke(app, ["bohr", "regularize", "--p", "101", "--freq", "1", "--width", "1", "--grid", "0"])
    assert result.exit_code == 3


def test_bohr_game(tmp_path):
    A = tmp_path / "A.json"
    A.write_text(json.dumps({"group": "zp:5", "members": [0]}))
    support = tmp_path / "support.json"
    support.write_text(json.dumps({"group": "zp:5", "members": [0, 1, 2, 3, 4]}))
    result = runner.invoke(app, ["bohr", "game", "--set", str(A), "--support", str(support)])
    assert result.exit_code == 0
    assert _payload(result)["result"]["exact"] == "1/5"


def test_lemma_growth_suite():
    result = runner.invoke(app, ["lemma", "growth", "--p", "101", "--instances", "3", "--seed", "1"])
    assert result.exit_code == 0
    summary = _payload(result)["result"]["summary"]
    assert summary["produced"] == summary["passed"] == 3


def test_lemma_chang_suite():
    result = runner.invoke(app, ["lemma", "chang", "--p", "401", "--instances", "10", "--seed", "3"])
    assert result.exit_code == 0
    assert _payload(result)["result"]["summary"]["passed"] == 10


def test_unknown_lemma():
    assert runner.invoke(app, ["lemma", "nonsense"]).exit_code == 2


def test_trace_toy_single_colour():
    result = runner.invoke(app, ["trace", "toy", "--q", "3", "--n", "3", "--colours", "1"])
    assert result.exit_code == 0
    record = json.loads(result.stdout.splitlines()[0])
    assert record["outcome"]["count"] == 729
    assert record["manifest"]["subcommand"] == "trace toy"


def test_trace_toy_flag_colouring_csv():
    result = runner.invoke(app, ["trace", "toy", "--flag-depth", "3", "--csv"])
    assert result.exit_code == 0
    rows = result.stdout.splitlines()[2:]
    assert [row.split(",")[2] for row in rows] == ["increment", "case1"]


def test_trace_zp_runs_one_line_per_seed():
    result = runner.invoke(app, ["trace", "zp", "--N", "20", "--colours", "1", "--runs", "2", "--threads", "2"])
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert len(lines) == 2
    assert all(json.loads(line)["outcome"]["count"] == 1261 for line in lines)


def test_trace_zp_budget_exit_code(tmp_path):
    config = tmp_path / "zp.json"
    config.write_text(json.dumps({"cd1_exponent": 0.5, "grid": 0}))
    result = runner.invoke(app, ["trace", "zp", "--N", "20", "--colours", "1", "--config", str(config)])
    assert result.exit_code == 3
    assert json.loads(result.stdout)["outcome"]["state_dump"]["error"] == "BudgetExceeded"


def test_book_show_and_write(tmp_path):
    path = tmp_path / "book.json"
    written = runner.invoke(app, ["book", "write", str(path), "--desk", "--set", "C12=6"])
    assert written.exit_code == 0
    shown = runner.invoke(app, ["book", "show", "--book", str(path)])
    assert shown.exit_code == 0
    payload = json.loads(shown.stdout)
    assert payload["C12"] == 6.0
    assert payload["hash"] == json.loads(written.stdout)["hash"]


@pytest.mark.parametrize("override", ["C12", "C12=abc", "unknown=1"])
def test_book_write_bad_override(tmp_path, override):
    result = runner.invoke(app, ["book", "write", str(tmp_path / "book.json"), "--set", override])
    assert result.exit_code == 2
