import argparse
import json
from pathlib import Path

import pytest

from sparsepoly import cli
from sparsepoly.__main__ import run_cli
from sparsepoly.errors import ParameterError

SAMPLES = Path(__file__).parent.parent / "samples"


def get_args(text: str) -> argparse.Namespace:
    parser = argparse.ArgumentParser()
    for k, v in cli.parser_options(["--poly", "--table", "--s", "--eps"] + cli.PARAMETER_OPTIONS):
        parser.add_argument(k, **v)
    return parser.parse_args(text.split())


@pytest.mark.parametrize("text", ["", "0.1,", "a,b"])
def test_float_list_rejects(text: str):
    with pytest.raises(argparse.ArgumentTypeError):
        cli.float_list(text)


@pytest.mark.parametrize("text", ["", "64,x", "0,8"])
def test_int_list_rejects(text: str):
    with pytest.raises(argparse.ArgumentTypeError):
        cli.int_list(text)


def test_params_from_flags():
    args = get_args("--s 2 --eps 0.2 --r 8 --bigM 100 --alpha 0.2,0.3")
    params = cli.params_from_args(args)
    assert (params.s, params.eps, params.r, params.M, params.alpha_grid) == (2, 0.2, 8, 100, (0.2, 0.3))
    assert params.profile == "desk"


def test_flags_override_config_file(tmp_path: Path):
    path = tmp_path / "p.profile"
    path.write_text("r=32\nbigM=500\n")
    args = get_args(f"--s 1 --eps 0.1 --config {path} --r 8")
    assert cli.overrides_from_args(args) == {"r": 8, "bigM": 500}


def test_params_need_s_and_eps():
    with pytest.raises(ParameterError):
        cli.params_from_args(get_args("--s 2"))


def test_function_from_args():
    assert cli.function_from_args(get_args(f"--table {SAMPLES / 'parity3.table'}")).n == 3
    with pytest.raises(ParameterError):
        cli.function_from_args(get_args(""))


def run_json(argv, capsys):
    code = run_cli(argv)
    return code, json.loads(capsys.readouterr().out)


def test_cli_test_exit_code_follows_outcome(capsys):
    argv = ["test", "--poly", str(SAMPLES / "canonical.poly"), "--s", "2", "--eps", "0.25"]
    code, report = run_json(argv + ["--r", "32", "--bigM", "500", "--seed", "4"], capsys)
    assert code == (0 if report["outcome"] == "accept" else 1)
    assert report["seed"] == 4
    assert report["queries"]["variation"] == 2 * 32 * 500


def test_cli_test_rejects_parity(capsys):
    argv = ["test", "--table", str(SAMPLES / "parity3.table"), "--s", "1", "--eps", "0.25", "--r", "8"]
    code, report = run_json(argv + ["--bigM", "300"], capsys)
    assert code == 1
    assert report["outcome"] == "reject"


def test_cli_test_empty_grid(capsys):
    argv = ["test", "--table", str(SAMPLES / "parity3.table"), "--s", "2", "--eps", "0.25"]
    code, report = run_json(argv + ["--profile", "theory", "--delta", "0.01"], capsys)
    assert code == 1
    assert report["reason"] == "empty-grid"


def test_cli_test_writes_json(tmp_path: Path, capsys):
    out = tmp_path / "reports" / "verdict.json"
    argv = ["test", "--table", str(SAMPLES / "parity3.table"), "--s", "1", "--eps", "0.25"]
    run_cli(argv + ["--r", "4", "--bigM", "100", "--json", str(out), "--summary"])
    printed = capsys.readouterr().out
    assert printed.startswith("outcome")
    assert json.loads(out.read_text())["outcome"] == "reject"


@pytest.mark.parametrize(
    "argv",
    [
        ["test", "--poly", "missing.poly", "--s", "1", "--eps", "0.1"],
        ["test", "--s", "1", "--eps", "0.1"],
        ["test", "--table", str(SAMPLES / "parity3.table"), "--s", "1", "--eps", "1.5"],
        ["learn", "--poly", str(SAMPLES / "canonical.poly"), "--s", "2", "--eps", "0.1"],
        ["experiment", "soundness", "--family", "zero"],
        ["verify", "--suite", "nosuch"],
        ["test", "--poly", str(SAMPLES / "canonical.poly"), "--s", "2", "--eps", "0.6", "--profile", "theory"],
    ],
)
def test_cli_usage_errors(argv, capsys):
    assert run_cli(argv) == 2
    assert capsys.readouterr().err.startswith("sparsepoly ")


def test_cli_missing_required_flag():
    with pytest.raises(SystemExit):
        run_cli(["test", "--poly", str(SAMPLES / "canonical.poly")])


def test_cli_learn(capsys):
    argv = ["learn", "--table", str(SAMPLES / "parity3.table"), "--eps", "0.1"]
    assert run_cli(argv + ["--s", "3"]) == 0
    assert capsys.readouterr().out == "n=3\n1\n2\n3\n"
    assert run_cli(argv + ["--s", "2"]) == 1
    assert capsys.readouterr().out == "not-s-sparse\n"


def test_cli_verify(capsys):
    code, report = run_json(["verify", "--suite", "zero_density", "--trials", "10"], capsys)
    assert code == 0
    assert report["passed"] and report["suites"][0]["checks"] == 10


def test_cli_verify_short_suite_name(capsys):
    code, report = run_json(["verify", "--suite", "kl", "--trials", "200", "--seed", "1"], capsys)
    assert code == 0
    assert report["passed"]
    assert report["suites"][0]["name"] == "zero_density"
    assert report["suites"][0]["checks"] == 200
    assert report["suites"][0]["failures"] == 0


def test_cli_distance(tmp_path: Path, capsys):
    other = tmp_path / "x1.poly"
    other.write_text("n=3\n1\n")
    argv = ["distance", "--table", str(SAMPLES / "parity3.table"), "--other-poly", str(other), "--s", "1"]
    code, report = run_json(argv, capsys)
    assert code == 0
    assert report["zero_fraction"] == "1/2^1"
    assert report["distance"] == "1/2^1"
    assert report["distance_to_class"] == "3/2^3"
    assert report["witness"].startswith("n=3\n")


def test_cli_experiment_with_csv(tmp_path: Path, capsys):
    csv = tmp_path / "trials.csv"
    argv = ["experiment", "completeness", "--family", "zero", "--n", "8", "--trials", "2"]
    code, report = run_json(argv + ["--r", "4", "--bigM", "50", "--csv", str(csv)], capsys)
    assert code == 0
    assert report["accepted"] == 2
    assert report["params"]["s"] == 3
    assert len(csv.read_text().splitlines()) == 3


def test_cli_query_scaling_summary(capsys):
    argv = ["experiment", "query-scaling", "--family", "zero", "--n", "8,16", "--trials", "2"]
    assert run_cli(argv + ["--r", "4", "--bigM", "50", "--summary"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[-1].split() == ["spread", "0.000"]


def test_cli_audit(tmp_path: Path, capsys):
    poly = tmp_path / "p.poly"
    poly.write_text("n=10\n1 2\n3 4 5\n")
    code, report = run_json(["audit", "--poly", str(poly), "--trials", "3", "--r", "16"], capsys)
    assert code == 0
    assert report["trials"] == 3
    assert report["params"]["s"] == 2
    assert report["holds"]["6"] == 3


def test_cli_config_file(capsys):
    argv = ["test", "--table", str(SAMPLES / "parity3.table"), "--s", "1", "--eps", "0.25"]
    code, report = run_json(argv + ["--config", str(SAMPLES / "desk.profile"), "--bigM", "100"], capsys)
    assert report["params"]["r"] == 64
    assert report["params"]["M"] == 100
