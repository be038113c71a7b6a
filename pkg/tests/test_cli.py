import json
from unittest.mock import MagicMock, patch

import pytest

from polymonodromy import __version__
from polymonodromy.core.config import CONFIG_ENV_VAR
from polymonodromy.core.errors import NumericInconsistencyError
from polymonodromy.scripts.monodromy_cli import COMMANDS, build_parser, main


@pytest.fixture(autouse=True)
def no_config_env(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


def run_cli(capsys, tmp_path, *argv):
    """Run main() with patched argv and exit; return (report, exit mock)."""
    with patch("sys.argv", ["monodromy", *argv, "--log", str(tmp_path / "logs" / "app.log")]):
        with patch("sys.exit") as mock_exit:
            main()
    out = capsys.readouterr().out
    return json.loads(out), mock_exit


def test_classify_report(capsys, tmp_path):
    report, mock_exit = run_cli(capsys, tmp_path, "classify", "--f=0,-3,0,4")
    mock_exit.assert_not_called()
    assert report["command"] == "classify"
    assert report["result"]["tag"] == "ChebyshevPrime"
    assert report["verified"] is True
    assert report["version"] == __version__
    assert report["input"] == {"f": "0,-3,0,4"}
    assert (tmp_path / "logs" / "app.log").exists()


def test_decompose_report(capsys, tmp_path):
    report, _ = run_cli(capsys, tmp_path, "decompose", "--f", "0,0,0,0,1")
    assert report["result"]["count"] == 1
    assert report["result"]["decompositions"][0]["h"] == "0,0,1"
    assert report["result"]["divided_difference_verified"] is True


def test_monodromy_with_paths_and_overrides(capsys, tmp_path):
    report, _ = run_cli(
        capsys, tmp_path, "monodromy", "--f", "0,0,1", "--paths", "--step", "0.02", "--timings"
    )
    assert report["result"]["ramification_total"] == 1
    assert "path" in report["result"]["loops"][0]
    assert report["options"]["tracking"]["initial_step"] == 0.02
    assert report["timings"]["seconds"] >= 0


def test_span0(capsys, tmp_path):
    report, _ = run_cli(capsys, tmp_path, "span0", "--f", "0,1,0,0,1", "--cycle", "1,2")
    assert report["result"]["verdict"] == "FullSpan"
    assert report["result"]["cycle"] == [1, 2]
    assert report["verified"] is True


def test_hyper_center(capsys, tmp_path):
    report, _ = run_cli(capsys, tmp_path, "hyper-center", "--f", "0,0,1,0,1", "--P", "0|0,0,0,4")
    assert report["result"]["verdict"] == "Decomposes"
    assert report["verified"] is True


def test_malformed_polynomial_exits_with_input_code(capsys, tmp_path):
    report, mock_exit = run_cli(capsys, tmp_path, "classify", "--f", "1,a,2")
    mock_exit.assert_called_once_with(2)
    assert "position 2" in report["error"]


def test_composite_modulus_rejected(capsys, tmp_path):
    report, mock_exit = run_cli(capsys, tmp_path, "cheb-witness", "--p", "9", "--k", "1")
    mock_exit.assert_called_once_with(2)
    assert report["command"] == "cheb-witness"


def test_numeric_inconsistency_exits_with_code_three(capsys, tmp_path):
    failing = MagicMock(side_effect=NumericInconsistencyError("screen and certificate disagree"))
    with patch.dict(COMMANDS, {"decompose": failing}):
        report, mock_exit = run_cli(capsys, tmp_path, "decompose", "--f", "0,0,1")
    mock_exit.assert_called_once_with(3)
    assert report["error"] == "screen and certificate disagree"


@patch("sys.exit")
def test_unexpected_error_exits_with_one(mock_exit, tmp_path):
    failing = MagicMock(side_effect=RuntimeError("boom"))
    with patch.dict(COMMANDS, {"decompose": failing}):
        with patch("sys.argv", ["monodromy", "decompose", "--f", "0,0,1", "--log", str(tmp_path / "app.log")]):
            main()
    mock_exit.assert_called_once_with(1)


def test_parser_requires_a_polynomial():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["classify"])


def test_parser_rejects_unknown_rules():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["cheb-witness", "--p", "5", "--k", "1", "--rules", "other"])
