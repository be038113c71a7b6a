import json
from unittest.mock import patch

import pandas as pd
import pytest

from polymonodromy.core.config import Settings
from polymonodromy.core.errors import InputError
from polymonodromy.scripts.monodromy_cli import DEFAULT_CORPUS
from polymonodromy.scripts.run_corpus import (
    check_expectations,
    load_fixtures,
    lookup,
    main as corpus_main,
    run_corpus,
    run_fixture,
)

SMALL_CORPUS = """
fixtures:
  - id: decompose-x4
    argv: [decompose, "--f=0,0,0,0,1"]
    expect:
      count: 1
      decompositions.0.h: "0,0,1"
  - id: classify-square
    argv: [classify, "--f=0,0,1"]
    expect:
      degree: 2
  - id: reject-composite
    argv: [cheb-witness, --p, 9, --k, 1]
    expect_error: InputError
"""


@pytest.fixture
def small_corpus(tmp_path):
    path = tmp_path / "corpus.yaml"
    path.write_text(SMALL_CORPUS)
    return path


def test_lookup_follows_dotted_paths():
    payload = {"a": [{"b": 3}]}
    assert lookup(payload, "a.0.b") == 3
    with pytest.raises(KeyError):
        lookup(payload, "a.0.c")


def test_check_expectations_reports_mismatches():
    problems = check_expectations({"count": 2}, {"count": 1, "missing": 0})
    assert problems == ["count: expected 1, got 2", "missing: missing"]


def test_run_corpus_table(small_corpus):
    table = run_corpus(str(small_corpus), Settings(), timings=True)
    assert isinstance(table, pd.DataFrame)
    assert list(table["id"]) == ["decompose-x4", "classify-square", "reject-composite"]
    assert table["passed"].all()
    assert "seconds" in table.columns


def test_failed_expectation_is_a_failed_row():
    item = {"id": "wrong", "argv": ["decompose", "--f=0,0,0,0,1"], "expect": {"count": 5}}
    row = run_fixture(item, Settings())
    assert not row["passed"]
    assert "count: expected 5" in row["detail"]


def test_unexpected_error_is_a_failed_row():
    row = run_fixture({"id": "bad", "argv": ["classify", "--f=1,a"]}, Settings())
    assert not row["passed"]
    assert row["detail"].startswith("InputError")


def test_bad_argv_is_a_failed_row():
    row = run_fixture({"id": "bad", "argv": ["classify"]}, Settings())
    assert not row["passed"]
    assert "bad argv" in row["detail"]


@pytest.mark.parametrize(
    "text",
    [
        "fixtures: 3\n",
        "fixtures:\n  - argv: [classify]\n",
        "fixtures:\n  - id: loop\n    argv: [corpus]\n",
    ],
)
def test_malformed_corpus_rejected(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text)
    with pytest.raises(InputError):
        load_fixtures(str(path))


def test_missing_corpus_rejected(tmp_path):
    with pytest.raises(InputError):
        load_fixtures(str(tmp_path / "absent.yaml"))


def test_bundled_corpus_loads():
    ids = [item["id"] for item in load_fixtures(DEFAULT_CORPUS)]
    assert len(ids) == len(set(ids))
    assert "reject-composite-modulus" in ids


@patch("sys.exit")
def test_main_writes_csv(mock_exit, small_corpus, tmp_path, capsys):
    csv_path = tmp_path / "out" / "table.csv"
    argv = [
        "monodromy-corpus",
        "--fixtures",
        str(small_corpus),
        "--csv",
        str(csv_path),
        "--log",
        str(tmp_path / "app.log"),
    ]
    with patch("sys.argv", argv):
        corpus_main()
    mock_exit.assert_not_called()
    records = json.loads(capsys.readouterr().out)
    assert [r["id"] for r in records][0] == "decompose-x4"
    saved = pd.read_csv(csv_path)
    assert list(saved.columns) == ["id", "command", "passed", "verified", "detail"]
    assert len(saved) == 3
