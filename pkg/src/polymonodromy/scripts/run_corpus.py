#!/usr/bin/env python3
"""
Run a YAML corpus of subcommand invocations and tabulate pass/fail.

Each fixture names an `id`, the subcommand `argv` and an `expect` mapping
from dotted paths in the result payload to expected values.
"""

import argparse
import json
import logging
import os
import sys
import time
from typing import Any, Dict, List

import pandas as pd
import yaml
from dotenv import load_dotenv

from polymonodromy.core.config import Settings, load_settings
from polymonodromy.core.errors import InputError, MonodromyError
from polymonodromy.core.utils import setup_logging, to_jsonable
from polymonodromy.scripts.monodromy_cli import COMMANDS, DEFAULT_CORPUS, build_parser

logger = logging.getLogger(__name__)

COLUMNS = ["id", "command", "passed", "verified", "detail"]


def load_fixtures(path: str) -> List[Dict[str, Any]]:
    """Read and sanity-check the fixture list."""
    if not os.path.exists(path):
        raise InputError(f"Corpus file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise InputError(f"Could not parse corpus file {path}: {e}")
    items = raw.get("fixtures") if isinstance(raw, dict) else None
    if not isinstance(items, list):
        raise InputError(f"Corpus file {path} needs a 'fixtures' list")
    for item in items:
        if not isinstance(item, dict) or "id" not in item or "argv" not in item:
            raise InputError(f"Malformed fixture in {path}: {item!r}")
        if item["argv"] and item["argv"][0] == "corpus":
            raise InputError(f"Fixture {item['id']} may not run the corpus itself")
    return items


def lookup(payload: Any, dotted: str) -> Any:
    """Follow a dotted path; integer parts index lists."""
    node = payload
    for part in dotted.split("."):
        if isinstance(node, list):
            node = node[int(part)]
        elif isinstance(node, dict) and part in node:
            node = node[part]
        else:
            raise KeyError(dotted)
    return node


def check_expectations(payload: Dict[str, Any], expect: Dict[str, Any]) -> List[str]:
    """Mismatch messages; empty when every expectation holds."""
    problems = []
    for key, wanted in sorted(expect.items()):
        try:
            got = lookup(payload, key)
        except (KeyError, IndexError, ValueError):
            problems.append(f"{key}: missing")
            continue
        if got != wanted:
            problems.append(f"{key}: expected {wanted!r}, got {got!r}")
    return problems


def run_fixture(item: Dict[str, Any], settings: Settings, timings: bool = False) -> Dict[str, Any]:
    """Run one fixture; library errors become failed rows with their message."""
    argv = [str(a) for a in item["argv"]]
    row: Dict[str, Any] = {"id": item["id"], "command": argv[0] if argv else "", "verified": None}
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        payload, verified = COMMANDS[args.command](args, settings)
        problems = check_expectations(to_jsonable(payload), item.get("expect") or {})
        row.update({"passed": not problems and verified is not False, "verified": verified})
        row["detail"] = "; ".join(problems) if problems else ""
    except MonodromyError as e:
        wanted_error = item.get("expect_error")
        row.update({"passed": wanted_error == type(e).__name__, "detail": f"{type(e).__name__}: {e}"})
    except SystemExit:
        row.update({"passed": False, "detail": f"bad argv {argv}"})
    if timings:
        row["seconds"] = round(time.perf_counter() - start, 3)
    level = logging.INFO if row["passed"] else logging.WARNING
    logger.log(level, f"Fixture {item['id']}: {'pass' if row['passed'] else 'FAIL'} {row['detail']}")
    return row


def run_corpus(path: str, settings: Settings, timings: bool = False) -> pd.DataFrame:
    """Run every fixture in `path` and return the pass/fail table."""
    fixtures = load_fixtures(path)
    logger.info(f"Loaded {len(fixtures)} fixtures from {path}")
    rows = [run_fixture(item, settings, timings) for item in fixtures]
    columns = COLUMNS + (["seconds"] if timings else [])
    table = pd.DataFrame(rows, columns=columns)
    logger.info(f"Corpus finished: {int(table['passed'].sum())}/{len(table)} passed")
    return table


def _parse_args() -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(description="Run the bundled monodromy corpus.")
    parser.add_argument("--fixtures", default=DEFAULT_CORPUS, help="Corpus YAML file.")
    parser.add_argument("--csv", help="Write the pass/fail table to this CSV file.")
    parser.add_argument("--config", help="YAML settings file.")
    parser.add_argument("--timings", action="store_true", help="Add per-fixture timings.")
    parser.add_argument(
        "--log",
        default="var/logs/app.log",
        help="Log file path (default: var/logs/app.log).",
    )
    return parser.parse_args()


def _setup_environment(args: argparse.Namespace) -> Settings:
    load_dotenv()
    log_dir = os.path.dirname(args.log)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
    setup_logging(args.log)
    return load_settings(args.config)


def main() -> None:
    """Run the corpus, print the table as JSON, exit 1 when a fixture fails."""
    args = _parse_args()
    try:
        settings = _setup_environment(args)
        table = run_corpus(args.fixtures, settings, args.timings)
        if args.csv:
            csv_dir = os.path.dirname(args.csv)
            if csv_dir:
                os.makedirs(csv_dir, exist_ok=True)
            table.to_csv(args.csv, index=False)
            logger.info(f"Corpus table written to {args.csv}")
        print(json.dumps(to_jsonable(table.to_dict(orient="records")), sort_keys=True))
        if not table["passed"].all():
            sys.exit(1)
    except MonodromyError as e:
        logger.error(f"Corpus run failed: {e}")
        sys.exit(e.exit_code)
    except Exception as e:
        logger.critical(f"A critical error occurred: {e}", exc_info=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
