#!/usr/bin/env python3
"""Command-line front end: every analysis as a subcommand, JSON on stdout."""

import argparse
import json
import logging
import os
import sys
import time
from dataclasses import asdict
from typing import Any, Callable, Dict, List, Optional, Tuple

from dotenv import load_dotenv

from polymonodromy import __version__
from polymonodromy.core.chebwitness import VARIATION_RULES, cheb_report, witness_verified
from polymonodromy.core.config import Settings, load_settings
from polymonodromy.core.decompose import divided_difference, recognize_exceptional, right_components
from polymonodromy.core.errors import MonodromyError
from polymonodromy.core.hyperlat import hyper_center_test, hyper_span, verify_hyper_certificate
from polymonodromy.core.permlab import classify
from polymonodromy.core.polycore import BiPoly, OneForm, RatPoly
from polymonodromy.core.tracker import compute_monodromy
from polymonodromy.core.utils import (
    parse_complex,
    parse_index_pair,
    parse_rational,
    setup_logging,
    to_jsonable,
)
from polymonodromy.core.zerodim import (
    SimpleCycle,
    center_test,
    span_test,
    verify_center_certificate,
    verify_span_result,
)

logger = logging.getLogger(__name__)

DEFAULT_CORPUS = os.path.join(os.path.dirname(os.path.dirname(__file__)), "fixtures", "corpus.yaml")

Outcome = Tuple[Dict[str, Any], Optional[bool]]
Handler = Callable[[argparse.Namespace, Settings], Outcome]


def _basepoint(args: argparse.Namespace) -> Optional[complex]:
    return parse_complex(args.basepoint) if getattr(args, "basepoint", None) else None


def _cycle(args: argparse.Namespace) -> SimpleCycle:
    i, j = parse_index_pair(args.cycle)
    return SimpleCycle(i, j)


def run_classify(args: argparse.Namespace, settings: Settings) -> Outcome:
    f = RatPoly.parse(args.f)
    result = classify(f, settings.tracking, _basepoint(args), settings.tolerances.cluster_tol)
    verified = all(d.verify(f) for d in result.decompositions)
    payload = result.to_json()
    payload["decompositions"] = [d.to_json() for d in result.decompositions]
    return payload, verified


def run_decompose(args: argparse.Namespace, settings: Settings) -> Outcome:
    f = RatPoly.parse(args.f)
    found = right_components(f)
    tag = recognize_exceptional(f, settings.tolerances.cluster_tol)
    dd = divided_difference(f)
    payload = {
        "degree": f.degree,
        "count": len(found),
        "decompositions": [d.to_json() for d in found],
        "exceptional": tag.to_json(),
        "divided_difference_symmetric": dd.is_symmetric(),
        "divided_difference_verified": dd.verify(f),
    }
    return payload, all(d.verify(f) for d in found)


def run_monodromy(args: argparse.Namespace, settings: Settings) -> Outcome:
    f = RatPoly.parse(args.f)
    mono = compute_monodromy(f, _basepoint(args), settings.tracking, settings.tolerances.cluster_tol)
    return mono.to_json(include_paths=args.paths), mono.ramification_total == mono.n - 1


def run_center0(args: argparse.Namespace, settings: Settings) -> Outcome:
    f = RatPoly.parse(args.f)
    omega = RatPoly.parse(args.omega)
    cert = center_test(f, omega, _cycle(args), _basepoint(args), settings.tracking, settings.tolerances)
    verified = verify_center_certificate(f, omega, cert, settings.tracking, settings.tolerances)
    return cert.to_json(), verified


def run_span0(args: argparse.Namespace, settings: Settings) -> Outcome:
    f = RatPoly.parse(args.f)
    mono = compute_monodromy(f, _basepoint(args), settings.tracking, settings.tolerances.cluster_tol)
    result = span_test(f, _cycle(args), mono, settings.tracking, settings.tolerances)
    return result.to_json(), verify_span_result(f, result, mono)


def run_hyper_span(args: argparse.Namespace, settings: Settings) -> Outcome:
    f = RatPoly.parse(args.f)
    mono = compute_monodromy(f, _basepoint(args), settings.tracking, settings.tolerances.cluster_tol)
    report = hyper_span(f, mono)
    verified = all(e.certificate.verify() for e in report.entries if e.certificate is not None) and all(
        d.verify(f) for d in report.decompositions
    )
    return report.to_json(), verified


def run_hyper_center(args: argparse.Namespace, settings: Settings) -> Outcome:
    f = RatPoly.parse(args.f)
    omega = OneForm(BiPoly.parse(args.P or ""), BiPoly.parse(args.Q or ""))
    morse = parse_rational(args.morse) if args.morse else None
    cert = hyper_center_test(f, omega, morse, settings.quadrature, settings.tolerances)
    verified = verify_hyper_certificate(f, omega, cert, settings.quadrature, settings.tolerances)
    return cert.to_json(), verified


def run_cheb_witness(args: argparse.Namespace, settings: Settings) -> Outcome:
    report = cheb_report(
        args.p,
        args.k,
        quadrature=settings.quadrature,
        rules=args.rules,
        vanish_tol=settings.tolerances.period_vanish_tol,
    )
    return report, witness_verified(report, settings.tolerances.period_vanish_tol)


def run_corpus_command(args: argparse.Namespace, settings: Settings) -> Outcome:
    from polymonodromy.scripts.run_corpus import run_corpus

    table = run_corpus(args.fixtures, settings, args.timings)
    if args.csv:
        table.to_csv(args.csv, index=False)
        logger.info(f"Corpus table written to {args.csv}")
    rows = table.to_dict(orient="records")
    passed = bool(table["passed"].all()) if len(table) else True
    return {"items": rows, "passed": int(table["passed"].sum()), "total": len(table)}, passed


COMMANDS: Dict[str, Handler] = {
    "classify": run_classify,
    "decompose": run_decompose,
    "monodromy": run_monodromy,
    "center0": run_center0,
    "span0": run_span0,
    "hyper-span": run_hyper_span,
    "hyper-center": run_hyper_center,
    "cheb-witness": run_cheb_witness,
    "corpus": run_corpus_command,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML settings file (default: $MONODROMY_CONFIG or built-ins).")
    common.add_argument(
        "--log",
        default="var/logs/app.log",
        help="Log file path (default: var/logs/app.log).",
    )
    common.add_argument("--step", type=float, help="Initial tracking step in the path parameter.")
    common.add_argument("--tol", type=float, help="Newton corrector tolerance.")
    common.add_argument("--guard", type=float, help="Relative root collision guard.")
    common.add_argument("--timings", action="store_true", help="Add wall-clock timings to the report.")

    parser = argparse.ArgumentParser(
        description="Monodromy of polynomials and tangential centers of y^2 + f(x)."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], help=help_text)

    for name, help_text in (
        ("classify", "Classify the monodromy group of f."),
        ("decompose", "List the decompositions f = g(h)."),
        ("monodromy", "Track the loop basis and report the generators."),
        ("span0", "Orbit span of a simple 0-cycle."),
        ("hyper-span", "Orbit spans of the Morse vanishing cycles of y^2 + f."),
    ):
        p = add(name, help_text)
        p.add_argument("--f", required=True, help='Coefficients lowest degree first, e.g. "0,-3,0,4".')
        p.add_argument("--basepoint", help='Basepoint "re,im"; chosen automatically when absent.')
        if name == "span0":
            p.add_argument("--cycle", required=True, help='1-based root pair "i,j".')
        if name == "monodromy":
            p.add_argument("--paths", action="store_true", help="Include loop vertices in the report.")

    p = add("center0", "Tangential center test for a 0-dimensional integral.")
    p.add_argument("--f", required=True)
    p.add_argument("--omega", required=True, help="The 0-form, same coefficient format as --f.")
    p.add_argument("--cycle", required=True, help='1-based root pair "i,j".')
    p.add_argument("--basepoint")

    p = add("hyper-center", "Tangential center test for P dx + Q dy on y^2 + f = t.")
    p.add_argument("--f", required=True)
    p.add_argument("--P", help='dx coefficient as y-rows separated by "|", e.g. "0|0,1" for x*y.')
    p.add_argument("--Q", help="dy coefficient, same format as --P.")
    p.add_argument("--morse", help="Rational Morse point (default 0).")

    p = add("cheb-witness", "Exact and numeric checks on the Chebyshev family.")
    p.add_argument("--p", type=int, required=True, help="Odd prime degree.")
    p.add_argument("--k", type=int, required=True, help="Frequency, 1 <= k <= (p-1)/2.")
    p.add_argument("--rules", choices=VARIATION_RULES, default="derived")

    p = add("corpus", "Run the bundled fixture set.")
    p.add_argument("--fixtures", default=DEFAULT_CORPUS, help="Corpus YAML file.")
    p.add_argument("--csv", help="Also write the pass/fail table as CSV.")
    return parser


def _parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    return build_parser().parse_args(argv)


def _setup_environment(args: argparse.Namespace) -> Settings:
    """Load .env, set up logging and return the effective settings."""
    load_dotenv()
    log_dir = os.path.dirname(args.log)
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
    setup_logging(args.log)
    return load_settings(args.config).with_tracking(args.step, args.tol, args.guard)


def _input_echo(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"command", "log", "config", "step", "tol", "guard", "timings"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def build_report(args: argparse.Namespace, settings: Settings) -> Dict[str, Any]:
    """Run one subcommand and wrap its payload."""
    start = time.perf_counter()
    payload, verified = COMMANDS[args.command](args, settings)
    report: Dict[str, Any] = {
        "command": args.command,
        "input": _input_echo(args),
        "result": payload,
        "verified": verified,
        "version": __version__,
        "options": {"tracking": asdict(settings.tracking), "tolerances": asdict(settings.tolerances)},
    }
    if args.timings:
        report["timings"] = {"seconds": time.perf_counter() - start}
    return report


def main() -> None:
    """Run one subcommand and print its JSON report."""
    args = _parse_args()
    try:
        settings = _setup_environment(args)
        report = build_report(args, settings)
        print(json.dumps(to_jsonable(report), sort_keys=True))
        logger.info(f"{args.command} finished, verified={report['verified']}")
    except MonodromyError as e:
        logger.error(f"{args.command} failed: {e}")
        print(json.dumps({"command": args.command, "error": str(e), "detail": e.detail}, sort_keys=True))
        sys.exit(e.exit_code)
    except Exception as e:
        logger.critical(f"A critical error occurred: {e}", exc_info=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
