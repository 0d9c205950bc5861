"""Command-line front end.

Exit codes: 0 success or certified, 1 counterexample, relation found or
invalid trace, 2 unknown or no relation, 3 usage error, 4 failed proof
obligation or exhausted budget.
"""

import argparse
import json
import logging
import sys
from typing import Optional, Sequence

from .algebraic import REGISTRY
from .config import Settings
from .engine import (
    Certificate,
    CounterRelation,
    check_q_linear_independence,
    trdeg_bound,
)
from .errors import BudgetExhaustedError, ObligationError, SchanuelError
from .knowledge import KnowledgeBase
from .relations import falsify_linear_independence, required_precision
from .scripts import prove_corollary, replay_theorem
from .support import exp_support, log_support
from .syntax import parse
from .terms import e_level, l_level, normalize
from .trace import ProofTrace, check_trace

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FOUND = 1
EXIT_UNKNOWN = 2
EXIT_USAGE = 3
EXIT_OBLIGATION = 4


def _terms(texts: Sequence[str]) -> list:
    return [parse(t) for t in texts]


def _level(value: Optional[int]) -> str:
    return "none" if value is None else str(value)


def _cmd_level(args, settings) -> int:
    t = normalize(parse(args.term))
    print(f"E-level: {_level(e_level(t))}, L-level: {_level(l_level(t))}")
    return EXIT_OK


def _cmd_support(args, settings) -> int:
    extract = exp_support if args.kind == "exp" else log_support
    found = extract(parse(args.term))
    print(json.dumps(found.to_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_check_li(args, settings) -> int:
    kb = KnowledgeBase(settings)
    outcome = check_q_linear_independence(_terms(args.terms), kb,
                                          settings.depth_budget)
    if isinstance(outcome, Certificate):
        fact = outcome.fact
        print(f"{fact.statement.describe()} [{fact.provenance.label}]")
        return EXIT_OK
    if isinstance(outcome, CounterRelation):
        print(f"relation {list(outcome.relation.coefficients)}: "
              f"{outcome.relation.describe()}")
        return EXIT_FOUND
    print(f"unknown: {outcome.reason}")
    return EXIT_UNKNOWN


def _cmd_trdeg(args, settings) -> int:
    interval = trdeg_bound(_terms(args.terms), KnowledgeBase(settings))
    print(f"[{interval.lower}, {interval.upper}]")
    return EXIT_OK


def _cmd_relate(args, settings) -> int:
    terms = _terms(args.terms)
    precision = settings.precision
    needed = required_precision(settings.height, len(terms))
    if precision < needed:
        logger.warning("Raising precision from %d to %d bits", precision,
                       needed)
        precision = needed
    relation = falsify_linear_independence(terms, precision, settings.height,
                                           settings)
    if relation is None:
        print(f"no relation of height <= {settings.height} at {precision} "
              "bits")
        return EXIT_UNKNOWN
    print(f"relation {list(relation.coefficients)}: {relation.describe()}")
    return EXIT_FOUND


def _store(name: str, settings: Settings):
    if name == "s3":
        from .s3_store import S3TraceStore  # pylint: disable=import-outside-toplevel
        return S3TraceStore(max_traces_in_script=settings.max_traces_in_script)
    from .local_store import LocalTraceStore  # pylint: disable=import-outside-toplevel
    return LocalTraceStore(root_path=settings.trace_root,
                           max_traces_in_script=settings.max_traces_in_script)


def _cmd_prove(args, settings) -> int:
    if args.script == "theorem":
        trace = replay_theorem(args.m, args.n, settings=settings)
    else:
        trace = prove_corollary(args.script, args.depth, settings=settings)
    if args.out:
        location = trace.write(args.out)
    elif args.store != "none":
        location = _store(args.store, settings).publish(trace.script, trace)
    else:
        sys.stdout.write(trace.to_jsonl())
        return EXIT_OK
    print(f"{trace.result.describe()} [{trace.provenance.label}]")
    print(f"{len(trace.steps)} steps written to {location}")
    return EXIT_OK


def _cmd_check_trace(args, settings) -> int:
    verdict = check_trace(ProofTrace.read(args.file))
    print(verdict.describe())
    return EXIT_OK if verdict.valid else EXIT_FOUND


def _search_options() -> argparse.ArgumentParser:
    """--prec and --height, also accepted after a subcommand."""
    options = argparse.ArgumentParser(add_help=False)
    options.add_argument("--prec", type=int, default=argparse.SUPPRESS,
                         help="Working precision in bits (env SCHANUEL_PREC)")
    options.add_argument("--height", type=int, default=argparse.SUPPRESS,
                         help="Relation height bound (env SCHANUEL_HEIGHT)")
    return options


def build_parser() -> argparse.ArgumentParser:
    search = _search_options()
    parser = argparse.ArgumentParser(
        prog="schanuel",
        description="Exp-log tower constants and conditional transcendence "
                    "certificates.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="More logging on stderr; repeat for debug")
    parser.add_argument("--prec", type=int, default=None,
                        help="Working precision in bits (env SCHANUEL_PREC)")
    parser.add_argument("--height", type=int, default=None,
                        help="Relation height bound (env SCHANUEL_HEIGHT)")
    parser.add_argument("--degcap", type=int, default=None,
                        help="Algebraic degree cap (env SCHANUEL_DEGCAP)")
    parser.add_argument("--budget", type=int, default=None,
                        help="Proof search depth (env SCHANUEL_DEPTH)")
    parser.add_argument("--registry", default=None,
                        help="Algebraic constant registry file")
    commands = parser.add_subparsers(dest="command", required=True)

    level = commands.add_parser("level", help="Print E- and L-levels")
    level.add_argument("term")
    level.set_defaults(handler=_cmd_level)

    support = commands.add_parser("support", help="Extract a support set")
    support.add_argument("term")
    support.add_argument("--kind", choices=("exp", "log"), default="exp")
    support.set_defaults(handler=_cmd_support)

    check_li = commands.add_parser("check-li", parents=[search],
                                   help="Q-linear independence of terms")
    check_li.add_argument("terms", nargs="+")
    check_li.set_defaults(handler=_cmd_check_li)

    trdeg = commands.add_parser("trdeg", help="Transcendence degree bounds")
    trdeg.add_argument("terms", nargs="+")
    trdeg.set_defaults(handler=_cmd_trdeg)

    relate = commands.add_parser("relate", parents=[search],
                                 help="Integer relation search")
    relate.add_argument("terms", nargs="+")
    relate.set_defaults(handler=_cmd_relate)

    prove = commands.add_parser("prove", help="Run a proof script")
    prove.add_argument("script",
                       choices=("theorem", "cor1", "cor2", "cor3", "cor4"))
    prove.add_argument("--m", type=int, default=1)
    prove.add_argument("--n", type=int, default=1)
    prove.add_argument("--depth", type=int, default=None)
    prove.add_argument("--out", default=None, help="Trace file to write")
    prove.add_argument("--store", choices=("local", "s3", "none"),
                       default="local",
                       help="Trace archive when --out is absent; none "
                            "prints the trace")
    prove.set_defaults(handler=_cmd_prove)

    checker = commands.add_parser("check-trace", help="Validate a trace")
    checker.add_argument("file")
    checker.set_defaults(handler=_cmd_check_trace)
    return parser


def _settings(args) -> Settings:
    flags = {
        "precision": args.prec,
        "height": args.height,
        "degree_cap": args.degcap,
        "depth_budget": args.budget,
        "registry_path": args.registry,
    }
    return Settings(**{k: v for k, v in flags.items() if v is not None})


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(
        stream=sys.stderr,
        level=max(logging.DEBUG, logging.WARNING - 10 * args.verbose),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        settings = _settings(args)
        REGISTRY.degree_cap = settings.degree_cap
        if settings.registry_path:
            REGISTRY.load_file(settings.registry_path)
        return args.handler(args, settings)
    except (ObligationError, BudgetExhaustedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_OBLIGATION
    except (SchanuelError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


run_cli = main
