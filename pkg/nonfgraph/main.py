"""
Command-line entry point.

Subcommands:
    analyze    full report for one group against one class
    verify     run a verification suite over the built-in corpus
    construct  write a built-in family member as a group file
    corpus     list the built-in families and corpus entries
"""

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path

from loguru import logger
from pydantic import BaseModel

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import EXIT_OK, EXIT_USAGE, EXIT_VERIFICATION_FAILED, handle_exception
from nonfgraph.core.logging import setup_logging
from nonfgraph.groups.finite_group import FiniteGroup
from nonfgraph.services.analysis import AnalysisService
from nonfgraph.services.class_predicates import parse_class_spec
from nonfgraph.services.families import FAMILIES, construct_family, corpus_specs, family_order, forbidden_resolver
from nonfgraph.services.graph import GraphMode, GraphService, atomic_write_text
from nonfgraph.services.group_file import GroupFileService
from nonfgraph.workers.suite_runner import SUITES, exit_code_for, run_suite

FAMILY_PREFIX = "family:"


def load_group(source: str) -> tuple[str, FiniteGroup]:
    """Resolve ``family:<spec>`` or a group file path to (name, group)."""
    if source.startswith(FAMILY_PREFIX):
        spec = source[len(FAMILY_PREFIX) :]
        return spec, construct_family(spec)
    return Path(source).name, GroupFileService.read_group(source)


def _emit(model: BaseModel, out: str | None) -> None:
    text = model.model_dump_json(indent=2)
    if out:
        atomic_write_text(Path(out), text + "\n")
        logger.info("Report written", path=out)
    else:
        print(text)


def _analyze(args: argparse.Namespace) -> int:
    name, group = load_group(args.group)
    spec = parse_class_spec(args.class_spec, forbidden_resolver(group))
    report = AnalysisService.analyze(name, group, spec, args.mode, lemmas=args.lemmas)
    if args.graph_out:
        GraphService.export_graph(GraphService.build_nonf_graph(group, spec, args.mode), args.graph_out)
    _emit(report, args.out)
    failed = report.failures or any(not r.passed for r in report.lemma_results)
    return EXIT_VERIFICATION_FAILED if failed else EXIT_OK


def _verify(args: argparse.Namespace) -> int:
    report = run_suite(args.suite, args.max_order, args.workers)
    _emit(report, args.out)
    return exit_code_for(report)


def _construct(args: argparse.Namespace) -> int:
    group = construct_family(args.family)
    GroupFileService.write_group(group, args.out, args.format)
    return EXIT_OK


def _corpus(args: argparse.Namespace) -> int:
    for family in FAMILIES.values():
        print(f"{family.signature:<32} {family.summary}")
    if args.max_order is not None:
        print()
        for spec in corpus_specs(args.max_order):
            print(f"{spec:<40} order {family_order(spec)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nonf", description="Non-F graphs of finite groups")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="loguru level for stderr")
    subparsers = parser.add_subparsers(dest="command", required=True)

    analyze = subparsers.add_parser("analyze", help="Analyze one group against one class")
    analyze.add_argument("--group", required=True, help="Group file path or family:<spec>")
    analyze.add_argument("--class", dest="class_spec", required=True, help="Class spec, e.g. cyclic or forbid:B,C")
    analyze.add_argument("--mode", choices=[m.value for m in GraphMode], default=GraphMode.ORBIT.value)
    analyze.add_argument("--lemmas", action="store_true", help="Also run the lemma harness on this group")
    analyze.add_argument("--graph-out", help="Export the graph in the text edge format")
    analyze.add_argument("--out", help="Write the JSON report here instead of stdout")
    analyze.set_defaults(handler=_analyze)

    verify = subparsers.add_parser("verify", help="Run a verification suite over the corpus")
    verify.add_argument("--suite", choices=SUITES, required=True)
    verify.add_argument("--max-order", type=int, required=True)
    verify.add_argument("--workers", type=int, default=None, help="Process pool size (default: WORKERS)")
    verify.add_argument("--out", help="Write the JSON report here instead of stdout")
    verify.set_defaults(handler=_verify)

    construct = subparsers.add_parser("construct", help="Write a family member as a group file")
    construct.add_argument("--family", required=True, help="Family spec, e.g. dihedral(4)*cyclic(3)")
    construct.add_argument("--out", required=True)
    construct.add_argument("--format", choices=["auto", "gens", "table"], default="auto")
    construct.set_defaults(handler=_construct)

    corpus = subparsers.add_parser("corpus", help="Built-in families")
    corpus.add_argument("action", choices=["list"])
    corpus.add_argument("--max-order", type=int, default=None, help="Also list corpus entries up to this order")
    corpus.set_defaults(handler=_corpus)
    return parser


def cli_main(argv: Sequence[str] | None = None) -> int:
    """
    Run the CLI and return its exit code.

    Exit codes: 0 success, 1 verification failure, 2 usage or parse error,
    3 cap or budget exhaustion.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    setup_logging(args.log_level.upper())
    try:
        return args.handler(args)
    except Exception as exc:
        return handle_exception(exc)


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
