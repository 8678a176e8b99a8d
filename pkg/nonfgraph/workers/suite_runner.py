"""
Verification suite runner.

Every corpus entry (or worked example) is an independent task. Tasks run in
a process pool when more than one worker is configured; results are merged
in corpus order, so the report does not depend on the pool size.
"""

import time
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat

import numpy as np
from loguru import logger

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import EXIT_CAP, InvalidParameters, NonFGraphException
from nonfgraph.core.logging import setup_logging
from nonfgraph.groups.constructors import cyclic_group
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup
from nonfgraph.schemas.reports import FailureRecord, LemmaResult, SuiteEntry, SuiteReport
from nonfgraph.services.analysis import AnalysisService
from nonfgraph.services.class_predicates import ClassKind, ClassService, forbidden_spec, make_spec
from nonfgraph.services.families import EXAMPLE2_ORDER, construct_family, corpus_specs, quaternion_matrices
from nonfgraph.services.graph import GraphMode, GraphService
from nonfgraph.services.harness import lemma_harness
from nonfgraph.services.modules import build_module_action, fpf_generation_check, matrix_group

SUITES = ("propositions", "lemmas", "examples")
LEMMA_SPECS = (
    ClassKind.CYCLIC,
    ClassKind.ONE_PRIME,
    ClassKind.AT_MOST_TWO_PRIMES,
    ClassKind.ABELIAN,
    ClassKind.NILPOTENT,
    ClassKind.SOLUBLE,
)
EXAMPLE_TASKS = ("metabelian_witness", "fpf_agreement", "example1_inner")


@dataclass
class TaskResult:
    """Entries, lemma tallies and failures produced by one task."""

    entries: list[SuiteEntry] = field(default_factory=list)
    lemma_results: list[LemmaResult] = field(default_factory=list)
    failures: list[FailureRecord] = field(default_factory=list)

    def check(self, name: str, group: FiniteGroup, check: str, passed: bool, detail: str = "") -> None:
        self.entries.append(SuiteEntry(group=name, order=group.order, check=check, passed=bool(passed), detail=detail))


# ----------------------------------------------------------------------
# Proposition suite
# ----------------------------------------------------------------------


def _connected_or_empty(group: FiniteGroup, kind: ClassKind) -> tuple[bool, str]:
    count, verdict = AnalysisService.connectivity_verdict(group, make_spec(kind))
    return verdict.status != "disconnected", f"{verdict.status} ({count} components)"


def _propositions(name: str, result: TaskResult) -> None:
    group = construct_family(name)
    for kind, check in (
        (ClassKind.CYCLIC, "cyclic_connected"),
        (ClassKind.ONE_PRIME, "p_group_connected"),
        (ClassKind.AT_MOST_TWO_PRIMES, "two_primes_connected"),
    ):
        passed, detail = _connected_or_empty(group, kind)
        result.check(name, group, check, passed, detail)

    result.check(name, group, "icyclic_formula", AnalysisService.verify_icyclic_formula(group))
    identity = AnalysisService.verify_p_group_identity(group)
    if identity is not None:
        result.check(name, group, "p_group_identity", identity)

    two_primes = make_spec(ClassKind.AT_MOST_TWO_PRIMES)
    recognizability = ClassService.two_recognizability_report(two_primes, [(name, group)])
    result.check(name, group, "two_primes_recognizable", not recognizability.witnesses)
    dichotomy = AnalysisService.verify_d_class_proposition([(name, group)])
    result.check(name, group, "two_primes_dichotomy", dichotomy.passed, dichotomy.entries[0].detail)

    if group.order <= min(settings.EXPLICIT_GRAPH_CAP, settings.LATTICE_CAP):
        cyclic = make_spec(ClassKind.CYCLIC)
        explicit = GraphService.build_nonf_graph(group, cyclic, GraphMode.EXPLICIT)
        orbit = GraphService.build_nonf_graph(group, cyclic, GraphMode.ORBIT)
        same = explicit.isolated == orbit.isolated and set(explicit.components()) == set(orbit.components())
        result.check(name, group, "oracle_equivalence", same)


# ----------------------------------------------------------------------
# Lemma suite
# ----------------------------------------------------------------------


def _lemmas(name: str, result: TaskResult) -> None:
    group = construct_family(name)
    for kind in LEMMA_SPECS:
        result.lemma_results.extend(lemma_harness([(name, group)], make_spec(kind)))


# ----------------------------------------------------------------------
# Worked examples
# ----------------------------------------------------------------------


def _metabelian_witness(result: TaskResult) -> None:
    name = "sylow2_sym8"
    group = construct_family(name)
    spec = make_spec(ClassKind.METABELIAN)
    result.check(name, group, "not_metabelian", not ClassService.is_member(spec, group))
    result.check(name, group, "two_generated_subgroups_metabelian", ClassService.f2_member(spec, group))
    result.check(name, group, "graph_equals_closure_graph", GraphService.gamma_equals_gamma_f2(group, spec))


def fpf_instances() -> list[tuple[str, FiniteGroup, int, list[np.ndarray]]]:
    """(name, H, p, generator matrices) for the fixed-point-free agreement check."""
    c3 = cyclic_group(3)
    q8, q8_mats = matrix_group(quaternion_matrices(3), 3)
    sym3, sym3_mats = matrix_group([np.array([[0, 1], [1, 0]]), np.array([[0, 1], [1, 1]])], 2)
    return [
        ("C3 on GF(2)^2", c3, 2, [np.array([[0, 1], [1, 1]])]),
        ("Q8 on GF(3)^2", q8, 3, list(q8_mats)),
        ("Sym(3) on GF(2)^2", sym3, 2, list(sym3_mats)),
    ]


def _fpf_agreement(result: TaskResult) -> None:
    for name, h_group, p, mats in fpf_instances():
        _, module = build_module_action(h_group, p, 2, mats)
        checked = vectors = disagreements = 0
        for h1 in range(1, h_group.order):
            for h2 in range(h_group.order):
                if not h_group.closure_mask([h1, h2]).all():
                    continue
                outcome = fpf_generation_check(h_group, module, h1, h2)
                if outcome.agrees is None:
                    continue
                checked += 1
                vectors += outcome.candidates_checked
                disagreements += len(outcome.disagreements) + (outcome.exhaustive != outcome.determinant_criterion)
        result.check(
            name,
            module.semidirect(module.u),
            "fpf_agreement",
            checked > 0 and disagreements == 0,
            f"{checked} pairs, {vectors} vectors w, {disagreements} disagreements",
        )


def _example1_inner(result: TaskResult) -> None:
    name = "example1_inner(3)"
    group = construct_family(name)
    named = group.provenance.named
    hint = ElementSet(group, named["Q"])
    decomposition = AnalysisService.module_decomposition(group, hint)
    result.check(name, group, "t_is_three", decomposition.t == 3, f"t = {decomposition.t}")
    result.check(name, group, "u_is_two", decomposition.endo_dim == 2, f"u = {decomposition.endo_dim}")
    result.check(
        name,
        group,
        "w_family_matches_oracle",
        decomposition.w_oracle_count == len(decomposition.W_family),
        f"{len(decomposition.W_family)} kernels, oracle {decomposition.w_oracle_count}",
    )
    v1, v2 = ElementSet(group, named["V1"]), ElementSet(group, named["V2"])
    base = ElementSet.generated_by(group, list(v1.generators) + list(v2.generators))
    family = AnalysisService.complement_family(decomposition, base)
    result.check(name, group, "complements_of_v1v2", len(family) == 9, f"{len(family)} complements")


def _example2(result: TaskResult) -> None:
    name = "example2"
    group = construct_family(name)
    provenance = group.provenance
    spec = forbidden_spec([provenance.named_groups["B"], provenance.named_groups["C"]], ["B", "C"])
    graph = GraphService.build_nonf_graph(group, spec, GraphMode.ORBIT)
    result.check(
        name,
        group,
        "isolated_set",
        np.array_equal(graph.isolated.mask, provenance.named["I"]),
        f"|I| = {graph.isolated.size}",
    )
    expected = {ElementSet(group, provenance.named["Omega_B"]), ElementSet(group, provenance.named["Omega_C"])}
    result.check(name, group, "two_components", graph.component_count == 2, f"{graph.component_count} components")
    result.check(name, group, "components_match", set(graph.components()) == expected)
    report = AnalysisService.check_counterexample_structure(group, spec, graph, name)
    result.check(name, group, "counterexample_structure", True, report.disjunct)


EXAMPLES: dict[str, Callable[[TaskResult], None]] = {
    "metabelian_witness": _metabelian_witness,
    "fpf_agreement": _fpf_agreement,
    "example1_inner": _example1_inner,
    "example2": _example2,
}


# ----------------------------------------------------------------------
# Runner
# ----------------------------------------------------------------------


def suite_tasks(suite: str, max_order: int) -> list[str]:
    """Task names of a suite in report order."""
    if suite not in SUITES:
        raise InvalidParameters(f"unknown suite {suite!r}", {"suites": list(SUITES)})
    if suite == "examples":
        return list(EXAMPLE_TASKS) + (["example2"] if max_order >= EXAMPLE2_ORDER else [])
    return corpus_specs(max_order)


def run_task(suite: str, task: str) -> TaskResult:
    """
    Run one task, turning engine errors into failure records.

    Args:
        suite: Suite name
        task: Corpus family spec, or example name for the examples suite

    Returns:
        The task's entries, lemma tallies and failures
    """
    result = TaskResult()
    started = time.perf_counter()
    try:
        if suite == "propositions":
            _propositions(task, result)
        elif suite == "lemmas":
            _lemmas(task, result)
        else:
            EXAMPLES[task](result)
    except NonFGraphException as exc:
        logger.warning("Suite task failed", suite=suite, task=task, error=exc.message)
        result.failures.append(
            FailureRecord(
                check=suite,
                group=task,
                message=exc.message,
                details={"exit_code": exc.exit_code, **exc.details},
            )
        )
    logger.debug("Suite task done", suite=suite, task=task, seconds=round(time.perf_counter() - started, 3))
    return result


def _merge_lemmas(results: list[LemmaResult]) -> list[LemmaResult]:
    merged: dict[tuple[str, str], LemmaResult] = {}
    for r in results:
        key = (r.lemma, r.spec)
        if key not in merged:
            merged[key] = LemmaResult(lemma=r.lemma, spec=r.spec)
        target = merged[key]
        target.instances += r.instances
        target.hypothesis_held += r.hypothesis_held
        target.failures.extend(r.failures)
    return list(merged.values())


def run_suite(suite: str, max_order: int, workers: int | None = None) -> SuiteReport:
    """
    Run a verification suite over the corpus up to ``max_order``.

    Args:
        suite: "propositions", "lemmas" or "examples"
        max_order: Largest corpus order (and the gate for the order-75264 example)
        workers: Process pool size; defaults to settings.WORKERS

    Returns:
        SuiteReport with entries in corpus order
    """
    started = time.perf_counter()
    tasks = suite_tasks(suite, max_order)
    workers = workers or settings.WORKERS
    logger.info("Running suite", suite=suite, max_order=max_order, tasks=len(tasks), workers=workers)

    if workers == 1 or len(tasks) <= 1:
        results = [run_task(suite, task) for task in tasks]
    else:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=setup_logging, initargs=(settings.LOG_LEVEL,)
        ) as pool:
            results = list(pool.map(run_task, repeat(suite), tasks))

    report = SuiteReport(
        suite=suite,
        max_order=max_order,
        entries=[e for r in results for e in r.entries],
        lemma_results=_merge_lemmas([lr for r in results for lr in r.lemma_results]),
        failures=[f for r in results for f in r.failures],
        elapsed_seconds=round(time.perf_counter() - started, 3),
    )
    logger.info(
        "Suite finished",
        suite=suite,
        passed=report.passed,
        entries=len(report.entries),
        failures=len(report.failures),
        seconds=report.elapsed_seconds,
    )
    return report


def exit_code_for(report: SuiteReport) -> int:
    """0 when the suite passed, 3 when a cap or budget stopped a task, else 1."""
    if report.passed:
        return 0
    if any(f.details.get("exit_code") == EXIT_CAP for f in report.failures):
        return EXIT_CAP
    return 1
