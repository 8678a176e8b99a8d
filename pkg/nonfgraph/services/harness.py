"""
Instance checks of the structural lemmas over a corpus.

Every check counts the instances it examined and those whose hypotheses
held, and records a witness for each instance whose conclusion failed.
Hypotheses that need the subgroup lattice are only evaluated up to the
configured order bounds; larger groups contribute no instances.
"""

from __future__ import annotations

import itertools
from collections.abc import Callable, Iterable, Iterator
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from loguru import logger
from numpy.typing import NDArray

from nonfgraph.core.config import settings
from nonfgraph.groups.conjugacy import (
    centralizer,
    centralizer_orbits,
    class_labels,
    class_representatives,
    conjugation_orbits,
    is_conjugate,
)
from nonfgraph.groups.constructors import quotient
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup, IndexArray
from nonfgraph.schemas.reports import LemmaResult
from nonfgraph.services.analysis import AnalysisService, standalone
from nonfgraph.services.class_predicates import ClassService, ClassSpec
from nonfgraph.services.graph import GraphMode, GraphService, NonFGraph
from nonfgraph.services.subgroups import SubgroupService, is_soluble


@dataclass
class Tally:
    instances: int = 0
    held: int = 0
    failures: list[str] = field(default_factory=list)

    def record(self, holds: bool, witness: str) -> None:
        self.held += 1
        if not holds:
            self.failures.append(witness)


@dataclass
class _MaximalData:
    subgroup: ElementSet
    core: ElementSet
    graph: NonFGraph
    isolated: ElementSet
    component: int


class _GroupContext:
    """Per (group, class) data shared between the lemma checks."""

    def __init__(self, name: str, group: FiniteGroup, spec: ClassSpec):
        self.name = name
        self.group = group
        self.spec = spec

    @cached_property
    def graph(self) -> NonFGraph:
        return GraphService.build_nonf_graph(self.group, self.spec, GraphMode.ORBIT)

    @cached_property
    def soluble(self) -> bool:
        return is_soluble(ElementSet.whole(self.group))

    @cached_property
    def normals(self) -> list[ElementSet]:
        return SubgroupService.normal_subgroups(self.group).subgroups

    @cached_property
    def proper_normals(self) -> list[ElementSet]:
        return [n for n in self.normals if 1 < n.size < self.group.order]

    @cached_property
    def subgroup_survey(self) -> tuple[bool, bool] | None:
        """(semiregular, every proper subgroup graph connected), or None above the bound."""
        if self.group.order > settings.MAXIMAL_PAIR_MAX_ORDER:
            return None
        semiregular = self.graph.isolated.is_subgroup
        connected = True
        for sub in SubgroupService.all_subgroups(self.group, up_to_conjugacy=True):
            if sub.size == self.group.order:
                continue
            local = GraphService.build_nonf_graph(standalone(sub)[0], self.spec, GraphMode.ORBIT)
            semiregular &= local.isolated.is_subgroup
            connected &= local.component_count <= 1
        return semiregular, connected

    @property
    def minimal_hypotheses(self) -> bool:
        """Soluble class, subgroup-closed, G semiregular, all proper subgroup graphs connected."""
        flags = self.spec.closure
        if not (flags.soluble_only and flags.subgroup_closed):
            return False
        survey = self.subgroup_survey
        return survey is not None and all(survey)

    @cached_property
    def maximal(self) -> list[_MaximalData]:
        """Maximal subgroups outside the 2-generated closure with connected graphs."""
        found = []
        for m in SubgroupService.maximal_subgroups(self.group):
            local, members = standalone(m)
            graph = GraphService.build_nonf_graph(local, self.spec, GraphMode.ORBIT)
            if graph.is_empty or graph.component_count != 1:
                continue
            vertex = int(members[graph.vertices.members[0]])
            isolated = ElementSet.from_indices(self.group, members[graph.isolated.members])
            found.append(
                _MaximalData(
                    subgroup=m,
                    core=SubgroupService.normal_core(self.group, m),
                    graph=graph,
                    isolated=isolated,
                    component=int(self.graph.component_label[vertex]),
                )
            )
        return found

    @property
    def connected_or_empty(self) -> bool:
        return self.graph.component_count <= 1


# ----------------------------------------------------------------------
# Checks
# ----------------------------------------------------------------------


def conjugation_classes_of_tuples(group: FiniteGroup, k: int) -> Iterator[tuple[int, ...]]:
    """
    One k-tuple per orbit of simultaneous conjugation.

    Each coordinate is the smallest element of its orbit under the joint
    centralizer of the coordinates before it.
    """

    def extend(prefix: tuple[int, ...], stabilizer: NDArray[np.bool_]) -> Iterator[tuple[int, ...]]:
        if len(prefix) == k:
            yield prefix
            return
        labels = conjugation_orbits(group, ElementSet(group, stabilizer).generators)
        reps = np.full(int(labels.max()) + 1, group.order, dtype=np.int64)
        np.minimum.at(reps, labels, group.elements)
        for x in np.sort(reps).tolist():
            yield from extend((*prefix, x), stabilizer & centralizer(group, x).mask)

    yield from extend((), np.ones(group.order, dtype=bool))


def _has_generating_lift(group: FiniteGroup, gens: IndexArray, normal: ElementSet) -> bool:
    for ns in itertools.product(normal.members.tolist(), repeat=gens.size):
        if group.closure_mask(group.mul_arrays(gens, np.asarray(ns, dtype=np.int64))).all():
            return True
    return False


def _generator_lifting(ctx: _GroupContext, tally: Tally) -> None:
    """
    <g_1..g_k>N = G with d(G) <= k lifts to <g_1 n_1, .., g_k n_k> = G.

    Every tuple of cosets of N is covered up to simultaneous conjugation;
    lifts depend only on the cosets, so one representative per coset stands
    for the tuple.
    """
    group = ctx.group
    if group.order == 1 or group.order > settings.LIFTING_MAX_ORDER:
        return
    d = SubgroupService.min_generators(group)
    for normal in ctx.proper_normals:
        factor, _ = quotient(group, normal)
        reps = np.asarray(factor.provenance.embeddings["representatives"], dtype=np.int64)
        for k in range(d, settings.LIFTING_MAX_RANK + 1):
            for cosets in conjugation_classes_of_tuples(factor, k):
                tally.instances += 1
                if not factor.closure_mask(list(cosets)).all():
                    continue
                gens = reps[list(cosets)]
                tally.record(
                    _has_generating_lift(group, gens, normal),
                    f"{ctx.name}: gens {gens.tolist()} over N of order {normal.size}",
                )
        logger.debug("Generator lifting covered", group=ctx.name, normal_order=normal.size, instances=tally.instances)


def _coset_in_omega(ctx: _GroupContext, tally: Tally) -> None:
    """G = <g1, g2, N> with N minimal normal puts g1 N or g2 N inside Omega(G)."""
    group = ctx.group
    if group.order == 1 or group.order > settings.QUOTIENT_CHECK_MAX_ORDER or not ctx.soluble:
        return
    if SubgroupService.min_generators(group) > 2:
        return
    omega = GraphService.generating_graph_omega(group).omega.mask
    labels = class_labels(group)
    for normal in SubgroupService.minimal_normal_subgroups(group):
        for x in class_representatives(group).tolist():
            _, reps = centralizer_orbits(group, x)
            for y in reps[labels[reps] >= labels[x]].tolist():
                tally.instances += 1
                if not group.closure_mask([x, y], seed=normal.mask).all():
                    continue
                holds = bool(
                    omega[group.mul_arrays(x, normal.members)].all()
                    or omega[group.mul_arrays(y, normal.members)].all()
                )
                tally.record(holds, f"{ctx.name}: ({x}, {y}) over N of order {normal.size}")


def _isolated_times_cyclic(ctx: _GroupContext, tally: Tally) -> None:
    """I(G) a subgroup with G = I(G)<g> forces G into the 2-generated closure."""
    isolated = ctx.graph.isolated
    tally.instances += 1
    if not isolated.is_subgroup:
        return
    for g in class_representatives(ctx.group).tolist():
        if ctx.group.closure_mask([g], seed=isolated.mask).all():
            tally.record(ctx.graph.is_empty, f"{ctx.name}: G = I<{g}> but the graph has edges")
            return


def _maximal_intersection(ctx: _GroupContext, tally: Tally) -> None:
    """Inconjugate maximal L, M of a soluble G with M_G not in L_G meet in a maximal subgroup of L."""
    group = ctx.group
    if group.order > settings.MAXIMAL_PAIR_MAX_ORDER or not ctx.soluble:
        return
    lattice = SubgroupService.all_subgroups(group).subgroups
    maximal = SubgroupService.maximal_subgroups(group).subgroups
    cores = [SubgroupService.normal_core(group, m) for m in maximal]
    for i, big in enumerate(maximal):
        for j, other in enumerate(maximal):
            tally.instances += 1
            if i == j or cores[j].issubset(cores[i]) or is_conjugate(group, big, other):
                continue
            meet = big.intersection(other)
            between = any(
                meet.size < s.size < big.size and meet.issubset(s) and s.issubset(big) for s in lattice
            )
            tally.record(not between, f"{ctx.name}: L of order {big.size}, M of order {other.size}")


def _quotient_checks(ctx: _GroupContext, lifts: Tally, images: Tally) -> None:
    """Edges of G/N lift to edges of G, and I(G) maps into I(G/N)."""
    group = ctx.group
    if group.order > settings.QUOTIENT_CHECK_MAX_ORDER or not ctx.spec.closure.quotient_closed:
        return
    for normal in ctx.proper_normals:
        factor, projection = quotient(group, normal)
        q_graph = GraphService.build_nonf_graph(factor, ctx.spec, GraphMode.ORBIT)
        for a, b in q_graph.edges.tolist():
            for g, h in itertools.product(
                np.flatnonzero(projection.map == a).tolist(), np.flatnonzero(projection.map == b).tolist()
            ):
                lifts.instances += 1
                lifts.record(ctx.graph.is_adjacent(g, h), f"{ctx.name}: {g} ~ {h} over N of order {normal.size}")
        images.instances += 1
        mapped = projection.map[ctx.graph.isolated.members]
        images.record(bool(q_graph.isolated.mask[mapped].all()), f"{ctx.name}: N of order {normal.size}")


def _isolated_conjugation_invariant(ctx: _GroupContext, tally: Tally) -> None:
    labels = class_labels(ctx.group)
    mask = ctx.graph.isolated.mask
    tally.instances += 1
    per_class = np.zeros(int(labels.max()) + 1, dtype=np.int64)
    np.add.at(per_class, labels, mask)
    sizes = np.bincount(labels)
    tally.record(bool(np.all((per_class == 0) | (per_class == sizes))), f"{ctx.name}: I(G) is not a union of classes")


def _two_maximal(ctx: _GroupContext, tallies: dict[str, Tally]) -> None:
    """The four statements about two maximal subgroups outside the 2-generated closure."""
    group = ctx.group
    if group.order > settings.QUOTIENT_CHECK_MAX_ORDER or not ctx.soluble:
        return
    data = ctx.maximal
    for big in data:
        for small in data:
            if big is small:
                continue
            label = f"{ctx.name}: L of order {big.subgroup.size}, M of order {small.subgroup.size}"
            same = big.component == small.component
            tallies["two_maximal_components"].instances += 1
            if not big.core.issubset(small.core):
                meet = big.subgroup.intersection(small.subgroup)
                tallies["two_maximal_components"].record(same or meet.issubset(big.isolated), label)
            tallies["incomparable_cores_same_component"].instances += 1
            if not big.core.issubset(small.core) and not small.core.issubset(big.core):
                tallies["incomparable_cores_same_component"].record(same, label)
            tallies["core_quotient_unique_minimal_normal"].instances += 1
            tallies["normal_or_cyclic_top"].instances += 1
            if small.core.size < big.core.size and small.core.issubset(big.core) and not same:
                above = [n for n in ctx.normals if small.core.size < n.size and small.core.issubset(n)]
                minimal = [n for n in above if not any(o.size < n.size and o.issubset(n) for o in above)]
                tallies["core_quotient_unique_minimal_normal"].record(
                    len(minimal) == 1 and minimal[0] == big.core, label
                )
                cyclic_top = any(
                    np.array_equal(group.closure_mask([x], seed=big.core.mask), big.subgroup.mask)
                    for x in big.subgroup.members.tolist()
                )
                tallies["normal_or_cyclic_top"].record(big.subgroup.is_normal or cyclic_top, label)


def _normal_subgroup_component(ctx: _GroupContext, tally: Tally) -> None:
    """G minus a proper normal N inside one component: connected, or N maximal."""
    if not ctx.minimal_hypotheses:
        return
    graph = ctx.graph
    maximal = SubgroupService.maximal_subgroups(ctx.group).subgroups
    for normal in [n for n in ctx.normals if n.size < ctx.group.order]:
        tally.instances += 1
        outside = graph.component_label[~normal.mask]
        if outside.size == 0 or outside.min() < 0 or np.unique(outside).size != 1:
            continue
        tally.record(
            ctx.connected_or_empty or any(normal == m for m in maximal),
            f"{ctx.name}: N of order {normal.size}",
        )


def _insoluble_connected(ctx: _GroupContext, tally: Tally) -> None:
    tally.instances += 1
    if ctx.soluble or not ctx.minimal_hypotheses:
        return
    tally.record(ctx.connected_or_empty, f"{ctx.name}: insoluble with {ctx.graph.component_count} components")


def _two_generated_connected(ctx: _GroupContext, tally: Tally) -> None:
    tally.instances += 1
    if SubgroupService.min_generators(ctx.group) > 2 or not ctx.minimal_hypotheses:
        return
    tally.record(ctx.connected_or_empty, f"{ctx.name}: 2-generated with {ctx.graph.component_count} components")


def _disconnected_quotients_in_f2(ctx: _GroupContext, tally: Tally) -> None:
    """A disconnected graph under the strong hypotheses puts every proper quotient in the 2-generated closure."""
    flags = ctx.spec.closure
    tally.instances += 1
    if ctx.connected_or_empty or not (flags.soluble_only and flags.quotient_closed):
        return
    if not ctx.minimal_hypotheses or ctx.group.order > settings.LATTICE_CAP:
        return
    if AnalysisService.is_strongly_semiregular(ctx.group, ctx.spec).status != "yes":
        return
    factors = [quotient(ctx.group, n)[0] for n in ctx.proper_normals]
    if any(GraphService.build_nonf_graph(f, ctx.spec).component_count > 1 for f in factors):
        return
    failing = [f.order for f in factors if not ClassService.f2_member(ctx.spec, f)]
    tally.record(not failing, f"{ctx.name}: quotients of order {failing} outside the closure")


def _order_determined_connected(ctx: _GroupContext, tally: Tally) -> None:
    """For an order-determined soluble class with subgroup isolated sets, every graph is connected."""
    flags = ctx.spec.closure
    if not (ctx.spec.order_determined and flags.soluble_only and flags.subgroup_closed):
        return
    tally.instances += 1
    if not ctx.graph.isolated.is_subgroup:
        return
    tally.record(ctx.connected_or_empty, f"{ctx.name}: {ctx.graph.component_count} components")


LEMMAS = (
    "generator_lifting",
    "coset_in_omega",
    "isolated_times_cyclic",
    "maximal_intersection",
    "quotient_adjacency_lifts",
    "isolated_maps_to_isolated",
    "isolated_conjugation_invariant",
    "two_maximal_components",
    "incomparable_cores_same_component",
    "core_quotient_unique_minimal_normal",
    "normal_or_cyclic_top",
    "normal_subgroup_component",
    "insoluble_connected",
    "two_generated_connected",
    "disconnected_quotients_in_f2",
    "order_determined_connected",
)

_SINGLE: dict[str, Callable[[_GroupContext, Tally], None]] = {
    "generator_lifting": _generator_lifting,
    "coset_in_omega": _coset_in_omega,
    "isolated_times_cyclic": _isolated_times_cyclic,
    "maximal_intersection": _maximal_intersection,
    "isolated_conjugation_invariant": _isolated_conjugation_invariant,
    "normal_subgroup_component": _normal_subgroup_component,
    "insoluble_connected": _insoluble_connected,
    "two_generated_connected": _two_generated_connected,
    "disconnected_quotients_in_f2": _disconnected_quotients_in_f2,
    "order_determined_connected": _order_determined_connected,
}


def lemma_harness(corpus: Iterable[tuple[str, FiniteGroup]], spec: ClassSpec) -> list[LemmaResult]:
    """
    Run every lemma check over the corpus for one class.

    Args:
        corpus: (name, group) pairs
        spec: A subgroup-closed class

    Returns:
        One LemmaResult per lemma, in a fixed order
    """
    tallies = {name: Tally() for name in LEMMAS}
    for name, group in corpus:
        ctx = _GroupContext(name, group, spec)
        for lemma, check in _SINGLE.items():
            check(ctx, tallies[lemma])
        _quotient_checks(ctx, tallies["quotient_adjacency_lifts"], tallies["isolated_maps_to_isolated"])
        _two_maximal(ctx, tallies)
        logger.debug("Lemma checks done", group=name, spec=str(spec))

    results = [
        LemmaResult(
            lemma=lemma,
            spec=str(spec),
            instances=tally.instances,
            hypothesis_held=tally.held,
            failures=tally.failures,
        )
        for lemma, tally in tallies.items()
    ]
    failed = [r.lemma for r in results if not r.passed]
    if failed:
        logger.error("Lemma checks failed", spec=str(spec), lemmas=failed)
    else:
        logger.info("Lemma checks passed", spec=str(spec), lemmas=len(results))
    return results
