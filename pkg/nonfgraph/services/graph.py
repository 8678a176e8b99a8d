"""
Non-F graph engine.

Two vertices x != y are adjacent when <x, y> is not in the class. The
explicit mode evaluates every pair into a networkx graph. The orbit mode
evaluates one pair per orbit of simultaneous conjugation and recovers the
components by joining the resulting partition with its conjugates.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path

import networkx as nx
import numpy as np
from loguru import logger

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import CapExceeded, InvalidParameters
from nonfgraph.groups.conjugacy import (
    canonical_labels,
    centralizer_orbits,
    class_labels,
    class_representatives,
    partition_from_edges,
)
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup, IndexArray
from nonfgraph.services.class_predicates import (
    ClassKind,
    ClassService,
    ClassSpec,
    MembershipOracle,
    two_generated_closure,
)


class GraphMode(StrEnum):
    EXPLICIT = "explicit"
    ORBIT = "orbit"


@dataclass
class NonFGraph:
    """
    The non-F graph of a group.

    ``component_label`` is -1 on isolated vertices. ``edges`` holds every
    edge in explicit mode and one edge per conjugation orbit in orbit mode.
    """

    parent: FiniteGroup
    spec: ClassSpec
    mode: GraphMode
    isolated: ElementSet
    vertices: ElementSet
    component_label: IndexArray
    component_count: int
    edges: IndexArray
    universal_vertices: ElementSet
    oracle: MembershipOracle = field(repr=False)
    nx_graph: nx.Graph | None = field(default=None, repr=False)

    @property
    def is_empty(self) -> bool:
        return self.vertices.size == 0

    def is_adjacent(self, x: int, y: int) -> bool:
        return x != y and not self.oracle.pair(int(x), int(y))

    def components(self) -> list[ElementSet]:
        """Components as element sets, ordered by smallest member."""
        return [
            ElementSet(self.parent, self.component_label == k) for k in range(self.component_count)
        ]


@dataclass
class GeneratingGraphData:
    """Omega(G) and the components of the induced generating graph Delta(G)."""

    parent: FiniteGroup
    omega: ElementSet
    delta_components: IndexArray
    delta_component_count: int


def _relabel_vertices(labels: IndexArray, vertices: np.ndarray) -> tuple[IndexArray, int]:
    """Number the blocks meeting ``vertices`` 0..k-1 by smallest member, -1 elsewhere."""
    result = np.full(labels.size, -1, dtype=np.int64)
    if not vertices.any():
        return result, 0
    result[vertices] = canonical_labels(labels[vertices])
    return result, int(result.max()) + 1


def conjugation_closed_partition(
    group: FiniteGroup, sources: IndexArray, targets: IndexArray
) -> IndexArray:
    """
    Components of the graph whose edges are all conjugates of the given ones.

    The partition spanned by the given edges is joined with its images under
    conjugation by each generator until a full pass merges nothing.
    """
    n = group.order
    elems = group.elements
    labels = partition_from_edges(n, sources, targets)
    blocks = int(labels.max()) + 1
    sigmas = [group.conjugate_arrays(elems, s) for s in group.generators]
    while True:
        before = blocks
        for sigma in sigmas:
            first = np.full(blocks, n, dtype=np.int64)
            np.minimum.at(first, labels, elems)
            anchor = first[labels]
            src = np.concatenate([elems, sigma])
            dst = np.concatenate([anchor, sigma[anchor]])
            labels = partition_from_edges(n, src, dst)
            blocks = int(labels.max()) + 1
        logger.debug("Conjugate join pass", blocks=blocks)
        if blocks == before:
            return labels


class _PairEvaluator:
    """Adjacency with the cyclic and universal-vertex shortcuts."""

    def __init__(self, group: FiniteGroup, oracle: MembershipOracle):
        self.group = group
        self.oracle = oracle
        self.labels = class_labels(group)
        self.reps = class_representatives(group)
        self.cyclic_member = np.array(
            [oracle(self._cyclic(int(x))) for x in self.reps], dtype=bool
        )

    def _cyclic(self, x: int) -> ElementSet:
        k = int(self.group.elem_order[x])
        mask = np.zeros(self.group.order, dtype=bool)
        mask[self.group.power_arrays(np.full(k, x), np.arange(k))] = True
        return ElementSet(self.group, mask, generators=[x] if x else [])

    @property
    def universal(self) -> np.ndarray:
        return ~self.cyclic_member[self.labels]

    def adjacent(self, x: int, y: int, cyclic_x: ElementSet) -> bool:
        if x == y:
            return False
        if not self.cyclic_member[self.labels[x]] or not self.cyclic_member[self.labels[y]]:
            return True
        if y in cyclic_x or x in self._cyclic(y):
            return False
        return not self.oracle.pair(x, y)


def _check_spec(spec: ClassSpec) -> None:
    if not spec.closure.subgroup_closed:
        raise InvalidParameters("graph construction needs a subgroup-closed class", {"spec": str(spec)})


def _build_explicit(group: FiniteGroup, spec: ClassSpec) -> NonFGraph:
    if group.order > settings.EXPLICIT_GRAPH_CAP:
        raise CapExceeded("explicit graph", group.order, settings.EXPLICIT_GRAPH_CAP)
    oracle = MembershipOracle(spec, group)
    graph = nx.Graph()
    graph.add_nodes_from(range(group.order))
    for x in range(group.order):
        for y in range(x + 1, group.order):
            if not oracle.pair(x, y):
                graph.add_edge(x, y)

    vertices = np.array([graph.degree(v) > 0 for v in range(group.order)], dtype=bool)
    labels = np.full(group.order, -1, dtype=np.int64)
    pruned = graph.subgraph(np.flatnonzero(vertices).tolist())
    components = sorted((sorted(c) for c in nx.connected_components(pruned)), key=lambda c: c[0])
    for k, comp in enumerate(components):
        labels[comp] = k

    universal = np.zeros(group.order, dtype=bool)
    for x in range(group.order):
        universal[x] = not oracle(ElementSet.generated_by(group, [x]))
    edges = np.array(sorted(graph.edges()), dtype=np.int64).reshape(-1, 2)
    return NonFGraph(
        parent=group,
        spec=spec,
        mode=GraphMode.EXPLICIT,
        isolated=ElementSet(group, ~vertices),
        vertices=ElementSet(group, vertices),
        component_label=labels,
        component_count=len(components),
        edges=edges,
        universal_vertices=ElementSet(group, universal),
        oracle=oracle,
        nx_graph=graph,
    )


def _build_orbit(group: FiniteGroup, spec: ClassSpec) -> NonFGraph:
    oracle = MembershipOracle(spec, group)
    pairs = _PairEvaluator(group, oracle)
    labels = pairs.labels
    class_touched = np.zeros(pairs.reps.size, dtype=bool)
    edges: list[tuple[int, int]] = []

    for i, x in enumerate(pairs.reps.tolist()):
        cyclic_x = pairs._cyclic(x)
        _, orbit_reps = centralizer_orbits(group, x)
        candidates = orbit_reps[labels[orbit_reps] >= i]
        for y in candidates.tolist():
            if pairs.adjacent(x, y, cyclic_x):
                edges.append((x, y))
                class_touched[i] = True
                class_touched[labels[y]] = True
        logger.debug("Class representative done", rep=x, index=i, edges=len(edges))

    vertices = class_touched[labels]
    edge_array = np.array(edges, dtype=np.int64).reshape(-1, 2)
    partition = conjugation_closed_partition(group, edge_array[:, 0], edge_array[:, 1])
    component_label, count = _relabel_vertices(partition, vertices)
    logger.info(
        "Orbit-reduced graph built",
        order=group.order,
        spec=str(spec),
        edge_orbits=len(edges),
        components=count,
        memoized=oracle.memo_size,
    )
    return NonFGraph(
        parent=group,
        spec=spec,
        mode=GraphMode.ORBIT,
        isolated=ElementSet(group, ~vertices),
        vertices=ElementSet(group, vertices),
        component_label=component_label,
        component_count=count,
        edges=edge_array,
        universal_vertices=ElementSet(group, pairs.universal),
        oracle=oracle,
    )


class GraphService:
    """Service class for non-F graphs and generating graphs."""

    @staticmethod
    def build_nonf_graph(
        group: FiniteGroup, spec: ClassSpec, mode: GraphMode | str = GraphMode.ORBIT
    ) -> NonFGraph:
        """
        Build the non-F graph.

        Args:
            group: The group
            spec: A subgroup-closed class
            mode: "explicit" (all pairs, order at most the explicit cap) or "orbit"

        Returns:
            NonFGraph with isolated set, components and universal vertices

        Raises:
            CapExceeded: Explicit mode above its cap
            BudgetExceeded: From the membership oracle
        """
        _check_spec(spec)
        mode = GraphMode("orbit" if mode == "orbit_reduced" else mode)
        if mode is GraphMode.EXPLICIT:
            return _build_explicit(group, spec)
        return _build_orbit(group, spec)

    @staticmethod
    def isolated_set(group: FiniteGroup, spec: ClassSpec) -> ElementSet:
        """
        I_F(G), decided per conjugacy class with an early exit on the first neighbour.

        A group in the class has no edges at all, and neither has the trivial
        group: its one vertex has no neighbour whether or not it lies in the class.
        """
        _check_spec(spec)
        if group.order == 1:
            return ElementSet.whole(group)
        if spec.kind is not ClassKind.FORBIDDEN and ClassService.is_member(spec, group):
            return ElementSet.whole(group)
        oracle = MembershipOracle(spec, group)
        pairs = _PairEvaluator(group, oracle)
        isolated_classes = np.zeros(pairs.reps.size, dtype=bool)
        for i, x in enumerate(pairs.reps.tolist()):
            if not pairs.cyclic_member[i]:
                continue
            cyclic_x = pairs._cyclic(x)
            _, orbit_reps = centralizer_orbits(group, x)
            isolated_classes[i] = not any(pairs.adjacent(x, y, cyclic_x) for y in orbit_reps.tolist())
        return ElementSet(group, isolated_classes[pairs.labels])

    @staticmethod
    def gamma_equals_gamma_f2(group: FiniteGroup, spec: ClassSpec) -> bool:
        """Compare the edge sets of the graphs of ``spec`` and of its 2-generated closure."""
        first = GraphService.build_nonf_graph(group, spec, GraphMode.EXPLICIT)
        second = GraphService.build_nonf_graph(group, two_generated_closure(spec), GraphMode.EXPLICIT)
        same = np.array_equal(first.edges, second.edges)
        if not same:
            logger.error("Graphs of a class and its 2-generated closure differ", spec=str(spec), order=group.order)
        return same

    @staticmethod
    def generating_graph_omega(group: FiniteGroup) -> GeneratingGraphData:
        """
        Omega(G), the non-isolated vertices of the generating graph, and the
        components of Delta(G), evaluated on pair orbits.
        """
        labels = class_labels(group)
        reps = class_representatives(group)
        touched = np.zeros(reps.size, dtype=bool)
        edges: list[tuple[int, int]] = []
        for i, x in enumerate(reps.tolist()):
            _, orbit_reps = centralizer_orbits(group, x)
            for y in orbit_reps[labels[orbit_reps] >= i].tolist():
                if group.closure_mask([x, y]).all():
                    edges.append((x, y))
                    touched[i] = True
                    touched[labels[y]] = True
        omega = touched[labels]
        if group.order == 1:
            omega[:] = False
        edge_array = np.array(edges, dtype=np.int64).reshape(-1, 2)
        partition = conjugation_closed_partition(group, edge_array[:, 0], edge_array[:, 1])
        delta, count = _relabel_vertices(partition, omega)
        return GeneratingGraphData(group, ElementSet(group, omega), delta, count)

    @staticmethod
    def export_graph(graph: NonFGraph, path: str | Path) -> Path:
        """
        Write the graph in the text export format, atomically.

        Header lines carry the group hash, the class and the component count;
        then one "i j" edge per line; then "label <vertex> <component>" lines.
        """
        lines = [
            f"# group {graph.parent.content_hash}",
            f"# spec {graph.spec}",
            f"# components {graph.component_count}",
        ]
        if graph.mode is GraphMode.ORBIT:
            lines.append("# edges orbit-representatives")
        lines.extend(f"{int(a)} {int(b)}" for a, b in graph.edges)
        for v in graph.vertices.members.tolist():
            lines.append(f"label {v} {int(graph.component_label[v])}")
        return atomic_write_text(Path(path), "\n".join(lines) + "\n")


def atomic_write_text(path: Path, text: str) -> Path:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    return path
