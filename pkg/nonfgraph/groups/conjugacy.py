"""
Conjugation orbits.

Orbits of a set of acting elements on the parent group under conjugation are
the connected components of the graph x -> g^-1 x g, computed with scipy.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup, IndexArray


def canonical_labels(labels: NDArray[np.integer]) -> IndexArray:
    """Renumber block labels so blocks are numbered by their smallest element."""
    uniq, inverse = np.unique(labels, return_inverse=True)
    first = np.full(uniq.size, labels.size, dtype=np.int64)
    np.minimum.at(first, inverse, np.arange(labels.size))
    remap = np.empty(uniq.size, dtype=np.int64)
    remap[np.argsort(first, kind="stable")] = np.arange(uniq.size)
    return remap[inverse]


def partition_from_edges(n: int, sources: IndexArray, targets: IndexArray) -> IndexArray:
    """Canonical component labels of the undirected graph on 0..n-1 with the given edges."""
    nodes = np.arange(n, dtype=np.int64)
    rows = np.concatenate([nodes, sources])
    cols = np.concatenate([nodes, targets])
    graph = coo_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(n, n)).tocsr()
    _, labels = connected_components(graph, directed=True, connection="weak")
    return canonical_labels(labels)


def conjugation_orbits(group: FiniteGroup, acting: Sequence[int]) -> IndexArray:
    """Labels of the orbits of <acting> on the whole group by conjugation."""
    elems = group.elements
    acting = [int(g) for g in acting if int(g) != 0]
    if not acting:
        return elems.copy()
    sources = np.concatenate([elems] * len(acting))
    targets = np.concatenate([group.conjugate_arrays(elems, g) for g in acting])
    return partition_from_edges(group.order, sources, targets)


def class_labels(group: FiniteGroup) -> IndexArray:
    """Conjugacy class label of every element, classes numbered by smallest member."""
    labels = group.cache.get("class_labels")
    if labels is None:
        labels = conjugation_orbits(group, group.generators)
        group.cache["class_labels"] = labels
    return labels


def conjugacy_classes(group: FiniteGroup) -> list[IndexArray]:
    """The conjugacy classes, each sorted so its minimum-index representative comes first."""
    labels = class_labels(group)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    return [np.sort(block) for block in np.split(order, bounds)]


def class_representatives(group: FiniteGroup) -> IndexArray:
    """The smallest index in every conjugacy class, in class order."""
    labels = class_labels(group)
    reps = np.full(int(labels.max()) + 1, group.order, dtype=np.int64)
    np.minimum.at(reps, labels, group.elements)
    return reps


def centralizer(group: FiniteGroup, x: int) -> ElementSet:
    """C_G(x)."""
    key = ("centralizer", int(x))
    cached = group.cache.get(key)
    if cached is None:
        elems = group.elements
        mask = group.mul_arrays(elems, x) == group.mul_arrays(x, elems)
        cached = ElementSet(group, mask)
        group.cache[key] = cached
    return cached


def center(group: FiniteGroup) -> ElementSet:
    """Z(G): elements commuting with every generator."""
    elems = group.elements
    mask = np.ones(group.order, dtype=bool)
    for g in group.generators:
        mask &= group.mul_arrays(elems, g) == group.mul_arrays(g, elems)
    return ElementSet(group, mask)


def centralizer_orbits(group: FiniteGroup, x: int) -> tuple[IndexArray, IndexArray]:
    """
    Orbits of C_G(x) on G by conjugation.

    Returns:
        Tuple of (orbit label per element, smallest element of every orbit)
    """
    labels = conjugation_orbits(group, centralizer(group, x).generators)
    reps = np.full(int(labels.max()) + 1, group.order, dtype=np.int64)
    np.minimum.at(reps, labels, group.elements)
    return labels, reps


def conjugate_set(group: FiniteGroup, subset: ElementSet, g: int) -> ElementSet:
    """The conjugate g^-1 S g."""
    mask = np.zeros(group.order, dtype=bool)
    mask[group.conjugate_arrays(subset.members, g)] = True
    gens = None
    if subset.is_subgroup:
        gens = group.conjugate_arrays(np.asarray(subset.generators, dtype=np.int64), g).tolist()
    return ElementSet(group, mask, generators=gens)


def conjugates(group: FiniteGroup, subset: ElementSet) -> list[ElementSet]:
    """All distinct conjugates of ``subset``, found by search over the group's generators."""
    found = {subset.key: subset}
    queue = [subset]
    while queue:
        current = queue.pop()
        for g in group.generators:
            image = conjugate_set(group, current, g)
            known = found.get(image.key)
            if known is None or not np.array_equal(known.mask, image.mask):
                found[image.key] = image
                queue.append(image)
    return sorted(found.values(), key=lambda s: s.sort_key())


def is_conjugate(group: FiniteGroup, first: ElementSet, second: ElementSet) -> bool:
    if first.size != second.size:
        return False
    return any(c == second for c in conjugates(group, first))


def normal_closure(group: FiniteGroup, gens: Sequence[int], within: ElementSet | None = None) -> ElementSet:
    """
    Smallest subgroup containing ``gens`` that is normalized by ``within``.

    ``within`` defaults to the whole group.
    """
    acting = group.generators if within is None else within.generators
    current = [int(g) for g in gens if int(g) != 0]
    mask = group.closure_mask(current)
    while True:
        fresh: list[int] = []
        gen_array = np.asarray(current, dtype=np.int64)
        if gen_array.size:
            for g in acting:
                images = group.conjugate_arrays(gen_array, g)
                outside = np.unique(images[~mask[images]])
                fresh.extend(int(y) for y in outside)
        if not fresh:
            return ElementSet(group, mask, generators=current)
        current = current + sorted(set(fresh))
        mask = group.closure_mask(current, seed=mask)
