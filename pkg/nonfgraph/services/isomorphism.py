"""
Subgroup isomorphism search.

Decides whether a group contains a subgroup isomorphic to a given group by
mapping a fixed generating sequence of the pattern into the host with
partial-homomorphism pruning, after an invariant prefilter.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from loguru import logger

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import BudgetExceeded
from nonfgraph.groups.conjugacy import center, centralizer_orbits, class_representatives
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup
from nonfgraph.groups.homomorphism import extend_to_homomorphism
from nonfgraph.services.subgroups import derived_length


class GroupFingerprint(NamedTuple):
    """Isomorphism invariants compared before any search."""

    order: int
    order_histogram: tuple[tuple[int, int], ...]
    center_order: int
    derived_length: int | None


def fingerprint(group: FiniteGroup) -> GroupFingerprint:
    cached = group.cache.get("fingerprint")
    if cached is None:
        cached = GroupFingerprint(
            order=group.order,
            order_histogram=tuple(sorted(group.order_histogram.items())),
            center_order=center(group).size,
            derived_length=derived_length(ElementSet.whole(group)),
        )
        group.cache["fingerprint"] = cached
    return cached


def _dominated(pattern: FiniteGroup, host: FiniteGroup) -> bool:
    """Every element order occurs in the host at least as often as in the pattern."""
    counts = host.order_histogram
    return all(counts.get(k, 0) >= c for k, c in pattern.order_histogram.items())


def _pattern_generators(pattern: FiniteGroup, host: FiniteGroup) -> tuple[int, ...]:
    """
    A generating sequence of the pattern whose element orders are rare in the host.

    Two generators are used whenever the pattern is 2-generated.
    """
    key = ("pattern_generators", tuple(sorted(host.order_histogram.items())))
    cached = pattern.cache.get(key)
    if cached is not None:
        return cached

    counts = host.order_histogram
    orders = pattern.elem_order

    def cost(x: int) -> int:
        return counts.get(int(orders[x]), 0)

    chosen: tuple[int, ...] | None = None
    if int(orders.max()) == pattern.order:
        chosen = (int(np.argmax(orders)),)
    else:
        pairs = []
        for x in class_representatives(pattern)[1:]:
            _, reps = centralizer_orbits(pattern, int(x))
            pairs.extend((cost(int(x)) * cost(int(y)), int(x), int(y)) for y in reps[1:])
        for _, x, y in sorted(pairs):
            if pattern.closure_mask([x, y]).all():
                chosen = (x, y)
                break
    if chosen is None:
        rarest = sorted(range(1, pattern.order), key=lambda x: (cost(x), -int(orders[x]), x))
        gens: list[int] = []
        mask = pattern.closure_mask([])
        for x in rarest:
            if not mask[x]:
                gens.append(x)
                mask = pattern.closure_mask(gens, seed=mask)
                if mask.all():
                    break
        chosen = tuple(gens)
    pattern.cache[key] = chosen
    return chosen


class _Search:
    """Backtracking state for one (host, pattern) pair."""

    def __init__(self, host: FiniteGroup, pattern: FiniteGroup, budget: int):
        self.host = host
        self.pattern = pattern
        self.budget = budget
        self.nodes = 0
        self.gens = _pattern_generators(pattern, host)
        p_orders = pattern.elem_order
        self.gen_orders = [int(p_orders[g]) for g in self.gens]
        # orders of b_i b_j and [b_i, b_j] for i < j
        self.product_orders = {}
        self.commutator_orders = {}
        for j in range(len(self.gens)):
            for i in range(j):
                bi, bj = self.gens[i], self.gens[j]
                self.product_orders[i, j] = int(p_orders[pattern.mul(bi, bj)])
                comm = int(pattern.commutator_arrays(np.array([bi]), np.array([bj]))[0])
                self.commutator_orders[i, j] = int(p_orders[comm])

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded("subgroup isomorphism", self.budget)

    def _consistent(self, images: list[int], candidates: np.ndarray) -> np.ndarray:
        """Mask of candidates for the next image that pass product and commutator order checks."""
        host = self.host
        j = len(images)
        keep = np.ones(candidates.size, dtype=bool)
        for i, a in enumerate(images):
            prod = host.mul_arrays(a, candidates)
            keep &= host.elem_order[prod] == self.product_orders[i, j]
            comm = host.commutator_arrays(np.full(candidates.size, a), candidates)
            keep &= host.elem_order[comm] == self.commutator_orders[i, j]
        return keep

    def _candidates(self, images: list[int]) -> np.ndarray:
        host = self.host
        j = len(images)
        wanted = self.gen_orders[j]
        if j == 0:
            pool = class_representatives(host)
        elif j == 1:
            _, pool = centralizer_orbits(host, images[0])
        else:
            pool = host.elements
        pool = pool[host.elem_order[pool] == wanted]
        if j and pool.size:
            pool = pool[self._consistent(images, pool)]
        return pool

    def run(self, images: list[int]) -> bool:
        if len(images) == len(self.gens):
            mapping = extend_to_homomorphism(self.pattern, images, self.host, gens=self.gens)
            return mapping is not None and np.unique(mapping).size == self.pattern.order
        for y in self._candidates(images):
            self._tick()
            if self.run(images + [int(y)]):
                return True
        return False


def has_subgroup_isomorphic(host: FiniteGroup, pattern: FiniteGroup) -> bool:
    """
    Whether ``host`` has a subgroup isomorphic to ``pattern``.

    Args:
        host: The group searched
        pattern: The group looked for

    Returns:
        True iff an injective homomorphism pattern -> host exists

    Raises:
        BudgetExceeded: If the search passes the node budget without a verdict
    """
    if host.order % pattern.order:
        return False
    if pattern.order == 1:
        return True
    if not _dominated(pattern, host):
        return False
    if pattern.order == host.order and fingerprint(pattern) != fingerprint(host):
        return False

    search = _Search(host, pattern, settings.ISO_NODE_BUDGET)
    found = search.run([])
    logger.debug(
        "Subgroup isomorphism search finished",
        host_order=host.order,
        pattern_order=pattern.order,
        nodes=search.nodes,
        found=found,
    )
    return found


def is_isomorphic(first: FiniteGroup, second: FiniteGroup) -> bool:
    """Isomorphism test: equal orders and an embedding of one into the other."""
    if first.order != second.order:
        return False
    return has_subgroup_isomorphic(first, second)
