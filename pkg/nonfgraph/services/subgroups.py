"""
Subgroup engine.

Closures, the subgroup lattice, maximal and normal subgroups, cores,
characteristic subgroups, series and the minimal number of generators.
Results that depend only on the group are memoized in ``group.cache``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from loguru import logger
from sympy import factorint, primefactors

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import CapExceeded, InvalidParameters, ShapeMismatch
from nonfgraph.groups.conjugacy import (
    center,
    centralizer_orbits,
    class_representatives,
    conjugates,
    normal_closure,
    partition_from_edges,
)
from nonfgraph.groups.constructors import quotient
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup, IndexArray


class Characteristic(StrEnum):
    """Selectors accepted by ``characteristic_structure``."""

    CENTER = "center"
    FRATTINI = "frattini"
    SOCLE = "socle"
    SOLUBLE_RADICAL = "soluble_radical"
    DERIVED_SUBGROUP = "derived_subgroup"
    OP_CENTER = "O_p_of_center"
    SYLOW = "sylow"
    FITTING = "fitting"


@dataclass
class SubgroupList:
    """A deduplicated list of subgroups with the method that produced it."""

    parent: FiniteGroup
    subgroups: list[ElementSet]
    up_to_conjugacy: bool = False
    certificate: str = ""

    def __len__(self) -> int:
        return len(self.subgroups)

    def __iter__(self):
        return iter(self.subgroups)

    def orders(self) -> list[int]:
        return [s.size for s in self.subgroups]


def _dedupe(sets: Iterable[ElementSet]) -> dict[int, ElementSet]:
    found: dict[int, ElementSet] = {}
    for s in sets:
        known = found.get(s.key)
        if known is None or not np.array_equal(known.mask, s.mask):
            found[s.key] = s
    return found


def _join(group: FiniteGroup, first: ElementSet, extra: Sequence[int]) -> ElementSet:
    """<first, extra> with ``first`` as the breadth-first seed."""
    gens = list(first.generators) + [int(x) for x in extra]
    return ElementSet(group, group.closure_mask(gens, seed=first.mask), generators=gens)


def cyclic_subgroups(group: FiniteGroup) -> list[ElementSet]:
    """Every cyclic subgroup once, generated by its smallest generator index."""
    cached = group.cache.get("cyclic_subgroups")
    if cached is not None:
        return cached
    seen = np.zeros(group.order, dtype=bool)
    found: list[ElementSet] = []
    for x in range(group.order):
        if seen[x]:
            continue
        k = int(group.elem_order[x])
        powers = group.power_arrays(np.full(k, x), np.arange(k))
        mask = np.zeros(group.order, dtype=bool)
        mask[powers] = True
        # generators of <x> are the powers coprime to its order
        coprime = np.array([math.gcd(i, k) == 1 for i in range(k)])
        seen[powers[coprime]] = True
        found.append(ElementSet(group, mask, generators=[x] if x else []))
    found.sort(key=lambda s: s.sort_key())
    group.cache["cyclic_subgroups"] = found
    return found


def normalizer_mask(group: FiniteGroup, subgroup: ElementSet) -> np.ndarray:
    """Elements g with g^-1 S g = S."""
    elems = group.elements
    inverses = group.inv[elems]
    mask = np.ones(group.order, dtype=bool)
    for y in subgroup.generators:
        images = group.mul_arrays(group.mul_arrays(inverses, y), elems)
        mask &= subgroup.mask[images]
    return mask


def is_p_group_order(n: int) -> bool:
    return n > 1 and len(factorint(n)) == 1


def p_element_mask(group: FiniteGroup, p: int) -> np.ndarray:
    """Elements whose order is a power of p, the identity included."""
    key = ("p_elements", p)
    cached = group.cache.get(key)
    if cached is None:
        orders = group.elem_order.copy()
        while True:
            divisible = orders % p == 0
            if not divisible.any():
                break
            orders = np.where(divisible, orders // p, orders)
        cached = orders == 1
        group.cache[key] = cached
    return cached


class SubgroupService:
    """Service class for subgroup computations."""

    @staticmethod
    def closure(group: FiniteGroup, gens: Sequence[int]) -> ElementSet:
        """
        The subgroup generated by ``gens``.

        Args:
            group: Parent group
            gens: Element indices

        Returns:
            <gens> as a subgroup ElementSet; <> is the trivial subgroup
        """
        return ElementSet.generated_by(group, gens)

    @staticmethod
    def all_subgroups(group: FiniteGroup, up_to_conjugacy: bool = False) -> SubgroupList:
        """
        Every subgroup, built from the cyclic subgroups by repeated joins.

        Args:
            group: Parent group of order at most the lattice cap
            up_to_conjugacy: Keep one representative per conjugacy class

        Returns:
            SubgroupList in canonical (size, smallest member) order

        Raises:
            CapExceeded: Above the lattice cap
        """
        if group.order > settings.LATTICE_CAP:
            raise CapExceeded("subgroup lattice", group.order, settings.LATTICE_CAP)

        lattice = group.cache.get("lattice")
        if lattice is None:
            cyclic = cyclic_subgroups(group)
            found = _dedupe(cyclic)
            frontier = list(found.values())
            while frontier:
                fresh: list[ElementSet] = []
                for sub in frontier:
                    for c in cyclic:
                        if not c.generators or c.issubset(sub):
                            continue
                        joined = _join(group, sub, c.generators)
                        known = found.get(joined.key)
                        if known is None or not np.array_equal(known.mask, joined.mask):
                            found[joined.key] = joined
                            fresh.append(joined)
                frontier = fresh
            lattice = sorted(found.values(), key=lambda s: s.sort_key())
            for sub in lattice:
                if group.order % sub.size:
                    raise ShapeMismatch("all_subgroups", "subgroup order does not divide |G|", {"size": sub.size})
            group.cache["lattice"] = lattice
            logger.debug("Subgroup lattice enumerated", order=group.order, subgroups=len(lattice))

        if not up_to_conjugacy:
            return SubgroupList(group, list(lattice), False, "layered cyclic joins")

        classes = group.cache.get("lattice_classes")
        if classes is None:
            covered: set[int] = set()
            classes = []
            for sub in lattice:
                if sub.key in covered:
                    continue
                classes.append(sub)
                covered.update(c.key for c in conjugates(group, sub))
            group.cache["lattice_classes"] = classes
        return SubgroupList(group, list(classes), True, "layered cyclic joins, conjugacy reduced")

    @staticmethod
    def maximal_subgroups(group: FiniteGroup) -> SubgroupList:
        """
        All maximal proper subgroups, read off the lattice.

        Raises:
            CapExceeded: Above the lattice cap
        """
        cached = group.cache.get("maximal")
        if cached is None:
            lattice = SubgroupService.all_subgroups(group).subgroups
            cached = []
            for sub in sorted(lattice, key=lambda s: -s.size):
                if sub.size == group.order:
                    continue
                if not any(sub.issubset(m) for m in cached):
                    cached.append(sub)
            cached.sort(key=lambda s: s.sort_key())
            group.cache["maximal"] = cached
        return SubgroupList(group, list(cached), False, "maximal elements of the lattice")

    @staticmethod
    def normal_core(group: FiniteGroup, subgroup: ElementSet) -> ElementSet:
        """Largest normal subgroup of G inside ``subgroup``: the intersection of its conjugates."""
        if subgroup.is_normal:
            return subgroup
        mask = subgroup.mask.copy()
        for conj in conjugates(group, subgroup):
            mask &= conj.mask
        core = ElementSet(group, mask)
        core.__dict__["is_normal"] = True
        return core

    @staticmethod
    def normal_subgroups(group: FiniteGroup) -> SubgroupList:
        """
        All normal subgroups, as joins of normal closures of class representatives.

        Works above the lattice cap; the cost grows with the number of normal
        subgroups rather than with the number of subgroups.
        """
        cached = group.cache.get("normal_subgroups")
        if cached is None:
            closures = _dedupe(
                normal_closure(group, [int(x)]) for x in class_representatives(group)[1:]
            )
            atoms = sorted(closures.values(), key=lambda s: s.sort_key())
            found = _dedupe([ElementSet.trivial(group), *atoms])
            frontier = list(atoms)
            while frontier:
                fresh: list[ElementSet] = []
                for sub in frontier:
                    for atom in atoms:
                        if atom.issubset(sub):
                            continue
                        joined = _join(group, sub, atom.generators)
                        known = found.get(joined.key)
                        if known is None or not np.array_equal(known.mask, joined.mask):
                            found[joined.key] = joined
                            fresh.append(joined)
                frontier = fresh
            cached = sorted(found.values(), key=lambda s: s.sort_key())
            for sub in cached:
                sub.__dict__["is_normal"] = True
            group.cache["normal_subgroups"] = cached
            logger.debug("Normal subgroups enumerated", order=group.order, count=len(cached))
        return SubgroupList(group, list(cached), False, "joins of normal closures")

    @staticmethod
    def minimal_normal_subgroups(group: FiniteGroup) -> list[ElementSet]:
        nontrivial = [s for s in SubgroupService.normal_subgroups(group) if s.size > 1]
        return [
            s
            for s in nontrivial
            if not any(t.size < s.size and t.issubset(s) for t in nontrivial)
        ]

    @staticmethod
    def chief_series(group: FiniteGroup) -> list[ElementSet]:
        """
        A chief series 1 = U_0 < ... < U_t = G.

        Each step takes the smallest normal subgroup strictly above the
        previous term, ties broken by the smallest new element index.
        """
        normals = SubgroupService.normal_subgroups(group).subgroups
        current = ElementSet.trivial(group)
        series = [current]
        while current.size < group.order:
            candidates = [n for n in normals if n.size > current.size and current.issubset(n)]

            def rank(n: ElementSet, below: ElementSet = current) -> tuple[int, int]:
                return n.size, int(np.flatnonzero(n.mask & ~below.mask)[0])

            current = min(candidates, key=rank)
            series.append(current)
        return series

    @staticmethod
    def sylow(group: FiniteGroup, p: int) -> ElementSet:
        """
        A Sylow p-subgroup, grown from the trivial group by p-elements of the normalizer.

        Raises:
            InvalidParameters: If p does not divide |G|
        """
        if group.order % p:
            raise InvalidParameters("p must divide the group order", {"p": p, "order": group.order})
        key = ("sylow", p)
        cached = group.cache.get(key)
        if cached is not None:
            return cached
        target = p ** factorint(group.order)[p]
        p_elements = p_element_mask(group, p)
        current = ElementSet.trivial(group)
        while current.size < target:
            candidates = np.flatnonzero(p_elements & normalizer_mask(group, current) & ~current.mask)
            current = _join(group, current, [int(candidates[0])])
        group.cache[key] = current
        return current

    @staticmethod
    def largest_normal_p_subgroup(group: FiniteGroup, p: int) -> ElementSet:
        """O_p(G)."""
        normals = SubgroupService.normal_subgroups(group).subgroups
        p_normals = [n for n in normals if n.size == 1 or (is_p_group_order(n.size) and n.size % p == 0)]
        return max(p_normals, key=lambda s: s.size)

    @staticmethod
    def characteristic_structure(
        group: FiniteGroup, which: Characteristic | str, p: int | None = None
    ) -> ElementSet:
        """
        A characteristic (or Sylow) subgroup selected by name.

        Args:
            group: Parent group
            which: One of the ``Characteristic`` selectors
            p: Prime for the O_p_of_center and sylow selectors

        Returns:
            The selected subgroup

        Raises:
            InvalidParameters: Unknown selector, or p missing or not dividing |G|
            CapExceeded: When the Frattini subgroup of a non-p-group needs the lattice
        """
        which = Characteristic(which)
        if which in (Characteristic.OP_CENTER, Characteristic.SYLOW):
            if p is None or group.order % p:
                raise InvalidParameters("selector needs a prime dividing |G|", {"which": str(which), "p": p})

        if which is Characteristic.CENTER:
            return center(group)
        if which is Characteristic.DERIVED_SUBGROUP:
            return derived_subgroup(ElementSet.whole(group))
        if which is Characteristic.OP_CENTER:
            z = center(group)
            mask = z.mask & p_element_mask(group, p)
            return ElementSet(group, mask)
        if which is Characteristic.SYLOW:
            return SubgroupService.sylow(group, p)
        if which is Characteristic.FRATTINI:
            return frattini_subgroup(group)
        if which is Characteristic.SOCLE:
            minimal = SubgroupService.minimal_normal_subgroups(group)
            result = ElementSet.trivial(group)
            for n in minimal:
                result = _join(group, result, n.generators)
            return result
        if which is Characteristic.SOLUBLE_RADICAL:
            soluble = [n for n in SubgroupService.normal_subgroups(group) if is_soluble(n)]
            return max(soluble, key=lambda s: s.size)
        # Fitting subgroup
        result = ElementSet.trivial(group)
        for q in primefactors(group.order):
            result = _join(group, result, SubgroupService.largest_normal_p_subgroup(group, q).generators)
        return result

    @staticmethod
    def min_generators(group: FiniteGroup) -> int:
        """
        d(G), the smallest size of a generating set.

        Cyclic and abelian groups are answered from element counts; otherwise
        pairs run over class representatives and centralizer orbits, and
        larger sizes extend deduplicated subgroups by right-coset representatives.
        """
        cached = group.cache.get("min_generators")
        if cached is not None:
            return cached
        result = _min_generators(group)
        group.cache["min_generators"] = result
        return result


def _abelian_rank(group: FiniteGroup) -> int:
    """Minimal generator count of an abelian group: the largest p-rank."""
    rank = 0
    elems = group.elements
    for p in primefactors(group.order):
        omega = int(np.count_nonzero(group.power_arrays(elems, p) == 0))
        rank = max(rank, round(math.log(omega, p)))
    return rank


def is_abelian(subgroup: ElementSet) -> bool:
    group = subgroup.parent
    gens = np.asarray(subgroup.generators, dtype=np.int64)
    if gens.size < 2:
        return True
    return bool(np.all(group.commutator_arrays(gens[:, None], gens[None, :]) == 0))


def _min_generators(group: FiniteGroup) -> int:
    if group.order == 1:
        return 0
    if int(group.elem_order.max()) == group.order:
        return 1
    if is_abelian(ElementSet.whole(group)):
        return _abelian_rank(group)

    whole = group.order
    derived = derived_subgroup(ElementSet.whole(group))
    lower = 2
    if derived.size > 1:
        abelianization, _ = quotient(group, derived)
        lower = max(2, SubgroupService.min_generators(abelianization))

    if lower <= 2:
        for x in class_representatives(group)[1:]:
            _, orbit_reps = centralizer_orbits(group, int(x))
            for y in orbit_reps[1:]:
                if group.closure_mask([int(x), int(y)]).sum() == whole:
                    return 2
        lower = 3

    # layered search: subgroups generated by k elements, deduplicated
    layer = _dedupe(
        ElementSet.generated_by(group, [int(x), int(y)])
        for x in class_representatives(group)[1:]
        for y in centralizer_orbits(group, int(x))[1][1:]
    )
    k = 2
    while True:
        k += 1
        fresh: dict[int, ElementSet] = {}
        for sub in layer.values():
            for y in _right_coset_representatives(group, sub)[1:]:
                joined = _join(group, sub, [int(y)])
                if joined.size == whole:
                    return k
                known = fresh.get(joined.key)
                if known is None or not np.array_equal(known.mask, joined.mask):
                    fresh[joined.key] = joined
        layer = fresh


def _right_coset_representatives(group: FiniteGroup, subgroup: ElementSet) -> IndexArray:
    """Smallest element of every right coset Hy."""
    elems = group.elements
    gens = subgroup.generators
    if not gens:
        return elems
    sources = np.concatenate([elems] * len(gens))
    targets = np.concatenate([group.mul_arrays(g, elems) for g in gens])
    labels = partition_from_edges(group.order, sources, targets)
    reps = np.full(int(labels.max()) + 1, group.order, dtype=np.int64)
    np.minimum.at(reps, labels, elems)
    return reps


# ----------------------------------------------------------------------
# Series inside a parent group
# ----------------------------------------------------------------------


def commutator_subgroup(first: ElementSet, second: ElementSet, within: ElementSet) -> ElementSet:
    """[A, B] for subgroups normalized by ``within``: normal closure of generator commutators."""
    group = within.parent
    a = np.asarray(first.generators, dtype=np.int64)
    b = np.asarray(second.generators, dtype=np.int64)
    if a.size == 0 or b.size == 0:
        return ElementSet.trivial(group)
    comms = np.unique(group.commutator_arrays(a[:, None], b[None, :]).ravel())
    return normal_closure(group, comms.tolist(), within=within)


def derived_subgroup(subgroup: ElementSet) -> ElementSet:
    return commutator_subgroup(subgroup, subgroup, subgroup)


def derived_series(subgroup: ElementSet) -> list[ElementSet]:
    """K = K^(0) > K^(1) > ... until the series stabilizes."""
    series = [subgroup]
    while True:
        nxt = derived_subgroup(series[-1])
        if nxt.size == series[-1].size:
            return series
        series.append(nxt)


def lower_central_series(subgroup: ElementSet) -> list[ElementSet]:
    series = [subgroup]
    while True:
        nxt = commutator_subgroup(series[-1], subgroup, subgroup)
        if nxt.size == series[-1].size:
            return series
        series.append(nxt)


def is_soluble(subgroup: ElementSet) -> bool:
    return derived_series(subgroup)[-1].size == 1


def is_nilpotent(subgroup: ElementSet) -> bool:
    return lower_central_series(subgroup)[-1].size == 1


def derived_length(subgroup: ElementSet) -> int | None:
    """Length of the derived series, or None for non-soluble subgroups."""
    series = derived_series(subgroup)
    if series[-1].size != 1:
        return None
    return len(series) - 1


def frattini_subgroup(group: FiniteGroup) -> ElementSet:
    """
    Phi(G). For p-groups this is G^p G'; otherwise the intersection of the
    maximal subgroups from the lattice.
    """
    cached = group.cache.get("frattini")
    if cached is not None:
        return cached
    if group.order == 1:
        result = ElementSet.trivial(group)
    elif is_p_group_order(group.order):
        p = primefactors(group.order)[0]
        gens = np.asarray(group.generators, dtype=np.int64)
        powers = group.power_arrays(gens, p)
        comms = group.commutator_arrays(gens[:, None], gens[None, :]).ravel()
        result = normal_closure(group, np.unique(np.concatenate([powers, comms])).tolist())
    else:
        mask = np.ones(group.order, dtype=bool)
        for m in SubgroupService.maximal_subgroups(group):
            mask &= m.mask
        result = ElementSet(group, mask)
    group.cache["frattini"] = result
    return result
