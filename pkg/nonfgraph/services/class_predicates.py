"""
Group classes.

ClassSpec describes a class of finite groups by kind and declared closure
properties. Membership is decided for subgroups of a parent group, so the
graph engine can ask about <x, y> without building a standalone group first.
"""

from __future__ import annotations

import re
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from enum import StrEnum
from functools import cached_property

import numpy as np
from loguru import logger
from sympy import factorint, isprime, primefactors

from nonfgraph.core.exceptions import ParseError, ShapeMismatch
from nonfgraph.groups.conjugacy import centralizer_orbits, class_representatives
from nonfgraph.groups.constructors import induced_group, quotient
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup
from nonfgraph.schemas.reports import RecognizabilityEntry, TwoRecognizabilityReport
from nonfgraph.services.isomorphism import has_subgroup_isomorphic
from nonfgraph.services.subgroups import (
    Characteristic,
    SubgroupService,
    derived_subgroup,
    is_abelian,
    is_soluble,
    p_element_mask,
)

# Cross-check bound for the maximal-subgroup supersolubility criterion
SUPERSOLUBLE_CROSS_CHECK_ORDER = 500


class ClassKind(StrEnum):
    CYCLIC = "cyclic"
    ONE_PRIME = "p-group"
    AT_MOST_TWO_PRIMES = "two-primes"
    ABELIAN = "abelian"
    NILPOTENT = "nilpotent"
    SOLUBLE = "soluble"
    SUPERSOLUBLE = "supersoluble"
    METABELIAN = "metabelian"
    NILPOTENT_DERIVED = "nilpotent-derived"
    FITTING_LENGTH = "fitting"
    FORBIDDEN = "forbid"
    TWO_GENERATED = "f2"


@dataclass(frozen=True)
class ClosureFlags:
    subgroup_closed: bool = True
    quotient_closed: bool = True
    soluble_only: bool = True


@dataclass(frozen=True, eq=False)
class ClassSpec:
    """
    A class of finite groups.

    ``parameter`` is the bound t of fitting<=t; ``forbidden`` holds the
    excluded subgroups of a forbidden-subgroup class and ``base`` the class
    whose 2-generated closure a TWO_GENERATED spec describes.
    """

    kind: ClassKind
    parameter: int | None = None
    forbidden: tuple[FiniteGroup, ...] = ()
    forbidden_names: tuple[str, ...] = ()
    base: ClassSpec | None = None
    closure: ClosureFlags = field(default_factory=ClosureFlags)

    def __str__(self) -> str:
        if self.kind is ClassKind.FITTING_LENGTH:
            return f"fitting<={self.parameter}"
        if self.kind is ClassKind.FORBIDDEN:
            return "forbid:" + ",".join(self.forbidden_names)
        if self.kind is ClassKind.TWO_GENERATED:
            return f"f2:{self.base}"
        return str(self.kind)

    @property
    def order_determined(self) -> bool:
        """Membership depends only on the group order."""
        return self.kind in (ClassKind.ONE_PRIME, ClassKind.AT_MOST_TWO_PRIMES)


@dataclass
class PrimeProfile:
    """pi(G), the primes with cyclic or generalized quaternion Sylow subgroups, and pi(g)."""

    group: FiniteGroup
    pi: frozenset[int]
    pi_tilde: frozenset[int]

    @cached_property
    def prime_counts(self) -> np.ndarray:
        """|pi(g)| for every element g."""
        counts = np.zeros(self.group.order, dtype=np.int64)
        orders = self.group.elem_order
        for p in self.pi:
            counts += orders % p == 0
        return counts

    def primes_of(self, x: int) -> frozenset[int]:
        return frozenset(primefactors(int(self.group.elem_order[x])))

    @property
    def per_element(self) -> dict[int, frozenset[int]]:
        return {x: self.primes_of(x) for x in range(self.group.order)}


# ----------------------------------------------------------------------
# Spec construction and parsing
# ----------------------------------------------------------------------


def make_spec(kind: ClassKind | str, parameter: int | None = None) -> ClassSpec:
    """Spec for every kind that needs no forbidden groups or base class."""
    kind = ClassKind(kind)
    if kind is ClassKind.FITTING_LENGTH and (parameter is None or parameter < 1):
        raise ParseError("class spec", "fitting length bound must be a positive integer")
    return ClassSpec(kind=kind, parameter=parameter)


def forbidden_spec(groups: Iterable[FiniteGroup], names: Iterable[str]) -> ClassSpec:
    return ClassSpec(
        kind=ClassKind.FORBIDDEN,
        forbidden=tuple(groups),
        forbidden_names=tuple(names),
        closure=ClosureFlags(subgroup_closed=True, quotient_closed=False, soluble_only=False),
    )


def two_generated_closure(spec: ClassSpec) -> ClassSpec:
    """The class of groups whose 2-generated subgroups all lie in ``spec``."""
    return ClassSpec(
        kind=ClassKind.TWO_GENERATED,
        base=spec,
        closure=ClosureFlags(
            subgroup_closed=True,
            quotient_closed=spec.closure.quotient_closed,
            soluble_only=False,
        ),
    )


_ALIASES = {
    "cyclic": ClassKind.CYCLIC,
    "c": ClassKind.CYCLIC,
    "p-group": ClassKind.ONE_PRIME,
    "one-prime": ClassKind.ONE_PRIME,
    "p": ClassKind.ONE_PRIME,
    "two-primes": ClassKind.AT_MOST_TWO_PRIMES,
    "d": ClassKind.AT_MOST_TWO_PRIMES,
    "abelian": ClassKind.ABELIAN,
    "nilpotent": ClassKind.NILPOTENT,
    "soluble": ClassKind.SOLUBLE,
    "solvable": ClassKind.SOLUBLE,
    "supersoluble": ClassKind.SUPERSOLUBLE,
    "metabelian": ClassKind.METABELIAN,
    "nilpotent-derived": ClassKind.NILPOTENT_DERIVED,
}
_FITTING = re.compile(r"fitting\s*<=\s*(\d+)")
# commas inside a family argument list do not separate forbidden groups
_FORBID_SEPARATOR = re.compile(r",(?![^()]*\))")


def parse_class_spec(text: str, resolver: Callable[[str], FiniteGroup] | None = None) -> ClassSpec:
    """
    Parse the text form of a class spec.

    Args:
        text: e.g. "cyclic", "fitting<=2", "forbid:B,C", "f2:metabelian"
        resolver: Maps a forbidden-group name (or group file path) to a group

    Returns:
        The parsed ClassSpec

    Raises:
        ParseError: For unknown names or a forbid list without a resolver
    """
    raw = text.strip()
    lowered = raw.lower()
    if lowered.startswith("f2:"):
        return two_generated_closure(parse_class_spec(raw[3:], resolver))
    if lowered.startswith("forbid:"):
        names = [n.strip() for n in _FORBID_SEPARATOR.split(raw[len("forbid:") :]) if n.strip()]
        if not names:
            raise ParseError("class spec", "forbid needs at least one group")
        if resolver is None:
            raise ParseError("class spec", "no resolver available for forbidden groups")
        return forbidden_spec([resolver(n) for n in names], names)
    match = _FITTING.fullmatch(lowered)
    if match:
        return make_spec(ClassKind.FITTING_LENGTH, int(match.group(1)))
    kind = _ALIASES.get(lowered)
    if kind is None:
        raise ParseError("class spec", f"unknown class {raw!r}")
    return make_spec(kind)


# ----------------------------------------------------------------------
# Membership
# ----------------------------------------------------------------------


def _is_prime_power(n: int) -> bool:
    return n == 1 or len(factorint(n)) == 1


def nilpotent_by_sylow_counts(subgroup: ElementSet) -> bool:
    """Nilpotent iff for every p the p-elements number exactly |Sylow p|."""
    for p, e in factorint(subgroup.size).items():
        p_elements = np.count_nonzero(p_element_mask(subgroup.parent, p)[subgroup.members])
        if p_elements != p**e:
            return False
    return True


def fitting_length(group: FiniteGroup) -> int | None:
    """Length of the upper Fitting series, or None when the group is not soluble."""
    length = 0
    current = group
    while current.order > 1:
        fitting = SubgroupService.characteristic_structure(current, Characteristic.FITTING)
        if fitting.size == 1:
            return None
        current, _ = quotient(current, fitting)
        length += 1
    return length


def is_supersoluble(group: FiniteGroup) -> bool:
    """
    Every chief factor has prime order; cross-checked for small groups against
    the criterion that every maximal subgroup has prime index.
    """
    series = SubgroupService.chief_series(group)
    by_chief = all(isprime(upper.size // lower.size) for lower, upper in zip(series, series[1:]))
    if group.order <= SUPERSOLUBLE_CROSS_CHECK_ORDER and is_soluble(ElementSet.whole(group)):
        by_maximal = all(
            isprime(group.order // m.size) for m in SubgroupService.maximal_subgroups(group)
        )
        if by_maximal != by_chief:
            raise ShapeMismatch("supersolubility", "chief-factor and maximal-index criteria disagree")
    return by_chief


def member_of_subgroup(spec: ClassSpec, subgroup: ElementSet) -> bool:
    """
    Whether the subgroup ``subgroup`` of its parent lies in ``spec``.

    Raises:
        BudgetExceeded: From the forbidden-subgroup search
    """
    size = subgroup.size
    parent = subgroup.parent
    kind = spec.kind

    if kind is ClassKind.CYCLIC:
        return int(parent.elem_order[subgroup.members].max()) == size
    if kind is ClassKind.ONE_PRIME:
        return _is_prime_power(size)
    if kind is ClassKind.AT_MOST_TWO_PRIMES:
        return len(primefactors(size)) <= 2
    if kind is ClassKind.ABELIAN:
        return is_abelian(subgroup)
    if kind is ClassKind.NILPOTENT:
        return nilpotent_by_sylow_counts(subgroup)
    if kind is ClassKind.SOLUBLE:
        return is_soluble(subgroup)
    if kind is ClassKind.METABELIAN:
        return derived_subgroup(derived_subgroup(subgroup)).size == 1
    if kind is ClassKind.NILPOTENT_DERIVED:
        return nilpotent_by_sylow_counts(derived_subgroup(subgroup))

    standalone = subgroup_as_group(subgroup)
    if kind is ClassKind.SUPERSOLUBLE:
        return is_soluble(subgroup) and is_supersoluble(standalone)
    if kind is ClassKind.FITTING_LENGTH:
        length = fitting_length(standalone)
        return length is not None and length <= spec.parameter
    if kind is ClassKind.FORBIDDEN:
        return not any(has_subgroup_isomorphic(standalone, b) for b in spec.forbidden)
    return ClassService.f2_member(spec.base, standalone)


def subgroup_as_group(subgroup: ElementSet) -> FiniteGroup:
    if subgroup.size == subgroup.parent.order:
        return subgroup.parent
    return induced_group(subgroup)[0]


class MembershipOracle:
    """Memoized membership of subgroups of one parent group, keyed by member set."""

    def __init__(self, spec: ClassSpec, parent: FiniteGroup):
        self.spec = spec
        self.parent = parent
        self._memo: dict[int, list[tuple[np.ndarray, bool]]] = {}
        self.evaluations = 0

    def __call__(self, subgroup: ElementSet) -> bool:
        bucket = self._memo.setdefault(subgroup.key, [])
        for mask, verdict in bucket:
            if np.array_equal(mask, subgroup.mask):
                return verdict
        verdict = member_of_subgroup(self.spec, subgroup)
        bucket.append((subgroup.mask, verdict))
        self.evaluations += 1
        return verdict

    def pair(self, x: int, y: int) -> bool:
        """Whether <x, y> lies in the class."""
        return self(ElementSet.generated_by(self.parent, [x, y]))

    @property
    def memo_size(self) -> int:
        return sum(len(b) for b in self._memo.values())


class ClassService:
    """Service class for class membership questions."""

    @staticmethod
    def is_member(spec: ClassSpec, group: FiniteGroup) -> bool:
        """
        Membership verdict for a whole group.

        Args:
            spec: The class
            group: The group

        Returns:
            True iff the group lies in the class
        """
        return member_of_subgroup(spec, ElementSet.whole(group))

    @staticmethod
    def f2_member(spec: ClassSpec, group: FiniteGroup) -> bool:
        """
        Whether every 2-generated subgroup lies in ``spec``.

        Pairs run over class representatives x and C(x)-orbit
        representatives y; a group in the class is accepted at once.
        """
        oracle = MembershipOracle(spec, group)
        if oracle(ElementSet.whole(group)):
            return True
        for x in class_representatives(group):
            _, reps = centralizer_orbits(group, int(x))
            for y in reps:
                if not oracle.pair(int(x), int(y)):
                    return False
        return True

    @staticmethod
    def prime_profile(group: FiniteGroup) -> PrimeProfile:
        """pi(G) and the primes whose Sylow subgroups are cyclic or generalized quaternion."""
        pi = frozenset(primefactors(group.order))
        tilde = set()
        for p in pi:
            sylow = SubgroupService.sylow(group, p)
            orders = group.elem_order[sylow.members]
            if int(orders.max()) == sylow.size:
                tilde.add(p)
            elif p == 2 and int(np.count_nonzero(orders == 2)) == 1:
                tilde.add(p)
        return PrimeProfile(group=group, pi=pi, pi_tilde=frozenset(tilde))

    @staticmethod
    def two_recognizability_report(
        spec: ClassSpec, corpus: Iterable[tuple[str, FiniteGroup]]
    ) -> TwoRecognizabilityReport:
        """
        Record (is_member, f2_member) for each corpus group and flag members
        of the 2-generated closure that are not in the class.
        """
        entries = []
        for name, group in corpus:
            member = ClassService.is_member(spec, group)
            f2 = ClassService.f2_member(spec, group)
            entries.append(
                RecognizabilityEntry(
                    group=name,
                    order=group.order,
                    is_member=member,
                    f2_member=f2,
                    witness=f2 and not member,
                )
            )
        report = TwoRecognizabilityReport(spec=str(spec), entries=entries)
        logger.info("Two-recognizability report", spec=str(spec), witnesses=report.witnesses)
        return report
