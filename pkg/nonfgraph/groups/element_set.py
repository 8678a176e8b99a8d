"""
Dense index sets over a parent group.

ElementSet is the carrier for subgroups, normal subgroups, isolated sets and
graph vertex sets. Members are a boolean mask over the parent's indices.
"""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Sequence
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray

if TYPE_CHECKING:
    from nonfgraph.groups.finite_group import FiniteGroup, IndexArray


class ElementSet:
    """A set of element indices of ``parent`` with cached subgroup/normality flags."""

    def __init__(
        self,
        parent: FiniteGroup,
        mask: NDArray[np.bool_],
        generators: Sequence[int] | None = None,
    ):
        if mask.shape != (parent.order,):
            raise ValueError("mask does not match the parent order")
        self.parent = parent
        self.mask = mask
        self._generators = tuple(int(g) for g in generators) if generators is not None else None

    @classmethod
    def from_indices(cls, parent: FiniteGroup, indices: Iterable[int]) -> ElementSet:
        mask = np.zeros(parent.order, dtype=bool)
        mask[np.fromiter(indices, dtype=np.int64)] = True
        return cls(parent, mask)

    @classmethod
    def whole(cls, parent: FiniteGroup) -> ElementSet:
        return cls(parent, np.ones(parent.order, dtype=bool), generators=parent.generators)

    @classmethod
    def trivial(cls, parent: FiniteGroup) -> ElementSet:
        mask = np.zeros(parent.order, dtype=bool)
        mask[0] = True
        return cls(parent, mask, generators=())

    @classmethod
    def generated_by(cls, parent: FiniteGroup, gens: Sequence[int]) -> ElementSet:
        """The subgroup generated by ``gens``."""
        gens = [int(g) for g in gens]
        return cls(parent, parent.closure_mask(gens), generators=gens)

    # ------------------------------------------------------------------
    # Set behaviour
    # ------------------------------------------------------------------

    @cached_property
    def members(self) -> IndexArray:
        return np.flatnonzero(self.mask).astype(np.int64)

    @cached_property
    def size(self) -> int:
        return int(self.mask.sum())

    @cached_property
    def key(self) -> int:
        """64-bit hash of the member set; collisions are resolved by mask comparison."""
        digest = hashlib.blake2b(np.packbits(self.mask).tobytes(), digest_size=8).digest()
        return int.from_bytes(digest, "little")

    def __len__(self) -> int:
        return self.size

    def __contains__(self, x: int) -> bool:
        return bool(self.mask[x])

    def __iter__(self):
        return iter(self.members.tolist())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ElementSet):
            return NotImplemented
        return (
            self.parent is other.parent
            and self.key == other.key
            and np.array_equal(self.mask, other.mask)
        )

    def __hash__(self) -> int:
        return self.key

    def __repr__(self) -> str:
        return f"ElementSet(size={self.size}, parent_order={self.parent.order})"

    def issubset(self, other: ElementSet) -> bool:
        return not np.any(self.mask & ~other.mask)

    def intersection(self, other: ElementSet) -> ElementSet:
        return ElementSet(self.parent, self.mask & other.mask)

    def union(self, other: ElementSet) -> ElementSet:
        return ElementSet(self.parent, self.mask | other.mask)

    def difference(self, other: ElementSet) -> ElementSet:
        return ElementSet(self.parent, self.mask & ~other.mask)

    def sort_key(self) -> tuple[int, int]:
        """Canonical order: by size, then by the smallest non-identity member."""
        rest = self.members[self.members != 0]
        return (self.size, int(rest[0]) if rest.size else 0)

    # ------------------------------------------------------------------
    # Subgroup structure
    # ------------------------------------------------------------------

    @cached_property
    def _generation(self) -> tuple[bool, tuple[int, ...]]:
        """Greedy generating set; the flag is False as soon as a closure leaves the set."""
        if not self.mask[0]:
            return False, ()
        if self._generators is not None:
            if np.array_equal(self.parent.closure_mask(self._generators), self.mask):
                return True, self._generators
        orders = self.parent.elem_order[self.members]
        candidates = self.members[np.lexsort((self.members, -orders))]
        gens: list[int] = []
        reached = np.zeros(self.parent.order, dtype=bool)
        reached[0] = True
        for x in candidates:
            if reached[x]:
                continue
            gens.append(int(x))
            reached = self.parent.closure_mask(gens, seed=reached)
            if np.any(reached & ~self.mask):
                return False, tuple(gens)
        return True, tuple(gens)

    @property
    def is_subgroup(self) -> bool:
        return self._generation[0]

    @property
    def generators(self) -> tuple[int, ...]:
        """A generating set of the subgroup (greedy, highest element orders first)."""
        return self._generation[1]

    @cached_property
    def is_normal(self) -> bool:
        """Normal in the parent: closed under conjugation by the parent's generators."""
        if not self.is_subgroup:
            return False
        gens = np.asarray(self.generators, dtype=np.int64)
        if gens.size == 0:
            return True
        for g in self.parent.generators:
            if not self.mask[self.parent.conjugate_arrays(gens, g)].all():
                return False
        return True

    def normalizing_witness(self) -> int | None:
        """A parent generator that does not normalize the set, if any."""
        gens = np.asarray(self.generators, dtype=np.int64)
        for g in self.parent.generators:
            if gens.size and not self.mask[self.parent.conjugate_arrays(gens, g)].all():
                return g
        return None
