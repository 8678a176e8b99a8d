"""
Homomorphisms between explicit groups.

A homomorphism is stored as an index map from source to target. Maps are
built by evaluating generator images along a breadth-first spanning tree of
the source and then checking every Cayley edge.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from nonfgraph.core.exceptions import InvalidParameters
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup, IndexArray

Layer = tuple[IndexArray, IndexArray, IndexArray]


def spanning_layers(group: FiniteGroup, gens: Sequence[int] | None = None) -> list[Layer]:
    """
    Breadth-first spanning tree of the Cayley graph under right multiplication.

    Args:
        group: The group to traverse
        gens: Generators to multiply by, defaults to the group's own

    Returns:
        One (nodes, parents, generator positions) triple per layer below the
        identity, where node = parent * gens[position]
    """
    gens = tuple(int(g) for g in (group.generators if gens is None else gens))
    key = ("spanning", gens)
    cached = group.cache.get(key)
    if cached is not None:
        return cached

    seen = np.zeros(group.order, dtype=bool)
    seen[0] = True
    frontier = np.zeros(1, dtype=np.int64)
    layers: list[Layer] = []
    while frontier.size:
        nodes, parents, positions = [], [], []
        for k, s in enumerate(gens):
            candidates = group.right_multiplication(s)[frontier]
            fresh = ~seen[candidates]
            uniq, first = np.unique(candidates[fresh], return_index=True)
            seen[uniq] = True
            nodes.append(uniq)
            parents.append(frontier[fresh][first])
            positions.append(np.full(uniq.size, k, dtype=np.int64))
        frontier = np.concatenate(nodes)
        if frontier.size:
            layers.append((frontier, np.concatenate(parents), np.concatenate(positions)))

    if int(seen.sum()) != group.order:
        raise InvalidParameters(
            "generators do not generate the group",
            {"reached": int(seen.sum()), "order": group.order},
        )
    group.cache[key] = layers
    return layers


def extend_to_homomorphism(
    source: FiniteGroup,
    images: Sequence[int] | IndexArray,
    target: FiniteGroup,
    gens: Sequence[int] | None = None,
) -> IndexArray | None:
    """
    The homomorphism sending ``gens`` to ``images``, if one exists.

    Args:
        source: Domain group
        images: Target indices, one per generator
        target: Codomain group
        gens: Generators of the source, defaults to ``source.generators``

    Returns:
        Index map source -> target, or None when the assignment does not
        respect every Cayley edge
    """
    gens = tuple(int(g) for g in (source.generators if gens is None else gens))
    images = np.asarray(images, dtype=np.int64)
    if images.shape != (len(gens),):
        raise InvalidParameters(
            "one image per generator is required",
            {"generators": len(gens), "images": int(images.size)},
        )

    image = np.zeros(source.order, dtype=np.int64)
    for nodes, parents, positions in spanning_layers(source, gens):
        image[nodes] = target.mul_arrays(image[parents], images[positions])

    for k, s in enumerate(gens):
        if not np.array_equal(
            image[source.right_multiplication(s)], target.mul_arrays(image, images[k])
        ):
            return None
    return image


@dataclass(frozen=True)
class Homomorphism:
    """A group homomorphism stored as an index map."""

    source: FiniteGroup
    target: FiniteGroup
    map: IndexArray

    @cached_property
    def kernel(self) -> ElementSet:
        return ElementSet(self.source, self.map == 0)

    @cached_property
    def image(self) -> ElementSet:
        mask = np.zeros(self.target.order, dtype=bool)
        mask[self.map] = True
        return ElementSet(self.target, mask)

    @property
    def is_surjective(self) -> bool:
        return self.image.size == self.target.order

    def __call__(self, x: int) -> int:
        return int(self.map[x])

    def preimage(self, subset: ElementSet) -> ElementSet:
        """The full preimage of a subset of the target."""
        return ElementSet(self.source, subset.mask[self.map])

    def check(self) -> bool:
        """Verify map[x*s] = map[x]*map[s] for every element x and source generator s."""
        for s in self.source.generators:
            left = self.map[self.source.right_multiplication(s)]
            right = self.target.mul_arrays(self.map, self.map[s])
            if not np.array_equal(left, right):
                return False
        return True
