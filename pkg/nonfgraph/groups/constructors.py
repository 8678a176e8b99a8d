"""
Group constructors.

Permutation closure, Cayley tables, direct and semidirect products,
quotients and induced subgroups. Every constructor indexes its elements
deterministically and keeps the identity at index 0.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from loguru import logger
from numpy.typing import NDArray

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import (
    CapExceeded,
    InvalidParameters,
    InvalidPermutation,
    NotAnAction,
    NotNormal,
)
from nonfgraph.groups.conjugacy import partition_from_edges
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup, IndexArray, MulFunction, Provenance
from nonfgraph.groups.homomorphism import Homomorphism, extend_to_homomorphism, spanning_layers


def _check_cap(order: int) -> None:
    if order > settings.ORDER_CAP:
        raise CapExceeded("group order", order, settings.ORDER_CAP)


def cyclic_group(n: int) -> FiniteGroup:
    """C_n with element k standing for the k-th power of the generator."""
    if n <= 0:
        raise InvalidParameters("cyclic group order must be positive", {"n": n})
    _check_cap(n)

    def mul(a: IndexArray, b: IndexArray) -> IndexArray:
        return (a + b) % n

    return FiniteGroup(
        n,
        mul=mul,
        generators=(1,) if n > 1 else (),
        provenance=Provenance(kind="cyclic", description=f"cyclic({n})"),
    )


def from_table(
    table: NDArray[np.integer],
    labels: Sequence[str] | None = None,
    description: str = "table",
) -> FiniteGroup:
    """Wrap a Cayley table; the caller decides whether to ``validate`` it."""
    table = np.asarray(table)
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise InvalidParameters("Cayley table must be square", {"shape": list(table.shape)})
    n = table.shape[0]
    if table.size and (table.min() < 0 or table.max() >= n):
        raise InvalidParameters("Cayley table entries out of range", {"order": n})
    _check_cap(n)
    return FiniteGroup(
        n, table=table, labels=labels, provenance=Provenance(kind="table", description=description)
    )


def _word_multiplier(
    rmul: list[IndexArray], parent: IndexArray, position: IndexArray
) -> tuple[NDArray[np.int16], MulFunction]:
    """Multiplication a*b evaluated by applying the spanning-tree word of b to a."""
    n = parent.size
    depth = np.zeros(n, dtype=np.int64)
    for b in range(1, n):
        depth[b] = depth[parent[b]] + 1
    words = np.full((n, int(depth.max()) + 1), -1, dtype=np.int16)
    for b in range(1, n):
        d = depth[b]
        words[b, : d - 1] = words[parent[b], : d - 1]
        words[b, d - 1] = position[b]
    stacked = np.stack(rmul)

    def mul(a: IndexArray, b: IndexArray) -> IndexArray:
        result = np.array(a, dtype=np.int64)
        letters = words[b]
        for column in range(letters.shape[1]):
            step = letters[:, column]
            active = step >= 0
            if not active.any():
                break
            result[active] = stacked[step[active], result[active]]
        return result

    return words, mul


def from_permutation_generators(
    gens: Sequence[Sequence[int]],
    degree: int,
    labels: bool = False,
) -> FiniteGroup:
    """
    The group generated by permutations of {0..degree-1}.

    Elements are discovered breadth-first from the identity, applying the
    generators in input order; the product p*q applies p first.

    Args:
        gens: Permutations in image form (gens[k][x] is the image of x)
        degree: Number of points
        labels: Attach cycle-notation labels to the elements

    Returns:
        The generated group with provenance kind "permutation"

    Raises:
        InvalidPermutation: If a generator is not a bijection of the points
        CapExceeded: If the closure passes the order cap
    """
    perms: list[NDArray[np.int64]] = []
    identity = np.arange(degree, dtype=np.int64)
    for position, g in enumerate(gens):
        arr = np.asarray(g, dtype=np.int64)
        if arr.shape != (degree,) or not np.array_equal(np.sort(arr), identity):
            raise InvalidPermutation(position, degree)
        perms.append(arr)

    cap = settings.ORDER_CAP
    elements = [identity]
    index = {identity.tobytes(): 0}
    parent = [0]
    position_of = [-1]
    rmul: list[list[int]] = [[] for _ in perms]
    i = 0
    while i < len(elements):
        p = elements[i]
        for k, s in enumerate(perms):
            q = s[p]
            key = q.tobytes()
            j = index.get(key)
            if j is None:
                j = len(elements)
                if j >= cap:
                    raise CapExceeded("permutation closure", j + 1, cap)
                index[key] = j
                elements.append(q)
                parent.append(i)
                position_of.append(k)
            rmul[k].append(j)
        i += 1

    n = len(elements)
    rmul_arrays = [np.asarray(r, dtype=np.int64) for r in rmul]
    parent_arr = np.asarray(parent, dtype=np.int64)
    position_arr = np.asarray(position_of, dtype=np.int64)
    generators = [int(r[0]) for r in rmul_arrays]
    points = np.stack(elements)
    provenance = Provenance(
        kind="permutation",
        description=f"permutation group of degree {degree}",
        data={"degree": degree, "generators": [p.tolist() for p in perms], "points": points},
    )
    element_labels = None
    if labels:
        from sympy.combinatorics import Permutation

        element_labels = [str(Permutation(p.tolist())) for p in elements]

    if n <= settings.DENSE_TABLE_CAP:
        table = np.empty((n, n), dtype=np.int32)
        table[:, 0] = np.arange(n)
        for b in range(1, n):
            table[:, b] = rmul_arrays[position_arr[b]][table[:, parent_arr[b]]]
        group = FiniteGroup(
            n, table=table, generators=generators, labels=element_labels, provenance=provenance
        )
    else:
        _, mul = _word_multiplier(rmul_arrays, parent_arr, position_arr)
        group = FiniteGroup(
            n, mul=mul, generators=generators, labels=element_labels, provenance=provenance
        )
        for r in rmul_arrays:
            group.cache[("rmul", int(r[0]))] = r
    logger.debug("Permutation closure finished", degree=degree, order=n)
    return group


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    """G1 x G2 with (a, b) at index a*|G2| + b."""
    n1, n2 = g1.order, g2.order
    _check_cap(n1 * n2)

    def mul(a: IndexArray, b: IndexArray) -> IndexArray:
        left = g1.mul_arrays(a // n2, b // n2)
        right = g2.mul_arrays(a % n2, b % n2)
        return left * n2 + right

    generators = [g * n2 for g in g1.generators] + list(g2.generators)
    return FiniteGroup(
        n1 * n2,
        mul=mul,
        generators=generators,
        provenance=Provenance(
            kind="direct",
            description=f"{g1.provenance.description} x {g2.provenance.description}",
            factors=(g1, g2),
            embeddings={
                "left": np.arange(n1, dtype=np.int64) * n2,
                "right": np.arange(n2, dtype=np.int64),
            },
        ),
    )


def action_from_generators(
    n_group: FiniteGroup,
    h_group: FiniteGroup,
    generator_automorphisms: Sequence[IndexArray],
) -> NDArray[np.int64]:
    """
    Extend automorphisms given on H's generators to a full action table.

    Args:
        n_group: The group acted on
        h_group: The acting group
        generator_automorphisms: Index maps of N, one per generator of H

    Returns:
        Array of shape (|H|, |N|) with action[h][x] the image of x under h

    Raises:
        NotAnAction: If the assignment does not respect H's relations
    """
    autos = [np.asarray(a, dtype=np.int64) for a in generator_automorphisms]
    if len(autos) != len(h_group.generators):
        raise NotAnAction("one automorphism per generator of H is required")
    action = np.empty((h_group.order, n_group.order), dtype=np.int64)
    action[0] = n_group.elements
    stacked = np.stack(autos) if autos else np.empty((0, n_group.order), dtype=np.int64)
    for nodes, parents, positions in spanning_layers(h_group):
        # action[parent * s] = action[parent] o action[s]
        action[nodes] = np.take_along_axis(action[parents], stacked[positions], axis=1)
    return action


def _check_action(n_group: FiniteGroup, h_group: FiniteGroup, action: NDArray[np.int64]) -> None:
    if action.shape != (h_group.order, n_group.order):
        raise NotAnAction("action table has the wrong shape")
    if not np.array_equal(action[0], n_group.elements):
        raise NotAnAction("identity of H does not act trivially", element=0)
    if not np.all(action[:, 0] == 0):
        raise NotAnAction("an automorphism moves the identity")
    sorted_rows = np.sort(action, axis=1)
    bad = np.flatnonzero(~np.all(sorted_rows == n_group.elements, axis=1))
    if bad.size:
        raise NotAnAction("map is not a bijection of N", element=int(bad[0]))

    n_gens = np.asarray(n_group.generators, dtype=np.int64)
    for g in n_gens:
        # action[h](x g) = action[h](x) action[h](g)
        left = action[:, n_group.right_multiplication(int(g))]
        right = n_group.mul_arrays(action, action[:, g][:, None])
        bad = np.flatnonzero(~np.all(left == right, axis=1))
        if bad.size:
            raise NotAnAction("map does not preserve the multiplication of N", element=int(bad[0]))

    if n_gens.size:
        for s in h_group.generators:
            left = action[h_group.right_multiplication(s)][:, n_gens]
            right = action[:, action[s, n_gens]]
            bad = np.flatnonzero(~np.all(left == right, axis=1))
            if bad.size:
                raise NotAnAction("action[h s] differs from action[h] o action[s]", element=int(bad[0]))


def semidirect_product(
    n_group: FiniteGroup,
    h_group: FiniteGroup,
    action: NDArray[np.int64],
    description: str | None = None,
) -> FiniteGroup:
    """
    N x| H on pairs (n, h) with (n1, h1)(n2, h2) = (n1 * action[h1](n2), h1 h2).

    The pair (n, h) sits at index n*|H| + h.

    Raises:
        NotAnAction: If ``action`` is not a homomorphism H -> Aut(N)
        CapExceeded: If |N||H| passes the order cap
    """
    nn, nh = n_group.order, h_group.order
    _check_cap(nn * nh)
    action = np.asarray(action, dtype=np.int64)
    _check_action(n_group, h_group, action)

    def mul(a: IndexArray, b: IndexArray) -> IndexArray:
        n1, h1 = np.divmod(a, nh)
        n2, h2 = np.divmod(b, nh)
        first = n_group.mul_arrays(n1, action[h1, n2])
        return first * nh + h_group.mul_arrays(h1, h2)

    generators = [g * nh for g in n_group.generators] + list(h_group.generators)
    return FiniteGroup(
        nn * nh,
        mul=mul,
        generators=generators,
        provenance=Provenance(
            kind="semidirect",
            description=description
            or f"{n_group.provenance.description} x| {h_group.provenance.description}",
            factors=(n_group, h_group),
            embeddings={
                "N": np.arange(nn, dtype=np.int64) * nh,
                "H": np.arange(nh, dtype=np.int64),
            },
            data={"action": action},
        ),
    )


def quotient(group: FiniteGroup, normal: ElementSet) -> tuple[FiniteGroup, Homomorphism]:
    """
    G/N with cosets numbered in increasing order of their smallest element.

    Raises:
        NotNormal: If N is not normal in G, naming a conjugating generator
    """
    if not normal.is_normal:
        witness = normal.normalizing_witness()
        raise NotNormal(normal.size, -1 if witness is None else int(witness))

    elems = group.elements
    n_gens = normal.generators
    if n_gens:
        sources = np.concatenate([elems] * len(n_gens))
        targets = np.concatenate([group.right_multiplication(g) for g in n_gens])
        labels = partition_from_edges(group.order, sources, targets)
    else:
        labels = elems.copy()

    size = int(labels.max()) + 1
    reps = np.full(size, group.order, dtype=np.int64)
    np.minimum.at(reps, labels, elems)

    def mul(a: IndexArray, b: IndexArray) -> IndexArray:
        return labels[group.mul_arrays(reps[a], reps[b])]

    generators = sorted({int(labels[g]) for g in group.generators} - {0})
    factor = FiniteGroup(
        size,
        mul=mul,
        generators=generators,
        provenance=Provenance(
            kind="quotient",
            description=f"quotient of order {size}",
            factors=(group,),
            embeddings={"representatives": reps},
        ),
    )
    return factor, Homomorphism(group, factor, labels)


def induced_group(subgroup: ElementSet) -> tuple[FiniteGroup, IndexArray]:
    """
    A subgroup as a standalone group, members reindexed in increasing parent order.

    Returns:
        Tuple of (group, members) where members[i] is the parent index of element i
    """
    if not subgroup.is_subgroup:
        raise InvalidParameters("induced_group needs a subgroup", {"size": subgroup.size})
    parent = subgroup.parent
    members = subgroup.members
    position = np.full(parent.order, -1, dtype=np.int64)
    position[members] = np.arange(members.size)

    def mul(a: IndexArray, b: IndexArray) -> IndexArray:
        return position[parent.mul_arrays(members[a], members[b])]

    labels = [parent.label(int(x)) for x in members] if parent.labels is not None else None
    group = FiniteGroup(
        members.size,
        mul=mul,
        generators=[int(position[g]) for g in subgroup.generators],
        labels=labels,
        provenance=Provenance(
            kind="induced",
            description=f"subgroup of order {members.size}",
            factors=(parent,),
            embeddings={"parent": members},
        ),
    )
    return group, members


def automorphism_from_images(group: FiniteGroup, images: Sequence[int]) -> IndexArray:
    """
    The automorphism of ``group`` sending its generators to ``images``.

    Raises:
        NotAnAction: If the assignment is not a bijective homomorphism
    """
    mapping = extend_to_homomorphism(group, images, group)
    if mapping is None:
        raise NotAnAction("generator images do not define an endomorphism")
    if np.unique(mapping).size != group.order:
        raise NotAnAction("generator images do not define a bijection")
    return mapping


def conjugation_action(group: FiniteGroup, normal: ElementSet, acting: Sequence[int]) -> list[IndexArray]:
    """Index maps on ``normal``'s members for x -> g x g^-1, one per element g of ``acting``."""
    members = normal.members
    position = np.full(group.order, -1, dtype=np.int64)
    position[members] = np.arange(members.size)
    maps = []
    for g in acting:
        images = group.mul_arrays(group.mul_arrays(g, members), group.inv[g])
        maps.append(position[images])
    return maps
