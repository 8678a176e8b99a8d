"""
Built-in group families and the verification corpus.

Family specs are written ``name(args)`` and may be joined with ``*`` for
direct products, e.g. ``symmetric(3)*cyclic(5)``. The two worked examples
carry their named subgroups in the provenance record.
"""

from __future__ import annotations

import math
import re
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from loguru import logger
from numpy.typing import NDArray
from sympy import isprime

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import CapExceeded, InvalidParameters, ParseError, ShapeMismatch
from nonfgraph.groups.conjugacy import conjugates
from nonfgraph.groups.constructors import (
    action_from_generators,
    automorphism_from_images,
    cyclic_group,
    direct_product,
    from_permutation_generators,
    induced_group,
    semidirect_product,
)
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup, Provenance
from nonfgraph.services.modules import (
    all_vectors,
    build_module_action,
    direct_sum_matrices,
    matrix_action,
    matrix_group,
    vector_indices,
    vector_space_group,
)

FAMILY_PATTERN = re.compile(r"^\s*([a-z][a-z0-9_]*)\s*(?:\(([^()]*)\))?\s*$")
EXAMPLE2_ORDER = 49 * 64 * 8 * 3
PERMUTATION_DEGREE_LIMIT = 6


@dataclass(frozen=True)
class Family:
    """A named family: parameter count, builder and order formula."""

    name: str
    signature: str
    arity: int
    builder: Callable[..., FiniteGroup]
    order: Callable[..., int]
    summary: str = ""


# ----------------------------------------------------------------------
# Small families
# ----------------------------------------------------------------------


def _cycles_image(degree: int, *cycles: tuple[int, ...]) -> list[int]:
    image = list(range(degree))
    for cycle in cycles:
        for k, point in enumerate(cycle):
            image[point] = cycle[(k + 1) % len(cycle)]
    return image


def semidirect_cyclic(n: int, m: int, r: int) -> FiniteGroup:
    """C_n x| C_m with the generator of C_m acting by x -> x^r."""
    if n <= 0 or m <= 0:
        raise InvalidParameters("semidirect_cyclic needs positive orders", {"n": n, "m": m})
    if math.gcd(r, n) != 1 or pow(r, m, n) != 1 % n:
        raise InvalidParameters("r must be a unit with r^m = 1 mod n", {"n": n, "m": m, "r": r})
    base, top = cyclic_group(n), cyclic_group(m)
    autos = [(np.arange(n, dtype=np.int64) * r) % n for _ in top.generators]
    action = action_from_generators(base, top, autos)
    return semidirect_product(base, top, action, description=f"semidirect_cyclic({n},{m},{r})")


def dihedral(n: int) -> FiniteGroup:
    """The dihedral group of order 2n."""
    if n <= 0:
        raise InvalidParameters("dihedral needs n >= 1", {"n": n})
    group = semidirect_cyclic(n, 2, n - 1)
    group.provenance.description = f"dihedral({n})"
    return group


def generalized_quaternion(order: int) -> FiniteGroup:
    """
    Q_{2^k} = <x, y | x^(2^(k-1)) = 1, y^2 = x^(2^(k-2)), x^y = x^-1>.

    The element x^i y^s sits at index 2i + s.
    """
    if order < 8 or order & (order - 1):
        raise InvalidParameters("generalized_quaternion needs a power of two, at least 8", {"order": order})
    n = order // 2

    def mul(a: NDArray[np.int64], b: NDArray[np.int64]) -> NDArray[np.int64]:
        i, s = np.divmod(a, 2)
        j, t = np.divmod(b, 2)
        exponent = i + np.where(s == 1, -j, j) + np.where(s + t == 2, n // 2, 0)
        return (exponent % n) * 2 + (s + t) % 2

    return FiniteGroup(
        order,
        mul=mul,
        generators=(2, 1),
        provenance=Provenance(kind="quaternion", description=f"generalized_quaternion({order})"),
    )


def symmetric(n: int) -> FiniteGroup:
    if not 1 <= n <= PERMUTATION_DEGREE_LIMIT:
        raise InvalidParameters("symmetric needs 1 <= n <= 6", {"n": n})
    gens = [_cycles_image(n, (0, 1)), _cycles_image(n, tuple(range(n)))] if n > 1 else []
    group = from_permutation_generators(gens, n)
    group.provenance.description = f"symmetric({n})"
    return group


def alternating(n: int) -> FiniteGroup:
    if not 1 <= n <= PERMUTATION_DEGREE_LIMIT:
        raise InvalidParameters("alternating needs 1 <= n <= 6", {"n": n})
    gens = [_cycles_image(n, (0, 1, i)) for i in range(2, n)]
    group = from_permutation_generators(gens, n)
    group.provenance.description = f"alternating({n})"
    return group


def elementary_abelian(p: int, k: int) -> FiniteGroup:
    if not isprime(p) or k < 1:
        raise InvalidParameters("elementary_abelian needs a prime and k >= 1", {"p": p, "k": k})
    return vector_space_group(p, k)


def sylow2_sym8() -> FiniteGroup:
    """A Sylow 2-subgroup of Sym(8), the iterated wreath product C2 wr C2 wr C2."""
    gens = [
        _cycles_image(8, (0, 1)),
        _cycles_image(8, (0, 2), (1, 3)),
        _cycles_image(8, (0, 4), (1, 5), (2, 6), (3, 7)),
    ]
    group = from_permutation_generators(gens, 8)
    group.provenance.description = "sylow2_sym8"
    return group


def affine_sym3(p: int) -> FiniteGroup:
    """(C_p x C_p) x| Sym(3) through the two-dimensional reflection representation."""
    if not isprime(p):
        raise InvalidParameters("affine_sym3 needs a prime", {"p": p})
    swap = np.array([[0, 1], [1, 0]])
    rotation = np.array([[0, -1], [1, -1]]) % p
    top, mats = matrix_group([swap, rotation], p)
    action, _ = build_module_action(top, p, 2, mats)
    return semidirect_product(vector_space_group(p, 2), top, action, description=f"affine_sym3({p})")


# ----------------------------------------------------------------------
# Worked examples
# ----------------------------------------------------------------------


def quaternion_matrices(p: int) -> list[NDArray[np.int64]]:
    """i and j of the faithful two-dimensional representation of Q8 over GF(p), p odd."""
    for a in range(p):
        for b in range(p):
            if (a * a + b * b + 1) % p == 0:
                i = np.array([[0, -1], [1, 0]]) % p
                j = np.array([[a, b], [b, -a]]) % p
                return [i, j]
    raise InvalidParameters("no solution of a^2 + b^2 = -1", {"p": p})


def _mask(order: int, indices: NDArray[np.integer]) -> NDArray[np.bool_]:
    mask = np.zeros(order, dtype=bool)
    mask[np.asarray(indices, dtype=np.int64)] = True
    return mask


def example1_inner(p: int) -> FiniteGroup:
    """
    X = (V1 x V2 x V3) x| Q with V the faithful irreducible Q8-module of dimension 2 over GF(p).

    Provenance names: T = V1 x V2 x V3, V1, V2, V3, Q and F = Frat(Q).
    """
    if p == 2 or not isprime(p):
        raise InvalidParameters("example1_inner needs an odd prime", {"p": p})
    q_group, q_mats = matrix_group(quaternion_matrices(p), p)
    if q_group.order != 8:
        raise ShapeMismatch("example1_inner", "quaternion matrices do not generate Q8", {"order": q_group.order})
    _, module = build_module_action(q_group, p, 2, q_mats)
    if not (module.irreducible and module.faithful):
        raise ShapeMismatch("example1_inner", "Q8 module is not faithful irreducible")

    action = matrix_action(direct_sum_matrices(module.matrices, 3), p)
    group = semidirect_product(vector_space_group(p, 6), q_group, action, description=f"example1_inner({p})")

    order, nh = group.order, q_group.order
    vectors = all_vectors(p, 6)
    named = {"T": _mask(order, np.arange(p**6) * nh), "Q": _mask(order, np.arange(nh))}
    for k in range(3):
        outside = np.delete(vectors, [2 * k, 2 * k + 1], axis=1)
        support = np.flatnonzero(~outside.any(axis=1))
        named[f"V{k + 1}"] = _mask(order, support * nh)
    minus_one = np.flatnonzero(np.all(module.matrices == (p - 1) * np.eye(2, dtype=np.int64), axis=(1, 2)))
    named["F"] = _mask(order, np.concatenate([[0], minus_one]))
    group.provenance.named.update(named)
    group.provenance.data["module"] = module
    logger.info("Built scaled first example", p=p, order=order)
    return group


def _commuting_order_three(
    current: list[NDArray[np.int64]], target: list[NDArray[np.int64]], p: int
) -> NDArray[np.int64]:
    """
    The first R in GL(2, p) (entry order) with R M = M' R on each pair, R^3 = 1
    and a nonzero fixed vector.
    """
    grid = all_vectors(p, 4).reshape(-1, 2, 2)
    ok = np.ones(grid.shape[0], dtype=bool)
    for m, image in zip(current, target):
        ok &= np.all((grid @ m) % p == (image @ grid) % p, axis=(1, 2))
    cube = np.linalg.matrix_power(grid, 3) % p
    ok &= np.all(cube == np.eye(2, dtype=np.int64), axis=(1, 2))
    ok &= ~np.all(grid == np.eye(2, dtype=np.int64), axis=(1, 2))
    for index in np.flatnonzero(ok):
        candidate = grid[index]
        shifted = candidate - np.eye(2, dtype=np.int64)
        if (shifted[0, 0] * shifted[1, 1] - shifted[0, 1] * shifted[1, 0]) % p == 0:
            return candidate
    raise ShapeMismatch("example2", "no order-3 intertwiner with a fixed vector")


def example2() -> FiniteGroup:
    """
    G = W x| X with X = (A x Q) x| H.

    A = C8 x C8, Q = Q8 acting fixed-point-freely on W = C7 x C7, H = C3
    cycling the generators of both A and Q, A acting trivially on W and
    C_W(H) = Z of order 7. Provenance names: A, Q, H, W, Z, c, M0, M1, B, C,
    Frat(A), I, Omega_B, Omega_C; the forbidden groups B and C are also kept
    as standalone groups.
    """
    p = 7
    quaternion = quaternion_matrices(p)
    q_group, q_mats = matrix_group(quaternion, p)
    b1, b2 = q_group.generators
    phi_q = automorphism_from_images(q_group, [b2, q_group.mul(b1, b2)])

    a_group = direct_product(cyclic_group(8), cyclic_group(8))
    a1, a2 = a_group.generators
    inverse_product = int(a_group.inv[a_group.mul(a1, a2)])
    phi_a = automorphism_from_images(a_group, [a2, inverse_product])

    m0 = direct_product(a_group, q_group)
    nq = q_group.order
    images = [int(phi_a[g]) * nq for g in a_group.generators] + [int(phi_q[g]) for g in q_group.generators]
    h_group = cyclic_group(3)
    action_x = action_from_generators(m0, h_group, [automorphism_from_images(m0, images)])
    x_group = semidirect_product(m0, h_group, action_x, description="example2 X")

    # Q's matrices on W and an order-3 R intertwining them with their images under phi
    rotation = _commuting_order_three(
        [q_mats[0], q_mats[1]],
        [q_mats[1], (q_mats[0] @ q_mats[1]) % p],
        p,
    )
    identity = np.eye(2, dtype=np.int64)
    generator_matrices = []
    for g in x_group.generators:
        m, h = divmod(g, 3)
        if h:
            generator_matrices.append(rotation)
        elif m % nq:
            generator_matrices.append(q_mats[q_group.generators.index(m % nq)])
        else:
            generator_matrices.append(identity)
    action_w, module = build_module_action(x_group, p, 2, generator_matrices)
    group = semidirect_product(vector_space_group(p, 2), x_group, action_w, description="example2")
    if group.order != EXAMPLE2_ORDER:
        raise ShapeMismatch("example2", "unexpected order", {"order": group.order})

    nx = x_group.order

    def x_index(a: int, q: int, h: int = 0) -> int:
        return (a * nq + q) * 3 + h

    def closure(gens: list[int]) -> ElementSet:
        return ElementSet.generated_by(group, gens)

    w_gens = [int(g) * nx for g in (1, p)]
    a_gens = [x_index(int(a), 0) for a in (a1, a2)]
    q_gens = [x_index(0, int(b)) for b in (b1, b2)]
    h_gen = x_index(0, 0, 1)
    c = x_index(0, q_group.mul(b1, b1))
    frat_gens = [x_index(int(a_group.power(a, 2)), 0) for a in (a1, a2)]
    vectors = all_vectors(p, 2)
    fixed = np.flatnonzero(np.all((vectors @ rotation.T) % p == vectors, axis=1))
    z_gens = [int(v) * nx for v in vector_indices(vectors[fixed], p) if v]

    pieces = {
        "W": closure(w_gens),
        "A": closure(a_gens),
        "Q": closure(q_gens),
        "H": closure([h_gen]),
        "c": closure([c]),
        "Z": closure(z_gens),
        "Frat(A)": closure(frat_gens),
        "M0": closure(a_gens + q_gens),
        "M1": closure(a_gens + [c, h_gen]),
        "B": closure(z_gens + a_gens + [h_gen]),
        "C": closure(w_gens + [group.mul(a_gens[0], q_gens[0]), q_gens[1]]),
        "I": closure(w_gens + frat_gens + [c]),
    }
    expected = {"W": 49, "A": 64, "Q": 8, "H": 3, "c": 2, "Z": 7, "Frat(A)": 16, "M0": 512,
                "M1": 384, "B": 1344, "C": 1568, "I": 1568}
    for name, size in expected.items():
        if pieces[name].size != size:
            raise ShapeMismatch("example2", f"{name} has order {pieces[name].size}, expected {size}")

    wm1 = closure(w_gens + a_gens + [c, h_gen])
    omega_b = np.zeros(group.order, dtype=bool)
    for conjugate in conjugates(group, wm1):
        omega_b |= conjugate.mask
    omega_b &= ~pieces["I"].mask
    omega_c = closure(w_gens + a_gens + q_gens).mask & ~closure(w_gens + a_gens + [c]).mask

    provenance = group.provenance
    provenance.named.update({name: piece.mask for name, piece in pieces.items()})
    provenance.named["Omega_B"] = omega_b
    provenance.named["Omega_C"] = omega_c
    provenance.named_groups["B"] = induced_group(pieces["B"])[0]
    provenance.named_groups["C"] = induced_group(pieces["C"])[0]
    provenance.data["module"] = module
    provenance.notes.append("H acts on W with fixed points Z; A centralizes W")
    logger.info("Built second example", order=group.order, fixed_points=int(fixed.size))
    return group


# ----------------------------------------------------------------------
# Registry, parser and corpus
# ----------------------------------------------------------------------


FAMILIES: dict[str, Family] = {
    f.name: f
    for f in (
        Family("cyclic", "cyclic(n)", 1, cyclic_group, lambda n: n, "cyclic group of order n"),
        Family("dihedral", "dihedral(n)", 1, dihedral, lambda n: 2 * n, "dihedral group of order 2n"),
        Family(
            "generalized_quaternion", "generalized_quaternion(2^k)", 1, generalized_quaternion,
            lambda order: order, "generalized quaternion group of the given order",
        ),
        Family("symmetric", "symmetric(n)", 1, symmetric, math.factorial, "Sym(n), n <= 6"),
        Family(
            "alternating", "alternating(n)", 1, alternating,
            lambda n: max(1, math.factorial(n) // 2), "Alt(n), n <= 6",
        ),
        Family("elementary_abelian", "elementary_abelian(p,k)", 2, elementary_abelian, lambda p, k: p**k, "(C_p)^k"),
        Family("sylow2_sym8", "sylow2_sym8", 0, sylow2_sym8, lambda: 128, "Sylow 2-subgroup of Sym(8)"),
        Family(
            "semidirect_cyclic", "semidirect_cyclic(n,m,r)", 3, semidirect_cyclic,
            lambda n, m, r: n * m, "C_n x| C_m acting by x -> x^r",
        ),
        Family("affine_sym3", "affine_sym3(p)", 1, affine_sym3, lambda p: 6 * p * p, "(C_p)^2 x| Sym(3)"),
        Family(
            "example1_inner", "example1_inner(p)", 1, example1_inner,
            lambda p: 8 * p**6, "(V1 x V2 x V3) x| Q8 over GF(p)",
        ),
        Family("example2", "example2", 0, example2, lambda: EXAMPLE2_ORDER, "W x| ((A x Q) x| H), order 75264"),
    )
}


def _parse_factor(text: str) -> tuple[Family, tuple[int, ...]]:
    match = FAMILY_PATTERN.match(text)
    if match is None:
        raise ParseError("family spec", f"malformed factor {text!r}")
    name, raw = match.group(1), match.group(2)
    family = FAMILIES.get(name)
    if family is None:
        raise ParseError("family spec", f"unknown family {name!r}")
    try:
        args = tuple(int(a) for a in raw.split(",")) if raw and raw.strip() else ()
    except ValueError as exc:
        raise ParseError("family spec", f"non-integer argument in {text!r}") from exc
    if len(args) != family.arity:
        raise ParseError("family spec", f"{name} takes {family.arity} argument(s), got {len(args)}")
    return family, args


def family_order(spec: str) -> int:
    """The order a family spec will produce, from the family formulas alone."""
    order = 1
    for factor in spec.split("*"):
        family, args = _parse_factor(factor)
        order *= family.order(*args)
    return order


def construct_family(spec: str) -> FiniteGroup:
    """
    Build the group described by a family spec.

    Raises:
        ParseError: For an unknown family or malformed arguments
        InvalidParameters: For parameters outside the family's range
        CapExceeded: If the formula order passes the global cap
        ShapeMismatch: If the constructed order disagrees with the formula
    """
    expected = family_order(spec)
    if expected > settings.ORDER_CAP:
        raise CapExceeded(f"family {spec}", expected, settings.ORDER_CAP)

    group: FiniteGroup | None = None
    for factor in spec.split("*"):
        family, args = _parse_factor(factor)
        built = family.builder(*args)
        if built.order != family.order(*args):
            raise ShapeMismatch("family order", f"{factor.strip()} has order {built.order}", {"expected": family.order(*args)})
        group = built if group is None else direct_product(group, built)
    if "*" in spec:
        group.provenance.description = spec.strip()
    logger.debug("Constructed family", spec=spec, order=group.order)
    return group


CORPUS_SPECS: tuple[str, ...] = (
    *(f"cyclic({n})" for n in range(1, 25)),
    "cyclic(30)",
    "cyclic(60)",
    *(f"dihedral({n})" for n in range(3, 13)),
    "dihedral(15)",
    "generalized_quaternion(8)",
    "generalized_quaternion(16)",
    "generalized_quaternion(32)",
    "symmetric(3)",
    "symmetric(4)",
    "symmetric(5)",
    "symmetric(6)",
    "alternating(4)",
    "alternating(5)",
    "alternating(6)",
    "elementary_abelian(2,2)",
    "elementary_abelian(2,3)",
    "elementary_abelian(2,4)",
    "elementary_abelian(3,2)",
    "elementary_abelian(3,3)",
    "elementary_abelian(5,2)",
    "sylow2_sym8",
    "semidirect_cyclic(7,3,2)",
    "semidirect_cyclic(5,4,2)",
    "semidirect_cyclic(13,3,3)",
    "semidirect_cyclic(7,6,3)",
    "semidirect_cyclic(8,2,3)",
    "semidirect_cyclic(8,2,5)",
    "semidirect_cyclic(9,3,4)",
    "semidirect_cyclic(9,6,2)",
    "affine_sym3(5)",
    "affine_sym3(7)",
    "cyclic(2)*symmetric(3)",
    "symmetric(3)*cyclic(5)",
    "symmetric(3)*symmetric(3)",
    "generalized_quaternion(8)*cyclic(2)",
    "generalized_quaternion(8)*cyclic(3)",
    "dihedral(4)*cyclic(2)",
    "alternating(4)*cyclic(2)",
    "alternating(4)*cyclic(5)",
    "symmetric(4)*cyclic(2)",
)


def corpus_specs(max_order: int) -> list[str]:
    """Corpus family specs with formula order at most ``max_order``, in corpus order."""
    return [spec for spec in CORPUS_SPECS if family_order(spec) <= max_order]


def corpus(max_order: int) -> Iterator[tuple[str, FiniteGroup]]:
    """Yield (spec, group) for the built-in corpus up to ``max_order``."""
    for spec in corpus_specs(max_order):
        yield spec, construct_family(spec)


def forbidden_resolver(group: FiniteGroup | None) -> Callable[[str], FiniteGroup]:
    """
    Resolve a forbidden-group name: provenance groups of ``group`` first,
    then group files, then family specs.
    """
    from nonfgraph.services.group_file import GroupFileService

    def resolve(name: str) -> FiniteGroup:
        if group is not None and name in group.provenance.named_groups:
            return group.provenance.named_groups[name]
        path = Path(name)
        if path.is_file():
            return GroupFileService.read_group(path)
        try:
            return construct_family(name)
        except ParseError as exc:
            raise ParseError("class spec", f"cannot resolve forbidden group {name!r}") from exc

    return resolve
