"""
Linear actions of finite groups over prime fields.

A module for H is given by one invertible matrix per generator of H. Matrices
act on column vectors and x -> M_x is a homomorphism, so M_{xy} = M_x M_y.
Vectors of F_p^d are numbered by their base-p digits with the first
coordinate most significant; with that numbering the module is also an
elementary abelian group that ``semidirect_product`` can extend by H.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from functools import cached_property

import galois
import numpy as np
from loguru import logger
from numpy.typing import NDArray
from sympy import isprime

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import (
    CapExceeded,
    InvalidParameters,
    NotAHomomorphism,
    NotFaithful,
    NotInvertible,
    NotIrreducible,
    ShapeMismatch,
)
from nonfgraph.groups.constructors import from_permutation_generators, semidirect_product
from nonfgraph.groups.finite_group import FiniteGroup, IndexArray, Provenance
from nonfgraph.groups.homomorphism import spanning_layers

MatrixStack = NDArray[np.int64]

# Candidate matrices per block in the brute-force commutant count
COMMUTANT_BLOCK = 1 << 16


def prime_field(p: int) -> type[galois.FieldArray]:
    """GF(p); raises InvalidParameters unless p is prime."""
    if not isprime(p):
        raise InvalidParameters("module fields need a prime order", {"p": p})
    return galois.GF(p)


def all_vectors(p: int, d: int) -> MatrixStack:
    """Every vector of F_p^d as a row, in index order."""
    return np.stack(np.unravel_index(np.arange(p**d), (p,) * d), axis=1).astype(np.int64)


def vector_indices(vectors: NDArray[np.integer], p: int) -> IndexArray:
    """Index of each vector along the last axis."""
    vectors = np.asarray(vectors, dtype=np.int64) % p
    d = vectors.shape[-1]
    return np.ravel_multi_index(tuple(np.moveaxis(vectors, -1, 0)), (p,) * d).astype(np.int64)


def vector_space_group(p: int, d: int) -> FiniteGroup:
    """(F_p^d, +) with each vector at its digit index; generators are the unit vectors."""
    prime_field(p)
    if d < 1:
        raise InvalidParameters("dimension must be positive", {"d": d})
    shape = (p,) * d

    def mul(a: IndexArray, b: IndexArray) -> IndexArray:
        digits = (np.stack(np.unravel_index(a, shape)) + np.stack(np.unravel_index(b, shape))) % p
        return np.ravel_multi_index(tuple(digits), shape).astype(np.int64)

    return FiniteGroup(
        p**d,
        mul=mul,
        generators=[p ** (d - 1 - k) for k in range(d)],
        provenance=Provenance(
            kind="elementary_abelian",
            description=f"elementary_abelian({p},{d})",
            data={"prime": p, "dimension": d},
        ),
    )


def matrix_action(matrices: MatrixStack, p: int) -> NDArray[np.int64]:
    """Action table (|H|, p^d) with action[h][v] = M_h v."""
    vectors = all_vectors(p, matrices.shape[-1])
    images = np.einsum("hij,vj->hvi", matrices, vectors) % p
    return vector_indices(images, p)


def direct_sum_matrices(matrices: MatrixStack, copies: int) -> MatrixStack:
    """Block-diagonal matrices of V^copies."""
    n, d, _ = matrices.shape
    result = np.zeros((n, copies * d, copies * d), dtype=np.int64)
    for i in range(copies):
        result[:, i * d : (i + 1) * d, i * d : (i + 1) * d] = matrices
    return result


# ----------------------------------------------------------------------
# Linear algebra over GF(p)
# ----------------------------------------------------------------------


def row_space(rows: NDArray[np.integer], p: int) -> MatrixStack:
    """Reduced basis of the span of ``rows``."""
    gf = prime_field(p)
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64) % p)
    return np.asarray(gf(rows).row_space(), dtype=np.int64).reshape(-1, rows.shape[1])


def null_space(matrix: NDArray[np.integer], p: int) -> MatrixStack:
    """Basis (as rows) of {x : A x = 0}."""
    gf = prime_field(p)
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.int64) % p)
    return np.asarray(gf(matrix).null_space(), dtype=np.int64).reshape(-1, matrix.shape[1])


def is_invertible(matrix: NDArray[np.integer], p: int) -> bool:
    gf = prime_field(p)
    return bool(np.linalg.det(gf(np.asarray(matrix, dtype=np.int64) % p)) != 0)


def inverse(matrix: NDArray[np.integer], p: int) -> MatrixStack:
    gf = prime_field(p)
    return np.asarray(np.linalg.inv(gf(np.asarray(matrix, dtype=np.int64) % p)), dtype=np.int64)


def reduced_basis(rows: NDArray[np.integer], p: int) -> tuple[MatrixStack, NDArray[np.int64]]:
    """Reduced row echelon basis of the span and its pivot columns."""
    gf = prime_field(p)
    rows = np.atleast_2d(np.asarray(rows, dtype=np.int64) % p)
    reduced = np.asarray(gf(rows).row_reduce(), dtype=np.int64)
    basis = reduced[np.any(reduced != 0, axis=1)]
    pivots = (basis != 0).argmax(axis=1).astype(np.int64)
    return basis, pivots


def restrict_matrices(
    basis: MatrixStack, pivots: NDArray[np.int64], matrices: MatrixStack, p: int
) -> MatrixStack:
    """
    Matrices of an invariant subspace in the coordinates of its reduced basis.

    Raises:
        ShapeMismatch: If the subspace is not invariant
    """
    restricted = []
    for m in matrices:
        images = basis @ m.T % p
        coefficients = images[:, pivots]
        if not np.array_equal(coefficients @ basis % p, images):
            raise ShapeMismatch("restriction", "subspace is not invariant")
        restricted.append(coefficients.T)
    d = basis.shape[0]
    return np.stack(restricted) if restricted else np.empty((0, d, d), dtype=np.int64)


def span_vectors(basis: MatrixStack, p: int) -> MatrixStack:
    """Every vector in the span of the basis rows."""
    k = basis.shape[0]
    if k == 0:
        return np.zeros((1, basis.shape[1]), dtype=np.int64)
    return all_vectors(p, k) @ basis % p


def spin(generator_matrices: MatrixStack, p: int, seed: NDArray[np.integer]) -> MatrixStack:
    """Basis of the smallest invariant subspace containing the seed rows."""
    basis = row_space(seed, p)
    while True:
        images = [basis @ m.T % p for m in generator_matrices]
        grown = row_space(np.vstack([basis, *images]), p)
        if grown.shape[0] == basis.shape[0]:
            return basis
        basis = grown


def invariant_subspace(generator_matrices: MatrixStack, p: int, d: int) -> MatrixStack | None:
    """
    A proper nonzero invariant subspace, or None when the module is irreducible.

    Every line is spun; a proper invariant subspace contains a line whose
    spin stays proper.
    """
    if p**d > settings.COMMUTANT_ENUMERATION_CAP:
        raise CapExceeded("irreducibility test", p**d, settings.COMMUTANT_ENUMERATION_CAP)
    vectors = all_vectors(p, d)[1:]
    leading = vectors[np.arange(vectors.shape[0]), (vectors != 0).argmax(axis=1)]
    for v in vectors[leading == 1]:
        basis = spin(generator_matrices, p, v)
        if basis.shape[0] < d:
            return basis
    return None


def hom_space(source_matrices: MatrixStack, target_matrices: MatrixStack, p: int) -> MatrixStack:
    """
    Basis of Hom_H(U, V) as flattened d x m matrices F with F A_s = B_s F.

    Args:
        source_matrices: Generator matrices of U, shape (k, m, m)
        target_matrices: Generator matrices of V, shape (k, d, d)
        p: The prime

    Returns:
        Rows of length d*m, row-major flattenings of a basis
    """
    m = source_matrices.shape[-1]
    d = target_matrices.shape[-1]
    if source_matrices.shape[0] == 0:
        return np.eye(d * m, dtype=np.int64)
    eye_d = np.eye(d, dtype=np.int64)
    eye_m = np.eye(m, dtype=np.int64)
    system = np.vstack(
        [np.kron(eye_d, a.T) - np.kron(b, eye_m) for a, b in zip(source_matrices, target_matrices)]
    )
    return null_space(system, p)


def commutant_basis(generator_matrices: MatrixStack, p: int, d: int) -> MatrixStack:
    """Basis of End_H(V), the matrices commuting with every generator matrix."""
    return hom_space(generator_matrices.reshape(-1, d, d), generator_matrices.reshape(-1, d, d), p)


def commutant_size_by_enumeration(generator_matrices: MatrixStack, p: int, d: int) -> int:
    """|End_H(V)| by testing every d x d matrix."""
    total = p ** (d * d)
    if total > settings.COMMUTANT_ENUMERATION_CAP:
        raise CapExceeded("commutant enumeration", total, settings.COMMUTANT_ENUMERATION_CAP)
    count = 0
    for start in range(0, total, COMMUTANT_BLOCK):
        idx = np.arange(start, min(total, start + COMMUTANT_BLOCK))
        candidates = np.stack(np.unravel_index(idx, (p,) * (d * d)), axis=1).reshape(-1, d, d)
        keep = np.ones(idx.size, dtype=bool)
        for m in generator_matrices:
            keep &= np.all((candidates @ m - m @ candidates) % p == 0, axis=(1, 2))
        count += int(keep.sum())
    return count


@dataclass(frozen=True)
class EndomorphismField:
    """
    The field F = End_H(V) of an irreducible module and V as an F-space.

    F is GF(p)[theta] for a commuting matrix theta whose minimal polynomial
    has degree ``degree``; that polynomial defines the galois field, so the
    field element sum c_i x^i is the matrix sum c_i theta^i. V has F-basis
    b_1..b_u and ``basis`` holds the GF(p)-basis theta^i b_j as column
    j * degree + i.
    """

    field: type[galois.FieldArray]
    prime: int
    degree: int
    u: int
    theta: MatrixStack
    basis: MatrixStack
    basis_inverse: MatrixStack

    @classmethod
    def build(cls, generator_matrices: MatrixStack, p: int, d: int, degree: int) -> EndomorphismField:
        theta = np.eye(d, dtype=np.int64)
        field_type = prime_field(p)
        if degree > 1:
            theta = _primitive_commuting_matrix(generator_matrices, p, d, degree)
            powers = [np.eye(d, dtype=np.int64)]
            for _ in range(degree):
                powers.append(powers[-1] @ theta % p)
            relation = null_space(np.stack([m.ravel() for m in powers], axis=1), p)
            if relation.shape[0] != 1:
                raise ShapeMismatch("endomorphism field", "theta has no unique minimal polynomial")
            monic = relation[0] * pow(int(relation[0][degree]), -1, p) % p
            poly = galois.Poly(monic[::-1].tolist(), field=field_type)
            field_type = galois.GF(p**degree, irreducible_poly=poly)

        columns: list[NDArray[np.int64]] = []
        for unit in np.eye(d, dtype=np.int64):
            if len(columns) == d:
                break
            block = [unit]
            for _ in range(degree - 1):
                block.append(theta @ block[-1] % p)
            trial = np.stack(columns + block)
            if row_space(trial, p).shape[0] == trial.shape[0]:
                columns.extend(block)
        if len(columns) != d:
            raise ShapeMismatch("endomorphism field", "V is not free over End_H(V)", {"spanned": len(columns)})
        basis = np.stack(columns, axis=1)
        return cls(field_type, p, degree, d // degree, theta, basis, inverse(basis, p))

    def coordinates(self, vectors: NDArray[np.integer]) -> galois.FieldArray:
        """F-coordinates of row vectors of V, shape (..., d) -> (..., u)."""
        vectors = np.asarray(vectors, dtype=np.int64)
        digits = (vectors @ self.basis_inverse.T % self.prime).reshape(*vectors.shape[:-1], self.u, self.degree)
        weights = self.prime ** np.arange(self.degree, dtype=np.int64)
        return self.field(digits @ weights)

    def matrix_of(self, matrix: NDArray[np.integer]) -> galois.FieldArray:
        """An F-linear map of V as a u x u matrix over F acting on coordinate columns."""
        images = np.asarray(matrix, dtype=np.int64) @ self.basis[:, :: self.degree] % self.prime
        return self.coordinates(images.T).T


def _primitive_commuting_matrix(generator_matrices: MatrixStack, p: int, d: int, degree: int) -> MatrixStack:
    """The first element of End_H(V) whose powers theta^0..theta^(degree-1) are independent."""
    basis = commutant_basis(generator_matrices, p, d)
    for coefficients in all_vectors(p, degree):
        theta = (coefficients @ basis % p).reshape(d, d)
        powers = [np.eye(d, dtype=np.int64)]
        for _ in range(degree - 1):
            powers.append(powers[-1] @ theta % p)
        if row_space(np.stack([m.ravel() for m in powers]), p).shape[0] == degree:
            return theta
    raise ShapeMismatch("endomorphism field", "End_H(V) is not a field", {"dimension": degree})


# ----------------------------------------------------------------------
# Modules
# ----------------------------------------------------------------------


@dataclass
class ModuleDescription:
    """
    An H-module V = F_p^d given by matrices.

    ``endo_dim`` is the dimension of End_H(V) over F_p; for an irreducible
    module End_H(V) is a field and ``u`` = dim_{End_H(V)} V = d / endo_dim.
    """

    group: FiniteGroup
    prime: int
    dimension: int
    matrices: MatrixStack
    generator_matrices: MatrixStack
    irreducible: bool
    invariant_subspace: MatrixStack | None
    faithful: bool
    kernel_order: int
    endo_dim: int
    _semidirect: dict[int, FiniteGroup] = field(default_factory=dict, repr=False)

    @property
    def u(self) -> int | None:
        if not self.irreducible:
            return None
        return self.dimension // self.endo_dim

    @cached_property
    def fixed_point_free(self) -> NDArray[np.bool_]:
        """Per element of H: det(I - M_h) != 0, i.e. no nonzero fixed vector."""
        eye = np.eye(self.dimension, dtype=np.int64)
        return np.array([is_invertible(eye - m, self.prime) for m in self.matrices], dtype=bool)

    @cached_property
    def endomorphism_field(self) -> EndomorphismField:
        """End_H(V) as GF(p^endo_dim), with V written as F^u."""
        if not self.irreducible:
            raise NotIrreducible(self.dimension, int(self.invariant_subspace.shape[0]))
        return EndomorphismField.build(self.generator_matrices, self.prime, self.dimension, self.endo_dim)

    def semidirect(self, copies: int = 1) -> FiniteGroup:
        """V^copies x| H, cached per number of copies."""
        group = self._semidirect.get(copies)
        if group is None:
            mats = direct_sum_matrices(self.matrices, copies)
            group = semidirect_product(
                vector_space_group(self.prime, self.dimension * copies),
                self.group,
                matrix_action(mats, self.prime),
                description=f"F_{self.prime}^{self.dimension * copies} x| H",
            )
            self._semidirect[copies] = group
        return group


def _extend_to_group(h_group: FiniteGroup, generator_matrices: MatrixStack, p: int) -> MatrixStack:
    d = generator_matrices.shape[-1]
    mats = np.empty((h_group.order, d, d), dtype=np.int64)
    mats[0] = np.eye(d, dtype=np.int64)
    for nodes, parents, positions in spanning_layers(h_group):
        mats[nodes] = np.matmul(mats[parents], generator_matrices[positions]) % p
    for k, s in enumerate(h_group.generators):
        expected = np.matmul(mats, generator_matrices[k]) % p
        bad = np.flatnonzero(~np.all(mats[h_group.right_multiplication(s)] == expected, axis=(1, 2)))
        if bad.size:
            raise NotAHomomorphism(int(bad[0]), int(s))
    return mats


def describe_module(h_group: FiniteGroup, p: int, matrices: MatrixStack, generator_matrices: MatrixStack) -> ModuleDescription:
    """Irreducibility, faithfulness and commutant dimension of a module given on all of H."""
    d = matrices.shape[-1]
    eye = np.eye(d, dtype=np.int64)
    kernel_order = int(np.count_nonzero(np.all(matrices == eye, axis=(1, 2))))
    invariant = invariant_subspace(generator_matrices, p, d)
    endo_dim = commutant_basis(generator_matrices, p, d).shape[0]

    if p ** (d * d) <= settings.COMMUTANT_ENUMERATION_CAP:
        counted = commutant_size_by_enumeration(generator_matrices, p, d)
        if counted != p**endo_dim:
            raise ShapeMismatch(
                "commutant",
                "null space and enumeration disagree",
                {"null_space_dim": endo_dim, "enumerated": counted},
            )
    if invariant is None and d % endo_dim:
        raise ShapeMismatch("commutant", "End_H(V) of an irreducible module must divide the dimension")

    description = ModuleDescription(
        group=h_group,
        prime=p,
        dimension=d,
        matrices=matrices,
        generator_matrices=generator_matrices,
        irreducible=invariant is None,
        invariant_subspace=invariant,
        faithful=kernel_order == 1,
        kernel_order=kernel_order,
        endo_dim=endo_dim,
    )
    logger.debug(
        "Module described",
        prime=p,
        dimension=d,
        irreducible=description.irreducible,
        faithful=description.faithful,
        endo_dim=endo_dim,
    )
    return description


def build_module_action(
    h_group: FiniteGroup,
    p: int,
    d: int,
    generator_matrices: Sequence[NDArray[np.integer]],
) -> tuple[NDArray[np.int64], ModuleDescription]:
    """
    Turn generator matrices into an action table for ``semidirect_product``.

    Args:
        h_group: The acting group
        p: Prime field order
        d: Dimension
        generator_matrices: One d x d matrix per generator of ``h_group``, in order

    Returns:
        Tuple of (action table (|H|, p^d), module description)

    Raises:
        NotInvertible: If a generator matrix is singular
        NotAHomomorphism: If the matrices violate a relation of H
    """
    prime_field(p)
    gens = np.asarray(generator_matrices, dtype=np.int64).reshape(-1, d, d) % p
    if gens.shape[0] != len(h_group.generators):
        raise InvalidParameters(
            "one matrix per generator of H is required",
            {"generators": len(h_group.generators), "matrices": int(gens.shape[0])},
        )
    for position, m in enumerate(gens):
        if not is_invertible(m, p):
            raise NotInvertible(position, p)
    matrices = _extend_to_group(h_group, gens, p)
    return matrix_action(matrices, p), describe_module(h_group, p, matrices, gens)


def matrix_group(generator_matrices: Sequence[NDArray[np.integer]], p: int) -> tuple[FiniteGroup, MatrixStack]:
    """
    The group generated by invertible matrices over GF(p).

    Elements act on row vectors v -> vM, so the element-to-matrix map is a
    homomorphism.

    Returns:
        Tuple of (group, generator matrices aligned with ``group.generators``)
    """
    gens = [np.asarray(m, dtype=np.int64) % p for m in generator_matrices]
    d = gens[0].shape[0]
    for position, m in enumerate(gens):
        if not is_invertible(m, p):
            raise NotInvertible(position, p)
    vectors = all_vectors(p, d)
    perms = [vector_indices(vectors @ m % p, p) for m in gens]
    group = from_permutation_generators(perms, p**d)
    kept = [m for m, perm in zip(gens, perms) if not np.array_equal(perm, np.arange(p**d))]
    aligned = np.stack(kept) if kept else np.empty((0, d, d), dtype=np.int64)
    group.provenance.kind = "matrix"
    group.provenance.description = f"matrix group of degree {d} over GF({p})"
    group.provenance.data["matrices"] = aligned
    return group, aligned


# ----------------------------------------------------------------------
# Fixed-point-free generation
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class FpfCheck:
    """
    Determinant criterion against exhaustive search for generating V^u x| H by h1 and h2 w.

    ``determinant_criterion`` is det(A1) != 0, the existence claim. Inside the
    exhaustive cap every w in V^u is also judged on its own: the criterion
    predicts generation iff det(A1) det(B_w) != 0, and ``disagreements``
    lists the vector indices of w where the closure says otherwise.
    """

    h1: int
    h2: int
    determinant_criterion: bool
    exhaustive: bool | None
    witness: int | None
    candidates_checked: int
    generating_count: int = 0
    predicted_count: int = 0
    disagreements: tuple[int, ...] = ()

    @property
    def agrees(self) -> bool | None:
        if self.exhaustive is None:
            return None
        return self.exhaustive == self.determinant_criterion and not self.disagreements


def generation_determinants(module: ModuleDescription, h1: int, h2: int) -> tuple[bool, NDArray[np.bool_]]:
    """
    det [[A1, A2], [0, B_w]] != 0 for every w in V^u.

    Over F = End_H(V), X_i is h_i as a u x u matrix, A_i = I - X_i and the
    rows of B_w are the F-coordinates of the components w_1..w_u.

    Returns:
        Tuple of (det(A1) != 0, prediction per vector index of w)
    """
    endo = module.endomorphism_field
    gf = endo.field
    u = endo.u
    top = gf.Zeros((2 * u, 2 * u))
    top[:u, :u] = gf.Identity(u) - endo.matrix_of(module.matrices[h1])
    top[:u, u:] = gf.Identity(u) - endo.matrix_of(module.matrices[h2])
    a1_invertible = bool(np.linalg.det(top[:u, :u]) != 0)

    d = module.dimension
    components = all_vectors(module.prime, d * u).reshape(-1, u, d)
    rows = endo.coordinates(components)
    predicted = np.zeros(rows.shape[0], dtype=bool)
    for w in range(rows.shape[0]):
        block = top.copy()
        block[u:, u:] = rows[w]
        predicted[w] = np.linalg.det(block) != 0
    return a1_invertible, predicted


def fpf_generation_check(h_group: FiniteGroup, module: ModuleDescription, h1: int, h2: int) -> FpfCheck:
    """
    Whether V^u x| H = <h1, h2 w> for some w in V^u, decided two ways.

    The criterion says such a w exists iff det(A1) != 0, i.e. h1 acts
    fixed-point-freely on V. While |V^u x| H| stays within the exhaustive
    cap every element h2 w of the coset V^u h2 is tried and compared with
    its own determinant.

    Raises:
        NotIrreducible: If V is reducible
        NotFaithful: If H acts with a kernel
        InvalidParameters: If <h1, h2> != H
    """
    if module.group is not h_group:
        raise InvalidParameters("module was built for another group")
    if not module.irreducible:
        raise NotIrreducible(module.dimension, int(module.invariant_subspace.shape[0]))
    if not module.faithful:
        raise NotFaithful(module.kernel_order)
    if not h_group.closure_mask([h1, h2]).all():
        raise InvalidParameters("h1 and h2 must generate H", {"h1": h1, "h2": h2})

    u = module.u
    size = module.prime ** (module.dimension * u) * h_group.order
    if size > settings.FPF_EXHAUSTIVE_CAP:
        endo = module.endomorphism_field
        a1 = endo.field.Identity(u) - endo.matrix_of(module.matrices[h1])
        return FpfCheck(h1, h2, bool(np.linalg.det(a1) != 0), None, None, 0)

    criterion, predicted = generation_determinants(module, h1, h2)
    if criterion != bool(module.fixed_point_free[h1]):
        raise ShapeMismatch("fixed-point-free", "det(A1) over End_H(V) disagrees with det(I - M_h1)", {"h1": h1})

    x_group = module.semidirect(u)
    nh = h_group.order
    generating = np.zeros(predicted.size, dtype=bool)
    for v in range(predicted.size):
        generating[v] = x_group.closure_mask([h1, v * nh + h2]).all()
    found = np.flatnonzero(generating)
    result = FpfCheck(
        h1,
        h2,
        criterion,
        bool(found.size),
        int(found[0]) * nh + h2 if found.size else None,
        int(predicted.size),
        int(found.size),
        int(predicted.sum()),
        tuple(int(v) for v in np.flatnonzero(generating != predicted)),
    )
    if result.agrees is False:
        logger.error(
            "Fixed-point-free criterion disagrees with search",
            h1=h1,
            h2=h2,
            order=size,
            disagreements=len(result.disagreements),
        )
    return result
