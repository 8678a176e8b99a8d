"""
Tests for group construction, element sets and conjugacy.
"""

import numpy as np
import pytest

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import (
    CapExceeded,
    InvalidParameters,
    InvalidPermutation,
    NotAnAction,
    NotNormal,
)
from nonfgraph.groups.conjugacy import center, centralizer, class_labels, conjugacy_classes, conjugates
from nonfgraph.groups.constructors import (
    automorphism_from_images,
    cyclic_group,
    direct_product,
    from_permutation_generators,
    from_table,
    induced_group,
    quotient,
    semidirect_product,
)
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.services.families import quaternion_matrices, symmetric
from nonfgraph.services.modules import build_module_action, matrix_group, vector_space_group
from nonfgraph.services.subgroups import derived_length, derived_subgroup, is_nilpotent


def _element_of_order(group, k: int) -> int:
    return int(np.flatnonzero(group.elem_order == k)[0])


@pytest.mark.unit
class TestFiniteGroup:
    """Tests for element arithmetic on FiniteGroup."""

    def test_cyclic_orders(self, c6):
        """Test element orders of C6."""
        assert c6.order == 6
        assert c6.generators == (1,)
        assert c6.elem_order.tolist() == [1, 6, 3, 2, 3, 6]
        assert c6.exponent == 6

    def test_inverse_and_power(self, c6):
        """Test inverses and negative powers."""
        assert c6.inv[2] == 4
        assert c6.power(1, -1) == 5
        assert c6.power(2, 3) == 0

    def test_validate_accepts_constructed_groups(self, sym4, q8, c8xc8):
        """Test the invariant check passes on constructed groups."""
        for group in (sym4, q8, c8xc8):
            group.validate()

    def test_validate_rejects_bad_table(self):
        """Test a table with a repeated row entry fails validation."""
        group = from_table(np.array([[0, 1], [1, 1]]))

        with pytest.raises(InvalidParameters):
            group.validate()

    def test_from_table_requires_square(self):
        """Test a non-square table is rejected."""
        with pytest.raises(InvalidParameters):
            from_table(np.zeros((2, 3), dtype=np.int64))

    def test_order_cap(self, monkeypatch):
        """Test constructors refuse orders above the global cap."""
        monkeypatch.setattr(settings, "ORDER_CAP", 10)

        with pytest.raises(CapExceeded) as exc_info:
            cyclic_group(11)

        assert exc_info.value.exit_code == 3
        assert exc_info.value.details["cap"] == 10

    def test_sparse_group_without_table(self, monkeypatch):
        """Test a group above the dense cap multiplies without a table."""
        monkeypatch.setattr(settings, "DENSE_TABLE_CAP", 4)
        group = cyclic_group(6)

        assert not group.is_dense
        assert group.mul(4, 5) == 3
        with pytest.raises(CapExceeded):
            _ = group.table

    def test_content_hash_is_deterministic(self, sym3, c6):
        """Test equal constructions hash equally and different groups differ."""
        assert symmetric(3).content_hash == sym3.content_hash
        assert sym3.content_hash != c6.content_hash


@pytest.mark.unit
class TestPermutationGroups:
    """Tests for permutation closure."""

    def test_three_cycle(self):
        """Test a single 3-cycle generates C3."""
        group = from_permutation_generators([[1, 2, 0]], 3)

        assert group.order == 3
        assert set(group.elem_order.tolist()) == {1, 3}

    def test_sym3_order_multiset(self, sym3):
        """Test Sym(3) has element orders {1, 2, 2, 2, 3, 3}."""
        assert sym3.order == 6
        assert sorted(sym3.elem_order.tolist()) == [1, 2, 2, 2, 3, 3]

    def test_product_applies_left_factor_first(self):
        """Test p*q is the permutation x -> q(p(x))."""
        a, b = [1, 0, 2], [1, 2, 0]
        group = from_permutation_generators([a, b], 3)
        points = group.provenance.data["points"]

        assert np.array_equal(points[group.mul(1, 2)], np.array(b)[np.array(a)])

    def test_invalid_permutation(self):
        """Test a non-bijective generator is rejected."""
        with pytest.raises(InvalidPermutation) as exc_info:
            from_permutation_generators([[0, 0, 1]], 3)

        assert exc_info.value.details == {"position": 0, "degree": 3}

    def test_quaternion_unique_involution(self, q8):
        """Test Q8 has exactly one element of order 2."""
        assert q8.order_histogram == {1: 1, 2: 1, 4: 6}


@pytest.mark.unit
class TestProducts:
    """Tests for direct and semidirect products."""

    def test_klein_four(self, klein):
        """Test C2 x C2 has three involutions."""
        assert klein.order == 4
        assert klein.order_histogram == {1: 1, 2: 3}

    def test_c8_squared(self, c8xc8):
        """Test C8 x C8 has 48 elements of order 8."""
        assert c8xc8.order == 64
        assert c8xc8.order_histogram[8] == 48

    def test_direct_product_layout(self):
        """Test (a, b) sits at a*|G2| + b."""
        group = direct_product(cyclic_group(2), cyclic_group(3))

        assert group.order == 6
        assert group.elem_order[1 * 3 + 1] == 6
        assert group.generators == (3, 1)

    def test_direct_product_of_p_groups_is_nilpotent(self, q8):
        """Test Q8 x C3 is nilpotent."""
        group = direct_product(q8, cyclic_group(3))

        assert group.order == 24
        assert is_nilpotent(ElementSet.whole(group))

    def test_alt4_as_semidirect(self):
        """Test (C2 x C2) x| C3 has trivial center and derived subgroup of order 4."""
        c3 = cyclic_group(3)
        action, _ = build_module_action(c3, 2, 2, [np.array([[0, 1], [1, 1]])])
        group = semidirect_product(vector_space_group(2, 2), c3, action)

        assert group.order == 12
        assert center(group).size == 1
        assert derived_subgroup(ElementSet.whole(group)).size == 4

    def test_quaternion_action_on_f3_squared(self):
        """Test (C3 x C3) x| Q8 with the faithful action has trivial center."""
        q_group, mats = matrix_group(quaternion_matrices(3), 3)
        _, module = build_module_action(q_group, 3, 2, mats)
        group = module.semidirect(1)

        assert group.order == 72
        assert center(group).size == 1

    def test_trivial_action_matches_direct_product(self):
        """Test the identity action gives the direct product's element orders."""
        c2, c3 = cyclic_group(2), cyclic_group(3)
        action = np.tile(np.arange(2), (3, 1))
        group = semidirect_product(c2, c3, action)

        assert group.order_histogram == direct_product(c2, c3).order_histogram

    def test_rejects_non_action(self):
        """Test inversion cannot be the action of a generator of C3."""
        c3 = cyclic_group(3)
        action = np.array([[0, 1, 2], [0, 2, 1], [0, 1, 2]])

        with pytest.raises(NotAnAction):
            semidirect_product(c3, c3, action)

    def test_automorphism_from_images(self, c6):
        """Test generator images extend to inversion of C6."""
        assert automorphism_from_images(c6, [5]).tolist() == [0, 5, 4, 3, 2, 1]

    def test_non_bijective_images(self, c6):
        """Test an endomorphism that is not onto is rejected."""
        with pytest.raises(NotAnAction):
            automorphism_from_images(c6, [2])


@pytest.mark.unit
class TestQuotients:
    """Tests for quotients and induced subgroups."""

    def test_cyclic_quotient(self, c6):
        """Test C6 / C3 has order 2."""
        factor, projection = quotient(c6, ElementSet.generated_by(c6, [2]))

        assert factor.order == 2
        assert projection.check()
        assert projection.kernel.size == 3

    def test_quaternion_mod_center(self, q8):
        """Test Q8 / Z(Q8) is elementary abelian of order 4."""
        factor, projection = quotient(q8, center(q8))

        assert factor.order == 4
        assert factor.order_histogram == {1: 1, 2: 3}
        assert projection.is_surjective

    def test_quotient_by_whole_group(self, sym3):
        """Test G / G is trivial with kernel G."""
        factor, projection = quotient(sym3, ElementSet.whole(sym3))

        assert factor.order == 1
        assert projection.kernel == ElementSet.whole(sym3)

    def test_quotient_needs_normal(self, sym3):
        """Test quotienting by a transposition subgroup fails."""
        with pytest.raises(NotNormal):
            quotient(sym3, ElementSet.generated_by(sym3, [1]))

    def test_induced_group(self, sym3):
        """Test an order-3 subgroup becomes a standalone C3."""
        x = _element_of_order(sym3, 3)
        group, members = induced_group(ElementSet.generated_by(sym3, [x]))

        assert group.order == 3
        assert members.tolist() == sorted(members.tolist())
        assert int(group.elem_order.max()) == 3

    def test_preimage(self, q8):
        """Test the preimage of the trivial subgroup is the kernel."""
        factor, projection = quotient(q8, center(q8))

        assert projection.preimage(ElementSet.trivial(factor)) == center(q8)


def _embedded_normal(group, n_order: int, h_order: int) -> ElementSet:
    """The copy of N in N x| H, at indices n * |H|."""
    mask = np.zeros(group.order, dtype=bool)
    mask[np.arange(n_order) * h_order] = True
    return ElementSet(group, mask)


def _profile(group) -> tuple[dict[int, int], int, int | None]:
    return group.order_histogram, center(group).size, derived_length(ElementSet.whole(group))


@pytest.mark.unit
class TestSemidirectQuotientRoundTrip:
    """Tests for quotienting N x| H by its copy of N."""

    def test_alt4_back_to_c3(self):
        """Test (C2 x C2) x| C3 modulo C2 x C2 looks like C3."""
        c3 = cyclic_group(3)
        action, _ = build_module_action(c3, 2, 2, [np.array([[0, 1], [1, 1]])])
        group = semidirect_product(vector_space_group(2, 2), c3, action)
        factor, projection = quotient(group, _embedded_normal(group, 4, 3))

        assert _profile(factor) == _profile(c3) == ({1: 1, 3: 2}, 3, 1)
        assert projection.kernel.size == 4

    def test_quaternion_back_to_q8(self):
        """Test (C3 x C3) x| Q8 modulo C3 x C3 looks like Q8."""
        q_group, mats = matrix_group(quaternion_matrices(3), 3)
        _, module = build_module_action(q_group, 3, 2, mats)
        group = module.semidirect(1)
        factor, _ = quotient(group, _embedded_normal(group, 9, 8))

        assert _profile(factor) == _profile(q_group)
        assert center(factor).size == 2
        assert derived_length(ElementSet.whole(factor)) == 2

    def test_two_copies_back_to_sym3(self, sym3):
        """Test (F_2^2)^2 x| Sym(3) modulo (F_2^2)^2 looks like Sym(3)."""
        _, module = build_module_action(sym3, 2, 2, [np.array([[0, 1], [1, 0]]), np.array([[0, 1], [1, 1]])])
        group = module.semidirect(2)
        factor, _ = quotient(group, _embedded_normal(group, 16, 6))

        assert group.order == 96
        assert _profile(factor) == _profile(sym3)

    def test_trivial_action(self):
        """Test C5 x| C4 with the identity action returns C4."""
        c4, c5 = cyclic_group(4), cyclic_group(5)
        group = semidirect_product(c5, c4, np.tile(np.arange(5), (4, 1)))
        factor, _ = quotient(group, _embedded_normal(group, 5, 4))

        assert _profile(factor) == _profile(c4)


@pytest.mark.unit
class TestElementSet:
    """Tests for ElementSet."""

    def test_subgroup_flags(self, c6):
        """Test a generated subgroup is a normal subgroup."""
        sub = ElementSet.generated_by(c6, [2])

        assert sub.members.tolist() == [0, 2, 4]
        assert sub.is_subgroup
        assert sub.is_normal

    def test_non_subgroup(self, c6):
        """Test {0, 1, 2} is not closed."""
        subset = ElementSet.from_indices(c6, [0, 1, 2])

        assert not subset.is_subgroup
        assert not subset.is_normal

    def test_equality_needs_same_parent(self, c6):
        """Test equal masks over different parents are different sets."""
        assert ElementSet.trivial(c6) == ElementSet.trivial(c6)
        assert ElementSet.trivial(c6) != ElementSet.trivial(cyclic_group(6))

    def test_set_operations(self, c6):
        """Test union, intersection and difference."""
        twos = ElementSet.generated_by(c6, [3])
        threes = ElementSet.generated_by(c6, [2])

        assert twos.intersection(threes) == ElementSet.trivial(c6)
        assert twos.union(threes).size == 4
        assert twos.difference(threes).members.tolist() == [3]
        assert len({twos, threes, ElementSet.generated_by(c6, [3])}) == 2

    def test_sort_key(self, c6):
        """Test canonical order by size, then smallest non-identity member."""
        assert ElementSet.generated_by(c6, [3]).sort_key() == (2, 3)
        assert ElementSet.trivial(c6).sort_key() == (1, 0)

    def test_mask_shape(self, c6):
        """Test a mask of the wrong length is rejected."""
        with pytest.raises(ValueError):
            ElementSet(c6, np.ones(5, dtype=bool))


@pytest.mark.unit
class TestConjugacy:
    """Tests for conjugacy classes and centralizers."""

    def test_abelian_classes(self):
        """Test C4 has four singleton classes."""
        assert [len(c) for c in conjugacy_classes(cyclic_group(4))] == [1, 1, 1, 1]

    def test_sym3_classes(self, sym3):
        """Test Sym(3) has classes of sizes 1, 2 and 3."""
        assert sorted(len(c) for c in conjugacy_classes(sym3)) == [1, 2, 3]

    def test_quaternion_classes(self, q8):
        """Test Q8 has classes of sizes 1, 1, 2, 2, 2."""
        assert sorted(len(c) for c in conjugacy_classes(q8)) == [1, 1, 2, 2, 2]

    def test_class_labels_start_at_identity(self, sym4):
        """Test classes are numbered by smallest member."""
        labels = class_labels(sym4)

        assert labels[0] == 0
        assert int(labels.max()) == 4

    def test_centralizer_and_center(self, q8):
        """Test Z(Q8) has order 2 and centralizers of order-4 elements have order 4."""
        x = _element_of_order(q8, 4)

        assert center(q8).size == 2
        assert centralizer(q8, x).size == 4

    def test_conjugates_of_transposition_subgroup(self, sym3):
        """Test <(0 1)> has three conjugates."""
        assert len(conjugates(sym3, ElementSet.generated_by(sym3, [1]))) == 3
