"""
Tests for the built-in families, the family-spec parser and the corpus.
"""

import pytest

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import CapExceeded, InvalidParameters, ParseError
from nonfgraph.groups.conjugacy import center
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.services.families import (
    CORPUS_SPECS,
    FAMILIES,
    affine_sym3,
    alternating,
    construct_family,
    corpus,
    corpus_specs,
    dihedral,
    example1_inner,
    family_order,
    forbidden_resolver,
    generalized_quaternion,
    semidirect_cyclic,
    symmetric,
    sylow2_sym8,
)
from nonfgraph.services.subgroups import is_abelian


@pytest.mark.unit
class TestBuilders:
    """Tests for the individual family builders."""

    def test_dihedral(self):
        """Test D10 has five involutions outside the rotations."""
        group = dihedral(5)

        assert group.order == 10
        assert group.order_histogram == {1: 1, 2: 5, 5: 4}

    def test_generalized_quaternion_16(self):
        """Test element orders of Q16."""
        assert generalized_quaternion(16).order_histogram == {1: 1, 2: 1, 4: 10, 8: 4}

    def test_generalized_quaternion_needs_power_of_two(self):
        """Test a non-power of two is rejected."""
        with pytest.raises(InvalidParameters):
            generalized_quaternion(12)

    def test_permutation_degree_limit(self):
        """Test Sym(7) is outside the built-in range."""
        with pytest.raises(InvalidParameters):
            symmetric(7)

    def test_alternating_five(self):
        """Test Alt(5) has order 60 and trivial center."""
        group = alternating(5)

        assert group.order == 60
        assert center(group).size == 1

    def test_semidirect_cyclic(self):
        """Test C7 x| C3 is non-abelian of order 21."""
        group = semidirect_cyclic(7, 3, 2)

        assert group.order == 21
        assert not is_abelian(ElementSet.whole(group))

    def test_semidirect_cyclic_needs_valid_exponent(self):
        """Test r must satisfy r^m = 1 mod n."""
        with pytest.raises(InvalidParameters):
            semidirect_cyclic(7, 3, 3)

    def test_affine_sym3(self):
        """Test (C5 x C5) x| Sym(3) has order 150."""
        assert affine_sym3(5).order == 150

    def test_sylow2_sym8(self):
        """Test the Sylow 2-subgroup of Sym(8) has order 128."""
        assert sylow2_sym8().order == 128


@pytest.mark.unit
class TestFamilySpecs:
    """Tests for family_order and construct_family."""

    def test_product_spec(self):
        """Test a product spec multiplies the factor orders."""
        assert family_order("dihedral(4)*cyclic(3)") == 24
        group = construct_family("dihedral(4)*cyclic(3)")

        assert group.order == 24
        assert group.provenance.kind == "direct"
        assert group.provenance.description == "dihedral(4)*cyclic(3)"

    def test_nullary_family(self):
        """Test a family without arguments."""
        assert construct_family("sylow2_sym8").order == 128

    @pytest.mark.parametrize("spec", ["nonsense(3)", "cyclic(2,3)", "cyclic(x)", "cyclic(", "sylow2_sym8(1)"])
    def test_malformed_specs(self, spec):
        """Test unknown names, wrong arity and junk arguments are parse errors."""
        with pytest.raises(ParseError):
            construct_family(spec)

    def test_cap_checked_before_building(self):
        """Test the formula order is checked against the cap first."""
        with pytest.raises(CapExceeded) as exc_info:
            construct_family("example1_inner(5)")

        assert exc_info.value.details["size"] == 125000

    def test_cap_setting(self, monkeypatch):
        """Test a lowered cap applies to family construction."""
        monkeypatch.setattr(settings, "ORDER_CAP", 20)

        with pytest.raises(CapExceeded):
            construct_family("symmetric(4)")

    def test_every_family_has_a_signature(self):
        """Test the registry entries describe themselves."""
        for name, family in FAMILIES.items():
            assert family.signature.startswith(name)
            assert family.summary


@pytest.mark.unit
class TestCorpus:
    """Tests for the built-in corpus."""

    def test_corpus_specs_bounded(self):
        """Test the corpus filter keeps order and bound."""
        specs = corpus_specs(24)

        assert "symmetric(4)" in specs
        assert "symmetric(5)" not in specs
        assert all(family_order(s) <= 24 for s in specs)
        assert specs == [s for s in CORPUS_SPECS if s in specs]

    def test_corpus_orders_match_formulas(self):
        """Test every built corpus group has its formula order."""
        for spec, group in corpus(16):
            assert group.order == family_order(spec)

    def test_forbidden_resolver_falls_back_to_families(self):
        """Test a family spec resolves without a parent group."""
        assert forbidden_resolver(None)("dihedral(4)").order == 8


@pytest.mark.integration
class TestFirstExample:
    """Tests for the scaled first worked example over GF(3)."""

    def test_order_and_named_subgroups(self, inner_example):
        """Test X = (V1 x V2 x V3) x| Q8 and its named pieces."""
        named = inner_example.provenance.named

        assert inner_example.order == 5832
        assert int(named["T"].sum()) == 729
        assert int(named["Q"].sum()) == 8
        assert [int(named[f"V{k}"].sum()) for k in (1, 2, 3)] == [9, 9, 9]
        assert int(named["F"].sum()) == 2

    def test_module(self, inner_example):
        """Test the stored Q8-module is faithful irreducible with u = 2."""
        module = inner_example.provenance.data["module"]

        assert module.irreducible
        assert module.faithful
        assert module.u == 2

    def test_needs_odd_prime(self):
        """Test p = 2 is rejected."""
        with pytest.raises(InvalidParameters):
            example1_inner(2)
