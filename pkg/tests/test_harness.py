"""
Tests for the lemma harness.
"""

import pytest

from nonfgraph.core.config import settings
from nonfgraph.groups.conjugacy import class_representatives
from nonfgraph.groups.constructors import quotient
from nonfgraph.services.class_predicates import make_spec
from nonfgraph.services.graph import GraphService
from nonfgraph.services.harness import LEMMAS, Tally, conjugation_classes_of_tuples, lemma_harness
from nonfgraph.services.subgroups import SubgroupService


@pytest.mark.unit
class TestTally:
    """Tests for Tally."""

    def test_record(self):
        """Test held instances are counted and failures keep their witness."""
        tally = Tally(instances=3)
        tally.record(True, "first")
        tally.record(False, "second")

        assert tally.held == 2
        assert tally.failures == ["second"]


@pytest.mark.unit
class TestConjugationClassesOfTuples:
    """Tests for conjugation_classes_of_tuples."""

    def test_single_elements_are_class_representatives(self, sym3):
        """Test k = 1 gives one element per conjugacy class."""
        assert [t[0] for t in conjugation_classes_of_tuples(sym3, 1)] == sorted(class_representatives(sym3).tolist())

    @pytest.mark.parametrize("k, expected", [(2, 11), (3, 49)])
    def test_orbit_count(self, sym3, k, expected):
        """Test the number of tuples matches the orbit count sum |C(g)|^k / |G|."""
        tuples = list(conjugation_classes_of_tuples(sym3, k))

        assert len(tuples) == expected
        assert len(set(tuples)) == expected

    def test_abelian_group_keeps_every_tuple(self, klein):
        """Test conjugation identifies nothing in an abelian group."""
        assert len(list(conjugation_classes_of_tuples(klein, 2))) == 16


@pytest.mark.unit
class TestLemmaHarness:
    """Tests for lemma_harness."""

    def test_one_result_per_lemma(self, sym3):
        """Test results come back in the fixed lemma order."""
        results = lemma_harness([("symmetric(3)", sym3)], make_spec("cyclic"))

        assert [r.lemma for r in results] == list(LEMMAS)
        assert len(results) == 16
        assert all(r.spec == "cyclic" for r in results)

    @pytest.mark.parametrize("fixture", ["sym3", "q8", "klein"])
    def test_cyclic_class_passes(self, request, fixture):
        """Test no lemma check fails on small groups for the cyclic class."""
        results = lemma_harness([(fixture, request.getfixturevalue(fixture))], make_spec("cyclic"))

        assert [r.lemma for r in results if not r.passed] == []

    def test_instances_accumulate(self, sym3, q8):
        """Test per-group checks count once per group."""
        results = {r.lemma: r for r in lemma_harness([("sym3", sym3), ("q8", q8)], make_spec("cyclic"))}

        assert results["isolated_conjugation_invariant"].instances == 2
        assert results["isolated_conjugation_invariant"].hypothesis_held == 2
        assert results["isolated_times_cyclic"].instances == 2

    def test_order_determined_only(self, sym3):
        """Test the connectivity check for order-determined classes skips other classes."""
        cyclic = {r.lemma: r for r in lemma_harness([("sym3", sym3)], make_spec("cyclic"))}
        two_primes = {r.lemma: r for r in lemma_harness([("sym3", sym3)], make_spec("two-primes"))}

        assert cyclic["order_determined_connected"].instances == 0
        assert two_primes["order_determined_connected"].instances == 1

    def test_lifting_bound(self, monkeypatch, sym4):
        """Test generator lifting is skipped above its order bound."""
        monkeypatch.setattr(settings, "LIFTING_MAX_ORDER", 10)
        results = {r.lemma: r for r in lemma_harness([("sym4", sym4)], make_spec("cyclic"))}

        assert results["generator_lifting"].instances == 0

    def test_generator_lifting_exhaustive(self, sym3):
        """Test every coset pair and triple over A3 is examined and lifts."""
        results = {r.lemma: r for r in lemma_harness([("sym3", sym3)], make_spec("cyclic"))}
        lifting = results["generator_lifting"]

        assert lifting.instances == 4 + 8
        assert lifting.hypothesis_held == 3 + 7
        assert lifting.passed

    def test_generator_lifting_every_normal_subgroup(self, q8):
        """Test Q8 contributes the tuples over its centre and over its three cyclic subgroups of order 4."""
        results = {r.lemma: r for r in lemma_harness([("q8", q8)], make_spec("cyclic"))}
        lifting = results["generator_lifting"]

        assert lifting.instances == (16 + 64) + 3 * (4 + 8)
        assert lifting.hypothesis_held == (6 + 42) + 3 * (3 + 7)
        assert lifting.failures == []

    def test_quotient_edges_lift_from_every_preimage(self, sym4):
        """Test each edge of Sym(4)/V4 is lifted through all 16 preimage pairs."""
        spec = make_spec("cyclic")
        normal = next(n for n in SubgroupService.normal_subgroups(sym4).subgroups if n.size == 4)
        factor, _ = quotient(sym4, normal)
        factor_edges = GraphService.build_nonf_graph(factor, spec).edges.shape[0]
        results = {r.lemma: r for r in lemma_harness([("sym4", sym4)], spec)}
        lifts = results["quotient_adjacency_lifts"]

        assert factor_edges > 0
        assert lifts.instances == 16 * factor_edges
        assert lifts.hypothesis_held == lifts.instances
        assert lifts.passed
