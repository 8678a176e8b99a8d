"""
Tests for class specs, membership predicates and subgroup isomorphism.
"""

import pytest

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import BudgetExceeded, ParseError
from nonfgraph.groups.constructors import cyclic_group, direct_product, quotient
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.services.class_predicates import (
    ClassKind,
    ClassService,
    MembershipOracle,
    fitting_length,
    is_supersoluble,
    make_spec,
    member_of_subgroup,
    parse_class_spec,
    subgroup_as_group,
    two_generated_closure,
)
from nonfgraph.services.families import (
    alternating,
    construct_family,
    dihedral,
    forbidden_resolver,
    semidirect_cyclic,
    sylow2_sym8,
)
from nonfgraph.services.isomorphism import has_subgroup_isomorphic, is_isomorphic
from nonfgraph.services.subgroups import SubgroupService, is_soluble


@pytest.mark.unit
class TestParseClassSpec:
    """Tests for parse_class_spec."""

    @pytest.mark.parametrize(
        "text, kind",
        [
            ("cyclic", ClassKind.CYCLIC),
            ("C", ClassKind.CYCLIC),
            ("p", ClassKind.ONE_PRIME),
            ("one-prime", ClassKind.ONE_PRIME),
            ("D", ClassKind.AT_MOST_TWO_PRIMES),
            ("solvable", ClassKind.SOLUBLE),
            ("  metabelian ", ClassKind.METABELIAN),
        ],
    )
    def test_aliases(self, text, kind):
        """Test short names and aliases resolve to their kinds."""
        assert parse_class_spec(text).kind is kind

    def test_fitting_bound(self):
        """Test fitting<=t carries its bound."""
        spec = parse_class_spec("fitting<=2")

        assert spec.kind is ClassKind.FITTING_LENGTH
        assert spec.parameter == 2
        assert str(spec) == "fitting<=2"

    def test_fitting_bound_positive(self):
        """Test a zero Fitting-length bound is rejected."""
        with pytest.raises(ParseError):
            parse_class_spec("fitting<=0")

    def test_two_generated_closure(self):
        """Test f2: wraps the base class."""
        spec = parse_class_spec("f2:metabelian")

        assert spec.kind is ClassKind.TWO_GENERATED
        assert spec.base.kind is ClassKind.METABELIAN
        assert str(spec) == "f2:metabelian"

    def test_forbid_with_family_arguments(self):
        """Test commas inside a family argument list stay with the family."""
        spec = parse_class_spec("forbid:cyclic(4),semidirect_cyclic(3,4,2)", forbidden_resolver(None))

        assert spec.forbidden_names == ("cyclic(4)", "semidirect_cyclic(3,4,2)")
        assert [g.order for g in spec.forbidden] == [4, 12]
        assert not spec.closure.quotient_closed
        assert str(spec) == "forbid:cyclic(4),semidirect_cyclic(3,4,2)"

    def test_forbid_needs_resolver(self):
        """Test a forbid list cannot be parsed without a resolver."""
        with pytest.raises(ParseError):
            parse_class_spec("forbid:cyclic(4)")

    def test_unknown_class(self):
        """Test an unknown class name is a parse error."""
        with pytest.raises(ParseError) as exc_info:
            parse_class_spec("hyperbolic")

        assert exc_info.value.exit_code == 2

    def test_unresolvable_forbidden_group(self):
        """Test a forbidden name that is neither a file nor a family fails."""
        with pytest.raises(ParseError):
            parse_class_spec("forbid:nonsense(3)", forbidden_resolver(None))

    def test_order_determined(self):
        """Test only the prime-count classes are order-determined."""
        assert make_spec("p-group").order_determined
        assert make_spec("two-primes").order_determined
        assert not make_spec("nilpotent").order_determined


@pytest.mark.unit
class TestMembership:
    """Tests for ClassService.is_member."""

    @pytest.mark.parametrize(
        "kind, fixture, expected",
        [
            ("cyclic", "c6", True),
            ("cyclic", "klein", False),
            ("p-group", "q8", True),
            ("p-group", "c6", False),
            ("two-primes", "sym4", True),
            ("two-primes", "c30", False),
            ("abelian", "klein", True),
            ("abelian", "q8", False),
            ("nilpotent", "q8", True),
            ("nilpotent", "sym3", False),
            ("soluble", "sym4", True),
            ("supersoluble", "sym3", True),
            ("supersoluble", "sym4", False),
            ("supersoluble", "alt4", False),
            ("metabelian", "sym3", True),
            ("metabelian", "sym4", False),
            ("nilpotent-derived", "sym3", True),
            ("nilpotent-derived", "sym4", False),
        ],
    )
    def test_small_groups(self, request, kind, fixture, expected):
        """Test membership verdicts on small groups."""
        group = request.getfixturevalue(fixture)

        assert ClassService.is_member(make_spec(kind), group) is expected

    def test_fitting_length(self, sym4, sym3):
        """Test Fitting lengths of Sym(4) and Sym(3)."""
        assert fitting_length(sym4) == 3
        assert fitting_length(sym3) == 2
        assert ClassService.is_member(make_spec("fitting", 2), sym3)
        assert not ClassService.is_member(make_spec("fitting", 2), sym4)

    def test_supersoluble_criteria_agree(self, sym3):
        """Test the chief-factor criterion on Sym(3)."""
        assert is_supersoluble(sym3)

    def test_forbidden_subgroup(self, sym4, alt4):
        """Test Sym(4) contains C4 and Alt(4) does not."""
        spec = parse_class_spec("forbid:cyclic(4)", forbidden_resolver(None))

        assert not ClassService.is_member(spec, sym4)
        assert ClassService.is_member(spec, alt4)

    def test_metabelian_not_two_recognizable(self):
        """Test the Sylow 2-subgroup of Sym(8) lies in the 2-generated closure only."""
        group = sylow2_sym8()
        spec = make_spec("metabelian")

        assert not ClassService.is_member(spec, group)
        assert ClassService.f2_member(spec, group)
        assert ClassService.is_member(two_generated_closure(spec), group)

    def test_two_recognizability_report(self, sym3):
        """Test the report flags closure members outside the class."""
        report = ClassService.two_recognizability_report(
            make_spec("metabelian"), [("symmetric(3)", sym3), ("sylow2_sym8", sylow2_sym8())]
        )

        assert report.witnesses == ["sylow2_sym8"]
        assert report.entries[0].is_member


@pytest.mark.unit
class TestMembershipOracle:
    """Tests for MembershipOracle memoization."""

    def test_pair_memoized(self, sym3):
        """Test the same pair is evaluated once."""
        oracle = MembershipOracle(make_spec("cyclic"), sym3)

        assert not oracle.pair(1, 2)
        assert not oracle.pair(1, 2)
        assert oracle.evaluations == 1
        assert oracle.memo_size == 1

    def test_same_subgroup_from_other_generators(self, c6):
        """Test different generating pairs of one subgroup share a memo entry."""
        oracle = MembershipOracle(make_spec("cyclic"), c6)

        assert oracle.pair(2, 3)
        assert oracle.pair(1, 0)
        assert oracle.evaluations == 1


@pytest.mark.unit
class TestPrimeProfile:
    """Tests for ClassService.prime_profile."""

    def test_quaternion(self, q8):
        """Test generalized quaternion Sylow subgroups count toward pi_tilde."""
        profile = ClassService.prime_profile(q8)

        assert profile.pi == frozenset({2})
        assert profile.pi_tilde == frozenset({2})

    def test_klein(self, klein):
        """Test the Klein group has no cyclic Sylow subgroup."""
        assert ClassService.prime_profile(klein).pi_tilde == frozenset()

    def test_cyclic(self, c6):
        """Test every prime of a cyclic group lies in pi_tilde."""
        profile = ClassService.prime_profile(c6)

        assert profile.pi == frozenset({2, 3})
        assert profile.pi_tilde == frozenset({2, 3})
        assert profile.primes_of(1) == frozenset({2, 3})
        assert profile.prime_counts.tolist() == [0, 2, 1, 1, 1, 2]

    def test_dihedral(self):
        """Test D8 has a non-cyclic Sylow 2-subgroup."""
        assert 2 not in ClassService.prime_profile(dihedral(4)).pi_tilde


@pytest.mark.unit
class TestIsomorphism:
    """Tests for the subgroup isomorphism search."""

    def test_sym4_contains_dihedral(self, sym4):
        """Test D8 embeds in Sym(4)."""
        assert has_subgroup_isomorphic(sym4, dihedral(4))

    def test_alt4_has_no_c4(self, alt4):
        """Test C4 does not embed in Alt(4)."""
        assert not has_subgroup_isomorphic(alt4, cyclic_group(4))

    def test_isomorphic_presentations(self, sym3, q8):
        """Test Sym(3) = C3 x| C2 and Q8 != D8."""
        assert is_isomorphic(sym3, semidirect_cyclic(3, 2, 2))
        assert not is_isomorphic(q8, dihedral(4))

    def test_direct_product_of_coprime_cyclics(self):
        """Test C2 x C3 is cyclic of order 6."""
        assert is_isomorphic(direct_product(cyclic_group(2), cyclic_group(3)), cyclic_group(6))

    def test_budget(self, monkeypatch, sym4):
        """Test the node budget raises BudgetExceeded."""
        monkeypatch.setattr(settings, "ISO_NODE_BUDGET", 0)

        with pytest.raises(BudgetExceeded) as exc_info:
            has_subgroup_isomorphic(sym4, dihedral(4))

        assert exc_info.value.exit_code == 3


SUBGROUP_CLOSED_KINDS = [
    "cyclic",
    "p-group",
    "two-primes",
    "abelian",
    "nilpotent",
    "soluble",
    "supersoluble",
    "metabelian",
    "nilpotent-derived",
]


def subgroup_closed_specs():
    specs = [make_spec(kind) for kind in SUBGROUP_CLOSED_KINDS]
    specs.append(make_spec("fitting", 2))
    specs.append(two_generated_closure(make_spec("metabelian")))
    specs.append(parse_class_spec("forbid:cyclic(4)", forbidden_resolver(None)))
    return specs


@pytest.mark.unit
class TestDeclaredClosure:
    """Tests for the declared closure flags of every class against the corpus."""

    @pytest.mark.parametrize("spec", subgroup_closed_specs(), ids=str)
    def test_hereditary(self, small_corpus, spec):
        """Test every subgroup of a member is a member."""
        assert spec.closure.subgroup_closed
        for name, group in small_corpus:
            if not ClassService.is_member(spec, group):
                continue
            for sub in SubgroupService.all_subgroups(group, up_to_conjugacy=True):
                assert member_of_subgroup(spec, sub), f"{name}: subgroup of order {sub.size}"

    @pytest.mark.parametrize("spec", subgroup_closed_specs(), ids=str)
    def test_class_inside_two_generated_closure(self, small_corpus, spec):
        """Test a member has all its 2-generated subgroups in the class."""
        for name, group in small_corpus:
            if ClassService.is_member(spec, group):
                assert ClassService.f2_member(spec, group), name

    @pytest.mark.parametrize(
        "spec", [s for s in subgroup_closed_specs() if s.closure.quotient_closed], ids=str
    )
    def test_quotient_closed(self, small_corpus, spec):
        """Test every quotient of a member is a member."""
        for name, group in small_corpus:
            if not ClassService.is_member(spec, group):
                continue
            for normal in SubgroupService.normal_subgroups(group).subgroups:
                factor, _ = quotient(group, normal)
                assert ClassService.is_member(spec, factor), f"{name} / N of order {normal.size}"

    @pytest.mark.parametrize("spec", [s for s in subgroup_closed_specs() if s.closure.soluble_only], ids=str)
    def test_soluble_only(self, small_corpus, spec):
        """Test members are soluble, and Alt(5) is never a member."""
        for name, group in small_corpus:
            if ClassService.is_member(spec, group):
                assert is_soluble(ElementSet.whole(group)), name
        assert not ClassService.is_member(spec, alternating(5))

    def test_forbidden_flags(self):
        """Test a forbidden-subgroup class is subgroup-closed only."""
        flags = parse_class_spec("forbid:cyclic(4)", forbidden_resolver(None)).closure

        assert flags.subgroup_closed
        assert not flags.quotient_closed
        assert not flags.soluble_only


PATTERNS = ["cyclic(4)", "elementary_abelian(2,2)", "symmetric(3)", "cyclic(6)", "generalized_quaternion(8)"]


@pytest.mark.unit
class TestSubgroupSearchAgreement:
    """Tests for has_subgroup_isomorphic against the subgroup lattice."""

    @pytest.mark.parametrize("pattern_spec", PATTERNS)
    def test_corpus(self, small_corpus, pattern_spec):
        """Test the search agrees with a scan of every subgroup class for corpus groups up to order 16."""
        pattern = construct_family(pattern_spec)
        for name, host in small_corpus:
            candidates = [
                subgroup_as_group(sub)
                for sub in SubgroupService.all_subgroups(host, up_to_conjugacy=True)
                if sub.size == pattern.order
            ]
            by_lattice = any(is_isomorphic(c, pattern) for c in candidates)
            by_orders = any(c.order_histogram == pattern.order_histogram for c in candidates)

            assert has_subgroup_isomorphic(host, pattern) is by_lattice, name
            assert by_lattice is by_orders, name
