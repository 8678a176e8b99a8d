"""
Tests for the non-F graph engine and the generating graph.
"""

import numpy as np
import pytest

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import CapExceeded, InvalidParameters
from nonfgraph.groups.conjugacy import center
from nonfgraph.groups.constructors import cyclic_group
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.services.class_predicates import (
    ClassKind,
    ClassService,
    ClassSpec,
    ClosureFlags,
    forbidden_spec,
    make_spec,
)
from nonfgraph.services.families import sylow2_sym8
from nonfgraph.services.graph import GraphMode, GraphService

CYCLIC = make_spec("cyclic")


@pytest.mark.unit
class TestCyclicClassGraph:
    """Tests for the non-cyclic graph of small groups."""

    def test_cyclic_group_has_no_edges(self, c6):
        """Test every element of a cyclic group is isolated."""
        graph = GraphService.build_nonf_graph(c6, CYCLIC)

        assert graph.isolated.size == 6
        assert graph.is_empty
        assert graph.component_count == 0
        assert np.all(graph.component_label == -1)

    def test_sym3(self, sym3):
        """Test Sym(3) isolates the identity and has one component."""
        graph = GraphService.build_nonf_graph(sym3, CYCLIC)

        assert graph.isolated.members.tolist() == [0]
        assert graph.vertices.size == 5
        assert graph.component_count == 1
        assert graph.is_adjacent(1, 2)
        assert not graph.is_adjacent(1, 1)

    def test_quaternion_isolates_center(self, q8):
        """Test the isolated set of Q8 is its center."""
        graph = GraphService.build_nonf_graph(q8, CYCLIC)

        assert graph.isolated == center(q8)
        assert graph.component_count == 1
        assert [c.size for c in graph.components()] == [6]

    def test_klein(self, klein):
        """Test the three involutions of the Klein group form one component."""
        graph = GraphService.build_nonf_graph(klein, CYCLIC)

        assert graph.isolated.members.tolist() == [0]
        assert graph.component_count == 1

    def test_no_universal_vertices(self, sym4):
        """Test cyclic subgroups never count as universal for the cyclic class."""
        assert GraphService.build_nonf_graph(sym4, CYCLIC).universal_vertices.size == 0

    def test_explicit_matches_orbit(self, sym4):
        """Test both modes agree on isolated set and components."""
        explicit = GraphService.build_nonf_graph(sym4, CYCLIC, GraphMode.EXPLICIT)
        orbit = GraphService.build_nonf_graph(sym4, CYCLIC, "orbit")

        assert explicit.isolated == orbit.isolated
        assert explicit.component_count == orbit.component_count
        assert np.array_equal(explicit.component_label, orbit.component_label)
        assert explicit.nx_graph is not None
        assert orbit.nx_graph is None

    def test_explicit_cap(self, monkeypatch, sym3):
        """Test explicit mode refuses groups above its cap."""
        monkeypatch.setattr(settings, "EXPLICIT_GRAPH_CAP", 5)

        with pytest.raises(CapExceeded):
            GraphService.build_nonf_graph(sym3, CYCLIC, GraphMode.EXPLICIT)

    def test_requires_subgroup_closed_class(self, sym3):
        """Test a class without subgroup closure is rejected."""
        spec = ClassSpec(kind=ClassKind.SOLUBLE, closure=ClosureFlags(subgroup_closed=False))

        with pytest.raises(InvalidParameters):
            GraphService.build_nonf_graph(sym3, spec)


@pytest.mark.unit
class TestOtherClasses:
    """Tests for graphs of the prime-count and forbidden-subgroup classes."""

    def test_two_primes_on_c30(self, c30):
        """Test elements of order 30 are universal and nothing is isolated."""
        graph = GraphService.build_nonf_graph(c30, make_spec("two-primes"))

        assert graph.universal_vertices.size == 8
        assert graph.isolated.size == 0
        assert graph.component_count == 1

    def test_forbidden_c4_universal(self, sym4):
        """Test elements of order 4 are universal when C4 is forbidden."""
        spec = forbidden_spec([cyclic_group(4)], ["cyclic(4)"])
        graph = GraphService.build_nonf_graph(sym4, spec)

        assert graph.universal_vertices.size == 6

    def test_gamma_equals_gamma_f2_on_c30(self, c30):
        """Test the two-primes class and its 2-generated closure give the same graph on C30."""
        assert GraphService.gamma_equals_gamma_f2(c30, make_spec("two-primes"))

    def test_metabelian_on_sylow_of_sym8(self):
        """Test the metabelian graph equals the graph of its 2-generated closure."""
        group = sylow2_sym8()
        spec = make_spec("metabelian")

        assert not ClassService.is_member(spec, group)
        assert GraphService.gamma_equals_gamma_f2(group, spec)


@pytest.mark.unit
class TestIsolatedSet:
    """Tests for GraphService.isolated_set."""

    def test_member_group_is_all_isolated(self, c6):
        """Test a group in the class is entirely isolated."""
        assert GraphService.isolated_set(c6, CYCLIC) == ElementSet.whole(c6)

    @pytest.mark.parametrize("fixture", ["q8", "sym3", "sym4", "alt4"])
    def test_matches_graph(self, request, fixture):
        """Test the early-exit isolated set matches the full graph."""
        group = request.getfixturevalue(fixture)

        assert GraphService.isolated_set(group, CYCLIC) == GraphService.build_nonf_graph(group, CYCLIC).isolated

    def test_isolated_set_is_subgroup(self, q8):
        """Test the isolated set of Q8 is a subgroup."""
        assert GraphService.isolated_set(q8, CYCLIC).is_subgroup

    @pytest.mark.parametrize("mode", ["orbit", "explicit"])
    def test_trivial_group_outside_class(self, mode):
        """Test the trivial group is one isolated vertex even when the class excludes it."""
        trivial = cyclic_group(1)
        spec = forbidden_spec([cyclic_group(1)], ["cyclic(1)"])
        graph = GraphService.build_nonf_graph(trivial, spec, mode)

        assert not ClassService.is_member(spec, trivial)
        assert GraphService.isolated_set(trivial, spec) == graph.isolated == ElementSet.whole(trivial)
        assert graph.is_empty
        assert graph.component_count == 0


@pytest.mark.unit
class TestGeneratingGraph:
    """Tests for GraphService.generating_graph_omega."""

    def test_cyclic(self, c6):
        """Test every element of C6 has a generating partner."""
        data = GraphService.generating_graph_omega(c6)

        assert data.omega.size == 6

    def test_klein(self, klein):
        """Test Omega of the Klein group is its involutions."""
        data = GraphService.generating_graph_omega(klein)

        assert data.omega.members.tolist() == [1, 2, 3]
        assert data.delta_component_count == 1

    def test_quaternion(self, q8):
        """Test Omega of Q8 is its six elements of order 4."""
        data = GraphService.generating_graph_omega(q8)

        assert data.omega.size == 6
        assert np.all(q8.elem_order[data.omega.members] == 4)
        assert data.delta_component_count == 1

    def test_sym3(self, sym3):
        """Test Omega of Sym(3) is every non-identity element."""
        data = GraphService.generating_graph_omega(sym3)

        assert data.omega.size == 5
        assert data.delta_component_count == 1


@pytest.mark.unit
class TestExportGraph:
    """Tests for GraphService.export_graph."""

    def test_orbit_export(self, tmp_path, sym3):
        """Test header, edge and label lines of an orbit-mode export."""
        graph = GraphService.build_nonf_graph(sym3, CYCLIC)
        path = GraphService.export_graph(graph, tmp_path / "out" / "sym3.txt")
        lines = path.read_text().splitlines()

        assert lines[0] == f"# group {sym3.content_hash}"
        assert lines[1] == "# spec cyclic"
        assert lines[2] == "# components 1"
        assert lines[3] == "# edges orbit-representatives"
        labels = [line for line in lines if line.startswith("label ")]
        assert labels == [f"label {v} 0" for v in range(1, 6)]
        assert len(lines) == 4 + len(graph.edges) + 5

    def test_explicit_export_lists_every_edge(self, tmp_path, klein):
        """Test explicit mode writes every edge and no orbit marker."""
        graph = GraphService.build_nonf_graph(klein, CYCLIC, GraphMode.EXPLICIT)
        lines = GraphService.export_graph(graph, tmp_path / "klein.txt").read_text().splitlines()

        assert "# edges orbit-representatives" not in lines
        assert {"1 2", "1 3", "2 3"} <= set(lines)
        assert not list(tmp_path.glob(".*.tmp"))
