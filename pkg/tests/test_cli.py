"""
Tests for the nonf command line.
"""

import json

import pytest

from nonfgraph.main import build_parser, cli_main, load_group

QUIET = ["--log-level", "WARNING"]


@pytest.mark.unit
class TestLoadGroup:
    """Tests for load_group."""

    def test_family_source(self):
        """Test family:<spec> builds the family member."""
        name, group = load_group("family:dihedral(4)")

        assert name == "dihedral(4)"
        assert group.order == 8

    def test_file_source(self, tmp_path):
        """Test a path is read as a group file."""
        path = tmp_path / "d8.group"
        assert cli_main([*QUIET, "construct", "--family", "dihedral(4)", "--out", str(path)]) == 0

        name, group = load_group(str(path))
        assert name == "d8.group"
        assert group.order == 8


@pytest.mark.unit
class TestCommands:
    """Tests for the subcommands and their exit codes."""

    def test_corpus_list(self, capsys):
        """Test the family listing."""
        assert cli_main([*QUIET, "corpus", "list", "--max-order", "4"]) == 0

        out = capsys.readouterr().out
        assert "sylow2_sym8" in out
        assert "cyclic(4)" in out

    def test_construct_table_format(self, tmp_path):
        """Test --format table writes a Cayley table."""
        path = tmp_path / "c5.group"

        assert cli_main([*QUIET, "construct", "--family", "cyclic(5)", "--out", str(path), "--format", "table"]) == 0
        assert path.read_text().splitlines()[:2] == ["group/v1 5", "table"]

    def test_analyze_report(self, tmp_path):
        """Test the JSON report of a cyclic group."""
        out = tmp_path / "report.json"

        code = cli_main([*QUIET, "analyze", "--group", "family:cyclic(6)", "--class", "cyclic", "--out", str(out)])

        assert code == 0
        report = json.loads(out.read_text())
        assert report["isolated_order"] == 6
        assert report["connectivity"]["status"] == "empty"
        assert report["semiregular"]["status"] == "yes"

    def test_analyze_stdout_and_graph(self, tmp_path, capsys):
        """Test the report goes to stdout and the graph to --graph-out."""
        graph = tmp_path / "graph.txt"

        code = cli_main(
            [*QUIET, "analyze", "--group", "family:symmetric(3)", "--class", "cyclic", "--mode", "explicit", "--graph-out", str(graph)]
        )

        assert code == 0
        assert json.loads(capsys.readouterr().out)["mode"] == "explicit"
        assert graph.read_text().startswith("# group ")

    def test_forbid_class_with_family(self, capsys):
        """Test a forbidden list resolves family specs."""
        code = cli_main([*QUIET, "analyze", "--group", "family:symmetric(4)", "--class", "forbid:cyclic(4)"])

        assert code == 0
        assert json.loads(capsys.readouterr().out)["universal_vertices"] == 6

    def test_verify_examples_subset(self, tmp_path, mocker):
        """Test verify writes the suite report and maps it to an exit code."""
        mocker.patch("nonfgraph.workers.suite_runner.suite_tasks", return_value=["metabelian_witness"])
        out = tmp_path / "suite.json"

        assert cli_main([*QUIET, "verify", "--suite", "examples", "--max-order", "200", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["passed"]
        assert len(report["entries"]) == 3


@pytest.mark.unit
class TestExitCodes:
    """Tests for usage, parse and cap exit codes."""

    @pytest.mark.parametrize(
        "argv",
        [
            ["analyze"],
            ["verify", "--suite", "everything", "--max-order", "10"],
            ["construct", "--family", "cyclic(4)"],
            ["nonsense"],
        ],
    )
    def test_usage_errors(self, argv):
        """Test argparse failures exit 2."""
        assert cli_main([*QUIET, *argv]) == 2

    def test_unknown_class(self):
        """Test an unknown class is a parse error."""
        assert cli_main([*QUIET, "analyze", "--group", "family:cyclic(6)", "--class", "hyperbolic"]) == 2

    def test_missing_group_file(self, tmp_path):
        """Test a missing group file is a parse error."""
        assert cli_main([*QUIET, "analyze", "--group", str(tmp_path / "absent.group"), "--class", "cyclic"]) == 2

    def test_order_cap(self):
        """Test a family above the order cap exits 3."""
        assert cli_main([*QUIET, "analyze", "--group", "family:example1_inner(5)", "--class", "cyclic"]) == 3

    def test_help(self):
        """Test --help exits 0."""
        assert cli_main(["--help"]) == 0

    def test_parser_prog(self):
        """Test the program name."""
        assert build_parser().prog == "nonf"
