"""
Group file service.

Reads and writes the text group format described in
``nonfgraph.schemas.group_file``. Permutation groups are written by their
generators, everything else by its Cayley table.
"""

import hashlib
import re
from pathlib import Path
from typing import Literal

import numpy as np
from loguru import logger
from pydantic import ValidationError
from sympy.combinatorics import Permutation

from nonfgraph.core.exceptions import ParseError
from nonfgraph.groups.constructors import from_permutation_generators, from_table
from nonfgraph.groups.finite_group import FiniteGroup
from nonfgraph.schemas.group_file import GROUP_FILE_VERSION, GroupFile
from nonfgraph.services.graph import atomic_write_text

CYCLE_PATTERN = re.compile(r"\(([^()]*)\)")
CYCLES_LINE = re.compile(r"^(\([^()]*\))+$")


def _digest(body: str) -> str:
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


def format_cycles(cycles: list[list[int]]) -> str:
    """Cycle notation with 1-cycles omitted; the identity is ``()``."""
    if not cycles:
        return "()"
    return "".join("(" + " ".join(str(x) for x in cycle) + ")" for cycle in cycles)


def parse_cycles(text: str, line: int | None = None) -> list[list[int]]:
    """Parse ``(0 1 2)(3 4)`` into a list of cycles."""
    compact = text.replace(" ", "").replace(",", "")
    if not CYCLES_LINE.match(compact) and compact != "()":
        raise ParseError("group file", f"not a cycle-notation permutation: {text!r}", line)
    cycles = []
    for body in CYCLE_PATTERN.findall(text):
        parts = body.replace(",", " ").split()
        try:
            cycle = [int(x) for x in parts]
        except ValueError as exc:
            raise ParseError("group file", f"non-integer point in {text!r}", line) from exc
        if len(cycle) > 1:
            cycles.append(cycle)
    return cycles


class GroupFileService:
    """Service for converting groups to and from group files."""

    @staticmethod
    def to_model(group: FiniteGroup, kind: Literal["auto", "gens", "table"] = "auto") -> GroupFile:
        """
        Describe a group as a GroupFile model.

        Args:
            group: The group to describe
            kind: "gens" for permutation generators, "table" for the Cayley
                table, "auto" to use generators when the group was built from
                permutations

        Returns:
            The model, without a digest

        Raises:
            ParseError: If "gens" is requested for a group without permutation generators
            CapExceeded: If a table is requested above the dense table cap
        """
        data = group.provenance.data
        has_perms = "generators" in data and "degree" in data
        if kind == "auto":
            kind = "gens" if has_perms else "table"
        if kind == "gens":
            if not has_perms:
                raise ParseError("group file", "group was not built from permutation generators")
            degree = int(data["degree"])
            generators = [
                [list(map(int, c)) for c in Permutation(list(map(int, image)), size=degree).cyclic_form]
                for image in data["generators"]
            ]
            return GroupFile(order=group.order, kind="gens", degree=degree, generators=generators, labels=group.labels)
        return GroupFile(order=group.order, kind="table", table=group.table.tolist(), labels=group.labels)

    @staticmethod
    def render(model: GroupFile) -> str:
        """Serialize a model to text, computing the closing digest."""
        lines = [f"{GROUP_FILE_VERSION} {model.order}"]
        if model.kind == "gens":
            lines.append(f"gens {model.degree}")
            lines.extend(format_cycles(cycles) for cycles in model.generators)
        else:
            lines.append("table")
            lines.extend(" ".join(str(x) for x in row) for row in model.table)
        if model.labels is not None:
            lines.append("labels")
            lines.extend(model.labels)
        body = "\n".join(lines) + "\n"
        return body + f"sha256 {_digest(body)}\n"

    @staticmethod
    def parse(text: str) -> GroupFile:
        """
        Parse group file text.

        Raises:
            ParseError: On a malformed header or body, or a digest mismatch
        """
        lines = text.splitlines()
        if not lines or not lines[-1].startswith("sha256 "):
            raise ParseError("group file", "missing closing sha256 line", len(lines))
        digest = lines[-1].split(maxsplit=1)[1].strip()
        body = "\n".join(lines[:-1]) + "\n"
        if _digest(body) != digest.lower():
            raise ParseError("group file", "content hash mismatch", len(lines))

        header = lines[0].split()
        if len(header) != 2 or header[0] != GROUP_FILE_VERSION or not header[1].isdigit():
            raise ParseError("group file", f"bad header {lines[0]!r}", 1)
        order = int(header[1])
        section = lines[1].split() if len(lines) > 2 else []
        fields: dict = {"order": order, "sha256": digest}
        rest = lines[2:-1]
        if "labels" in rest:
            cut = rest.index("labels")
            fields["labels"] = rest[cut + 1 :]
            rest = rest[:cut]

        if section[:1] == ["gens"] and len(section) == 2 and section[1].isdigit():
            fields.update(kind="gens", degree=int(section[1]))
            fields["generators"] = [parse_cycles(line, 3 + k) for k, line in enumerate(rest)]
        elif section == ["table"]:
            try:
                fields.update(kind="table", table=[[int(x) for x in line.split()] for line in rest])
            except ValueError as exc:
                raise ParseError("group file", "non-integer table entry") from exc
        else:
            raise ParseError("group file", f"expected 'gens <degree>' or 'table', got {lines[1] if len(lines) > 1 else ''!r}", 2)

        try:
            return GroupFile(**fields)
        except ValidationError as exc:
            raise ParseError("group file", exc.errors()[0]["msg"]) from exc

    @staticmethod
    def to_group(model: GroupFile) -> FiniteGroup:
        """
        Build the group a model describes; a table is validated in full.

        Raises:
            ParseError: If the generators close to a group of another order
            InvalidParameters: If the table breaks a group axiom
        """
        if model.kind == "gens":
            degree = int(model.degree or 1)
            images = [
                Permutation(cycles, size=degree).array_form if cycles else list(range(degree))
                for cycles in model.generators
            ]
            group = from_permutation_generators(images, degree)
            if group.order != model.order:
                raise ParseError("group file", f"generators close to order {group.order}, header says {model.order}")
            group.labels = model.labels
        else:
            group = from_table(np.asarray(model.table, dtype=np.int64), labels=model.labels, description="group file")
            group.validate()
        return group

    @staticmethod
    def write_group(group: FiniteGroup, path: str | Path, kind: Literal["auto", "gens", "table"] = "auto") -> Path:
        """Write a group file atomically and return its path."""
        text = GroupFileService.render(GroupFileService.to_model(group, kind))
        target = atomic_write_text(Path(path), text)
        logger.info("Group file written", path=str(target), order=group.order)
        return target

    @staticmethod
    def read_group(path: str | Path) -> FiniteGroup:
        """Read and validate a group file."""
        source = Path(path)
        try:
            text = source.read_text(encoding="utf-8")
        except OSError as exc:
            raise ParseError(str(source), f"cannot read file: {exc.strerror}") from exc
        group = GroupFileService.to_group(GroupFileService.parse(text))
        group.provenance.description = source.name
        logger.debug("Group file read", path=str(source), order=group.order)
        return group
