"""
Pydantic schema for the group file format.

A group file is text: a header ``group/v1 <n>``, then either
``gens <degree>`` followed by one cycle-notation permutation per line or
``table`` followed by n rows of n integers, an optional ``labels`` section
with one label per line, and a closing ``sha256 <hex>`` line hashing
everything before it.
"""

from typing import Literal

from pydantic import BaseModel, Field, field_validator, model_validator

GROUP_FILE_VERSION = "group/v1"


class GroupFile(BaseModel):
    """
    Parsed contents of a group file.

    Permutation generators are stored as cycle lists; the table form stores
    the full Cayley table with ``table[a][b]`` the index of a*b.
    """

    version: Literal["group/v1"] = GROUP_FILE_VERSION
    order: int = Field(..., gt=0, description="Number of elements n")
    kind: Literal["gens", "table"]
    degree: int | None = Field(None, ge=1, description="Number of points for permutation generators")
    generators: list[list[list[int]]] = Field(
        default_factory=list,
        description="One list of cycles per generator",
        examples=[[[[0, 1]], [[0, 1, 2]]]],
    )
    table: list[list[int]] = Field(default_factory=list, description="Cayley table rows")
    labels: list[str] | None = Field(None, description="Optional element labels")
    sha256: str | None = Field(None, description="Hex digest of the file body")

    @field_validator("sha256")
    @classmethod
    def validate_digest(cls, v):
        """Validate the digest is 64 lowercase hex characters."""
        if v is None:
            return v
        v = v.strip().lower()
        if len(v) != 64 or any(ch not in "0123456789abcdef" for ch in v):
            raise ValueError("sha256 must be 64 hex characters")
        return v

    @model_validator(mode="after")
    def validate_shape(self):
        """Validate the body matches the declared kind and order."""
        if self.kind == "gens":
            if self.degree is None:
                raise ValueError("permutation generators need a degree")
            for cycles in self.generators:
                points = [x for cycle in cycles for x in cycle]
                if len(points) != len(set(points)) or any(not 0 <= x < self.degree for x in points):
                    raise ValueError(f"cycles {cycles} are not disjoint cycles on {self.degree} points")
        else:
            if len(self.table) != self.order or any(len(row) != self.order for row in self.table):
                raise ValueError(f"table must have {self.order} rows of {self.order} entries")
        if self.labels is not None and len(self.labels) != self.order:
            raise ValueError(f"expected {self.order} labels, got {len(self.labels)}")
        return self
