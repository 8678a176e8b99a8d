"""
Pydantic schemas for analysis and verification reports.

Every report is serialized with ``model_dump_json(indent=2)``.
"""

from typing import Literal

from pydantic import BaseModel, Field, computed_field

VerdictStatus = Literal["yes", "no", "partial"]
ConnectivityStatus = Literal["connected", "disconnected", "empty"]


class Verdict(BaseModel):
    """
    Three-way verdict of a quantified check.

    ``partial`` means a cap truncated the quantifier; it never stands in for yes.
    """

    status: VerdictStatus
    checked: int = Field(0, description="Number of instances examined")
    witness: dict | None = Field(None, description="Re-verifiable counterexample for a 'no'")
    detail: str = ""


class ConnectivityVerdict(BaseModel):
    component_count: int = Field(..., ge=0)
    status: ConnectivityStatus


class LemmaResult(BaseModel):
    """Instance checks of one lemma over a corpus."""

    lemma: str
    spec: str
    instances: int = Field(0, description="Instances examined")
    hypothesis_held: int = Field(0, description="Instances whose hypotheses held")
    failures: list[str] = Field(default_factory=list, description="Witnesses of failed conclusions")

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.failures


class FailureRecord(BaseModel):
    """Machine-readable failure record attached to a report."""

    check: str
    group: str
    message: str
    details: dict = Field(default_factory=dict)


class AnalysisReport(BaseModel):
    """Full analysis of one group against one class."""

    group: str
    order: int
    group_hash: str
    spec: str
    mode: Literal["explicit", "orbit"]
    isolated_order: int
    isolated_is_subgroup: bool
    vertex_count: int
    connectivity: ConnectivityVerdict
    universal_vertices: int
    semiregular: Verdict | None = None
    strongly_semiregular: Verdict | None = None
    lemma_results: list[LemmaResult] = Field(default_factory=list)
    failures: list[FailureRecord] = Field(default_factory=list)
    elapsed_seconds: float = 0.0


class SuiteEntry(BaseModel):
    group: str
    order: int
    check: str
    passed: bool
    detail: str = ""


class SuiteReport(BaseModel):
    """Result of a verification suite run over the corpus."""

    suite: str
    max_order: int
    entries: list[SuiteEntry] = Field(default_factory=list)
    lemma_results: list[LemmaResult] = Field(default_factory=list)
    failures: list[FailureRecord] = Field(default_factory=list)
    elapsed_seconds: float = 0.0

    @computed_field
    @property
    def passed(self) -> bool:
        return (
            all(e.passed for e in self.entries)
            and all(r.passed for r in self.lemma_results)
            and not self.failures
        )


class RecognizabilityEntry(BaseModel):
    group: str
    order: int
    is_member: bool
    f2_member: bool
    witness: bool = Field(False, description="Member of the 2-generated closure but not of the class")


class TwoRecognizabilityReport(BaseModel):
    spec: str
    entries: list[RecognizabilityEntry] = Field(default_factory=list)

    @computed_field
    @property
    def witnesses(self) -> list[str]:
        return [e.group for e in self.entries if e.witness]


class DClassEntry(BaseModel):
    """One group checked against the two-primes class dichotomy."""

    group: str
    order: int
    branch: Literal["universal", "subgroup"]
    passed: bool
    isolated_order: int
    shape_checked: bool = Field(False, description="Whether the structural dichotomy applied")
    detail: str = ""


class DClassReport(BaseModel):
    entries: list[DClassEntry] = Field(default_factory=list)

    @computed_field
    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)


class ModuleDecompositionSummary(BaseModel):
    """Serializable view of a module decomposition V^t x| H."""

    quotient_order: int
    prime: int
    dimension: int
    t: int
    endo_dim: int
    socle_orders: list[int]
    complement_order: int
    complement_source: str
    w_family_size: int
    w_oracle_count: int | None = None


class CounterexampleReport(BaseModel):
    """Steps of the counterexample-structure check and the witnesses found."""

    group: str
    order: int
    spec: str
    d_group_lower_bound: int
    normal_order: int
    quotient_order: int
    decomposition: ModuleDecompositionSummary
    matching_normal_subgroups: int = 1
    distinguished_w: int = Field(..., description="Index of the unique W whose preimage is outside F2")
    m_order: int
    edges_checked: int
    edges_in_conjugates: int
    edges_in_socle_preimage: int
    disjunct: Literal["conjugate", "prime_order_complement", "both"]
    assumptions: list[str] = Field(default_factory=list)
    steps: list[str] = Field(default_factory=list)
