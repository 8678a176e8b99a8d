"""
Verdicts and structure checks built on the graph engine.

Semiregularity quantifies over subgroups up to conjugacy, since isolated
sets are carried to isolated sets by conjugation. A cap on the subgroup
lattice turns a verdict into "partial", never into "yes".
"""

from __future__ import annotations

import time
from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np
from loguru import logger
from sympy import factorint, isprime, primefactors

from nonfgraph.core.config import settings
from nonfgraph.core.exceptions import CapExceeded, InvalidParameters, ShapeMismatch
from nonfgraph.groups.conjugacy import (
    centralizer,
    centralizer_orbits,
    class_representatives,
    conjugates,
)
from nonfgraph.groups.constructors import induced_group, quotient
from nonfgraph.groups.element_set import ElementSet
from nonfgraph.groups.finite_group import FiniteGroup, IndexArray
from nonfgraph.groups.homomorphism import Homomorphism
from nonfgraph.schemas.reports import (
    AnalysisReport,
    ConnectivityVerdict,
    CounterexampleReport,
    DClassEntry,
    DClassReport,
    FailureRecord,
    ModuleDecompositionSummary,
    Verdict,
)
from nonfgraph.services.class_predicates import (
    ClassKind,
    ClassService,
    ClassSpec,
    MembershipOracle,
    make_spec,
)
from nonfgraph.services.graph import GraphMode, GraphService, NonFGraph
from nonfgraph.services.modules import (
    ModuleDescription,
    all_vectors,
    build_module_action,
    hom_space,
    null_space,
    reduced_basis,
    restrict_matrices,
    span_vectors,
    vector_indices,
)
from nonfgraph.services.subgroups import (
    Characteristic,
    SubgroupService,
    _join,
    is_abelian,
    is_soluble,
)


def standalone(subgroup: ElementSet) -> tuple[FiniteGroup, IndexArray]:
    """A subgroup as its own group with the parent index of each element."""
    if subgroup.size == subgroup.parent.order:
        return subgroup.parent, subgroup.parent.elements
    return induced_group(subgroup)


def _sections(group: FiniteGroup) -> tuple[list[ElementSet], bool]:
    """Subgroups up to conjugacy, or G and its small normal subgroups when the lattice is capped."""
    try:
        return SubgroupService.all_subgroups(group, up_to_conjugacy=True).subgroups, False
    except CapExceeded:
        normals = [
            n for n in SubgroupService.normal_subgroups(group) if n.size <= settings.LATTICE_CAP
        ]
        logger.warning(
            "Subgroup lattice capped; checking G and its normal subgroups",
            order=group.order,
            normal=len(normals),
        )
        return [*normals, ElementSet.whole(group)], True


def _isolated_is_subgroup(group: FiniteGroup, spec: ClassSpec) -> tuple[bool, int]:
    isolated = GraphService.isolated_set(group, spec)
    return isolated.is_subgroup, isolated.size


def _members_to_parent(members: IndexArray, local: Iterable[int]) -> list[int]:
    return [int(members[x]) for x in local]


def connectivity_status(graph: NonFGraph) -> ConnectivityVerdict:
    if graph.is_empty:
        status = "empty"
    elif graph.component_count == 1:
        status = "connected"
    else:
        status = "disconnected"
    return ConnectivityVerdict(component_count=graph.component_count, status=status)


# ----------------------------------------------------------------------
# Module decompositions
# ----------------------------------------------------------------------


@dataclass
class ModuleDecomposition:
    """
    A group of shape V^t x| H with its socle written as coordinates over GF(p).

    ``endo_dim`` here is dim V over End_H(V) (the module's ``u``), while
    ``module.endo_dim`` is dim End_H(V) over GF(p).
    """

    quotient: FiniteGroup
    socle: ElementSet
    socle_components: list[ElementSet]
    complement: ElementSet
    complement_source: str
    t: int
    endo_dim: int
    module: ModuleDescription
    socle_module: ModuleDescription
    socle_elements: IndexArray
    W_family: list[ElementSet]
    w_oracle_count: int | None = None

    @property
    def prime(self) -> int:
        return self.module.prime

    def summary(self) -> ModuleDecompositionSummary:
        return ModuleDecompositionSummary(
            quotient_order=self.quotient.order,
            prime=self.prime,
            dimension=self.module.dimension,
            t=self.t,
            endo_dim=self.endo_dim,
            socle_orders=[c.size for c in self.socle_components],
            complement_order=self.complement.size,
            complement_source=self.complement_source,
            w_family_size=len(self.W_family),
            w_oracle_count=self.w_oracle_count,
        )


def _find_complement(group: FiniteGroup, socle: ElementSet, hint: ElementSet | None) -> tuple[ElementSet, str]:
    target = group.order // socle.size

    def fits(candidate: ElementSet) -> bool:
        return (
            candidate.size == target
            and candidate.is_subgroup
            and candidate.intersection(socle).size == 1
        )

    if hint is not None:
        if not fits(hint):
            raise ShapeMismatch("complement", "hinted subgroup does not complement the socle")
        return hint, "hint"
    provenance = group.provenance
    if provenance.kind == "semidirect" and provenance.factors[0].order == socle.size:
        candidate = ElementSet.from_indices(group, provenance.embeddings["H"])
        if fits(candidate):
            return candidate, "provenance"
    if group.order <= settings.LATTICE_CAP:
        for sub in SubgroupService.all_subgroups(group).subgroups:
            if fits(sub):
                return sub, "lattice"
    raise ShapeMismatch("complement", "no complement to the socle found", {"order": group.order})


def _socle_coordinates(group: FiniteGroup, socle: ElementSet, p: int) -> tuple[IndexArray, IndexArray]:
    """Element at each coordinate vector, and coordinate index of each element (-1 off the socle)."""
    basis: list[int] = []
    span = np.zeros(group.order, dtype=bool)
    span[0] = True
    for x in socle.members[1:].tolist():
        if not span[x]:
            basis.append(x)
            span = group.closure_mask(basis, seed=span)
    vectors = all_vectors(p, len(basis))
    elements = np.zeros(vectors.shape[0], dtype=np.int64)
    for i, b in enumerate(basis):
        elements = group.mul_arrays(elements, group.power_arrays(np.full(vectors.shape[0], b), vectors[:, i]))
    position = np.full(group.order, -1, dtype=np.int64)
    position[elements] = np.arange(elements.size)
    if np.unique(elements).size != elements.size or not np.array_equal(np.sort(elements), socle.members):
        raise ShapeMismatch("socle", "greedy basis does not give coordinates")
    return elements, position


def _subspace_matrices(
    members: IndexArray, position: IndexArray, socle_gens: np.ndarray, p: int, k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Reduced basis of a submodule given by its members, and its generator matrices."""
    vectors = all_vectors(p, k)[position[members]]
    basis, pivots = reduced_basis(vectors, p)
    return basis, restrict_matrices(basis, pivots, socle_gens, p)


def _kernel_family(
    dec_matrices: tuple[np.ndarray, np.ndarray], p: int, k: int
) -> list[np.ndarray]:
    """Kernels (as vector-index arrays) of the nonzero H-maps from the socle onto V."""
    socle_gens, v_gens = dec_matrices
    d = v_gens.shape[-1]
    homs = hom_space(socle_gens, v_gens, p)
    r = homs.shape[0]
    if p**r > settings.COMMUTANT_ENUMERATION_CAP:
        raise CapExceeded("H-map enumeration", p**r, settings.COMMUTANT_ENUMERATION_CAP)
    kernels: dict[bytes, np.ndarray] = {}
    for coefficients in all_vectors(p, r)[1:]:
        f = (coefficients @ homs % p).reshape(d, k)
        kernel = null_space(f, p)
        indices = np.sort(vector_indices(span_vectors(kernel, p), p))
        kernels.setdefault(indices.tobytes(), indices)
    return [kernels[key] for key in sorted(kernels)]


def module_decomposition(group: FiniteGroup, complement_hint: ElementSet | None = None) -> ModuleDecomposition:
    """
    Decompose a group of shape V^t x| H along its socle.

    Args:
        group: The group, expected to have an elementary abelian socle with a complement
        complement_hint: A complement to use instead of searching

    Returns:
        The decomposition with its family of submodules isomorphic to V^(t-1)

    Raises:
        ShapeMismatch: If the socle is not elementary abelian, has no complement,
            or is not a sum of isomorphic irreducibles
    """
    socle = SubgroupService.characteristic_structure(group, Characteristic.SOCLE)
    orders = set(group.elem_order[socle.members].tolist()) - {1}
    if socle.size == 1 or len(orders) != 1 or not isprime(next(iter(orders))) or not is_abelian(socle):
        raise ShapeMismatch("socle", "socle is not a nontrivial elementary abelian group", {"order": socle.size})
    p = orders.pop()
    k = factorint(socle.size)[p]

    complement, source = _find_complement(group, socle, complement_hint)
    h_group, h_members = standalone(complement)
    elements, position = _socle_coordinates(group, socle, p)
    basis_elements = elements[p ** np.arange(k - 1, -1, -1)]

    generator_matrices = []
    for s in h_group.generators:
        h = int(h_members[s])
        images = group.mul_arrays(group.mul_arrays(h, basis_elements), group.inv[h])
        generator_matrices.append(all_vectors(p, k)[position[images]].T)
    _, socle_module = build_module_action(h_group, p, k, generator_matrices)
    socle_gens = socle_module.generator_matrices

    components: list[ElementSet] = []
    current = ElementSet.trivial(group)
    for m in SubgroupService.minimal_normal_subgroups(group):
        if m.issubset(socle) and m.intersection(current).size == 1:
            components.append(m)
            current = _join(group, current, m.generators)
    if current.size != socle.size:
        raise ShapeMismatch("socle", "minimal normal subgroups do not span the socle")

    component_gens = [_subspace_matrices(c.members, position, socle_gens, p, k)[1] for c in components]
    v_gens = component_gens[0]
    d = v_gens.shape[-1]
    _, module = build_module_action(h_group, p, d, list(v_gens))
    for i, gens in enumerate(component_gens[1:], start=1):
        if gens.shape[-1] != d or hom_space(gens, v_gens, p).shape[0] == 0:
            raise ShapeMismatch("socle", "socle components are not isomorphic", {"component": i})
    if not module.irreducible:
        raise ShapeMismatch("socle", "socle component is reducible")
    t = len(components)

    family = []
    for kernel in _kernel_family((socle_gens, v_gens), p, k):
        mask = np.zeros(group.order, dtype=bool)
        mask[elements[kernel]] = True
        family.append(ElementSet(group, mask))
    expected = p ** (d * (t - 1))
    for w in family:
        if w.size != expected:
            raise ShapeMismatch("submodules", "kernel has the wrong order", {"order": w.size})
        for v in components:
            if not v.issubset(w) and (v.intersection(w).size != 1 or v.size * w.size != socle.size):
                raise ShapeMismatch("submodules", "kernel does not complement a component it misses")

    oracle = 0
    family_keys = {w.mask.tobytes() for w in family}
    for n in SubgroupService.normal_subgroups(group):
        if n.size != expected or not n.issubset(socle):
            continue
        gens = _subspace_matrices(n.members, position, socle_gens, p, k)[1]
        if hom_space(gens, v_gens, p).shape[0] == (t - 1) * module.endo_dim:
            oracle += 1
            if n.mask.tobytes() not in family_keys:
                raise ShapeMismatch("submodules", "submodule missing from the kernel family")
    if oracle != len(family):
        raise ShapeMismatch("submodules", "kernel family and enumeration disagree", {"kernels": len(family), "enumerated": oracle})

    logger.info(
        "Module decomposition",
        order=group.order,
        prime=p,
        dimension=d,
        t=t,
        u=module.u,
        family=len(family),
    )
    return ModuleDecomposition(
        quotient=group,
        socle=socle,
        socle_components=components,
        complement=complement,
        complement_source=source,
        t=t,
        endo_dim=module.u,
        module=module,
        socle_module=socle_module,
        socle_elements=elements,
        W_family=family,
        w_oracle_count=oracle,
    )


def complement_family(decomposition: ModuleDecomposition, base: ElementSet) -> list[ElementSet]:
    """The submodules U of the socle with socle = base + U and base and U meeting trivially."""
    group = decomposition.quotient
    socle = decomposition.socle
    if not base.issubset(socle):
        raise InvalidParameters("base must lie in the socle")
    found = [
        n
        for n in SubgroupService.normal_subgroups(group)
        if n.issubset(socle) and n.size * base.size == socle.size and n.intersection(base).size == 1
    ]
    return sorted(found, key=lambda s: s.sort_key())


# ----------------------------------------------------------------------
# Service
# ----------------------------------------------------------------------


class AnalysisService:
    """Service class for semiregularity, connectivity and structure checks."""

    @staticmethod
    def is_semiregular(group: FiniteGroup, spec: ClassSpec) -> Verdict:
        """
        Whether I(K) is a subgroup for every subgroup K.

        Args:
            group: The group
            spec: A subgroup-closed class

        Returns:
            Verdict "yes", "no" with a re-verifiable witness, or "partial" when the
            lattice cap limited the check to G and its normal subgroups
        """
        if not spec.closure.subgroup_closed:
            raise InvalidParameters("semiregularity needs a subgroup-closed class", {"spec": str(spec)})
        sections, partial = _sections(group)
        checked = 0
        for sub in sections:
            local, members = standalone(sub)
            closed, isolated_order = _isolated_is_subgroup(local, spec)
            checked += 1
            if not closed:
                witness = {
                    "subgroup_generators": _members_to_parent(members, local.generators),
                    "subgroup_order": sub.size,
                    "isolated_order": isolated_order,
                }
                logger.info("Group is not semiregular", order=group.order, spec=str(spec), witness=witness)
                return Verdict(status="no", checked=checked, witness=witness)
        status = "partial" if partial else "yes"
        detail = "lattice cap: G and normal subgroups only" if partial else ""
        return Verdict(status=status, checked=checked, detail=detail)

    @staticmethod
    def is_strongly_semiregular(group: FiniteGroup, spec: ClassSpec) -> Verdict:
        """
        Whether I(X/Y) is a subgroup for every subgroup X and normal Y of X.

        Raises:
            InvalidParameters: If the class is not declared subgroup- and quotient-closed
        """
        if not (spec.closure.subgroup_closed and spec.closure.quotient_closed):
            raise InvalidParameters("strong semiregularity needs a subgroup- and quotient-closed class", {"spec": str(spec)})
        sections, partial = _sections(group)
        checked = 0
        for sub in sections:
            local, members = standalone(sub)
            for normal in SubgroupService.normal_subgroups(local):
                if normal.size == local.order:
                    continue
                section = local if normal.size == 1 else quotient(local, normal)[0]
                closed, isolated_order = _isolated_is_subgroup(section, spec)
                checked += 1
                if not closed:
                    witness = {
                        "x_generators": _members_to_parent(members, local.generators),
                        "x_order": sub.size,
                        "y_generators": _members_to_parent(members, normal.generators),
                        "y_order": normal.size,
                        "isolated_order": isolated_order,
                    }
                    return Verdict(status="no", checked=checked, witness=witness)
        status = "partial" if partial else "yes"
        return Verdict(status=status, checked=checked, detail="lattice cap" if partial else "")

    @staticmethod
    def reverify_witness(group: FiniteGroup, spec: ClassSpec, verdict: Verdict) -> bool:
        """Recompute a "no" verdict's witness; True when the witness still refutes."""
        witness = verdict.witness or {}
        if "subgroup_generators" in witness:
            sub = ElementSet.generated_by(group, witness["subgroup_generators"])
            return not _isolated_is_subgroup(standalone(sub)[0], spec)[0]
        if "x_generators" in witness:
            local, members = standalone(ElementSet.generated_by(group, witness["x_generators"]))
            position = np.full(group.order, -1, dtype=np.int64)
            position[members] = np.arange(members.size)
            normal = ElementSet.generated_by(local, position[witness["y_generators"]].tolist())
            section = local if normal.size == 1 else quotient(local, normal)[0]
            return not _isolated_is_subgroup(section, spec)[0]
        return False

    @staticmethod
    def connectivity_verdict(
        group: FiniteGroup, spec: ClassSpec, mode: GraphMode | str = GraphMode.ORBIT
    ) -> tuple[int, ConnectivityVerdict]:
        """Component count and verdict: "empty", "connected" or "disconnected"."""
        graph = GraphService.build_nonf_graph(group, spec, mode)
        verdict = connectivity_status(graph)
        return verdict.component_count, verdict

    @staticmethod
    def verify_icyclic_formula(group: FiniteGroup) -> bool:
        """
        I(G) for the cyclic class against the product of O_p(Z(G)) over the
        primes whose Sylow subgroups are cyclic or generalized quaternion.
        """
        isolated = GraphService.isolated_set(group, make_spec(ClassKind.CYCLIC))
        profile = ClassService.prime_profile(group)
        pieces = [
            SubgroupService.characteristic_structure(group, Characteristic.OP_CENTER, p).members
            for p in sorted(profile.pi_tilde)
        ]
        gens = np.concatenate(pieces) if pieces else np.zeros(0, dtype=np.int64)
        formula = ElementSet(group, group.closure_mask(gens))
        equal = isolated == formula
        if not equal:
            logger.error(
                "Isolated set of the cyclic class differs from the formula",
                order=group.order,
                isolated=isolated.size,
                formula=formula.size,
            )
        return equal

    @staticmethod
    def verify_p_group_identity(group: FiniteGroup) -> bool | None:
        """
        I(G) for the one-prime class is G for a p-group and trivial otherwise,
        when every element has prime-power order; None when some element does not.
        """
        profile = ClassService.prime_profile(group)
        if int(profile.prime_counts.max(initial=0)) > 1:
            return None
        isolated = GraphService.isolated_set(group, make_spec(ClassKind.ONE_PRIME))
        expected = ElementSet.whole(group) if len(profile.pi) <= 1 else ElementSet.trivial(group)
        return isolated == expected

    @staticmethod
    def verify_d_class_proposition(corpus: Iterable[tuple[str, FiniteGroup]]) -> DClassReport:
        """
        Check the two-primes class dichotomy on every corpus group.

        With an element g with |pi(g)| >= 3, g must be adjacent to every other
        element. Otherwise I(G) must be a subgroup, and where G = M x| H with M
        a self-centralizing elementary abelian minimal normal p-subgroup and
        pi(H) = {p1, p2} not containing p, I(G) is M when H has no element of
        order p1 p2 and trivial when it has one.
        """
        spec = make_spec(ClassKind.AT_MOST_TWO_PRIMES)
        entries = []
        for name, group in corpus:
            profile = ClassService.prime_profile(group)
            counts = profile.prime_counts
            isolated = GraphService.isolated_set(group, spec)
            if int(counts.max()) >= 3:
                oracle = MembershipOracle(spec, group)
                failures = []
                for g in class_representatives(group).tolist():
                    if counts[g] < 3:
                        continue
                    _, reps = centralizer_orbits(group, g)
                    if isolated.mask[g] or any(y != g and oracle.pair(g, y) for y in reps.tolist()):
                        failures.append(g)
                entries.append(
                    DClassEntry(
                        group=name,
                        order=group.order,
                        branch="universal",
                        passed=not failures,
                        isolated_order=isolated.size,
                        detail=f"non-universal elements {failures}" if failures else "",
                    )
                )
                continue
            passed = isolated.is_subgroup
            shape = _d_class_shape(group)
            detail = ""
            if shape is not None:
                expected, reason = shape
                if isolated != expected:
                    passed = False
                    detail = f"expected |I| = {expected.size} ({reason})"
                else:
                    detail = reason
            entries.append(
                DClassEntry(
                    group=name,
                    order=group.order,
                    branch="subgroup",
                    passed=passed,
                    isolated_order=isolated.size,
                    shape_checked=shape is not None,
                    detail=detail,
                )
            )
        report = DClassReport(entries=entries)
        logger.info("Two-primes class proposition", groups=len(entries), passed=report.passed)
        return report

    @staticmethod
    def module_decomposition(group: FiniteGroup, complement_hint: ElementSet | None = None) -> ModuleDecomposition:
        return module_decomposition(group, complement_hint)

    @staticmethod
    def complement_family(decomposition: ModuleDecomposition, base: ElementSet) -> list[ElementSet]:
        return complement_family(decomposition, base)

    @staticmethod
    def check_counterexample_structure(
        group: FiniteGroup, spec: ClassSpec, graph: NonFGraph | None = None, name: str = ""
    ) -> CounterexampleReport:
        """
        Check the shape forced on a semiregular group with a disconnected graph.

        The steps are: the preconditions, solubility, a normal subgroup N maximal
        with d(G/N) = 3, the decomposition G/N = V^t x| H with t = 1 + u, the unique
        W in the family whose preimage M of W x| H is outside the 2-generated
        closure, and a sweep placing every edge in a conjugate of M or (when H
        has prime order) in the preimage of the socle.

        Raises:
            ShapeMismatch: At the first failing step; step "preconditions" when
                the group does not satisfy the hypotheses at all
        """
        steps: list[str] = []
        assumptions: list[str] = []
        graph = graph or GraphService.build_nonf_graph(group, spec, GraphMode.ORBIT)
        if graph.component_count < 2:
            raise ShapeMismatch("preconditions", "graph is not disconnected", {"components": graph.component_count})
        steps.append(f"graph has {graph.component_count} components")

        if group.order <= settings.LATTICE_CAP:
            verdict = AnalysisService.is_semiregular(group, spec)
            if verdict.status == "no":
                raise ShapeMismatch("preconditions", "group is not semiregular", verdict.witness)
            for sub in SubgroupService.all_subgroups(group, up_to_conjugacy=True):
                if sub.size == group.order:
                    continue
                sub_graph = GraphService.build_nonf_graph(standalone(sub)[0], spec, GraphMode.ORBIT)
                if sub_graph.component_count > 1:
                    raise ShapeMismatch("preconditions", "a proper subgroup has a disconnected graph", {"order": sub.size})
            steps.append("semiregular with connected proper subgroups")
        else:
            if not graph.isolated.is_subgroup:
                raise ShapeMismatch("preconditions", "I(G) is not a subgroup")
            assumptions.append("semiregularity checked on G only above the lattice cap")
            assumptions.append("graphs of proper subgroups assumed connected above the lattice cap")

        if not is_soluble(ElementSet.whole(group)):
            raise ShapeMismatch("soluble", "group is not soluble")
        steps.append("soluble")

        found: tuple[ElementSet, FiniteGroup, Homomorphism] | None = None
        matching = 0
        for normal in sorted(SubgroupService.normal_subgroups(group), key=lambda s: -s.size):
            if found is not None and normal.size < found[0].size:
                break
            factor, projection = (
                quotient(group, normal) if normal.size > 1 else (group, Homomorphism(group, group, group.elements))
            )
            d = SubgroupService.min_generators(factor)
            if d >= 3:
                if d != 3:
                    raise ShapeMismatch("normal subgroup", "largest quotient needing three generators needs more", {"d": d})
                matching += 1
                if found is None:
                    found = (normal, factor, projection)
        if found is None:
            raise ShapeMismatch("d(G)", "group is 2-generated")
        normal, factor, projection = found
        steps.append(f"N of order {normal.size} with d(G/N) = 3")

        decomposition = module_decomposition(factor)
        if decomposition.t != 1 + decomposition.endo_dim:
            raise ShapeMismatch("module shape", "t differs from 1 + u", {"t": decomposition.t, "u": decomposition.endo_dim})
        steps.append(f"G/N = V^{decomposition.t} x| H with u = {decomposition.endo_dim}")

        edges = graph.edges
        h_gens = list(decomposition.complement.generators)

        def preimage_conjugates(w: ElementSet) -> list[np.ndarray]:
            local = ElementSet.generated_by(factor, list(w.generators) + h_gens)
            pre = projection.preimage(local)
            return [c.mask for c in conjugates(group, pre)]

        def edge_inside(masks: list[np.ndarray]) -> np.ndarray:
            inside = np.zeros(edges.shape[0], dtype=bool)
            for mask in masks:
                inside |= mask[edges[:, 0]] & mask[edges[:, 1]]
            return inside

        outside_f2 = []
        for i, w in enumerate(decomposition.W_family):
            if edge_inside(preimage_conjugates(w)).any():
                outside_f2.append(i)
        if len(outside_f2) != 1:
            raise ShapeMismatch("unique W", "expected exactly one W with preimage outside the 2-generated closure", {"found": outside_f2})
        distinguished = outside_f2[0]
        m_local = ElementSet.generated_by(factor, list(decomposition.W_family[distinguished].generators) + h_gens)
        m = projection.preimage(m_local)
        steps.append(f"unique W at index {distinguished}, |M| = {m.size}")

        in_conjugates = edge_inside(preimage_conjugates(decomposition.W_family[distinguished]))
        socle_preimage = projection.preimage(decomposition.socle).mask
        in_socle = socle_preimage[edges[:, 0]] & socle_preimage[edges[:, 1]]
        h_order = decomposition.complement.size
        prime_complement = isprime(h_order)
        stray = ~in_conjugates & ~(in_socle & prime_complement)
        if stray.any():
            x, y = (int(v) for v in edges[np.flatnonzero(stray)[0]])
            raise ShapeMismatch("edge sweep", "edge outside every conjugate of M", {"edge": [x, y]})
        if in_conjugates.all():
            disjunct = "both" if prime_complement else "conjugate"
        else:
            disjunct = "prime_order_complement"
        steps.append(f"edge sweep: {disjunct}")

        report = CounterexampleReport(
            group=name or group.provenance.description,
            order=group.order,
            spec=str(spec),
            d_group_lower_bound=3,
            normal_order=normal.size,
            quotient_order=factor.order,
            decomposition=decomposition.summary(),
            matching_normal_subgroups=matching,
            distinguished_w=distinguished,
            m_order=m.size,
            edges_checked=int(edges.shape[0]),
            edges_in_conjugates=int(in_conjugates.sum()),
            edges_in_socle_preimage=int(in_socle.sum()),
            disjunct=disjunct,
            assumptions=assumptions,
            steps=steps,
        )
        logger.info("Counterexample structure confirmed", order=group.order, disjunct=disjunct, m_order=m.size)
        return report

    @staticmethod
    def analyze(
        name: str,
        group: FiniteGroup,
        spec: ClassSpec,
        mode: GraphMode | str = GraphMode.ORBIT,
        lemmas: bool = False,
    ) -> AnalysisReport:
        """
        Full report for one group: isolated set, connectivity, universal vertices
        and the semiregularity verdicts where the class allows them.
        """
        from nonfgraph.services.harness import lemma_harness

        started = time.perf_counter()
        graph = GraphService.build_nonf_graph(group, spec, mode)
        failures: list[FailureRecord] = []
        semiregular = strongly = None
        if group.order <= settings.LATTICE_CAP:
            semiregular = AnalysisService.is_semiregular(group, spec)
            if spec.closure.quotient_closed:
                strongly = AnalysisService.is_strongly_semiregular(group, spec)
        else:
            closed = graph.isolated.is_subgroup
            semiregular = Verdict(
                status="partial" if closed else "no",
                checked=1,
                witness=None if closed else {"subgroup_generators": list(group.generators), "subgroup_order": group.order, "isolated_order": graph.isolated.size},
                detail="lattice cap: G only",
            )
        for label, verdict in (("semiregular", semiregular), ("strongly_semiregular", strongly)):
            if verdict is not None and verdict.status == "no" and not AnalysisService.reverify_witness(group, spec, verdict):
                failures.append(FailureRecord(check=label, group=name, message="witness did not re-verify", details=verdict.witness or {}))

        lemma_results = lemma_harness([(name, group)], spec) if lemmas else []
        return AnalysisReport(
            group=name,
            order=group.order,
            group_hash=group.content_hash,
            spec=str(spec),
            mode=str(graph.mode),
            isolated_order=graph.isolated.size,
            isolated_is_subgroup=graph.isolated.is_subgroup,
            vertex_count=graph.vertices.size,
            connectivity=connectivity_status(graph),
            universal_vertices=graph.universal_vertices.size,
            semiregular=semiregular,
            strongly_semiregular=strongly,
            lemma_results=lemma_results,
            failures=failures,
            elapsed_seconds=round(time.perf_counter() - started, 3),
        )


def _d_class_shape(group: FiniteGroup) -> tuple[ElementSet, str] | None:
    """Expected I(G) for groups M x| H of the dichotomy shape, or None when the shape does not apply."""
    for m in SubgroupService.minimal_normal_subgroups(group):
        primes = primefactors(m.size)
        if len(primes) != 1 or not is_abelian(m):
            continue
        p = primes[0]
        if set(group.elem_order[m.members].tolist()) - {1, p}:
            continue
        centralizing = np.ones(group.order, dtype=bool)
        for g in m.generators:
            centralizing &= centralizer(group, g).mask
        if not np.array_equal(centralizing, m.mask):
            continue
        factor, _ = quotient(group, m)
        top = primefactors(factor.order)
        if len(top) != 2 or p in top:
            continue
        mixed = bool(np.any(factor.elem_order % (top[0] * top[1]) == 0))
        if mixed:
            return ElementSet.trivial(group), f"H has elements of order {top[0] * top[1]}"
        return m, f"H has no elements of order {top[0] * top[1]}"
    return None
