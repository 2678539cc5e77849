"""Rule engine for single-case well-formedness and bundle separation checks.

G-rules check one case against the GSN structure conventions, S-rules check
the discipline between a technological case and its clinical cases, U-rules
check capability units and ranges. The full catalog, with severities, is in
RULES.md. Diagnostics come back sorted by (file, line, column, rule id);
evaluation is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .diagnostics import Diagnostic, Severity, sorted_diagnostics
from .model import (
    AssuranceCase,
    Bundle,
    Capability,
    CaseKind,
    Direction,
    EdgeKind,
    Element,
    ElementKind,
    format_decimal,
    supported_by_cycle,
)
from .units import BUILTIN_UNITS, UnitTable


class MatchStatus(Enum):
    SATISFIED = "satisfied"
    UNIT_MISMATCH = "unitMismatch"
    RANGE_NOT_COVERED = "rangeNotCovered"
    MISSING = "missing"


@dataclass(frozen=True)
class MatchResult:
    required: Capability
    status: MatchStatus
    matched_provider: Capability | None = None


SUPPORT_SOURCES = (ElementKind.CLAIM, ElementKind.STRATEGY)
SUPPORT_TARGETS = (ElementKind.CLAIM, ElementKind.STRATEGY, ElementKind.EVIDENCE)
CONTEXT_TARGETS = (ElementKind.CONTEXT, ElementKind.ASSUMPTION, ElementKind.JUSTIFICATION)


def _error(rule: str, span, message: str, *elements: tuple[str, str]) -> Diagnostic:
    return Diagnostic(rule, Severity.ERROR, span, message, tuple(elements))


def _warning(rule: str, span, message: str, *elements: tuple[str, str]) -> Diagnostic:
    return Diagnostic(rule, Severity.WARNING, span, message, tuple(elements))


def is_leaf_claim(case: AssuranceCase, element: Element) -> bool:
    """A claim with no supportedBy edge to another claim or strategy."""
    if element.kind is not ElementKind.CLAIM:
        return False
    for edge in case.edges:
        if edge.source != element.id or edge.kind is not EdgeKind.SUPPORTED_BY:
            continue
        target = case.find(edge.target)
        if target is not None and target.kind in SUPPORT_SOURCES:
            return False
    return True


def has_evidence_support(case: AssuranceCase, element: Element) -> bool:
    for edge in case.edges:
        if edge.source != element.id or edge.kind is not EdgeKind.SUPPORTED_BY:
            continue
        target = case.find(edge.target)
        if target is not None and target.kind is ElementKind.EVIDENCE:
            return True
    return False


def validate_case(case: AssuranceCase, units: UnitTable | None = None) -> list[Diagnostic]:
    """Evaluate G1-G8 and U1-U2 on a single case."""
    units = units or BUILTIN_UNITS
    diagnostics: list[Diagnostic] = []
    cid = case.id

    roots = [e for e in case.elements if e.is_root]
    if len(roots) != 1:
        if not roots:
            diagnostics.append(_error("G1", case.span, f"case {cid!r} declares no root claim"))
        else:
            diagnostics.append(
                _error(
                    "G1",
                    roots[1].span,
                    f"case {cid!r} declares {len(roots)} root claims; exactly one is required",
                    *((cid, r.id) for r in roots),
                )
            )

    cycle = supported_by_cycle(case)
    if cycle is not None:
        first = case.element(cycle[0])
        diagnostics.append(
            _error(
                "G2",
                first.span,
                "supportedBy cycle: " + " -> ".join(cycle),
                *((cid, node) for node in cycle[:-1]),
            )
        )

    for edge in case.edges:
        source = case.find(edge.source)
        target = case.find(edge.target)
        rule = "G3" if edge.kind is EdgeKind.SUPPORTED_BY else "G4"
        if source is None or target is None:
            missing = edge.source if source is None else edge.target
            diagnostics.append(_error(rule, edge.span, f"edge references unknown element {missing!r}"))
            continue
        if edge.kind is EdgeKind.SUPPORTED_BY:
            if source.kind not in SUPPORT_SOURCES:
                diagnostics.append(
                    _error(
                        "G3",
                        edge.span,
                        f"{source.kind.value} {source.id!r} cannot be the source of a supportedBy edge",
                        (cid, source.id),
                    )
                )
            elif target.kind not in SUPPORT_TARGETS:
                diagnostics.append(
                    _error(
                        "G3",
                        edge.span,
                        f"{target.kind.value} {target.id!r} cannot be the target of a supportedBy edge",
                        (cid, target.id),
                    )
                )
            elif source.kind is ElementKind.STRATEGY and target.kind is not ElementKind.CLAIM:
                diagnostics.append(
                    _error(
                        "G3",
                        edge.span,
                        f"strategy {source.id!r} must be supported by claims only, "
                        f"not {target.kind.value} {target.id!r}",
                        (cid, source.id),
                        (cid, target.id),
                    )
                )
        else:
            if source.kind not in SUPPORT_SOURCES:
                diagnostics.append(
                    _error(
                        "G4",
                        edge.span,
                        f"{source.kind.value} {source.id!r} cannot be the source of an inContextOf edge",
                        (cid, source.id),
                    )
                )
            elif target.kind not in CONTEXT_TARGETS:
                diagnostics.append(
                    _error(
                        "G4",
                        edge.span,
                        f"{target.kind.value} {target.id!r} cannot be the target of an inContextOf edge",
                        (cid, target.id),
                    )
                )

    for element in case.elements:
        if element.kind is ElementKind.CLAIM and is_leaf_claim(case, element):
            if not (has_evidence_support(case, element) or element.is_undeveloped or element.away_ref):
                diagnostics.append(
                    _error(
                        "G5",
                        element.span,
                        f"leaf claim {element.id!r} has no supporting evidence and is not "
                        "marked undeveloped",
                        (cid, element.id),
                    )
                )

    if len(roots) == 1:
        reachable = {roots[0].id}
        frontier = [roots[0].id]
        adjacency: dict[str, list[str]] = {}
        for edge in case.edges:
            adjacency.setdefault(edge.source, []).append(edge.target)
        while frontier:
            node = frontier.pop()
            for target in adjacency.get(node, ()):
                if target not in reachable and case.has_element(target):
                    reachable.add(target)
                    frontier.append(target)
        for element in case.elements:
            if element.id not in reachable:
                diagnostics.append(
                    _warning(
                        "G6",
                        element.span,
                        f"element {element.id!r} is not reachable from the root claim",
                        (cid, element.id),
                    )
                )

    for element in case.elements:
        if element.kind is ElementKind.STRATEGY:
            supported = any(
                edge.source == element.id and edge.kind is EdgeKind.SUPPORTED_BY
                for edge in case.edges
            )
            if not supported:
                diagnostics.append(
                    _error(
                        "G7",
                        element.span,
                        f"strategy {element.id!r} has no supporting claim",
                        (cid, element.id),
                    )
                )

    for cap in case.capabilities:
        if cap.direction is Direction.PROVIDED and case.kind is not CaseKind.TECHNOLOGICAL:
            diagnostics.append(
                _error(
                    "G8",
                    cap.span,
                    f"a 'provides' capability is only allowed in a technological case "
                    f"({cap.name!r} in {case.kind.value} case {cid!r})",
                )
            )
        if cap.direction is Direction.REQUIRED and case.kind is not CaseKind.CLINICAL:
            diagnostics.append(
                _error(
                    "G8",
                    cap.span,
                    f"a 'requires' capability is only allowed in a clinical case "
                    f"({cap.name!r} in {case.kind.value} case {cid!r})",
                )
            )
        if units.find(cap.unit) is None:
            diagnostics.append(_error("U1", cap.span, f"unknown unit {cap.unit!r} on capability {cap.name!r}"))
        if cap.low > cap.high:
            diagnostics.append(
                _error(
                    "U2",
                    cap.span,
                    f"capability {cap.name!r} has an empty range "
                    f"[{format_decimal(cap.low)}, {format_decimal(cap.high)}]",
                )
            )

    return sorted_diagnostics(diagnostics)


def match_capabilities(
    required: Sequence[Capability],
    provided: Sequence[Capability],
    units: UnitTable,
) -> list[MatchResult]:
    """Match each required capability against the provided set, in order.

    A requirement is satisfied by the first provider (declaration order) with
    the same name, the same dimension, and a base-unit interval containing
    the required one. Comparison is exact decimal arithmetic on closed
    intervals. Unknown unit symbols raise UnitError.
    """
    for cap in required:
        if cap.direction is not Direction.REQUIRED:
            raise ValueError(f"capability {cap.name!r} is not a required capability")
    for cap in provided:
        if cap.direction is not Direction.PROVIDED:
            raise ValueError(f"capability {cap.name!r} is not a provided capability")
    results: list[MatchResult] = []
    for req in required:
        req_unit = units.lookup(req.unit)
        candidates = [p for p in provided if p.name == req.name]
        if not candidates:
            results.append(MatchResult(req, MatchStatus.MISSING))
            continue
        same_dimension = [
            p for p in candidates if units.lookup(p.unit).dimension is req_unit.dimension
        ]
        if not same_dimension:
            results.append(MatchResult(req, MatchStatus.UNIT_MISMATCH))
            continue
        low = units.to_base(req.low, req.unit)
        high = units.to_base(req.high, req.unit)
        match = None
        for provider in same_dimension:
            if units.to_base(provider.low, provider.unit) <= low and high <= units.to_base(
                provider.high, provider.unit
            ):
                match = provider
                break
        if match is not None:
            results.append(MatchResult(req, MatchStatus.SATISFIED, match))
        else:
            results.append(MatchResult(req, MatchStatus.RANGE_NOT_COVERED))
    return results


def _known_units(capabilities: Sequence[Capability], units: UnitTable) -> list[Capability]:
    return [cap for cap in capabilities if units.find(cap.unit) is not None]


def bundle_match_results(
    bundle: Bundle, units: UnitTable | None = None
) -> list[tuple[str, MatchResult]]:
    """(cac id, result) pairs for every required capability with a known unit."""
    units = units or BUILTIN_UNITS
    provided = _known_units(
        [c for c in bundle.tac.capabilities if c.direction is Direction.PROVIDED], units
    )
    pairs: list[tuple[str, MatchResult]] = []
    for cac in bundle.cacs:
        required = _known_units(
            [c for c in cac.capabilities if c.direction is Direction.REQUIRED], units
        )
        for result in match_capabilities(required, provided, units):
            pairs.append((cac.id, result))
    return pairs


_STATUS_DETAIL = {
    MatchStatus.MISSING: "the technological case provides no capability with this name",
    MatchStatus.UNIT_MISMATCH: "no provider with this name shares its dimension",
    MatchStatus.RANGE_NOT_COVERED: "no provider with this name covers the required range",
}


def link_rule_diagnostics(bundle: Bundle) -> list[Diagnostic]:
    """S1, S2, S5 (errors) plus S7, S8 (warnings): the away-reference rules.

    Shared by validate_bundle and the link resolver so both report identical
    messages.
    """
    diagnostics: list[Diagnostic] = []
    tac = bundle.tac
    cac_ids = {cac.id for cac in bundle.cacs}
    for element in tac.elements:
        if element.away_ref is None:
            continue
        target_case = element.away_ref[0]
        if target_case in cac_ids:
            diagnostics.append(
                _error(
                    "S1",
                    element.span,
                    f"technological case {tac.id!r} references clinical case {target_case!r} "
                    f"from claim {element.id!r}; references must point from clinical to "
                    "technological cases only",
                    (tac.id, element.id),
                )
            )
        else:
            diagnostics.append(
                _warning(
                    "S8",
                    element.span,
                    f"claim {element.id!r} references case {target_case!r}; the technological "
                    "case should be self-contained",
                    (tac.id, element.id),
                )
            )
    for cac in bundle.cacs:
        for element in cac.elements:
            if element.away_ref is None:
                continue
            target_case, target_id = element.away_ref
            if target_case != tac.id:
                diagnostics.append(
                    _error(
                        "S2",
                        element.span,
                        f"claim {element.id!r} references case {target_case!r}; away references "
                        f"must target the associated technological case {tac.id!r}",
                        (cac.id, element.id),
                    )
                )
                continue
            target = tac.find(target_id)
            if target is None:
                diagnostics.append(
                    _error(
                        "S5",
                        element.span,
                        f"away reference target {target_case}.{target_id} does not exist",
                        (cac.id, element.id),
                    )
                )
            elif target.kind is not ElementKind.CLAIM:
                diagnostics.append(
                    _error(
                        "S5",
                        element.span,
                        f"away reference target {target_case}.{target_id} is a "
                        f"{target.kind.value}, not a claim",
                        (cac.id, element.id),
                        (tac.id, target_id),
                    )
                )
            elif not target.is_public:
                diagnostics.append(
                    _error(
                        "S5",
                        element.span,
                        f"away reference target {target_case}.{target_id} is not public",
                        (cac.id, element.id),
                        (tac.id, target_id),
                    )
                )
            elif element.statement != target.statement:
                diagnostics.append(
                    _warning(
                        "S7",
                        element.span,
                        f"statement of claim {element.id!r} differs from its target "
                        f"{target_case}.{target_id}",
                        (cac.id, element.id),
                        (tac.id, target_id),
                    )
                )
    return diagnostics


def validate_bundle(bundle: Bundle, units: UnitTable | None = None) -> list[Diagnostic]:
    """Evaluate the separation rules S1-S8 on a bundle.

    Member cases are assumed to be parsed already; their G-rule findings are
    not repeated here. Run validate_case per member for those.
    """
    units = units or BUILTIN_UNITS
    diagnostics = link_rule_diagnostics(bundle)
    tac = bundle.tac

    for cac in bundle.cacs:
        for element in cac.elements:
            if element.away_ref is None:
                continue
            documented = False
            for edge in cac.edges:
                if edge.source != element.id or edge.kind is not EdgeKind.IN_CONTEXT_OF:
                    continue
                target = cac.find(edge.target)
                if target is not None and target.kind is ElementKind.CONTEXT:
                    documented = True
                    break
            if not documented:
                diagnostics.append(
                    _error(
                        "S3",
                        element.span,
                        f"away-resolved claim {element.id!r} has no documenting context",
                        (cac.id, element.id),
                    )
                )

    provided = _known_units(
        [c for c in tac.capabilities if c.direction is Direction.PROVIDED], units
    )
    for cac in bundle.cacs:
        required = _known_units(
            [c for c in cac.capabilities if c.direction is Direction.REQUIRED], units
        )
        for result in match_capabilities(required, provided, units):
            if result.status is MatchStatus.SATISFIED:
                continue
            req = result.required
            diagnostics.append(
                _error(
                    "S4",
                    req.span,
                    f"required capability {req.name!r} "
                    f"[{format_decimal(req.low)}, {format_decimal(req.high)}] {req.unit} "
                    f"is not satisfied: {_STATUS_DETAIL[result.status]}",
                )
            )

    for cac in bundle.cacs:
        if cac.associated_tac != tac.id:
            if cac.associated_tac is None:
                message = f"clinical case {cac.id!r} declares no associated technological case"
            else:
                message = (
                    f"clinical case {cac.id!r} associates {cac.associated_tac!r}; "
                    f"expected the bundle's technological case {tac.id!r}"
                )
            diagnostics.append(_error("S6", cac.span, message))

    return sorted_diagnostics(diagnostics)
