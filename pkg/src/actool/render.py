"""DOT diagrams and JSON reports.

Shape mapping follows the usual GSN conventions: claims are boxes (module
claims use the tabbed shape), strategies parallelograms, context-like nodes
rounded boxes, evidence circles. Undeveloped claims carry a diamond glyph
beneath their text. supportedBy edges are solid with filled arrowheads,
inContextOf edges use open arrowheads, and cross-case resolution edges are
dashed. Emission is fully sorted, so output is byte-stable.

The JSON report schema is documented in FORMATS.md.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Sequence

from .analyze import BundleMetrics, CaseMetrics, ImpactReport
from .diagnostics import Diagnostic
from .link import ResolvedBundle
from .model import (
    AssuranceCase,
    Bundle,
    EdgeKind,
    Element,
    ElementKind,
    format_decimal,
)
from .validate import MatchResult

UNDEVELOPED_GLYPH = "\u25c7"


@dataclass(frozen=True)
class RenderOptions:
    show_contexts: bool = True
    collapse_modules: bool = False
    highlight: frozenset[tuple[str, str]] = field(default_factory=frozenset)
    rank_sep: Decimal = Decimal("0.6")

    def __post_init__(self):
        if not isinstance(self.rank_sep, Decimal):
            object.__setattr__(self, "rank_sep", Decimal(str(self.rank_sep)))
        if self.rank_sep <= 0:
            raise ValueError("rank_sep must be positive")
        object.__setattr__(self, "highlight", frozenset(self.highlight))


_SHAPES = {
    ElementKind.CLAIM: "box",
    ElementKind.STRATEGY: "parallelogram",
    ElementKind.CONTEXT: "box",
    ElementKind.ASSUMPTION: "box",
    ElementKind.JUSTIFICATION: "box",
    ElementKind.EVIDENCE: "circle",
}
_ROUNDED = (ElementKind.CONTEXT, ElementKind.ASSUMPTION, ElementKind.JUSTIFICATION)


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def _node_line(qualified: str, element: Element, highlighted: bool) -> str:
    shape = "tab" if element.is_module else _SHAPES[element.kind]
    label = f"{element.id}\n{element.statement}"
    if element.is_undeveloped:
        label += f"\n{UNDEVELOPED_GLYPH}"
    attrs = [f"shape={shape}"]
    styles = []
    if element.kind in _ROUNDED and not element.is_module:
        styles.append("rounded")
    if highlighted:
        styles.append("filled")
    if styles:
        attrs.append(f'style="{",".join(styles)}"')
    if highlighted:
        attrs.append("fillcolor=lightgray")
    attrs.append(f'label="{_dot_escape(label)}"')
    return f'"{qualified}" [{", ".join(attrs)}];'


def _edge_line(source: str, target: str, kind: EdgeKind) -> str:
    if kind is EdgeKind.IN_CONTEXT_OF:
        return f'"{source}" -> "{target}" [arrowhead=onormal];'
    return f'"{source}" -> "{target}";'


def _hidden_by_modules(case: AssuranceCase) -> set[str]:
    """Elements strictly beneath module claims, over both edge kinds."""
    adjacency: dict[str, list[str]] = {}
    for edge in case.edges:
        if case.has_element(edge.source) and case.has_element(edge.target):
            adjacency.setdefault(edge.source, []).append(edge.target)
    hidden: set[str] = set()
    for element in case.elements:
        if not element.is_module:
            continue
        frontier = list(adjacency.get(element.id, ()))
        while frontier:
            node = frontier.pop()
            if node in hidden:
                continue
            hidden.add(node)
            frontier.extend(adjacency.get(node, ()))
    hidden -= {element.id for element in case.elements if element.is_module}
    return hidden


def _visible_elements(case: AssuranceCase, options: RenderOptions) -> list[Element]:
    hidden = _hidden_by_modules(case) if options.collapse_modules else set()
    visible = []
    for element in case.elements:
        if element.id in hidden:
            continue
        if not options.show_contexts and element.kind in _ROUNDED:
            continue
        visible.append(element)
    return visible


def _case_body(case: AssuranceCase, options: RenderOptions, prefix: str, indent: str) -> list[str]:
    visible = _visible_elements(case, options)
    visible_ids = {element.id for element in visible}
    lines = []
    for element in sorted(visible, key=lambda e: e.id):
        qualified = f"{prefix}{element.id}"
        highlighted = (case.id, element.id) in options.highlight
        lines.append(indent + _node_line(qualified, element, highlighted))
    for edge in sorted(case.edges, key=lambda e: (e.source, e.kind.value, e.target)):
        if edge.source in visible_ids and edge.target in visible_ids:
            lines.append(indent + _edge_line(f"{prefix}{edge.source}", f"{prefix}{edge.target}", edge.kind))
    return lines


def to_dot(
    subject: AssuranceCase | Bundle | ResolvedBundle,
    options: RenderOptions | None = None,
) -> str:
    """Render a case or a bundle as a DOT digraph.

    Bundles are drawn with one cluster per case; resolved away references
    become dashed inter-cluster edges. A raw (unresolved) bundle falls back
    to drawing dashed edges for whichever away references name an existing
    element.
    """
    options = options or RenderOptions()
    header = [
        f"  graph [rankdir=TB, ranksep={format_decimal(options.rank_sep)}];",
        '  node [fontname="Helvetica", fontsize=10];',
    ]
    if isinstance(subject, AssuranceCase):
        lines = [f'digraph "{subject.id}" {{', *header]
        lines.extend(_case_body(subject, options, "", "  "))
        lines.append("}")
        return "\n".join(lines) + "\n"

    if isinstance(subject, ResolvedBundle):
        bundle = subject.bundle
        cross = [
            (f"{source[0]}.{source[1]}", f"{target[0]}.{target[1]}")
            for source, target in subject.resolutions.items()
        ]
    else:
        bundle = subject
        cross = []
        known = {case.id: case for case in bundle.cases()}
        for case in bundle.cases():
            for element in case.elements:
                if element.away_ref is None:
                    continue
                target_case = known.get(element.away_ref[0])
                if target_case is not None and target_case.has_element(element.away_ref[1]):
                    cross.append(
                        (f"{case.id}.{element.id}", f"{element.away_ref[0]}.{element.away_ref[1]}")
                    )

    lines = ["digraph bundle {", *header]
    for case in sorted(bundle.cases(), key=lambda c: c.id):
        lines.append(f'  subgraph "cluster_{case.id}" {{')
        lines.append(f'    label="{case.id} ({case.kind.value})";')
        lines.extend(_case_body(case, options, f"{case.id}.", "    "))
        lines.append("  }")
    for source, target in sorted(cross):
        lines.append(f'  "{source}" -> "{target}" [style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _diagnostic_json(diagnostic: Diagnostic) -> dict:
    return {
        "ruleId": diagnostic.rule_id,
        "severity": diagnostic.severity.value,
        "file": diagnostic.span.file,
        "line": diagnostic.span.line,
        "column": diagnostic.span.column,
        "length": diagnostic.span.length,
        "message": diagnostic.message,
        "elements": [
            {"caseId": case_id, "elementId": element_id}
            for case_id, element_id in diagnostic.elements
        ],
    }


def _capability_json(case_id: str | None, result: MatchResult) -> dict:
    required = result.required
    entry = {
        "caseId": case_id,
        "name": required.name,
        "unit": required.unit,
        "low": format_decimal(required.low),
        "high": format_decimal(required.high),
        "status": result.status.value,
        "provider": None,
    }
    if result.matched_provider is not None:
        provider = result.matched_provider
        entry["provider"] = {
            "name": provider.name,
            "unit": provider.unit,
            "low": format_decimal(provider.low),
            "high": format_decimal(provider.high),
        }
    return entry


def case_metrics_json(m: CaseMetrics) -> dict:
    return {
        "caseId": m.case_id,
        "kind": m.kind.value,
        "elements": {**m.element_counts, "total": m.element_total},
        "edges": {**m.edge_counts, "total": m.edge_total},
        "depth": m.depth,
        "undeveloped": m.undeveloped_count,
        "evidenceCoverage": m.evidence_coverage,
        "concerns": dict(m.concern_counts),
    }


def bundle_metrics_json(m: BundleMetrics) -> dict:
    return {
        "cases": [case_metrics_json(case) for case in m.cases],
        "totals": {
            "elements": {**m.total_element_counts(), "total": m.total_elements},
            "edges": {**m.total_edge_counts(), "total": m.total_edges},
            "undeveloped": m.total_undeveloped,
            "concerns": m.total_concern_counts(),
        },
        "crossLinks": m.cross_link_count,
    }


def impact_json(report: ImpactReport) -> dict:
    return {
        "changed": [
            {"caseId": case_id, "elementId": element_id}
            for case_id, element_id in sorted(report.changed)
        ],
        "affected": {
            case_id: sorted(report.affected[case_id]) for case_id in sorted(report.affected)
        },
        "affectedCacs": sorted(report.affected_cacs),
    }


def report_json(
    diagnostics: Sequence[Diagnostic] | None = None,
    capabilities: Sequence[tuple[str | None, MatchResult]] | None = None,
    metrics: CaseMetrics | BundleMetrics | None = None,
    impact: ImpactReport | None = None,
) -> str:
    """One JSON document with any subset of the report sections.

    Key order is fixed; decimal capability bounds are serialized as exact
    strings, so repeated runs are byte-identical.
    """
    document: dict = {}
    if diagnostics is not None:
        document["diagnostics"] = [_diagnostic_json(d) for d in diagnostics]
    if capabilities is not None:
        document["capabilities"] = [_capability_json(case_id, r) for case_id, r in capabilities]
    if metrics is not None:
        if isinstance(metrics, BundleMetrics):
            document["metrics"] = bundle_metrics_json(metrics)
        else:
            document["metrics"] = case_metrics_json(metrics)
    if impact is not None:
        document["impact"] = impact_json(impact)
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"
