"""In-memory model of assurance cases and bundles.

An assurance case is a typed directed graph in Goal Structuring Notation
terms: claims, strategies, contexts, assumptions, justifications and evidence,
connected by supportedBy and inContextOf edges. A bundle pairs one
technological case with the clinical cases that build on it.

All values are immutable after construction; every operation in this module
is a pure function of its inputs and safe for concurrent use.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal
from enum import Enum
from typing import Iterable

ID_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_-]*\Z")


class ElementKind(Enum):
    CLAIM = "claim"
    STRATEGY = "strategy"
    CONTEXT = "context"
    ASSUMPTION = "assumption"
    JUSTIFICATION = "justification"
    EVIDENCE = "evidence"


class EdgeKind(Enum):
    SUPPORTED_BY = "supportedBy"
    IN_CONTEXT_OF = "inContextOf"


class CaseKind(Enum):
    MONOLITHIC = "monolithic"
    TECHNOLOGICAL = "technological"
    CLINICAL = "clinical"


class ConcernKind(Enum):
    SAFETY = "safety"
    EFFECTIVENESS = "effectiveness"


class Direction(Enum):
    PROVIDED = "provides"
    REQUIRED = "requires"


class UnknownElementError(LookupError):
    """Raised when an operation names an element or case id that does not exist."""


class CycleError(ValueError):
    """Raised when a traversal requires an acyclic supportedBy graph but finds a cycle."""

    def __init__(self, cycle: list[str]):
        super().__init__("supportedBy cycle: " + " -> ".join(cycle))
        self.cycle = cycle


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int
    length: int = 0

    def __post_init__(self):
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError(f"invalid source span {self.line}:{self.column}+{self.length}")


UNKNOWN_SPAN = SourceSpan("<unknown>", 1, 1, 0)


def _check_id(value: str, what: str) -> None:
    if not ID_PATTERN.match(value):
        raise ValueError(f"invalid {what} {value!r}")


@dataclass(frozen=True)
class Element:
    """One GSN node.

    The root/undeveloped/module flags and the away reference are restricted
    to claims; an away-referenced claim must also be undeveloped, since it is
    not developed locally.
    """

    id: str
    kind: ElementKind
    statement: str
    is_root: bool = False
    is_public: bool = False
    is_undeveloped: bool = False
    is_module: bool = False
    concern: ConcernKind | None = None
    away_ref: tuple[str, str] | None = None
    span: SourceSpan = UNKNOWN_SPAN

    def __post_init__(self):
        _check_id(self.id, "element id")
        if self.kind is not ElementKind.CLAIM:
            for flag, name in (
                (self.is_root, "root"),
                (self.is_undeveloped, "undeveloped"),
                (self.is_module, "module"),
                (self.away_ref is not None, "awayref"),
            ):
                if flag:
                    raise ValueError(f"'{name}' only applies to claims, not {self.kind.value} {self.id!r}")
        if self.away_ref is not None:
            if not self.is_undeveloped:
                raise ValueError(f"away-referenced claim {self.id!r} must be undeveloped")
            _check_id(self.away_ref[0], "case id")
            _check_id(self.away_ref[1], "element id")


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    kind: EdgeKind
    span: SourceSpan = UNKNOWN_SPAN


@dataclass(frozen=True)
class Capability:
    """A named, unit-bearing output interval.

    Provided capabilities state what a technological case delivers; required
    capabilities state what a clinical case depends on. Bounds are exact
    decimals, never floats.
    """

    name: str
    direction: Direction
    unit: str
    low: Decimal
    high: Decimal
    span: SourceSpan = UNKNOWN_SPAN

    def __post_init__(self):
        _check_id(self.name, "capability name")
        if not isinstance(self.low, Decimal):
            object.__setattr__(self, "low", Decimal(self.low))
        if not isinstance(self.high, Decimal):
            object.__setattr__(self, "high", Decimal(self.high))


@dataclass(frozen=True)
class AssuranceCase:
    """One parsed assurance case.

    Element ids are unique within the case; the association to a
    technological case is only carried by clinical cases. Rule-level
    constraints (single root, acyclicity, edge typing, capability placement)
    are deliberately not enforced here — they are reported as diagnostics by
    the validator so that partially authored cases remain representable.
    """

    id: str
    kind: CaseKind
    elements: tuple[Element, ...]
    edges: tuple[Edge, ...] = ()
    capabilities: tuple[Capability, ...] = ()
    associated_tac: str | None = None
    span: SourceSpan = UNKNOWN_SPAN
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_id(self.id, "case id")
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "capabilities", tuple(self.capabilities))
        by_id: dict[str, Element] = {}
        for element in self.elements:
            if element.id in by_id:
                raise ValueError(f"duplicate element id {element.id!r} in case {self.id!r}")
            by_id[element.id] = element
        if self.associated_tac is not None and self.kind is not CaseKind.CLINICAL:
            raise ValueError(f"only a clinical case may associate a technological case ({self.id!r})")
        object.__setattr__(self, "_by_id", by_id)

    def element(self, element_id: str) -> Element:
        try:
            return self._by_id[element_id]
        except KeyError:
            raise UnknownElementError(f"unknown element id {element_id!r} in case {self.id!r}") from None

    def find(self, element_id: str) -> Element | None:
        return self._by_id.get(element_id)

    def has_element(self, element_id: str) -> bool:
        return element_id in self._by_id


@dataclass(frozen=True)
class Bundle:
    """One technological case plus the clinical cases linked to it."""

    tac: AssuranceCase
    cacs: tuple[AssuranceCase, ...]

    def __post_init__(self):
        object.__setattr__(self, "cacs", tuple(self.cacs))
        if self.tac.kind is not CaseKind.TECHNOLOGICAL:
            raise ValueError(f"bundle tac {self.tac.id!r} must be a technological case")
        if not self.cacs:
            raise ValueError("bundle requires at least one cac")
        seen = {self.tac.id}
        for cac in self.cacs:
            if cac.kind is not CaseKind.CLINICAL:
                raise ValueError(f"bundle cac {cac.id!r} must be a clinical case")
            if cac.id in seen:
                raise ValueError(f"duplicate case id {cac.id!r} in bundle")
            seen.add(cac.id)

    def cases(self) -> tuple[AssuranceCase, ...]:
        return (self.tac, *self.cacs)

    def case(self, case_id: str) -> AssuranceCase:
        for case in self.cases():
            if case.id == case_id:
                return case
        raise UnknownElementError(f"unknown case id {case_id!r} in bundle")


def children(case: AssuranceCase, node: str, kind: EdgeKind) -> list[str]:
    """Targets of the node's outgoing edges of the given kind, in declaration order."""
    case.element(node)
    return [edge.target for edge in case.edges if edge.source == node and edge.kind is kind]


def supported_by_cycle(case: AssuranceCase) -> list[str] | None:
    """Find one cycle in the supportedBy subgraph, as [n0, n1, ..., n0]; None if acyclic."""
    adjacency: dict[str, list[str]] = {e.id: [] for e in case.elements}
    for edge in case.edges:
        if edge.kind is EdgeKind.SUPPORTED_BY and edge.source in adjacency:
            adjacency[edge.source].append(edge.target)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node: WHITE for node in adjacency}
    for start in adjacency:
        if color[start] != WHITE:
            continue
        path: list[str] = []
        stack: list[tuple[str, int]] = [(start, 0)]
        while stack:
            node, next_child = stack[-1]
            if next_child == 0:
                color[node] = GRAY
                path.append(node)
            targets = adjacency.get(node, ())
            if next_child < len(targets):
                stack[-1] = (node, next_child + 1)
                child = targets[next_child]
                if child not in color:
                    continue  # dangling endpoint; P2's concern, not a cycle
                if color[child] == GRAY:
                    return path[path.index(child):] + [child]
                if color[child] == WHITE:
                    stack.append((child, 0))
            else:
                color[node] = BLACK
                path.pop()
                stack.pop()
    return None


def ancestors(case: AssuranceCase, node: str) -> set[str]:
    """All elements from which `node` is reachable over supportedBy edges.

    Excludes `node` itself. Raises CycleError when the case's supportedBy
    subgraph is not acyclic.
    """
    case.element(node)
    cycle = supported_by_cycle(case)
    if cycle is not None:
        raise CycleError(cycle)
    reverse: dict[str, list[str]] = {}
    for edge in case.edges:
        if edge.kind is EdgeKind.SUPPORTED_BY:
            reverse.setdefault(edge.target, []).append(edge.source)
    seen: set[str] = set()
    frontier = [node]
    while frontier:
        current = frontier.pop()
        for parent in reverse.get(current, ()):
            if parent not in seen:
                seen.add(parent)
                frontier.append(parent)
    seen.discard(node)
    return seen


def format_decimal(value: Decimal) -> str:
    """Plain decimal text: no exponent, no trailing fractional zeros, -0 folded to 0."""
    if value == 0:
        return "0"
    return format(value.normalize(), "f")


def _element_line(element: Element) -> str:
    flags = [
        name
        for present, name in (
            (element.is_root, "root"),
            (element.is_public, "public"),
            (element.is_undeveloped, "undeveloped"),
            (element.is_module, "module"),
        )
        if present
    ]
    concern = element.concern.value if element.concern else "-"
    away = f"{element.away_ref[0]}.{element.away_ref[1]}" if element.away_ref else "-"
    return " ".join(
        [
            "element",
            element.id,
            element.kind.value,
            ",".join(flags) if flags else "-",
            concern,
            away,
            json.dumps(element.statement, ensure_ascii=False),
        ]
    )


def canonicalize(case: AssuranceCase) -> str:
    """Deterministic structural serialization.

    Elements are sorted by id, edges by (source, kind, target), capabilities
    by (direction, name); spans are not serialized. Two cases are
    structurally identical exactly when their canonical texts are byte-equal.
    """
    lines = [f"case {case.id} {case.kind.value}"]
    lines.append(f"associates {case.associated_tac if case.associated_tac else '-'}")
    for element in sorted(case.elements, key=lambda e: e.id):
        lines.append(_element_line(element))
    for edge in sorted(case.edges, key=lambda e: (e.source, e.kind.value, e.target)):
        lines.append(f"edge {edge.source} {edge.kind.value} {edge.target}")
    for cap in sorted(case.capabilities, key=lambda c: (c.direction.value, c.name, c.unit, c.low, c.high)):
        lines.append(
            f"capability {cap.direction.value} {cap.name} {cap.unit} "
            f"{format_decimal(cap.low)} {format_decimal(cap.high)}"
        )
    return "\n".join(lines) + "\n"


def elements_of_kind(case: AssuranceCase, kind: ElementKind) -> Iterable[Element]:
    return (element for element in case.elements if element.kind is kind)
