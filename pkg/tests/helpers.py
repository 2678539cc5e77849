"""Seeded generators and independent brute-force oracles used across the suite.

The oracles deliberately avoid the library's own traversal code: reachability
is checked by exhaustive forward walks, cycles by closed-walk detection over
boolean adjacency powers, and impact by fixpoint relaxation over the explicit
union edge list.
"""

from __future__ import annotations

import random
from decimal import Decimal

from actool.model import (
    AssuranceCase,
    Bundle,
    Capability,
    CaseKind,
    ConcernKind,
    Direction,
    Edge,
    EdgeKind,
    Element,
    ElementKind,
)

STATEMENT_CHARS = (
    "abcdefghij KLMNOP 0123456789 .,:;!?()-"
    '"\\\n\t'
    "µéβ≤"
)

UNIT_CHOICES = ["W", "mW", "kW", "s", "ms", "Hz", "kHz", "MHz", "mm", "cm", "m", "degC"]


def gen_statement(rng: random.Random, max_len: int = 40) -> str:
    return "".join(rng.choice(STATEMENT_CHARS) for _ in range(rng.randint(0, max_len)))


def gen_decimal(rng: random.Random) -> Decimal:
    return Decimal(rng.randint(-999999, 999999)).scaleb(-rng.randint(0, 4))


def gen_case(rng: random.Random, max_elements: int = 12) -> AssuranceCase:
    """Arbitrary model-valid case: flags respect element kinds, everything
    else (edge typing, root count, capability placement) is unconstrained."""
    n = rng.randint(1, max_elements)
    elements = []
    for i in range(n):
        kind = rng.choice(list(ElementKind))
        is_claim = kind is ElementKind.CLAIM
        undeveloped = is_claim and rng.random() < 0.2
        away = None
        if undeveloped and rng.random() < 0.4:
            away = (f"CASE-{rng.randint(0, 3)}", f"T{rng.randint(0, 9)}")
        elements.append(
            Element(
                id=f"N{i}",
                kind=kind,
                statement=gen_statement(rng),
                is_root=is_claim and rng.random() < 0.2,
                is_public=rng.random() < 0.2,
                is_undeveloped=undeveloped,
                is_module=is_claim and rng.random() < 0.15,
                concern=rng.choice([None, ConcernKind.SAFETY, ConcernKind.EFFECTIVENESS]),
                away_ref=away,
            )
        )
    edges = []
    for _ in range(rng.randint(0, 2 * n)):
        edges.append(
            Edge(
                source=f"N{rng.randrange(n)}",
                target=f"N{rng.randrange(n)}",
                kind=rng.choice(list(EdgeKind)),
            )
        )
    capabilities = []
    case_kind = rng.choice(list(CaseKind))
    for i in range(rng.randint(0, 3)):
        low = gen_decimal(rng)
        capabilities.append(
            Capability(
                name=f"cap_{i}",
                direction=rng.choice(list(Direction)),
                unit=rng.choice(UNIT_CHOICES),
                low=low,
                high=low + abs(gen_decimal(rng)),
            )
        )
    return AssuranceCase(
        id=f"CASE-{rng.randint(0, 3)}",
        kind=case_kind,
        elements=tuple(elements),
        edges=tuple(edges),
        capabilities=tuple(capabilities),
        associated_tac="SOME-TAC" if case_kind is CaseKind.CLINICAL else None,
    )


class _ValidCaseBuilder:
    """Layered construction that passes G1-G8/U1-U2 by design."""

    def __init__(self, rng: random.Random, case_id: str, kind: CaseKind, max_elements: int):
        self.rng = rng
        self.kind = kind
        self.case_id = case_id
        self.max_elements = max_elements
        self.elements: list[Element] = []
        self.edges: list[Edge] = []
        self.counter = 0

    def _fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def build(self) -> AssuranceCase:
        rng = self.rng
        root_id = self._fresh("G")
        public = self.kind is CaseKind.TECHNOLOGICAL
        self.elements.append(
            Element(root_id, ElementKind.CLAIM, gen_statement(rng), is_root=True, is_public=public)
        )
        frontier = [(root_id, rng.randint(1, 3))]
        while frontier and len(self.elements) < self.max_elements:
            claim_id, depth = frontier.pop(0)
            self._develop(claim_id, depth)
        # whatever is left undeveloped must say so
        developed = {e.source for e in self.edges if e.kind is EdgeKind.SUPPORTED_BY}
        finished = []
        for element in self.elements:
            if element.kind is ElementKind.CLAIM and element.id not in developed:
                finished.append(
                    Element(
                        element.id,
                        element.kind,
                        element.statement,
                        is_root=element.is_root,
                        is_public=element.is_public,
                        is_undeveloped=True,
                        concern=element.concern,
                    )
                )
            else:
                finished.append(element)
        for _ in range(rng.randint(0, 2)):
            holder = rng.choice([e for e in finished if e.kind in (ElementKind.CLAIM, ElementKind.STRATEGY)])
            ctx_kind = rng.choice([ElementKind.CONTEXT, ElementKind.ASSUMPTION, ElementKind.JUSTIFICATION])
            ctx_id = self._fresh("X")
            finished.append(Element(ctx_id, ctx_kind, gen_statement(rng)))
            self.edges.append(Edge(holder.id, ctx_id, EdgeKind.IN_CONTEXT_OF))
        return AssuranceCase(
            id=self.case_id,
            kind=self.kind,
            elements=tuple(finished),
            edges=tuple(self.edges),
            associated_tac=None,
        )

    def _develop(self, claim_id: str, depth: int) -> None:
        rng = self.rng
        if depth <= 0 or len(self.elements) >= self.max_elements:
            if rng.random() < 0.5:
                evidence_id = self._fresh("E")
                self.elements.append(Element(evidence_id, ElementKind.EVIDENCE, gen_statement(rng)))
                self.edges.append(Edge(claim_id, evidence_id, EdgeKind.SUPPORTED_BY))
            return
        choice = rng.random()
        if choice < 0.35:
            evidence_id = self._fresh("E")
            self.elements.append(Element(evidence_id, ElementKind.EVIDENCE, gen_statement(rng)))
            self.edges.append(Edge(claim_id, evidence_id, EdgeKind.SUPPORTED_BY))
        elif choice < 0.55:
            return  # stays a leaf; marked undeveloped in build()
        else:
            parent = claim_id
            if rng.random() < 0.5:
                strategy_id = self._fresh("S")
                self.elements.append(Element(strategy_id, ElementKind.STRATEGY, gen_statement(rng)))
                self.edges.append(Edge(claim_id, strategy_id, EdgeKind.SUPPORTED_BY))
                parent = strategy_id
            for _ in range(rng.randint(1, 2)):
                public = self.kind is CaseKind.TECHNOLOGICAL and rng.random() < 0.5
                child = self._fresh("G")
                self.elements.append(
                    Element(
                        child,
                        ElementKind.CLAIM,
                        gen_statement(rng),
                        is_public=public,
                        concern=rng.choice([None, ConcernKind.SAFETY, ConcernKind.EFFECTIVENESS]),
                    )
                )
                self.edges.append(Edge(parent, child, EdgeKind.SUPPORTED_BY))
                self._develop(child, depth - 1)


def gen_valid_case(
    rng: random.Random, case_id: str, kind: CaseKind, max_elements: int = 12
) -> AssuranceCase:
    return _ValidCaseBuilder(rng, case_id, kind, max_elements).build()


def gen_valid_bundle(rng: random.Random, max_elements: int = 30) -> Bundle:
    """A bundle that passes every G- and S-rule: away-claims target public
    technological claims, restate them, and carry a documenting context.
    Never exceeds max_elements in total."""
    while True:
        bundle = _gen_valid_bundle_once(rng, max_elements)
        if sum(len(case.elements) for case in bundle.cases()) <= max_elements:
            return bundle


def _gen_valid_bundle_once(rng: random.Random, max_elements: int) -> Bundle:
    tac = gen_valid_case(rng, "TAC", CaseKind.TECHNOLOGICAL, max_elements=rng.randint(4, 10))
    public = [e for e in tac.elements if e.kind is ElementKind.CLAIM and e.is_public]
    budget = max_elements - len(tac.elements)
    cacs = []
    for index in range(rng.randint(1, 2)):
        size = rng.randint(4, max(4, budget // 2))
        cac = gen_valid_case(rng, f"CAC-{index}", CaseKind.CLINICAL, max_elements=min(size, 8))
        elements = list(cac.elements)
        edges = list(cac.edges)
        holders = [e.id for e in elements if e.kind in (ElementKind.CLAIM, ElementKind.STRATEGY)]
        for ref in range(rng.randint(0, min(3, len(public)))):
            target = rng.choice(public)
            away_id = f"A{ref}"
            ctx_id = f"AX{ref}"
            elements.append(
                Element(
                    away_id,
                    ElementKind.CLAIM,
                    target.statement,
                    is_undeveloped=True,
                    away_ref=(tac.id, target.id),
                )
            )
            elements.append(Element(ctx_id, ElementKind.CONTEXT, gen_statement(rng)))
            edges.append(Edge(rng.choice(holders), away_id, EdgeKind.SUPPORTED_BY))
            edges.append(Edge(away_id, ctx_id, EdgeKind.IN_CONTEXT_OF))
        cacs.append(
            AssuranceCase(
                id=cac.id,
                kind=CaseKind.CLINICAL,
                elements=tuple(elements),
                edges=tuple(edges),
                associated_tac=tac.id,
            )
        )
        budget -= len(elements)
    return Bundle(tac, tuple(cacs))


# --- independent oracles ----------------------------------------------------


def brute_children(case: AssuranceCase, node: str, kind: EdgeKind) -> list[str]:
    return [e.target for e in case.edges if e.source == node and e.kind is kind]


def brute_reaches(case: AssuranceCase, start: str, goal: str) -> bool:
    """Forward walk over supportedBy edges, no shared traversal code."""
    stack = [start]
    visited = set()
    while stack:
        node = stack.pop()
        if node == goal:
            return True
        if node in visited:
            continue
        visited.add(node)
        for edge in case.edges:
            if edge.kind is EdgeKind.SUPPORTED_BY and edge.source == node:
                stack.append(edge.target)
    return False


def brute_ancestors(case: AssuranceCase, node: str) -> set[str]:
    result = set()
    for element in case.elements:
        if element.id == node:
            continue
        if brute_reaches(case, element.id, node):
            result.add(element.id)
    return result


def brute_has_supported_by_cycle(case: AssuranceCase) -> bool:
    """Closed-walk detection: boolean adjacency powers up to |V|."""
    ids = [e.id for e in case.elements]
    index = {node: i for i, node in enumerate(ids)}
    n = len(ids)
    adjacency = [[False] * n for _ in range(n)]
    for edge in case.edges:
        if edge.kind is EdgeKind.SUPPORTED_BY and edge.source in index and edge.target in index:
            adjacency[index[edge.source]][index[edge.target]] = True
    power = [row[:] for row in adjacency]
    for _ in range(n):
        if any(power[i][i] for i in range(n)):
            return True
        power = [
            [any(power[i][k] and adjacency[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)
        ]
    return False


def brute_g3_violated(case: AssuranceCase) -> bool:
    """Edge-kind legality for supportedBy, restated straight from the rules."""
    kinds = {e.id: e.kind for e in case.elements}
    for edge in case.edges:
        if edge.kind is not EdgeKind.SUPPORTED_BY:
            continue
        src = kinds.get(edge.source)
        tgt = kinds.get(edge.target)
        if src is None or tgt is None:
            return True
        if src not in (ElementKind.CLAIM, ElementKind.STRATEGY):
            return True
        if tgt not in (ElementKind.CLAIM, ElementKind.STRATEGY, ElementKind.EVIDENCE):
            return True
        if src is ElementKind.STRATEGY and tgt is not ElementKind.CLAIM:
            return True
    return False


def brute_affected(
    bundle: Bundle,
    resolutions: dict[tuple[str, str], tuple[str, str]],
    changed: set[tuple[str, str]],
) -> dict[str, set[str]]:
    """Reverse reachability on the union graph by fixpoint relaxation."""
    edges: list[tuple[tuple[str, str], tuple[str, str]]] = []
    for case in bundle.cases():
        for edge in case.edges:
            edges.append(((case.id, edge.source), (case.id, edge.target)))
    for away, target in resolutions.items():
        edges.append((away, target))
    affected = set(changed)
    while True:
        added = False
        for upper, lower in edges:
            if lower in affected and upper not in affected:
                affected.add(upper)
                added = True
        if not added:
            break
    result: dict[str, set[str]] = {case.id: set() for case in bundle.cases()}
    for case_id, element_id in affected:
        result[case_id].add(element_id)
    return result


def enum_typed_digraphs(n: int):
    """Every supportedBy digraph (self-loops included) over every assignment
    of {claim, strategy, evidence} to n nodes."""
    kinds = (ElementKind.CLAIM, ElementKind.STRATEGY, ElementKind.EVIDENCE)
    ids = [f"N{i}" for i in range(n)]
    pairs = [(a, b) for a in ids for b in ids]
    for assignment in range(len(kinds) ** n):
        chosen = []
        value = assignment
        for _ in range(n):
            chosen.append(kinds[value % len(kinds)])
            value //= len(kinds)
        elements = tuple(
            Element(ids[i], chosen[i], "") for i in range(n)
        )
        for mask in range(1 << len(pairs)):
            edges = tuple(
                Edge(pairs[bit][0], pairs[bit][1], EdgeKind.SUPPORTED_BY)
                for bit in range(len(pairs))
                if mask >> bit & 1
            )
            yield AssuranceCase(id="ENUM", kind=CaseKind.MONOLITHIC, elements=elements, edges=edges)
