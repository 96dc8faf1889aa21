"""Evaluation of rules against diagrams.

Every pattern and filter evaluates to match tuples ``(x, M)``: the focus
``x`` is the component (or flow) the term is about and ``M`` is the set of
everything the match implicates.  Filters are always evaluated under a fixed
context component, so internally they yield only the ``M`` sets; the focus
is the context itself.

An :class:`Evaluator` memoises pattern results and flow enumerations for the
lifetime of one query.  It is not shared between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from .dsl import ast
from .flows import ELEMENT_UNIQUE, FlowGraph
from .model import (
    ASSET,
    BOUNDARY,
    CONNECTOR,
    ELEMENT,
    FLOW,
    ComponentRef,
    Diagram,
)

Affected = FrozenSet[ComponentRef]
_EMPTY: Affected = frozenset()


@dataclass(frozen=True)
class MatchTuple:
    """One evaluation result.  ``focus`` is ``None`` for the anonymous focus of ``&`` queries."""

    focus: Optional[ComponentRef]
    affected: Affected

    def sort_key(self):
        focus = (0,) if self.focus is None else (1, self.focus)
        return focus, tuple(sorted(self.affected))

    def __str__(self) -> str:
        focus = "_" if self.focus is None else str(self.focus)
        return f"({focus}, {{{', '.join(str(r) for r in sorted(self.affected))}}})"


def canonical(tuples: Iterable[MatchTuple]) -> List[MatchTuple]:
    return sorted(set(tuples), key=MatchTuple.sort_key)


def type_matches(spec, category: str, type_name: str, node: ast.TypeFilter) -> bool:
    """Whether a component typed ``type_name`` passes the type filter (sub-types included)."""
    subs = spec.hierarchy[category]
    hit = any(type_name == q or type_name in subs.get(q, ()) for q in node.names)
    return hit if node.op in (ast.EQ, ast.IN) else not hit


def _cross(left: Set[Affected], right: Set[Affected]) -> Set[Affected]:
    return {a | b for a in left for b in right}


class Evaluator:
    def __init__(self, diagram: Diagram, mode: str = ELEMENT_UNIQUE, graph: Optional[FlowGraph] = None):
        self.diagram = diagram
        self.spec = diagram.spec
        self.mode = mode
        self._graph = graph
        self._patterns: Dict[object, List[Tuple[ComponentRef, Affected]]] = {}
        self._flows: Dict[Tuple[str, str], List[ComponentRef]] = {}

    # -- helpers ---------------------------------------------------------

    @property
    def graph(self) -> FlowGraph:
        if self._graph is None:
            self._graph = FlowGraph(self.diagram)
        return self._graph

    def flows(self, src: str, tgt: str) -> List[ComponentRef]:
        key = (src, tgt)
        found = self._flows.get(key)
        if found is None:
            found = [ComponentRef.flow(f.sequence) for f in self.graph.flows(src, tgt, self.mode)]
            self._flows[key] = found
        return found

    def ref(self, cid: str) -> ComponentRef:
        return ComponentRef(self.diagram.kind_of[cid], cid)

    def _typed(self, category: str, type_filter) -> List[str]:
        ids = self.diagram.ids(category)
        if type_filter is None:
            return list(ids)
        types = self.diagram.type_of[category]
        return [c for c in ids if type_matches(self.spec, category, types[c], type_filter)]

    # -- queries ---------------------------------------------------------

    def query(self, node) -> List[MatchTuple]:
        return canonical(self._query(node))

    def _query(self, node) -> Set[MatchTuple]:
        if isinstance(node, ast.QueryAnd):
            acc: Set[Affected] = {_EMPTY}
            for op in node.operands:
                part = self._query(op)
                if not part:
                    return set()
                acc = _cross(acc, {t.affected for t in part})
            return {MatchTuple(None, m) for m in acc}
        if isinstance(node, ast.QueryOr):
            out: Set[MatchTuple] = set()
            for op in node.operands:
                out |= self._query(op)
            return out
        return {MatchTuple(x, m) for x, m in self.pattern(node)}

    # -- patterns ---------------------------------------------------------

    def pattern(self, node) -> List[Tuple[ComponentRef, Affected]]:
        cached = self._patterns.get(node)
        if cached is None:
            cached = sorted(set(self._pattern(node)), key=lambda t: (t[0], sorted(t[1])))
            self._patterns[node] = cached
        return cached

    def _pattern(self, node) -> Iterable[Tuple[ComponentRef, Affected]]:
        if isinstance(node, ast.PatternAlternative):
            for alt in node.alternatives:
                yield from self.pattern(alt)
        elif isinstance(node, ast.ConnectorPattern):
            yield from self._connector_pattern(node)
        elif isinstance(node, ast.FlowPattern):
            yield from self._flow_pattern(node)
        else:
            category = {
                ast.ElementPattern: ELEMENT,
                ast.AssetPattern: ASSET,
                ast.BoundaryPattern: BOUNDARY,
            }[type(node)]
            for cid in self._typed(category, node.type_filter):
                c = ComponentRef(category, cid)
                for m in self.filter_or_empty(node.filter, c):
                    yield c, m | {c}

    def filter_or_empty(self, node, c: ComponentRef) -> Set[Affected]:
        if node is None:
            return {_EMPTY}
        return self.filter(node, c)

    def _endpoint_index(self, node) -> Dict[str, List[Affected]]:
        index: Dict[str, List[Affected]] = {}
        for x, m in self.pattern(node):
            index.setdefault(x.key, []).append(m)
        return index

    def _connector_pattern(self, node):
        sources = self._endpoint_index(node.source)
        targets = self._endpoint_index(node.target)
        for rid in self._typed(CONNECTOR, node.type_filter):
            m1s = sources.get(self.diagram.source[rid])
            m2s = targets.get(self.diagram.target[rid])
            if not m1s or not m2s:
                continue
            r = ComponentRef(CONNECTOR, rid)
            extra = self.filter_or_empty(node.filter, r)
            for m1 in m1s:
                for m2 in m2s:
                    for m3 in extra:
                        yield r, m1 | m2 | m3 | {r}

    def _flow_pattern(self, node):
        sources = self.pattern(node.source)
        targets = self.pattern(node.target)
        for n1, m1 in sources:
            for n2, m2 in targets:
                for p in self.flows(n1.key, n2.key):
                    for m3 in self.filter_or_empty(node.filter, p):
                        yield p, m1 | m2 | m3 | {p}

    # -- filters ------------------------------------------------------------

    def filter(self, node, c: ComponentRef) -> Set[Affected]:
        method = _FILTERS[type(node)]
        return method(self, node, c)

    def _and(self, node, c):
        acc: Set[Affected] = {_EMPTY}
        for op in node.operands:
            part = self.filter(op, c)
            if not part:
                return set()
            acc = _cross(acc, part)
        return acc

    def _or(self, node, c):
        out: Set[Affected] = set()
        for op in node.operands:
            out |= self.filter(op, c)
        return out

    def _property(self, node: ast.PropertyFilter, c):
        value = self.diagram.properties.get(c.key, {}).get(node.key)
        if value is None:
            return set()
        if node.op in (ast.EQ, ast.IN):
            hit = value in node.values
        else:
            hit = value not in node.values
        return {frozenset({c})} if hit else set()

    def _holds(self, node: ast.AssetFilter, c):
        links = self.diagram.asset_links
        return {m for y, m in self.pattern(node.pattern) if (c.key, y.key) in links}

    def _contained(self, container: ComponentRef, inner: str) -> bool:
        if container.kind == ELEMENT:
            return (container.key, inner) in self.diagram.delta
        return (container.key, inner) in self.diagram.kappa

    def _relation(self, node, c):
        if node.mode in (ast.CONTAINS, ast.CONTAINS_NO):
            found = {m for w, m in self.pattern(node.pattern) if self._contained(c, w.key)}
        else:
            found = {m for w, m in self.pattern(node.pattern) if self._contained(w, c.key)}
        if node.mode in (ast.CONTAINS_NO, ast.NOT_CONTAINED_BY):
            return set() if found else {frozenset({c})}
        return found

    def _connector_filter(self, node: ast.ConnectorFilter, c):
        d = self.diagram
        if node.direction == ast.SOURCE:
            candidates, far = d.incoming.get(c.key, ()), d.source
        else:
            candidates, far = d.outgoing.get(c.key, ()), d.target
        ends = self._endpoint_index(node.endpoint)
        types = d.type_of[CONNECTOR]
        found: Set[Affected] = set()
        for rid in candidates:
            if node.type_filter is not None and not type_matches(self.spec, CONNECTOR, types[rid], node.type_filter):
                continue
            m1s = ends.get(far[rid])
            if not m1s:
                continue
            r = ComponentRef(CONNECTOR, rid)
            for m3 in self.filter_or_empty(node.filter, r):
                for m1 in m1s:
                    found.add(m1 | m3 | {r})
        if node.negated:
            return set() if found else {frozenset({c})}
        return found

    def _flow_filter(self, node: ast.FlowFilter, c):
        found: Set[Affected] = set()
        for n1, m1 in self.pattern(node.endpoint):
            if node.direction == ast.SOURCE:
                paths = self.flows(n1.key, c.key)
            else:
                paths = self.flows(c.key, n1.key)
            for p in paths:
                for m3 in self.filter_or_empty(node.filter, p):
                    found.add(m1 | m3 | {p})
        if node.negated:
            return set() if found else {frozenset({c})}
        return found

    def _crosses(self, node: ast.CrossesFilter, c):
        d = self.diagram
        connectors = [c.key] if c.kind == CONNECTOR else c.key[1::2]
        found: Set[Affected] = set()
        for w, m in self.pattern(node.pattern):
            for rid in connectors:
                if self._contained(w, d.source[rid]) != self._contained(w, d.target[rid]):
                    found.add(m)
                    break
        return found

    def _includes(self, node: ast.IncludesFilter, c):
        inner = self.pattern(node.pattern)
        kind = ast.pattern_kind(node.pattern)
        members = c.key[0::2] if kind == "element" else c.key[1::2]
        if node.mode == ast.ONLY:
            by_member: Dict[str, List[Affected]] = {}
            for x, m in inner:
                by_member.setdefault(x.key, []).append(m)
            acc: Set[Affected] = {_EMPTY}
            for member in dict.fromkeys(members):
                ms = by_member.get(member)
                if not ms:
                    return set()
                acc = _cross(acc, set(ms))
            return acc
        wanted = set(members)
        found = {m for x, m in inner if x.key in wanted}
        if node.mode == ast.NO:
            return set() if found else {frozenset({c})}
        return found


_FILTERS = {
    ast.FilterAnd: Evaluator._and,
    ast.FilterOr: Evaluator._or,
    ast.PropertyFilter: Evaluator._property,
    ast.AssetFilter: Evaluator._holds,
    ast.ElementRelationFilter: Evaluator._relation,
    ast.BoundaryRelationFilter: Evaluator._relation,
    ast.ConnectorFilter: Evaluator._connector_filter,
    ast.FlowFilter: Evaluator._flow_filter,
    ast.CrossesFilter: Evaluator._crosses,
    ast.IncludesFilter: Evaluator._includes,
}


# -- public entry points ------------------------------------------------------


def evaluate_query(tree, diagram: Diagram, mode: str = ELEMENT_UNIQUE) -> List[MatchTuple]:
    """All match tuples of a checked rule on a conforming diagram, canonically sorted."""
    return Evaluator(diagram, mode).query(tree)


def _context(diagram: Diagram, c) -> ComponentRef:
    if isinstance(c, ComponentRef):
        return c
    if isinstance(c, str):
        return ComponentRef(diagram.kind_of[c], c)
    return ComponentRef.flow(tuple(c))


def evaluate_pattern(node, diagram: Diagram, mode: str = ELEMENT_UNIQUE) -> List[MatchTuple]:
    return canonical(MatchTuple(x, m) for x, m in Evaluator(diagram, mode).pattern(node))


def evaluate_filter(node, context, diagram: Diagram, mode: str = ELEMENT_UNIQUE) -> List[MatchTuple]:
    """Evaluate a filter under one context component id (or flow sequence)."""
    c = _context(diagram, context)
    return canonical(MatchTuple(c, m) for m in Evaluator(diagram, mode).filter(node, c))


def eval_type_filter(node: ast.TypeFilter, category: str, diagram: Diagram) -> List[MatchTuple]:
    """Type filter over one id universe; affected sets are always empty."""
    ids = diagram.ids(category)
    types = diagram.type_of[category]
    return canonical(
        MatchTuple(ComponentRef(category, c), _EMPTY)
        for c in ids
        if type_matches(diagram.spec, category, types[c], node)
    )


eval_element_pattern = eval_asset_pattern = eval_boundary_pattern = evaluate_pattern
eval_connector_pattern = eval_flow_pattern = evaluate_pattern
eval_property_filter = eval_asset_filter = evaluate_filter
eval_element_relation_filter = eval_boundary_relation_filter = evaluate_filter
eval_connector_filter = eval_flow_filter = eval_crosses_filter = eval_includes_filter = evaluate_filter

__all__ = [
    "MatchTuple", "Evaluator", "evaluate_query", "evaluate_pattern", "evaluate_filter",
    "eval_type_filter", "type_matches", "canonical", "FLOW",
]
