"""Static checking of rules against a content-specification.

A rule that passes :func:`check_query` only mentions types, keys and values
that the specification declares, so evaluating it against any conforming
diagram cannot hit an unknown name.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .conformance import ERROR, WARNING, Violation
from .dsl import ast
from .model import ASSET, BOUNDARY, CONNECTOR, ELEMENT, ContentSpecification

_PATTERN_CATEGORY = {
    ast.ElementPattern: ELEMENT,
    ast.AssetPattern: ASSET,
    ast.BoundaryPattern: BOUNDARY,
    ast.ConnectorPattern: CONNECTOR,
}


@dataclass(frozen=True)
class CheckContext:
    """Type set under which filters are checked; ``types=None`` is the absent context."""

    category: Optional[str] = None
    types: Optional[frozenset] = None

    @property
    def absent(self) -> bool:
        return self.types is None


NO_CONTEXT = CheckContext()


class _Checker:
    def __init__(self, spec: ContentSpecification):
        self.spec = spec
        self.found: list = []

    def report(self, code, subject, message, rule, node, severity=ERROR, key=""):
        self.found.append(
            Violation(code, subject, message, rule, severity, key, getattr(node, "span", None))
        )

    # -- queries and patterns ---------------------------------------------

    def query(self, node):
        if isinstance(node, (ast.QueryAnd, ast.QueryOr)):
            for op in node.operands:
                self.query(op)
        else:
            self.pattern(node)

    def pattern(self, node):
        if isinstance(node, ast.PatternAlternative):
            for alt in node.alternatives:
                self.pattern(alt)
            return
        if isinstance(node, ast.FlowPattern):
            self.pattern(node.source)
            self.pattern(node.target)
            if node.filter is not None:
                self.filters(node.filter, NO_CONTEXT)
            return
        category = _PATTERN_CATEGORY[type(node)]
        ctx = self.type_filter(node.type_filter, category)
        if isinstance(node, ast.ConnectorPattern):
            self.pattern(node.source)
            self.pattern(node.target)
        if node.filter is not None:
            self.filters(node.filter, ctx)

    def type_filter(self, node, category: str) -> CheckContext:
        if node is None:
            return NO_CONTEXT
        known = set()
        for name in node.names:
            if self.spec.has_type(category, name):
                known.add(name)
            else:
                self.report(
                    "UNKNOWN_TYPE", name,
                    f"{name!r} is not a declared {category} type",
                    "typeFil-1" if len(node.names) == 1 and node.op in (ast.EQ, ast.NEQ) else "typeFil-2",
                    node,
                )
        if node.op in (ast.NEQ, ast.NOT_IN):
            self.report(
                "NEGATED_TYPE_CONTEXT", ", ".join(node.names),
                "negated type filter gives no key context; property keys are checked against the key universe only",
                "typeFil", node, severity=WARNING,
            )
            return NO_CONTEXT
        if not known:
            return NO_CONTEXT
        return CheckContext(category, frozenset(known))

    # -- filters ------------------------------------------------------------

    def filters(self, node, ctx: CheckContext):
        if isinstance(node, (ast.FilterAnd, ast.FilterOr)):
            for op in node.operands:
                self.filters(op, ctx)
        elif isinstance(node, ast.PropertyFilter):
            self.property_filter(node, ctx)
        elif isinstance(node, ast.ConnectorFilter):
            inner = self.type_filter(node.type_filter, CONNECTOR)
            self.pattern(node.endpoint)
            if node.filter is not None:
                self.filters(node.filter, inner)
        elif isinstance(node, ast.FlowFilter):
            self.pattern(node.endpoint)
            if node.filter is not None:
                self.filters(node.filter, NO_CONTEXT)
        else:
            # Holds / Contains / Contained by / Crosses / Includes
            self.pattern(node.pattern)

    def property_filter(self, node, ctx: CheckContext):
        rule = "propFil-2" if node.op in (ast.EQ, ast.NEQ) else "propFil-4"
        key = node.key
        if key not in self.spec.property_keys:
            self.report("UNKNOWN_KEY", key, f"property key {key!r} is not declared", rule, node, key=key)
            return
        if not ctx.absent:
            assignment = self.spec.key_assignment.get(ctx.category, {})
            for type_name in sorted(ctx.types):
                if key not in assignment.get(type_name, frozenset()):
                    self.report(
                        "KEY_NOT_IN_CONTEXT", type_name,
                        f"key {key!r} is not a property of {ctx.category} type {type_name!r}",
                        rule, node, key=key,
                    )
        domain = self.spec.value_domain.get(key, frozenset())
        for value in node.values:
            if value not in domain:
                self.report(
                    "VALUE_NOT_IN_DOMAIN", value,
                    f"{value!r} is not an allowed value of key {key!r}",
                    rule, node, key=key,
                )


def check_query(tree, spec: ContentSpecification, warnings: bool = False) -> list:
    """Violations of ``tree`` against ``spec``, in rule-text order.

    The list is empty exactly when the rule conforms.  Advisory findings
    (negated type filters) are only included with ``warnings=True``.
    """
    checker = _Checker(spec)
    checker.query(tree)
    found = checker.found
    if not warnings:
        found = [v for v in found if v.severity == ERROR]
    return sorted(found, key=lambda v: (v.offset if v.offset is not None else -1))
