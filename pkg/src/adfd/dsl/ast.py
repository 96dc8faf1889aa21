"""Syntax tree for anti-pattern rules.

Nodes are frozen dataclasses so structurally equal trees compare and hash
equal.  Source positions are kept on ``span`` but excluded from comparison,
which is what makes ``parse(pretty_print(tree)) == tree`` meaningful.

An omitted optional part of a production is represented by ``None``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

# type / property filter operators
EQ = "eq"
NEQ = "neq"
IN = "in"
NOT_IN = "not_in"
OPERATORS = (EQ, NEQ, IN, NOT_IN)

# relation filter modes
CONTAINS = "contains"
CONTAINS_NO = "contains_no"
CONTAINED_BY = "contained_by"
NOT_CONTAINED_BY = "not_contained_by"
RELATION_MODES = (CONTAINS, CONTAINS_NO, CONTAINED_BY, NOT_CONTAINED_BY)

# includes filter modes
SOME = "some"
NO = "no"
ONLY = "only"
INCLUDES_MODES = (SOME, NO, ONLY)

SOURCE = "source"
TARGET = "target"


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class TypeFilter:
    op: str
    names: Tuple[str, ...]
    span: Optional[int] = _span()


@dataclass(frozen=True)
class PropertyFilter:
    key: str
    op: str
    values: Tuple[str, ...]
    span: Optional[int] = _span()


@dataclass(frozen=True)
class FilterAnd:
    operands: Tuple["Filter", ...]
    span: Optional[int] = _span()


@dataclass(frozen=True)
class FilterOr:
    operands: Tuple["Filter", ...]
    span: Optional[int] = _span()


@dataclass(frozen=True)
class ElementPattern:
    type_filter: Optional[TypeFilter] = None
    filter: Optional["Filter"] = None
    span: Optional[int] = _span()


@dataclass(frozen=True)
class AssetPattern:
    type_filter: Optional[TypeFilter] = None
    filter: Optional["Filter"] = None
    span: Optional[int] = _span()


@dataclass(frozen=True)
class BoundaryPattern:
    type_filter: Optional[TypeFilter] = None
    filter: Optional["Filter"] = None
    span: Optional[int] = _span()


@dataclass(frozen=True)
class ConnectorPattern:
    source: "Pattern"
    target: "Pattern"
    type_filter: Optional[TypeFilter] = None
    filter: Optional["Filter"] = None
    span: Optional[int] = _span()


@dataclass(frozen=True)
class FlowPattern:
    source: "Pattern"
    target: "Pattern"
    filter: Optional["Filter"] = None
    span: Optional[int] = _span()


@dataclass(frozen=True)
class PatternAlternative:
    """``( p1 | p2 | ... )`` over patterns of a single kind."""

    kind: str
    alternatives: Tuple["Pattern", ...]
    span: Optional[int] = _span()


@dataclass(frozen=True)
class AssetFilter:
    pattern: "Pattern"
    span: Optional[int] = _span()


@dataclass(frozen=True)
class ElementRelationFilter:
    mode: str
    pattern: "Pattern"
    span: Optional[int] = _span()


@dataclass(frozen=True)
class BoundaryRelationFilter:
    mode: str
    pattern: "Pattern"
    span: Optional[int] = _span()


@dataclass(frozen=True)
class ConnectorFilter:
    negated: bool
    direction: str
    endpoint: "Pattern"
    type_filter: Optional[TypeFilter] = None
    filter: Optional["Filter"] = None
    span: Optional[int] = _span()


@dataclass(frozen=True)
class FlowFilter:
    negated: bool
    direction: str
    endpoint: "Pattern"
    filter: Optional["Filter"] = None
    span: Optional[int] = _span()


@dataclass(frozen=True)
class CrossesFilter:
    pattern: "Pattern"
    span: Optional[int] = _span()


@dataclass(frozen=True)
class IncludesFilter:
    mode: str
    pattern: "Pattern"
    span: Optional[int] = _span()


@dataclass(frozen=True)
class QueryAnd:
    operands: Tuple["Query", ...]
    span: Optional[int] = _span()


@dataclass(frozen=True)
class QueryOr:
    operands: Tuple["Query", ...]
    span: Optional[int] = _span()


Pattern = Union[
    ElementPattern, AssetPattern, BoundaryPattern, ConnectorPattern, FlowPattern, PatternAlternative
]
Filter = Union[
    FilterAnd, FilterOr, PropertyFilter, AssetFilter, ElementRelationFilter,
    BoundaryRelationFilter, ConnectorFilter, FlowFilter, CrossesFilter, IncludesFilter,
]
Query = Union[QueryAnd, QueryOr, Pattern]

PATTERN_KIND = {
    ElementPattern: "element",
    AssetPattern: "asset",
    BoundaryPattern: "boundary",
    ConnectorPattern: "connector",
    FlowPattern: "flow",
}


def pattern_kind(node) -> str:
    if isinstance(node, PatternAlternative):
        return node.kind
    return PATTERN_KIND[type(node)]


def walk(node):
    """Yield ``node`` and every descendant node, depth first."""
    yield node
    for name in getattr(node, "__dataclass_fields__", {}):
        if name == "span":
            continue
        value = getattr(node, name)
        if isinstance(value, tuple):
            for item in value:
                if hasattr(item, "__dataclass_fields__"):
                    yield from walk(item)
        elif hasattr(value, "__dataclass_fields__"):
            yield from walk(value)
