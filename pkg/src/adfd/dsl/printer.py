"""Canonical text rendering of rule syntax trees."""

from __future__ import annotations

from . import ast

_PATTERN_WORD = {
    "element": "Element",
    "asset": "Asset",
    "boundary": "Boundary",
    "connector": "Connector",
    "flow": "Flow",
}


def quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _list(values) -> str:
    return "[" + ", ".join(quote(v) for v in values) + "]"


def _operand(op: str, values) -> str:
    if op == ast.EQ:
        return f"= {quote(values[0])}"
    if op == ast.NEQ:
        return f"!= {quote(values[0])}"
    if op == ast.IN:
        return f"in {_list(values)}"
    return f"not in {_list(values)}"


def _type_filter(node) -> str:
    if node is None:
        return ""
    if node.op == ast.EQ:
        return f" : {quote(node.names[0])}"
    return " " + _operand(node.op, node.names)


def _filters(node) -> str:
    if isinstance(node, ast.FilterAnd):
        return " & ".join(_filters(op) for op in node.operands)
    if isinstance(node, ast.FilterOr):
        return "(" + " | ".join(_filters(op) for op in node.operands) + ")"
    return _atomic(node)


def _atomic(node) -> str:
    if isinstance(node, ast.PropertyFilter):
        return f"{quote(node.key)} {_operand(node.op, node.values)}"
    if isinstance(node, ast.AssetFilter):
        return "Holds " + _pattern(node.pattern)
    if isinstance(node, (ast.ElementRelationFilter, ast.BoundaryRelationFilter)):
        word = {
            ast.CONTAINS: "Contains",
            ast.CONTAINS_NO: "Contains no",
            ast.CONTAINED_BY: "Contained by",
            ast.NOT_CONTAINED_BY: "Not Contained by",
        }[node.mode]
        return f"{word} {_pattern(node.pattern)}"
    if isinstance(node, (ast.ConnectorFilter, ast.FlowFilter)):
        head = "Has no " if node.negated else "Has "
        if isinstance(node, ast.ConnectorFilter):
            head += "Connector" + _type_filter(node.type_filter)
        else:
            head += "Flow"
        direction = "Source" if node.direction == ast.SOURCE else "Target"
        body = f"{direction} {_pattern(node.endpoint)}"
        if node.filter is not None:
            body += " & " + _filters(node.filter)
        return f"{head} {{ {body} }}"
    if isinstance(node, ast.CrossesFilter):
        return "Crosses " + _pattern(node.pattern)
    if isinstance(node, ast.IncludesFilter):
        word = {ast.SOME: "Includes", ast.NO: "Includes no", ast.ONLY: "Includes only"}[node.mode]
        return f"{word} {_pattern(node.pattern)}"
    raise TypeError(f"not a filter node: {node!r}")


def _pattern(node) -> str:
    if isinstance(node, ast.PatternAlternative):
        return "(" + " | ".join(_pattern(p) for p in node.alternatives) + ")"
    kind = ast.pattern_kind(node)
    text = _PATTERN_WORD[kind]
    if kind in ("connector", "flow"):
        if kind == "connector":
            text += _type_filter(node.type_filter)
        body = f"Source {_pattern(node.source)} & Target {_pattern(node.target)}"
        if node.filter is not None:
            body += " & " + _filters(node.filter)
        return f"{text} {{ {body} }}"
    text += _type_filter(node.type_filter)
    if node.filter is not None:
        text += f" {{ {_filters(node.filter)} }}"
    return text


def pretty_print(node) -> str:
    """Render a query tree as rule source that parses back to an equal tree."""
    if isinstance(node, ast.QueryAnd):
        return " & ".join(pretty_print(op) for op in node.operands)
    if isinstance(node, ast.QueryOr):
        return "(" + " | ".join(pretty_print(op) for op in node.operands) + ")"
    return _pattern(node)
