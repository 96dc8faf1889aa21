"""Recursive-descent parser for anti-pattern rules.

The parser is LL(1) over the token stream from :mod:`adfd.dsl.lexer`.  Each
pattern keyword fixes which filters may appear inside its braces; a known
filter in the wrong host raises ``MISPLACED_FILTER`` rather than a generic
syntax error so rule authors get a useful message.
"""

from __future__ import annotations

from typing import FrozenSet, Iterable

from . import ast
from .lexer import SPELLING, ParseError, Token, tokenize

MAX_DEPTH = 64

PATTERN_KEYWORDS = {
    "ELEMENT": "element",
    "ASSET": "asset",
    "BOUNDARY": "boundary",
    "CONNECTOR": "connector",
    "FLOW": "flow",
}
_KEYWORD_OF = {v: k for k, v in PATTERN_KEYWORDS.items()}

# asset patterns are accepted at query level as well, see README
QUERY_KINDS = frozenset({"element", "asset", "boundary", "connector", "flow"})

# host pattern kind -> filter keywords admitted inside its braces
HOST_FILTERS = {
    "element": frozenset({"STRING", "HOLDS", "CONTAINS", "NOT", "CONTAINED_BY", "HAS"}),
    "asset": frozenset({"STRING"}),
    "boundary": frozenset({"CONTAINS", "NOT", "CONTAINED_BY"}),
    "connector": frozenset({"STRING", "HOLDS", "CROSSES"}),
    "flow": frozenset({"INCLUDES", "CROSSES"}),
}
_ALL_FILTER_STARTS = frozenset().union(*HOST_FILTERS.values())


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.depth = 0

    # -- token helpers -------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def at(self, *kinds: str) -> bool:
        return self.tok.kind in kinds

    def advance(self) -> Token:
        token = self.tok
        if token.kind != "EOF":
            self.pos += 1
        return token

    def expect(self, *kinds: str) -> Token:
        if self.tok.kind not in kinds:
            self.fail(kinds)
        return self.advance()

    def fail(self, expected: Iterable[str], code: str = "UNEXPECTED_TOKEN", message: str = ""):
        expected = frozenset(expected)
        token = self.tok
        found = SPELLING.get(token.kind, token.kind)
        if token.kind == "STRING":
            found = f'"{token.value}"'
        if not message:
            wanted = ", ".join(sorted(SPELLING.get(k, k) for k in expected))
            message = f"expected {wanted}; found {found}"
        raise ParseError(code, self.text, token.offset, message, expected, found)

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ParseError(
                "NESTING_TOO_DEEP", self.text, self.tok.offset,
                f"rule nests deeper than {MAX_DEPTH} levels",
            )

    def leave(self):
        self.depth -= 1

    # -- query -----------------------------------------------------------

    def parse(self):
        node = self.query()
        self.expect("EOF")
        return node

    def query(self):
        start = self.tok.offset
        items = [self.query_term()]
        while self.at("AND"):
            self.advance()
            items.append(self.query_term())
        if len(items) == 1:
            return items[0]
        return ast.QueryAnd(tuple(items), span=start)

    def query_term(self):
        self.enter()
        try:
            if self.at("LPAREN"):
                start = self.advance().offset
                items = [self.query()]
                self.expect("OR", "AND")
                while True:
                    items.append(self.query())
                    if self.at("OR"):
                        self.advance()
                        continue
                    self.expect("RPAREN", "OR", "AND")
                    break
                return ast.QueryOr(tuple(items), span=start)
            return self.pattern(QUERY_KINDS, allow_alternative=False)
        finally:
            self.leave()

    # -- patterns --------------------------------------------------------

    def pattern(self, kinds: FrozenSet[str], allow_alternative: bool = True):
        self.enter()
        try:
            if allow_alternative and self.at("LPAREN"):
                return self.alternative(kinds)
            starts = {_KEYWORD_OF[k] for k in kinds}
            if allow_alternative:
                starts.add("LPAREN")
            if self.tok.kind not in PATTERN_KEYWORDS or PATTERN_KEYWORDS[self.tok.kind] not in kinds:
                self.fail(starts)
            kind = PATTERN_KEYWORDS[self.tok.kind]
            return getattr(self, f"{kind}_pattern")()
        finally:
            self.leave()

    def alternative(self, kinds: FrozenSet[str]):
        start = self.expect("LPAREN").offset
        first = self.pattern(kinds)
        kind = ast.pattern_kind(first)
        items = [first]
        self.expect("OR")
        while True:
            items.append(self.pattern(frozenset({kind})))
            if self.at("OR"):
                self.advance()
                continue
            self.expect("RPAREN", "OR")
            break
        return ast.PatternAlternative(kind, tuple(items), span=start)

    def _simple_pattern(self, node_type, host: str):
        start = self.advance().offset
        type_filter = self.type_filter_opt()
        filt = None
        if self.at("LBRACE"):
            self.advance()
            filt = self.filter_expr(host)
            self.expect("RBRACE", "AND")
        return node_type(type_filter, filt, span=start)

    def element_pattern(self):
        return self._simple_pattern(ast.ElementPattern, "element")

    def asset_pattern(self):
        return self._simple_pattern(ast.AssetPattern, "asset")

    def boundary_pattern(self):
        return self._simple_pattern(ast.BoundaryPattern, "boundary")

    def _endpoints(self):
        self.expect("LBRACE")
        self.expect("SOURCE")
        src = self.pattern(frozenset({"element"}))
        self.expect("AND")
        self.expect("TARGET")
        tgt = self.pattern(frozenset({"element"}))
        return src, tgt

    def connector_pattern(self):
        start = self.advance().offset
        type_filter = self.type_filter_opt()
        src, tgt = self._endpoints()
        filt = None
        if self.at("AND"):
            self.advance()
            filt = self.filter_expr("connector")
        self.expect("RBRACE", "AND")
        return ast.ConnectorPattern(src, tgt, type_filter, filt, span=start)

    def flow_pattern(self):
        start = self.advance().offset
        if self.tok.kind in ("COLON", "NEQ", "IN", "NOT_IN"):
            self.fail({"LBRACE"}, message="flow patterns cannot carry a type filter")
        src, tgt = self._endpoints()
        filt = None
        if self.at("AND"):
            self.advance()
            filt = self.filter_expr("flow")
        self.expect("RBRACE", "AND")
        return ast.FlowPattern(src, tgt, filt, span=start)

    # -- type / property filters -----------------------------------------

    def string_list(self):
        self.expect("LBRACKET")
        items = [self.expect("STRING").value]
        while self.at("COMMA"):
            self.advance()
            items.append(self.expect("STRING").value)
        self.expect("RBRACKET", "COMMA")
        return tuple(items)

    def type_filter_opt(self):
        token = self.tok
        if token.kind == "COLON":
            self.advance()
            return ast.TypeFilter(ast.EQ, (self.expect("STRING").value,), span=token.offset)
        if token.kind == "NEQ":
            self.advance()
            return ast.TypeFilter(ast.NEQ, (self.expect("STRING").value,), span=token.offset)
        if token.kind == "IN":
            self.advance()
            return ast.TypeFilter(ast.IN, self.string_list(), span=token.offset)
        if token.kind == "NOT_IN":
            self.advance()
            return ast.TypeFilter(ast.NOT_IN, self.string_list(), span=token.offset)
        return None

    def property_filter(self):
        key_tok = self.expect("STRING")
        op_tok = self.expect("EQ", "NEQ", "IN", "NOT_IN")
        if op_tok.kind in ("EQ", "NEQ"):
            values = (self.expect("STRING").value,)
            op = ast.EQ if op_tok.kind == "EQ" else ast.NEQ
        else:
            values = self.string_list()
            op = ast.IN if op_tok.kind == "IN" else ast.NOT_IN
        return ast.PropertyFilter(key_tok.value, op, values, span=key_tok.offset)

    # -- filter expressions ------------------------------------------------

    def filter_expr(self, host: str):
        start = self.tok.offset
        items = [self.filter_term(host)]
        while self.at("AND"):
            self.advance()
            items.append(self.filter_term(host))
        if len(items) == 1:
            return items[0]
        return ast.FilterAnd(tuple(items), span=start)

    def filter_term(self, host: str):
        self.enter()
        try:
            if self.at("LPAREN"):
                start = self.advance().offset
                items = [self.filter_expr(host)]
                self.expect("OR", "AND")
                while True:
                    items.append(self.filter_expr(host))
                    if self.at("OR"):
                        self.advance()
                        continue
                    self.expect("RPAREN", "OR", "AND")
                    break
                return ast.FilterOr(tuple(items), span=start)
            return self.atomic_filter(host)
        finally:
            self.leave()

    def atomic_filter(self, host: str):
        kind = self.tok.kind
        allowed = HOST_FILTERS[host]
        if kind not in allowed:
            if kind in _ALL_FILTER_STARTS:
                self.fail(
                    allowed | {"LPAREN"},
                    code="MISPLACED_FILTER",
                    message=f"{SPELLING.get(kind, 'property')} filter is not allowed in a {host} pattern",
                )
            self.fail(allowed | {"LPAREN"})
        start = self.tok.offset
        if kind == "STRING":
            return self.property_filter()
        if kind == "HOLDS":
            self.advance()
            return ast.AssetFilter(self.pattern(frozenset({"asset"})), span=start)
        if kind in ("CONTAINS", "NOT", "CONTAINED_BY"):
            return self.relation_filter(host)
        if kind == "HAS":
            return self.has_filter()
        if kind == "CROSSES":
            self.advance()
            return ast.CrossesFilter(self.pattern(frozenset({"element", "boundary"})), span=start)
        # INCLUDES
        self.advance()
        mode = ast.SOME
        if self.at("NO"):
            self.advance()
            mode = ast.NO
        elif self.at("ONLY"):
            self.advance()
            mode = ast.ONLY
        return ast.IncludesFilter(mode, self.pattern(frozenset({"element", "connector"})), span=start)

    def relation_filter(self, host: str):
        start = self.tok.offset
        node_type = ast.ElementRelationFilter if host == "element" else ast.BoundaryRelationFilter
        if self.at("CONTAINS"):
            self.advance()
            mode = ast.CONTAINS
            if self.at("NO"):
                self.advance()
                mode = ast.CONTAINS_NO
            inner = frozenset({"element"}) if host == "element" else frozenset({"element", "boundary"})
        else:
            mode = ast.CONTAINED_BY
            if self.at("NOT"):
                self.advance()
                mode = ast.NOT_CONTAINED_BY
            self.expect("CONTAINED_BY")
            inner = frozenset({"element", "boundary"}) if host == "element" else frozenset({"boundary"})
        return node_type(mode, self.pattern(inner), span=start)

    def has_filter(self):
        start = self.expect("HAS").offset
        negated = False
        if self.at("NO"):
            self.advance()
            negated = True
        which = self.expect("CONNECTOR", "FLOW")
        type_filter = None
        if which.kind == "CONNECTOR":
            type_filter = self.type_filter_opt()
        elif self.tok.kind in ("COLON", "NEQ", "IN", "NOT_IN"):
            self.fail({"LBRACE"}, message="flow filters cannot carry a type filter")
        self.expect("LBRACE")
        direction_tok = self.expect("SOURCE", "TARGET")
        direction = ast.SOURCE if direction_tok.kind == "SOURCE" else ast.TARGET
        endpoint = self.pattern(frozenset({"element"}))
        filt = None
        if self.at("AND"):
            self.advance()
            filt = self.filter_expr("connector" if which.kind == "CONNECTOR" else "flow")
        self.expect("RBRACE", "AND")
        if which.kind == "CONNECTOR":
            return ast.ConnectorFilter(negated, direction, endpoint, type_filter, filt, span=start)
        return ast.FlowFilter(negated, direction, endpoint, filt, span=start)


def parse_query(text: str):
    """Parse rule source into a query tree, raising :class:`ParseError` on failure."""
    return _Parser(text).parse()
