from . import ast
from .lexer import ParseError, Token, tokenize
from .parser import MAX_DEPTH, parse_query
from .printer import pretty_print

__all__ = ["ast", "ParseError", "Token", "tokenize", "MAX_DEPTH", "parse_query", "pretty_print"]
