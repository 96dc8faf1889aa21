"""Tokenizer for the anti-pattern language."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

# keyword spelling (lower-case) -> token kind
KEYWORDS = {
    "element": "ELEMENT",
    "asset": "ASSET",
    "boundary": "BOUNDARY",
    "connector": "CONNECTOR",
    "flow": "FLOW",
    "source": "SOURCE",
    "target": "TARGET",
    "holds": "HOLDS",
    "contains": "CONTAINS",
    "not": "NOT",
    "no": "NO",
    "only": "ONLY",
    "has": "HAS",
    "crosses": "CROSSES",
    "includes": "INCLUDES",
    "in": "IN",
}

PUNCTUATION = {
    "&": "AND",
    "|": "OR",
    "(": "LPAREN",
    ")": "RPAREN",
    "{": "LBRACE",
    "}": "RBRACE",
    "[": "LBRACKET",
    "]": "RBRACKET",
    ",": "COMMA",
    ":": "COLON",
    "=": "EQ",
}

# human-readable spelling of each token kind, used in error messages
SPELLING = {v: repr(k) for k, v in PUNCTUATION.items()}
SPELLING.update({v: k.capitalize() for k, v in KEYWORDS.items()})
SPELLING.update(
    {
        "NEQ": "'!='",
        "NOT_IN": "not in",
        "CONTAINED_BY": "Contained by",
        "STRING": "string literal",
        "EOF": "end of input",
    }
)


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    offset: int  # character offset into the source text

    def __repr__(self) -> str:
        if self.kind == "STRING":
            return f"Str({self.value!r})"
        return self.kind


class ParseError(Exception):
    """A rule text could not be tokenized or parsed.

    ``offset`` is a byte offset into the UTF-8 encoded source; ``line`` and
    ``column`` are 1-based character positions.
    """

    def __init__(self, code: str, text: str, char_offset: int, message: str,
                 expected: Optional[frozenset] = None, found: Optional[str] = None):
        char_offset = max(0, min(char_offset, len(text)))
        self.code = code
        self.char_offset = char_offset
        self.offset = len(text[:char_offset].encode("utf-8"))
        self.line = text.count("\n", 0, char_offset) + 1
        self.column = char_offset - (text.rfind("\n", 0, char_offset) + 1) + 1
        self.expected = expected or frozenset()
        self.found = found
        self.message = message
        super().__init__(f"{code} at line {self.line}, column {self.column}: {message}")


def _is_word_char(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def tokenize(text: str) -> List[Token]:
    """Split ``text`` into tokens; the list always ends with an ``EOF`` token.

    Keywords are case-insensitive.  The two-word keywords ``Contained by``
    and ``not in`` are folded into single tokens.
    """
    tokens: List[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == '"':
            start = i
            i += 1
            chars = []
            while True:
                if i >= n:
                    raise ParseError("UNTERMINATED_STRING", text, start, "string literal is not closed")
                c = text[i]
                if c == "\\" and i + 1 < n and text[i + 1] in '"\\':
                    chars.append(text[i + 1])
                    i += 2
                    continue
                if c == '"':
                    i += 1
                    break
                if c == "\n":
                    raise ParseError("UNTERMINATED_STRING", text, start, "string literal is not closed")
                chars.append(c)
                i += 1
            tokens.append(Token("STRING", "".join(chars), start))
            continue
        if ch == "!" and text.startswith("!=", i):
            tokens.append(Token("NEQ", "!=", i))
            i += 2
            continue
        if ch in PUNCTUATION:
            tokens.append(Token(PUNCTUATION[ch], ch, i))
            i += 1
            continue
        if _is_word_char(ch):
            start = i
            while i < n and _is_word_char(text[i]):
                i += 1
            word = text[start:i]
            kind = KEYWORDS.get(word.lower())
            if word.lower() == "contained":
                j = _skip_space(text, i)
                if text[j:j + 2].lower() == "by" and not (j + 2 < n and _is_word_char(text[j + 2])):
                    tokens.append(Token("CONTAINED_BY", text[start:j + 2], start))
                    i = j + 2
                    continue
                raise ParseError("UNKNOWN_KEYWORD", text, start, "expected 'by' after 'Contained'",
                                 found=word)
            if kind is None:
                raise ParseError("UNKNOWN_KEYWORD", text, start, f"unknown word {word!r}", found=word)
            if kind == "NOT":
                j = _skip_space(text, i)
                if text[j:j + 2].lower() == "in" and not (j + 2 < n and _is_word_char(text[j + 2])):
                    tokens.append(Token("NOT_IN", text[start:j + 2], start))
                    i = j + 2
                    continue
            tokens.append(Token(kind, word, start))
            continue
        raise ParseError("ILLEGAL_CHARACTER", text, i, f"unexpected character {ch!r}", found=ch)
    tokens.append(Token("EOF", "", n))
    return tokens


def _skip_space(text: str, i: int) -> int:
    while i < len(text) and text[i].isspace():
        i += 1
    return i
