"""A small S-expression reader for SMT-LIB2 text.

Atoms are returned as :class:`Atom` (a ``str`` subclass carrying its source
position) and lists as :class:`SList`.
"""
from __future__ import annotations

from typing import Iterator


class SmtSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}" if line else message)


class Atom(str):
    """A token. ``kind`` is one of symbol, keyword, numeral, decimal, binary,
    hex, string."""

    line: int
    col: int
    kind: str
    quoted: bool

    def __new__(cls, text: str, kind: str = "symbol", line: int = 0, col: int = 0,
                quoted: bool = False):
        obj = super().__new__(cls, text)
        obj.kind = kind
        obj.line = line
        obj.col = col
        obj.quoted = quoted
        return obj


class SList(list):
    line: int = 0
    col: int = 0


_DELIMS = set("()|;\"") | set(" \t\r\n")


def _tokenize(text: str) -> Iterator[tuple[str, str, int, int]]:
    i = 0
    n = len(text)
    line, line_start = 1, 0
    while i < n:
        c = text[i]
        col = i - line_start + 1
        if c == "\n":
            line += 1
            line_start = i + 1
            i += 1
        elif c in " \t\r":
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c, c, line, col
            i += 1
        elif c == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise SmtSyntaxError("unterminated quoted symbol", line, col)
            body = text[i + 1:j]
            yield "qsymbol", body, line, col
            newlines = body.count("\n")
            if newlines:
                line += newlines
                line_start = i + 1 + body.rfind("\n") + 1
            i = j + 1
        elif c == '"':
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise SmtSyntaxError("unterminated string literal", line, col)
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        buf.append('"')
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            yield "string", "".join(buf), line, col
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in _DELIMS:
                j += 1
            yield "word", text[i:j], line, col
            i = j


def _classify_word(word: str) -> str:
    if word.startswith(":"):
        return "keyword"
    if word.isdigit():
        return "numeral"
    if word.startswith("#b"):
        return "binary"
    if word.startswith("#x"):
        return "hex"
    head, dot, tail = word.partition(".")
    if dot and head.isdigit() and tail.isdigit():
        return "decimal"
    return "symbol"


def read_all(text: str) -> list:
    """Parse every top-level S-expression in ``text``."""
    stack: list[SList] = []
    out: list = []
    for kind, value, line, col in _tokenize(text):
        if kind == "(":
            lst = SList()
            lst.line, lst.col = line, col
            stack.append(lst)
            continue
        if kind == ")":
            if not stack:
                raise SmtSyntaxError("unbalanced ')'", line, col)
            done = stack.pop()
            (stack[-1] if stack else out).append(done)
            continue
        if kind == "qsymbol":
            atom = Atom(value, "symbol", line, col, quoted=True)
        elif kind == "string":
            atom = Atom(value, "string", line, col)
        else:
            atom = Atom(value, _classify_word(value), line, col)
        (stack[-1] if stack else out).append(atom)
    if stack:
        raise SmtSyntaxError("unbalanced '(': missing ')'", stack[-1].line, stack[-1].col)
    return out


def pos_of(expr) -> tuple[int, int]:
    return getattr(expr, "line", 0), getattr(expr, "col", 0)
