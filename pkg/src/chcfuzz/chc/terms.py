"""Sorts and terms of the supported HORN theory surface.

All nodes are frozen dataclasses, so terms are hashable and compare
structurally.  ``and``/``or`` stay n-ary; explicit nesting is only introduced
by mutations that want it.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Union


@dataclass(frozen=True)
class Sort:
    kind: str  # Bool | Int | Real | BitVec | Array | Uninterpreted
    width: int = 0
    args: tuple["Sort", ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.kind == "BitVec" and self.width < 1:
            raise ValueError(f"bit-vector width must be positive, got {self.width}")
        if self.kind == "Array" and len(self.args) != 2:
            raise ValueError("Array sort takes an index and an element sort")

    def __repr__(self) -> str:
        return f"Sort({self})"

    def __str__(self) -> str:
        if self.kind == "BitVec":
            return f"(_ BitVec {self.width})"
        if self.kind == "Array":
            return f"(Array {self.args[0]} {self.args[1]})"
        if self.kind == "Uninterpreted":
            return quote_symbol(self.name)
        return self.kind

    @property
    def is_arith(self) -> bool:
        return self.kind in ("Int", "Real")


BOOL = Sort("Bool")
INT = Sort("Int")
REAL = Sort("Real")


def bitvec(width: int) -> Sort:
    return Sort("BitVec", width=width)


def array(index: Sort, element: Sort) -> Sort:
    return Sort("Array", args=(index, element))


def uninterpreted(name: str) -> Sort:
    return Sort("Uninterpreted", name=name)


@dataclass(frozen=True)
class Var:
    name: str
    sort: Sort


@dataclass(frozen=True)
class Const:
    """A literal; ``value`` is its SMT-LIB text (``5``, ``2.0``, ``#b01``...)."""

    value: str
    sort: Sort


@dataclass(frozen=True)
class App:
    """Application of a theory operator or declared background function.

    ``op`` is the printed operator head, including indices for indexed
    operators, e.g. ``(_ extract 3 0)``.
    """

    op: str
    args: tuple["Term", ...]
    sort: Sort


@dataclass(frozen=True)
class PredApp:
    pred: str
    args: tuple["Term", ...] = ()

    @property
    def sort(self) -> Sort:
        return BOOL


@dataclass(frozen=True)
class Quant:
    kind: str  # forall | exists
    bound: tuple[tuple[str, Sort], ...]
    body: "Term"

    @property
    def sort(self) -> Sort:
        return BOOL


Term = Union[Var, Const, App, PredApp, Quant]

TRUE = Const("true", BOOL)
FALSE = Const("false", BOOL)


def mk_and(*args: Term) -> Term:
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return App("and", tuple(args), BOOL)


def mk_or(*args: Term) -> Term:
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return App("or", tuple(args), BOOL)


def mk_not(arg: Term) -> Term:
    return App("not", (arg,), BOOL)


def int_const(value: int) -> Term:
    if value < 0:
        return App("-", (Const(str(-value), INT),), INT)
    return Const(str(value), INT)


def children(term: Term) -> tuple[Term, ...]:
    if isinstance(term, (App, PredApp)):
        return term.args
    if isinstance(term, Quant):
        return (term.body,)
    return ()


def with_children(term: Term, kids: tuple[Term, ...]) -> Term:
    if isinstance(term, App):
        return App(term.op, tuple(kids), term.sort)
    if isinstance(term, PredApp):
        return PredApp(term.pred, tuple(kids))
    if isinstance(term, Quant):
        return Quant(term.kind, term.bound, kids[0])
    return term


def walk(term: Term, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], Term]]:
    """Pre-order traversal yielding ``(path, subterm)``."""
    stack = [(path, term)]
    while stack:
        p, t = stack.pop()
        yield p, t
        kids = children(t)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((p + (i,), kids[i]))


def subterm(term: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        term = children(term)[i]
    return term


def replace_at(term: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    kids = list(children(term))
    kids[path[0]] = replace_at(kids[path[0]], path[1:], new)
    return with_children(term, tuple(kids))


def transform(term: Term, fn: Callable[[Term], Term | None]) -> Term:
    """Bottom-up rewrite; ``fn`` returns a replacement or None to keep."""
    kids = children(term)
    if kids:
        new_kids = tuple(transform(k, fn) for k in kids)
        if new_kids != kids:
            term = with_children(term, new_kids)
    out = fn(term)
    return term if out is None else out


def free_vars(term: Term) -> set[str]:
    if isinstance(term, Var):
        return {term.name}
    if isinstance(term, Quant):
        return free_vars(term.body) - {n for n, _ in term.bound}
    out: set[str] = set()
    for k in children(term):
        out |= free_vars(k)
    return out


def pred_apps(term: Term) -> list[PredApp]:
    return [t for _, t in walk(term) if isinstance(t, PredApp)]


def size(term: Term) -> int:
    return sum(1 for _ in walk(term))


def substitute(term: Term, mapping: dict[str, Term]) -> Term:
    """Capture-avoiding enough for our use: bound names are unique per clause,
    so shadowed names are simply dropped from the mapping."""
    if not mapping:
        return term
    if isinstance(term, Var):
        return mapping.get(term.name, term)
    if isinstance(term, Quant):
        inner = {k: v for k, v in mapping.items() if k not in {n for n, _ in term.bound}}
        return Quant(term.kind, term.bound, substitute(term.body, inner))
    kids = children(term)
    if not kids:
        return term
    return with_children(term, tuple(substitute(k, mapping) for k in kids))


_SYMBOL_EXTRA = set("~!@$%^&*_-+=<>.?/")


def is_simple_symbol(name: str) -> bool:
    if not name or name[0].isdigit():
        return False
    return all(c.isalnum() or c in _SYMBOL_EXTRA for c in name)


def quote_symbol(name: str) -> str:
    return name if is_simple_symbol(name) else f"|{name}|"
