"""Mutation kinds, their types, and the parameter catalogs shipped as data."""
from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

OWN = (
    "SWAP_AND", "DUP_AND", "BREAK_AND", "SWAP_OR", "MIX_BOUND_VARS", "ADD_INEQ",
    "ADD_LIN_RULE", "ADD_NONLIN_RULE",
)
REWRITE = "REWRITE"
PARAM_TOGGLE = "PARAM_TOGGLE"
KINDS = OWN + (REWRITE, PARAM_TOGGLE)

# kinds whose output must be clause-wise equivalent to the input
EQUIVALENCE_KINDS = ("SWAP_AND", "DUP_AND", "BREAK_AND", "SWAP_OR", "MIX_BOUND_VARS",
                     "ADD_INEQ", REWRITE)

EMPTY_SIMPLIFY = "empty_simplify"

TYPE_NAMES = ("own", "rewrites", "parameters")


def _load(name: str) -> dict:
    return json.loads(resources.files("chcfuzz.data").joinpath(name).read_text())


@lru_cache(maxsize=None)
def simplify_params() -> tuple[str, ...]:
    return tuple(_load("simplify_params.json")["parameters"])


@lru_cache(maxsize=None)
def solver_params() -> dict[str, bool]:
    """Boolean solver parameter name -> solver default."""
    data = _load("solver_params.json")
    return {p["name"]: p["default"] for p in data["parameters"]}


@lru_cache(maxsize=None)
def option_prefix() -> str:
    return _load("solver_params.json")["option_prefix"]


def option_name(param: str) -> str:
    return f"{option_prefix()}.{param}"


def identifiers(type_name: str) -> tuple[str, ...]:
    """Mutation identifiers belonging to one type.

    Rewrites and parameter toggles are identified per parameter, so weights
    can single out e.g. one simplifier flag.
    """
    if type_name == "own":
        return OWN
    if type_name == "rewrites":
        return (f"{REWRITE}:{EMPTY_SIMPLIFY}",) + tuple(f"{REWRITE}:{p}" for p in simplify_params())
    if type_name == "parameters":
        return tuple(f"{PARAM_TOGGLE}:{p}" for p in solver_params())
    raise ValueError(f"unknown mutation type {type_name!r}")


def split_identifier(identifier: str) -> tuple[str, str | None]:
    kind, _, param = identifier.partition(":")
    if kind not in KINDS:
        raise ValueError(f"unknown mutation kind {kind!r}")
    return kind, (param or None)


def type_of(kind: str) -> str:
    if kind in OWN:
        return "own"
    if kind == REWRITE:
        return "rewrites"
    if kind == PARAM_TOGGLE:
        return "parameters"
    raise ValueError(f"unknown mutation kind {kind!r}")
