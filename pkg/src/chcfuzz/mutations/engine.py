"""Dispatch, site selection and replay for the ten mutation kinds.

A record starts with only ``kind``, ``rng_seed`` and (optionally) a
preselected ``param``. :func:`apply` draws every remaining decision from
``random.Random(rng_seed)`` and returns a record whose ``choices`` pin them,
so replaying the returned record never consults the RNG again.
"""
from __future__ import annotations

import logging
import random

from ..chc import ChcSystem, validate
from ..chc.system import ChcError
from ..chc.terms import subterm
from . import rules, structural
from .catalog import EMPTY_SIMPLIFY, option_name, simplify_params, solver_params, split_identifier
from .records import MutationChain, MutationRecord, NotApplicable
from .rewrite import RewriteConfig, mutate_rewrite

log = logging.getLogger(__name__)


def record_for(identifier: str, rng_seed: int) -> MutationRecord:
    kind, param = split_identifier(identifier)
    return MutationRecord(kind, rng_seed, {"param": param} if param else {})


def _node(system: ChcSystem, ci: int, path, kind: str):
    try:
        return subterm(system.clauses[ci].body, tuple(path))
    except (IndexError, TypeError):
        raise NotApplicable(kind, f"site {ci}:{list(path)} does not exist") from None


def _site(system: ChcSystem, rng: random.Random, choices: dict, finder, kind: str):
    if "clause" in choices:
        return choices["clause"], tuple(choices["path"])
    sites = finder(system)
    if not sites:
        raise NotApplicable(kind, "no eligible site")
    return rng.choice(sites)


def _and_or(system, rng, choices, kind):
    op = "or" if kind == "SWAP_OR" else "and"
    min_args = 3 if kind == "BREAK_AND" else 2
    ci, path = _site(system, rng, choices,
                     lambda s: structural.body_sites(s, structural.nary(op, min_args)), kind)
    node = _node(system, ci, path, kind)
    if not hasattr(node, "op") or node.op != op or len(node.args) < min_args:
        raise NotApplicable(kind, "recorded site has the wrong shape")
    n = len(node.args)
    if kind in ("SWAP_AND", "SWAP_OR"):
        pos = choices.get("positions") or rng.sample(range(n), 2)
        fn = structural.mutate_swap_or if kind == "SWAP_OR" else structural.mutate_swap_and
        out = fn(system, (ci, path), tuple(pos))
        return out, {"clause": ci, "path": list(path), "positions": list(pos)}
    if kind == "DUP_AND":
        pos = choices["position"] if "position" in choices else rng.randrange(n)
        return (structural.mutate_dup_and(system, (ci, path), pos),
                {"clause": ci, "path": list(path), "position": pos})
    split = choices["split"] if "split" in choices else rng.randint(1, n - 2)
    return (structural.mutate_break_and(system, (ci, path), split),
            {"clause": ci, "path": list(path), "split": split})


def _mix(system, rng, choices):
    if "clause" in choices:
        ci = choices["clause"]
        perm = list(choices["permutation"])
        if ci >= len(system.clauses) or len(system.clauses[ci].bound) != len(perm):
            raise NotApplicable("MIX_BOUND_VARS", "recorded prefix no longer matches")
    else:
        eligible = [i for i, c in enumerate(system.clauses) if len(c.bound) >= 2]
        if not eligible:
            raise NotApplicable("MIX_BOUND_VARS", "no clause with two or more bound variables")
        ci = rng.choice(eligible)
        perm = list(range(len(system.clauses[ci].bound)))
        # a shuffle that leaves the prefix unchanged is still a valid (if dull) mutation
        while perm == sorted(perm):
            rng.shuffle(perm)
    clause = structural.mutate_mix_bound_vars(system.clauses[ci], perm)
    return system.with_clause(ci, clause), {"clause": ci, "permutation": perm}


def _add_ineq(system, rng, choices):
    ci, path = _site(system, rng, choices, structural.ineq_sites, "ADD_INEQ")
    node = _node(system, ci, path, "ADD_INEQ")
    if not structural.is_ineq_site(node):
        raise NotApplicable("ADD_INEQ", "recorded site is not an inequality")
    return structural.mutate_add_ineq_at(system, (ci, path)), {"clause": ci, "path": list(path)}


def mutate_param_toggle(system: ChcSystem, rng: random.Random, choices: dict | None = None):
    choices = dict(choices or {})
    catalog = solver_params()
    toggled = {name for name, _ in system.options}
    param = choices.get("param")
    if param is None:
        remaining = [p for p in catalog if option_name(p) not in toggled]
        if not remaining:
            raise NotApplicable("PARAM_TOGGLE", "every catalog parameter is already toggled")
        param = rng.choice(remaining)
    if param not in catalog:
        raise ValueError(f"unknown solver parameter {param!r}")
    if option_name(param) in toggled:
        raise NotApplicable("PARAM_TOGGLE", f"{param} already toggled")
    out = system.with_options(system.options + ((option_name(param), not catalog[param]),))
    return out, {"param": param}


def _rewrite(system, rng, choices, rewrite_config):
    param = choices.get("param")
    if param is None:
        param = rng.choice((EMPTY_SIMPLIFY,) + simplify_params())
    return mutate_rewrite(system, param, rewrite_config), {"param": param}


def apply(system: ChcSystem, rec: MutationRecord,
          rewrite_config: RewriteConfig | None = None) -> tuple[ChcSystem, MutationRecord]:
    """Apply one mutation; raise :class:`NotApplicable` when it has no site."""
    rng = random.Random(rec.rng_seed)
    kind = rec.kind
    choices = dict(rec.choices)
    if kind in ("SWAP_AND", "SWAP_OR", "DUP_AND", "BREAK_AND"):
        out, filled = _and_or(system, rng, choices, kind)
    elif kind == "MIX_BOUND_VARS":
        out, filled = _mix(system, rng, choices)
    elif kind == "ADD_INEQ":
        out, filled = _add_ineq(system, rng, choices)
    elif kind == "ADD_LIN_RULE":
        out, filled = rules.mutate_add_lin_rule(system, rng, choices)
    elif kind == "ADD_NONLIN_RULE":
        out, filled = rules.mutate_add_nonlin_rule(system, rng, choices)
    elif kind == "REWRITE":
        out, filled = _rewrite(system, rng, choices, rewrite_config)
    elif kind == "PARAM_TOGGLE":
        out, filled = mutate_param_toggle(system, rng, choices)
    else:
        raise ValueError(f"unknown mutation kind {kind!r}")
    try:
        validate(out)
    except ChcError as exc:
        # a mutation must never break CHC shape; treat it as a harness bug
        raise AssertionError(f"{kind} produced an invalid system: {exc}") from exc
    return out, MutationRecord(kind, rec.rng_seed, filled)


def replay(seed: ChcSystem, chain: MutationChain | list,
           rewrite_config: RewriteConfig | None = None) -> ChcSystem:
    """Re-apply a chain from its seed. Records that no longer apply are skipped."""
    records = chain.records if isinstance(chain, MutationChain) else chain
    system = seed
    for rec in records:
        try:
            system, _ = apply(system, rec, rewrite_config)
        except NotApplicable as exc:
            log.debug("replay: skipping %s", exc)
    return system
