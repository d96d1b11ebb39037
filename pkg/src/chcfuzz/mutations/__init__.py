"""Equivalence- and satisfiability-preserving mutations on CHC systems."""
from .catalog import EMPTY_SIMPLIFY, KINDS, OWN, TYPE_NAMES, identifiers, simplify_params, solver_params
from .engine import apply, mutate_param_toggle, record_for, replay
from .records import MutationChain, MutationRecord, NotApplicable
from .rewrite import RewriteConfig, mutate_rewrite
from .rules import mutate_add_lin_rule, mutate_add_nonlin_rule
from .structural import (
    mutate_add_ineq, mutate_break_and, mutate_dup_and, mutate_mix_bound_vars,
    mutate_swap_and, mutate_swap_or,
)

__all__ = [
    "EMPTY_SIMPLIFY", "KINDS", "OWN", "TYPE_NAMES", "MutationChain", "MutationRecord",
    "NotApplicable", "RewriteConfig", "apply", "identifiers", "mutate_add_ineq",
    "mutate_add_lin_rule", "mutate_add_nonlin_rule", "mutate_break_and", "mutate_dup_and",
    "mutate_mix_bound_vars", "mutate_param_toggle", "mutate_rewrite", "mutate_swap_and",
    "mutate_swap_or", "record_for", "replay", "simplify_params", "solver_params",
]
