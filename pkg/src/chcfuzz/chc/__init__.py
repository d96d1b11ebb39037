"""CHC systems: types, SMT-LIB2 parsing/printing, classification."""
from .parser import SortError, parse_model, parse_script, parse_term, to_clause
from .printer import print_clause, print_script, print_term
from .sexpr import SmtSyntaxError
from .system import (
    ChcClause, ChcError, ChcSystem, ClauseClass, Definition, FunDecl, Model, ModelError,
    classify, clause_formula, clause_matrix, substitute_model, validate,
)

__all__ = [
    "ChcClause", "ChcError", "ChcSystem", "ClauseClass", "Definition", "FunDecl", "Model",
    "ModelError", "SmtSyntaxError", "SortError", "classify", "clause_formula",
    "clause_matrix", "parse_model", "parse_script", "parse_term", "print_clause",
    "print_script", "print_term", "substitute_model", "to_clause", "validate",
]
