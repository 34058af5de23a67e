"""MSO formulas: syntax, parsing, printing and evaluation."""
from .evaluator import (DEFAULT_MAX_SUBSET_UNIVERSE, Assignment, EvaluationError, Evaluator,
                        ResourceLimitExceeded, UnboundVariable, evaluate)
from .parser import FormulaSyntaxError, parse_formula
from .printer import pretty, to_text
from .syntax import (FALSE, TRUE, And, Eq, Exists, ExistsSet, Forall, ForallSet, Formula, Iff,
                     Implies, In, Not, Or, Pred, Rel, SetEq, Subset, conj, disj, exists,
                     forall, free_variables)

__all__ = [
    "Assignment", "And", "DEFAULT_MAX_SUBSET_UNIVERSE", "Eq", "EvaluationError", "Evaluator",
    "Exists", "ExistsSet", "FALSE", "Forall", "ForallSet", "Formula", "FormulaSyntaxError",
    "Iff", "Implies", "In", "Not", "Or", "Pred", "Rel", "ResourceLimitExceeded", "SetEq",
    "Subset", "TRUE", "UnboundVariable", "conj", "disj", "evaluate", "exists", "forall",
    "free_variables", "parse_formula", "pretty", "to_text",
]
