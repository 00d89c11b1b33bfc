"""A small Essence toolkit: parse, type check, print, evaluate and solve models."""

from __future__ import annotations

from .errors import (EssenceError, EvalError, InstantiationError, ParseError,
                     TypeCheckError)
from .evaluator import evaluate
from .parser import parse_domain, parse_expression, parse_model, parse_param
from .printer import PrintConfig, print_model, print_solution
from .solver import (Instance, SolveConfig, instantiate, solve, solve_naive,
                     validate_solution)
from .typecheck import check_model

__all__ = [
    "EssenceError", "EvalError", "InstantiationError", "ParseError", "TypeCheckError",
    "evaluate", "parse_domain", "parse_expression", "parse_model", "parse_param",
    "PrintConfig", "print_model", "print_solution", "Instance", "SolveConfig",
    "instantiate", "solve", "solve_naive", "validate_solution", "check_model",
]
