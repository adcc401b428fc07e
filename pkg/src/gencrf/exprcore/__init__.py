"""Scalar expressions over coordinates: construction, parsing, derivatives, evaluation."""

from .nodes import (
    E,
    HALF,
    ONE,
    PI,
    TWO,
    ZERO,
    DomainError,
    Expr,
    add,
    sub,
    mul,
    div,
    neg,
    func,
    const,
    coord,
    cos,
    coordinates_used,
    evaluate,
    evaluate_many,
    exp,
    gradient,
    lift,
    log,
    partial,
    power,
    sin,
    sqrt,
    tan,
    total,
)
from .parser import CoordinateRangeError, ExprSyntaxError, parse_expr
from .printer import to_str
from .domain import CoordinateDomain, SamplingError, sample_valid
from .jet import Jet1, eval_jet, eval_jets

__all__ = [
    "add", "sub", "mul", "div", "neg", "func", "E", "HALF", "ONE", "PI", "TWO", "ZERO", "DomainError", "Expr", "const", "coord",
    "cos", "coordinates_used", "evaluate", "evaluate_many", "exp", "gradient", "lift",
    "log", "partial", "power", "sin", "sqrt", "tan", "total", "CoordinateRangeError",
    "ExprSyntaxError", "parse_expr", "to_str", "CoordinateDomain", "SamplingError",
    "sample_valid", "Jet1", "eval_jet", "eval_jets",
]
