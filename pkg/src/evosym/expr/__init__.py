"""Symbolic kernel: parsing, jet-aware calculus, normalization, zero testing."""

from .calculus import diff, normalize, to_text
from .core import (
    BUILTINS,
    VAR_NAMES,
    VARS,
    Context,
    Expr,
    FuncSymbol,
    JetAtom,
    ParamSpec,
    jet_atoms,
    param_symbol,
    t,
    u,
    u1,
    u2,
    u3,
    x,
)
from .numeric import (
    DomainError,
    EvaluationError,
    Indeterminate,
    NonZero,
    PoleError,
    Zero,
    eval_numeric,
    is_zero,
    rng_for,
    sample_params,
)
from .parser import ParseError, parse

__all__ = [
    "BUILTINS", "VAR_NAMES", "VARS", "Context", "Expr", "FuncSymbol", "JetAtom", "ParamSpec",
    "jet_atoms", "param_symbol", "t", "x", "u", "u1", "u2", "u3",
    "diff", "normalize", "to_text", "parse", "ParseError",
    "is_zero", "eval_numeric", "Zero", "NonZero", "Indeterminate",
    "EvaluationError", "PoleError", "DomainError", "rng_for", "sample_params",
]
