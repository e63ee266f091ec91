"""Expression atoms: jet variables, parameters and arbitrary-function jets.

Expressions are plain sympy trees.  Jet variables are positive symbols (the
whole toolkit works on the positive orthant), parameters are real symbols,
and derivatives of arbitrary functions are ``JetAtom`` leaves that remember
their declaration and multi-index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import sympy as sp

Expr = sp.Expr

VAR_NAMES = ("t", "x", "u", "u1", "u2", "u3")
t, x, u, u1, u2, u3 = sp.symbols(VAR_NAMES, positive=True)
VARS = {s.name: s for s in (t, x, u, u1, u2, u3)}
BUILTINS = ("exp", "ln", "arctan", "sqrt", "abs", "sin", "cos")


def param_symbol(name: str) -> sp.Symbol:
    return sp.Symbol(name, real=True)


@dataclass(frozen=True)
class FuncSymbol:
    """An arbitrary function with fixed argument expressions (its slots)."""

    name: str
    slots: tuple

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(sp.sympify(s) for s in self.slots))
        if not self.slots:
            raise ValueError(f"function {self.name} needs at least one slot")
        for s in self.slots:
            for a in s.atoms(JetAtom):
                if a.func_symbol.name == self.name:
                    raise ValueError(f"function {self.name} refers to itself")

    @property
    def arity(self) -> int:
        return len(self.slots)

    def __call__(self, *index: int) -> "JetAtom":
        if not index:
            index = (0,) * self.arity
        return JetAtom(self, tuple(index))

    def d(self, *slot_positions: int) -> "JetAtom":
        """Jet atom after differentiating in the given slot positions (0-based)."""
        idx = [0] * self.arity
        for i in slot_positions:
            idx[i] += 1
        return JetAtom(self, tuple(idx))


class JetAtom(sp.Symbol):
    """f with derivative multi-index m, evaluated at the declared slots."""

    __slots__ = ("func_symbol", "index")

    def __new__(cls, fs: FuncSymbol, index: tuple):
        index = tuple(int(i) for i in index)
        if len(index) != fs.arity or min(index) < 0:
            raise ValueError(f"bad multi-index {index} for {fs.name}")
        label = fs.name if not any(index) else f"{fs.name}[{','.join(map(str, index))}]"
        obj = sp.Symbol.__xnew__(cls, label, real=True)
        obj.func_symbol = fs
        obj.index = index
        return obj

    def __getnewargs_ex__(self):
        return ((self.func_symbol, self.index), {})

    def _hashable_content(self):
        return sp.Symbol._hashable_content(self) + (self.func_symbol.name, self.func_symbol.slots, self.index)

    def bump(self, i: int) -> "JetAtom":
        idx = list(self.index)
        idx[i] += 1
        return JetAtom(self.func_symbol, tuple(idx))

    @property
    def order(self) -> int:
        return sum(self.index)


@dataclass(frozen=True)
class ParamSpec:
    """A parameter together with its admissible set.

    ``constraints`` holds tuples: ("real",), ("nonzero",), ("interval", lo, hi,
    lo_closed, hi_closed), ("abs", lo, hi) for lo < |p| < hi, ("choice", values),
    or ("rel", lhs, op, rhs) with sympy expressions for joint conditions.
    """

    name: str
    constraints: tuple = ()

    @property
    def symbol(self) -> sp.Symbol:
        return param_symbol(self.name)


@dataclass
class Context:
    """Names visible to the parser."""

    params: dict = field(default_factory=dict)
    funcs: dict = field(default_factory=dict)
    aliases: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    @classmethod
    def build(cls, params: Iterable = (), funcs: Iterable = (), aliases=None):
        ctx = cls()
        for p in params:
            spec = p if isinstance(p, ParamSpec) else ParamSpec(p)
            ctx.params[spec.name] = spec
        for f in funcs:
            ctx.funcs[f.name] = f
        ctx.aliases.update(aliases or {})
        return ctx

    def param_specs(self) -> list:
        return list(self.params.values())


def jet_atoms(e: Expr) -> set:
    return e.atoms(JetAtom)
