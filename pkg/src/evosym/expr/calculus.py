"""Differentiation with jet chain rule, canonical normalization, printing."""

from __future__ import annotations

from functools import lru_cache

import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.fields import field, sfield
from sympy.polys.rings import ring

from .core import VARS, JetAtom

Expr = sp.Expr


def diff(e: Expr, v) -> Expr:
    """Partial derivative of ``e`` in the jet variable ``v``.

    Jet atoms follow the chain rule through their declared slots, and
    ``abs`` differentiates as the identity (positive-orthant convention).
    """
    if isinstance(v, str):
        v = VARS[v]
    return _diff(sp.sympify(e), v)


@lru_cache(maxsize=200_000)
def _diff(e: Expr, v: sp.Symbol) -> Expr:
    if e.is_Number or e is sp.S.Pi or e is sp.S.Exp1:
        return sp.S.Zero
    if isinstance(e, JetAtom):
        out = []
        for i, slot in enumerate(e.func_symbol.slots):
            ds = _diff(slot, v)
            if ds != 0:
                out.append(e.bump(i) * ds)
        return sp.Add(*out)
    if e.is_Symbol:
        return sp.S.One if e == v else sp.S.Zero
    if e.is_Add:
        return sp.Add(*[_diff(a, v) for a in e.args])
    if e.is_Mul:
        args = e.args
        terms = []
        for i, a in enumerate(args):
            da = _diff(a, v)
            if da != 0:
                terms.append(sp.Mul(*args[:i], da, *args[i + 1 :]))
        return sp.Add(*terms)
    if e.is_Pow:
        b, n = e.args
        db = _diff(b, v)
        dn = _diff(n, v)
        out = sp.S.Zero
        if db != 0:
            out += n * b ** (n - 1) * db
        if dn != 0:
            out += e * sp.log(b) * dn
        return out
    if isinstance(e, sp.exp):
        return e * _diff(e.args[0], v)
    if isinstance(e, sp.log):
        return _diff(e.args[0], v) / e.args[0]
    if isinstance(e, sp.atan):
        a = e.args[0]
        return _diff(a, v) / (1 + a**2)
    if isinstance(e, sp.Abs):
        return _diff(e.args[0], v)
    if isinstance(e, sp.sin):
        return sp.cos(e.args[0]) * _diff(e.args[0], v)
    if isinstance(e, sp.cos):
        return -sp.sin(e.args[0]) * _diff(e.args[0], v)
    raise TypeError(f"cannot differentiate node {type(e).__name__}")


def _fold_exponents(e: Expr) -> Expr:
    """Cancel symbolic exponents and split exponent sums into products."""
    if not e.args or e.is_Atom:
        return e
    args = [_fold_exponents(a) for a in e.args]
    if e.is_Pow:
        b, n = args
        if not n.is_Number:
            n = sp.cancel(sp.together(n))
            if n.is_Add:
                const = [a for a in n.args if a.is_Number]
                rest = [a for a in n.args if not a.is_Number]
                c = sp.Add(*const)
                return sp.Mul(b ** sp.Add(*rest), b**c) if c != 0 else b**n
        return b**n
    return e.func(*args)


def normalize(e: Expr) -> Expr:
    """Canonical single-fraction form over Q in variables, params and opaque kernels."""
    e = sp.sympify(e)
    if e.is_Number:
        return e
    gens = e.free_symbols
    if e.is_polynomial(*gens):
        if not gens or e.atoms(sp.Float):
            return sp.expand(e)
        R, *_ = ring(sorted(gens, key=str), QQ)
        return R.from_expr(e).as_expr()
    if e.is_rational_function(*gens) and not e.atoms(sp.Float):
        K, *_ = field(sorted(gens, key=str), QQ)
        return K.from_expr(e).as_expr()
    prev = None
    for _ in range(3):
        e = _fold_exponents(e)
        e = sp.powsimp(e, combine="exp")
        if e == prev:
            break
        prev = e
    e = sp.expand_power_exp(e)
    if not e.atoms(sp.Float):
        try:
            return sfield(e)[1].as_expr()
        except (sp.PolynomialError, sp.polys.polyerrors.GeneratorsError, sp.polys.polyerrors.CoercionFailed):
            pass
    return sp.cancel(sp.together(e))


# printing ---------------------------------------------------------------

_FUNC_NAMES = {sp.exp: "exp", sp.log: "ln", sp.atan: "arctan", sp.Abs: "abs", sp.sin: "sin", sp.cos: "cos"}

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def to_text(e: Expr) -> str:
    """Render ``e`` in the parser's grammar so that ``parse(to_text(e))`` rebuilds it."""
    return _p(sp.sympify(e))[0]


def _wrap(s: tuple, prec: int) -> str:
    return s[0] if s[1] > prec else f"({s[0]})"


def _number(n) -> tuple:
    if n.is_Integer:
        return (str(n), _PREC_ATOM) if n >= 0 else (f"-{-n}", _PREC_NEG)
    if n.is_Rational:
        body = f"{abs(n.p)}/{n.q}"
        return (body, _PREC_ATOM) if n > 0 else (f"-{body}", _PREC_NEG)
    raise ValueError(f"non-rational constant {n} cannot be printed")


def _p(e: Expr) -> tuple:
    if e.is_Number:
        return _number(e)
    if e is sp.S.Exp1:
        return ("exp(1)", _PREC_ATOM)
    if isinstance(e, JetAtom):
        fs = e.func_symbol
        args = ", ".join(_p(s)[0] for s in fs.slots)
        head = fs.name if not any(e.index) else f"{fs.name}[{','.join(map(str, e.index))}]"
        return (f"{head}({args})", _PREC_ATOM)
    if e.is_Symbol:
        return (e.name, _PREC_ATOM)
    if e.is_Add:
        terms = sorted(e.args, key=sp.default_sort_key)
        out = _p(terms[0])[0]
        for a in terms[1:]:
            c, rest = a.as_coeff_Mul()
            if c.is_Number and c < 0:
                out += " - " + _wrap(_p(-a), _PREC_ADD)
            else:
                out += " + " + _wrap(_p(a), _PREC_ADD)
        return (out, _PREC_ADD)
    if e.is_Mul:
        c, rest = e.as_coeff_Mul()
        if c.is_Number and c < 0:
            return ("-" + _wrap(_p(-e), _PREC_ADD), _PREC_NEG)
        factors = sorted(sp.Mul.make_args(e), key=lambda a: (not a.is_Number, sp.default_sort_key(a)))
        parts = []
        for f in factors:
            s = _p(f)
            # rational constants always get parentheses: "3/4" is one token
            if f.is_Rational and not f.is_Integer:
                parts.append(f"({s[0]})")
            else:
                parts.append(_wrap(s, _PREC_MUL))
        return ("*".join(parts), _PREC_MUL)
    if e.is_Pow:
        b, n = e.args
        bs = _p(b)
        base = bs[0] if bs[1] == _PREC_ATOM and not (b.is_Rational and not b.is_Integer) else f"({bs[0]})"
        if n.is_Integer or (n.is_Symbol and not isinstance(n, JetAtom)):
            ex = _p(n)[0]
        else:
            ex = f"({_p(n)[0]})"
        return (f"{base}^{ex}", _PREC_POW)
    for cls, name in _FUNC_NAMES.items():
        if isinstance(e, cls):
            return (f"{name}({_p(e.args[0])[0]})", _PREC_ATOM)
    raise ValueError(f"cannot print node {type(e).__name__}")
