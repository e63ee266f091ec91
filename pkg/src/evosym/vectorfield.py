"""Generators a(t)Dt + b(t,x,u)Dx + c(t,x,u)Du, brackets and generic rank."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from sympy.polys.domains import QQ
from sympy.polys.rings import ring

from .expr import Context, Indeterminate, JetAtom, ParamSpec, ParseError, diff, is_zero, normalize, parse, rng_for, to_text
from .expr.core import VARS
from .expr.numeric import MAX_RETRIES, SAMPLE_HI, SAMPLE_LO, _evaluate, _specs_for, sample_columns

D_SYMBOLS = {name: sp.Symbol(name) for name in ("Dt", "Dx", "Du")}


class IndeterminateError(ArithmeticError):
    pass


def depends_on(e: sp.Expr) -> set:
    """Jet variables ``e`` depends on, looking through function slots."""
    out = set()
    for s in sp.sympify(e).free_symbols:
        if isinstance(s, JetAtom):
            for slot in s.func_symbol.slots:
                out |= depends_on(slot)
        elif s.name in VARS:
            out.add(s.name)
    return out


@dataclass(frozen=True)
class VectorField:
    a: sp.Expr = sp.S.Zero
    b: sp.Expr = sp.S.Zero
    c: sp.Expr = sp.S.Zero

    def __post_init__(self):
        for name in "abc":
            object.__setattr__(self, name, sp.sympify(getattr(self, name)))
        if depends_on(self.a) - {"t"}:
            raise ValueError(f"Dt coefficient must depend on t only, got {to_text(self.a)}")
        for comp in (self.b, self.c):
            if depends_on(comp) & {"u1", "u2", "u3"}:
                raise ValueError(f"Dx/Du coefficients may not involve derivatives: {to_text(comp)}")

    @property
    def components(self) -> tuple:
        return (self.a, self.b, self.c)

    def __call__(self, f: sp.Expr) -> sp.Expr:
        """Apply the field as a derivation to a function of (t, x, u)."""
        return self.a * diff(f, "t") + self.b * diff(f, "x") + self.c * diff(f, "u")

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(*(p + q for p, q in zip(self.components, other.components)))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(*(p - q for p, q in zip(self.components, other.components)))

    def __neg__(self) -> "VectorField":
        return VectorField(*(-p for p in self.components))

    def scale(self, k) -> "VectorField":
        return VectorField(*(k * p for p in self.components))

    def normalized(self) -> "VectorField":
        return VectorField(*(normalize(p) for p in self.components))

    def is_structurally_zero(self) -> bool:
        return all(normalize(p) == 0 for p in self.components)

    def __str__(self) -> str:
        return vf_to_text(self)


def zero_field() -> VectorField:
    return VectorField()


def parse_vf(text: str, ctx: Context | None = None) -> VectorField:
    """Parse the "coef*Dt + coef*Dx + coef*Du" syntax."""
    ctx = ctx or Context()
    scoped = Context(ctx.params, ctx.funcs, ctx.aliases, {**ctx.extra, **D_SYMBOLS})
    e = parse(text, scoped)
    ds = tuple(D_SYMBOLS.values())
    comps = [sp.diff(e, d) for d in ds]
    if any(c.has(*ds) for c in comps):
        raise ParseError(f"{text!r} is not linear in Dt, Dx, Du", 0)
    rest = e - sum(c * d for c, d in zip(comps, ds))
    if rest != 0 and sp.expand(rest) != 0:
        raise ParseError(f"{text!r} has a term without Dt, Dx or Du", 0)
    try:
        return VectorField(*comps)
    except ValueError as exc:
        raise ParseError(str(exc), 0) from None


def parse_basis(text: str, ctx: Context | None = None) -> list:
    """A ';'-separated list of fields."""
    return [parse_vf(part, ctx) for part in text.split(";") if part.strip()]


def _coef_text(c: sp.Expr, head: str) -> tuple:
    c = sp.sympify(c)
    if c == 1:
        return "+", head
    if c == -1:
        return "-", head
    body = to_text(c)
    neg = body.startswith("-") and (c.as_coeff_Mul()[0] < 0)
    if neg:
        body = to_text(-c)
    if c.is_Add or (neg and (-c).is_Add):
        body = f"({body})"
    return ("-" if neg else "+"), f"{body}*{head}"


def vf_to_text(v: VectorField) -> str:
    parts = []
    for comp, head in zip(v.components, ("Dt", "Dx", "Du")):
        if comp != 0:
            parts.append(_coef_text(comp, head))
    if not parts:
        return "0"
    sign, body = parts[0]
    out = body if sign == "+" else f"-{body}"
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _poly_bracket(X: VectorField, Y: VectorField):
    """Bracket over Q[t, x, u, params] when every coefficient is polynomial, else None."""
    comps = X.components + Y.components
    gens = set().union(*(c.free_symbols for c in comps)) | {VARS["t"], VARS["x"], VARS["u"]}
    if any(isinstance(g, JetAtom) for g in gens) or not all(c.is_polynomial(*gens) for c in comps):
        return None
    gens = sorted(gens, key=lambda g: g.name)
    R, *_ = ring(gens, QQ)
    P = [R.from_expr(c) for c in comps]
    k = [gens.index(VARS[n]) for n in ("t", "x", "u")]

    def apply(F, g):
        return sum((F[i] * g.diff(R.gens[j]) for i, j in enumerate(k)), R.zero)

    Xp, Yp = P[:3], P[3:]
    return VectorField(*[(apply(Xp, q) - apply(Yp, p)).as_expr() for p, q in zip(Xp, Yp)])


def bracket(X: VectorField, Y: VectorField) -> VectorField:
    """[X, Y] = XY - YX, componentwise, in normalized form."""
    fast = _poly_bracket(X, Y)
    if fast is not None:
        return fast
    comps = [normalize(X(q) - Y(p)) for p, q in zip(X.components, Y.components)]
    return VectorField(*comps)


def combination(coeffs, fields) -> VectorField:
    out = zero_field()
    for k, f in zip(coeffs, fields):
        if k != 0:
            out = out + f.scale(k)
    return out


def field_is_zero(v: VectorField, params=(), seed: int = 0, label: str = "field"):
    """Componentwise is_zero; returns (True, None) or (False, first NonZero/Indeterminate)."""
    for k, comp in enumerate(v.components):
        res = is_zero(comp, params, rng=rng_for(seed, label, k))
        if not res:
            return False, res
    return True, None


@dataclass
class Realization:
    basis: list
    params: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def parse(cls, text: str, ctx: Context | None = None) -> "Realization":
        ctx = ctx or Context()
        return cls(parse_basis(text, ctx), ctx.param_specs())

    def __str__(self) -> str:
        return " ; ".join(vf_to_text(v) for v in self.basis)


def _matrix_samples(fields, params, rng, n_points: int = 8):
    entries = [comp for f in fields for comp in f.components]
    if not entries:
        return []
    probe = sp.Add(*[sp.Dummy() * e for e in entries])
    specs = _specs_for(probe, params)
    symbols = set().union(*(sp.sympify(e).free_symbols for e in entries)) | {s.symbol for s in specs}
    symbols |= {VARS["t"], VARS["x"], VARS["u"]}
    n_param = 2 if specs else 1
    width = n_param * n_points
    env = sample_columns(symbols, specs, rng, n_param, n_points)
    good = []
    retries = 0
    while True:
        with np.errstate(all="ignore"):
            vals = [_evaluate(sp.sympify(e), env, width)[0] for e in entries]
        mats = np.array(vals).T.reshape(width, len(fields), 3)
        ok = np.isfinite(mats).all(axis=(1, 2))
        if ok.all():
            return list(mats)
        for j in np.flatnonzero(~ok):
            retries += 1
            if retries > MAX_RETRIES:
                good = [m for m, flag in zip(mats, ok) if flag]
                if not good:
                    raise IndeterminateError("every sample hit a pole")
                return good
            for s in env:
                if s.name in VARS or isinstance(s, JetAtom):
                    env[s] = env[s].copy()
                    env[s][j] = rng.uniform(SAMPLE_LO, SAMPLE_HI)


def numeric_rank(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int((sv > 1e-9 * sv[0]).sum())


def generic_rank(r, seed: int = 0, params=None) -> int:
    """Maximum pointwise rank of the n x 3 coefficient matrix over sampled points."""
    fields = r.basis if isinstance(r, Realization) else list(r)
    if params is None:
        params = r.params if isinstance(r, Realization) else ()
    if not fields:
        return 0
    mats = _matrix_samples(fields, params, rng_for(seed, "generic_rank"))
    return max(numeric_rank(m) for m in mats)


def wedge_is_zero(X: VectorField, Y: VectorField, Z: VectorField, seed: int = 0, params=()) -> bool:
    """True iff the 3x3 coefficient determinant vanishes identically."""
    det = sp.Matrix([X.components, Y.components, Z.components]).det(method="berkowitz")
    res = is_zero(det, params, rng=rng_for(seed, "wedge"))
    if isinstance(res, Indeterminate):
        raise IndeterminateError(res.reason)
    return bool(res)
