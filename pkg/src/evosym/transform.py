"""Point transformations t'=T(t), x'=X(t,x,u), u'=U(t,x,u) and push-forwards."""

from __future__ import annotations

from dataclasses import dataclass

import sympy as sp

from .expr import Context, Indeterminate, ParseError, diff, is_zero, normalize, parse, rng_for, to_text
from .expr.core import VARS
from .vectorfield import Realization, VectorField, combination, depends_on

t, x, u = VARS["t"], VARS["x"], VARS["u"]


class TransformError(ValueError):
    pass


@dataclass(frozen=True)
class PointTransformation:
    """Forward map and its explicit inverse; both written in the letters t, x, u."""

    T: sp.Expr
    X: sp.Expr
    U: sp.Expr
    Tinv: sp.Expr
    Xinv: sp.Expr
    Uinv: sp.Expr

    def __post_init__(self):
        for name in ("T", "X", "U", "Tinv", "Xinv", "Uinv"):
            object.__setattr__(self, name, sp.sympify(getattr(self, name)))
        if depends_on(self.T) - {"t"} or depends_on(self.Tinv) - {"t"}:
            raise TransformError("T and Tinv must depend on t only")
        for name in ("X", "U", "Xinv", "Uinv"):
            if depends_on(getattr(self, name)) & {"u1", "u2", "u3"}:
                raise TransformError(f"{name} must be a function of t, x, u")

    @property
    def forward(self) -> tuple:
        return (self.T, self.X, self.U)

    @property
    def inverse(self) -> tuple:
        return (self.Tinv, self.Xinv, self.Uinv)

    @classmethod
    def identity(cls) -> "PointTransformation":
        return cls(t, x, u, t, x, u)

    @classmethod
    def parse(cls, text: str, ctx: Context | None = None) -> "PointTransformation":
        """Read "T = ...; X = ...; U = ...; Tinv = ...; Xinv = ...; Uinv = ..."."""
        parts = {}
        for chunk in text.split(";"):
            if not chunk.strip():
                continue
            key, sep, body = chunk.partition("=")
            key = key.strip()
            if not sep or key not in ("T", "X", "U", "Tinv", "Xinv", "Uinv"):
                raise ParseError(f"bad transformation component {chunk.strip()!r}", text.find(chunk))
            if key in parts:
                raise ParseError(f"component {key} given twice", text.find(chunk))
            parts[key] = parse(body, ctx)
        missing = [k for k in ("T", "X", "U", "Tinv", "Xinv", "Uinv") if k not in parts]
        if missing:
            raise ParseError(f"missing components: {', '.join(missing)}", len(text))
        return cls(**parts)

    def __str__(self) -> str:
        names = ("T", "X", "U", "Tinv", "Xinv", "Uinv")
        return "; ".join(f"{n} = {to_text(getattr(self, n))}" for n in names)

    def compose(self, first: "PointTransformation") -> "PointTransformation":
        """self after first."""
        fwd = {t: first.T, x: first.X, u: first.U}
        inv = {t: self.Tinv, x: self.Xinv, u: self.Uinv}
        return PointTransformation(
            *(e.xreplace(fwd) for e in self.forward),
            *(e.xreplace(inv) for e in first.inverse),
        )


def check_round_trip(phi: PointTransformation, params=(), seed: int = 0) -> bool:
    """forward(inverse(p)) == p and inverse(forward(p)) == p, componentwise."""
    inv = dict(zip((t, x, u), phi.inverse))
    fwd = dict(zip((t, x, u), phi.forward))
    for k, (f, g, v) in enumerate(zip(phi.forward, phi.inverse, (t, x, u))):
        for tag, e in (("fi", f.xreplace(inv) - v), ("if", g.xreplace(fwd) - v)):
            if not is_zero(e, params, rng=rng_for(seed, "round_trip", tag, k)):
                return False
    return True


def pushforward(Q: VectorField, phi: PointTransformation) -> VectorField:
    """Image of Q in the new variables, renamed back to t, x, u."""
    a, b, c = Q.components
    T, X, U = phi.forward
    comps = [
        a * diff(T, t),
        a * diff(X, t) + b * diff(X, x) + c * diff(X, u),
        a * diff(U, t) + b * diff(U, x) + c * diff(U, u),
    ]
    back = dict(zip((t, x, u), phi.inverse))
    comps = [normalize(sp.sympify(e).xreplace(back)) for e in comps]
    if depends_on(comps[0]) - {"t"}:
        raise TransformError(f"image Dt coefficient {to_text(comps[0])} depends on x or u")
    return VectorField(*comps)


@dataclass
class EquivalenceVerdict:
    index: int
    ok: bool
    image: VectorField
    expected: VectorField
    detail: object = None


@dataclass
class EquivalenceReport:
    verdicts: list

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    @property
    def indeterminate(self) -> bool:
        return any(isinstance(v.detail, Indeterminate) for v in self.verdicts)


def verify_equivalence(src: Realization, dst: Realization, phi: PointTransformation, basis_change=None, seed: int = 0) -> EquivalenceReport:
    """Check that sum_j M[i][j] * push(src_j) equals dst_i for every i.

    ``basis_change`` is the constant matrix M (identity when omitted).
    """
    if src.dim != dst.dim:
        raise ValueError("realizations have different dimensions")
    n = src.dim
    M = basis_change or [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    params = list(src.params) + [p for p in dst.params if p.name not in {q.name for q in src.params}]
    pushed = [pushforward(f, phi) for f in src.basis]
    verdicts = []
    for i in range(n):
        image = combination([sp.sympify(m) for m in M[i]], pushed).normalized()
        ok, detail = True, None
        for k, (p, q) in enumerate(zip(image.components, dst.basis[i].components)):
            res = is_zero(p - q, params, rng=rng_for(seed, "equivalence", i, k))
            if not res:
                ok, detail = False, res
                break
        verdicts.append(EquivalenceVerdict(i + 1, ok, image, dst.basis[i], detail))
    return EquivalenceReport(verdicts)
