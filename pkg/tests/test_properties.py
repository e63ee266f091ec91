"""Exact identities on random rational instances (200 each, zero tolerance).

Naturality spreads its 200 instances over a panel of five transformations.
"""

import random

import pytest
import sympy as sp

from evosym.expr import FuncSymbol, diff, normalize, t, u, u1, u2, x
from evosym.transform import PointTransformation, pushforward
from evosym.vectorfield import VectorField, bracket

N = 200


def _q(rng):
    return sp.Rational(rng.randint(-5, 5), rng.randint(1, 4))


def _poly(rng, vars_, terms=3, deg=2):
    out = sp.S.Zero
    for _ in range(terms):
        mono = sp.Mul(*[v ** rng.randint(0, deg) for v in vars_])
        out += _q(rng) * mono
    return out


def _field(rng, terms=2, deg=2):
    return VectorField(_poly(rng, (t,), terms, deg), _poly(rng, (t, x, u), terms, deg), _poly(rng, (t, x, u), terms, deg))


def _same(a: VectorField, b: VectorField) -> bool:
    return all(normalize(p - q) == 0 for p, q in zip(a.components, b.components))


def _sum(*fs):
    return VectorField(*[sp.Add(*c) for c in zip(*(f.components for f in fs))])


def _neg(f):
    return VectorField(*[-c for c in f.components])



def test_bracket_antisymmetry():
    rng = random.Random(1)
    for _ in range(N):
        X, Y = _field(rng), _field(rng)
        assert _same(bracket(X, Y), _neg(bracket(Y, X)))


def test_jacobi_identity():
    rng = random.Random(2)
    zero = VectorField(0, 0, 0)
    for _ in range(N):
        X, Y, Z = (_field(rng, 2, 1) for _ in range(3))
        total = _sum(bracket(X, bracket(Y, Z)), bracket(Y, bracket(Z, X)), bracket(Z, bracket(X, Y)))
        assert _same(total, zero)


def _jet_expr(rng):
    f = FuncSymbol("f", (u2 * u1**-3,))
    g = FuncSymbol("g", (x, u))
    pieces = [_poly(rng, (t, x, u, u1, u2), terms=2), f(), g(), f.d(0), g.d(1)]
    e = sp.S.Zero
    for p in rng.sample(pieces, 3):
        e += _q(rng) * p * _poly(rng, (x, u1), terms=1, deg=1)
    return e


def test_diff_product_rule():
    rng = random.Random(3)
    for _ in range(N):
        a, b = _jet_expr(rng), _jet_expr(rng)
        v = rng.choice((t, x, u, u1, u2))
        assert sp.expand(diff(a * b, v) - diff(a, v) * b - a * diff(b, v)) == 0


def test_clairaut():
    rng = random.Random(4)
    for _ in range(N):
        e = _jet_expr(rng)
        v, w = rng.sample((t, x, u, u1, u2), 2)
        assert sp.expand(diff(diff(e, v), w) - diff(diff(e, w), v)) == 0


TRANSFORMS = [
    PointTransformation(t + 1, x - 2 * u, u, t - 1, x + 2 * u, u),
    PointTransformation(2 * t, x / 3, 5 * u, t / 2, 3 * x, u / 5),
    PointTransformation(sp.log(t), x, u, sp.exp(t), x, u),
    PointTransformation(t, u, x, t, u, x),
    PointTransformation(t, 1 / x, u / x, t, 1 / x, u / x),
]


@pytest.mark.parametrize("k", range(len(TRANSFORMS)))
def test_pushforward_bracket_naturality(k):
    phi = TRANSFORMS[k]
    rng = random.Random(10 + k)
    for _ in range(N // len(TRANSFORMS)):
        X, Y = _field(rng), _field(rng)
        lhs = pushforward(bracket(X, Y), phi)
        rhs = bracket(pushforward(X, phi), pushforward(Y, phi))
        assert _same(lhs, rhs)
