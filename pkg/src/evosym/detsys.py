"""Determining equations for u_t = F u3 + G and invariance checks."""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from .expr import Indeterminate, NonZero, diff, is_zero, normalize, rng_for
from .expr.core import VARS
from .vectorfield import VectorField, depends_on

t, x, u, u1, u2, u3 = (VARS[n] for n in ("t", "x", "u", "u1", "u2", "u3"))


@dataclass
class EvolutionEquation:
    F: sp.Expr
    G: sp.Expr
    params: list = field(default_factory=list)

    def __post_init__(self):
        self.F = sp.sympify(self.F)
        self.G = sp.sympify(self.G)
        if self.F == 0:
            raise ValueError("F must not vanish (the equation would not be third order)")
        for name, e in (("F", self.F), ("G", self.G)):
            if "u3" in depends_on(e):
                raise ValueError(f"{name} may depend on t, x, u, u1, u2 only")


@dataclass(frozen=True)
class DefectPair:
    d1: sp.Expr
    d2: sp.Expr


def _d(e, *vs):
    for v in vs:
        e = diff(e, v)
    return e


def symmetry_defect(Q: VectorField, eq: EvolutionEquation) -> DefectPair:
    """Left-hand sides of the two determining equations for the generator Q."""
    a, b, c = Q.components
    F, G = eq.F, eq.G
    ad = _d(a, t)
    bx, bu, bt = _d(b, x), _d(b, u), _d(b, t)
    cx, cu, ct = _d(c, x), _d(c, u), _d(c, t)
    bxx, bxu, buu = _d(b, x, x), _d(b, x, u), _d(b, u, u)
    cxx, cxu, cuu = _d(c, x, x), _d(c, x, u), _d(c, u, u)
    bxxx, bxxu, bxuu, buuu = _d(b, x, x, x), _d(b, x, x, u), _d(b, x, u, u), _d(b, u, u, u)
    cxxx, cxxu, cxuu, cuuu = _d(c, x, x, x), _d(c, x, x, u), _d(c, x, u, u), _d(c, u, u, u)

    second = (
        u1 * (bxx - 2 * cxu)
        + u1**2 * (2 * bxu - cuu)
        + u1**3 * buu
        + u2 * (2 * bx - cu)
        + 3 * u1 * u2 * bu
        - cxx
    )
    first = u1**2 * bu + u1 * (bx - cu) - cx

    d1 = (
        F * (-ad + 3 * u1 * bu + 3 * bx)
        + second * diff(F, u2)
        + first * diff(F, u1)
        - c * diff(F, u)
        - a * diff(F, t)
        - b * diff(F, x)
    )

    third = (
        u1 * (bxxx - 3 * cxxu)
        + 3 * u1**2 * (bxxu - cxuu)
        + u1**3 * (3 * bxuu - cuuu)
        + u1**4 * buuu
        + 3 * u2 * (bxx - cxu)
        + 3 * u1 * u2 * (3 * bxu - cuu)
        + 6 * u1**2 * u2 * buu
        + 3 * u2**2 * bu
        - cxxx
    )
    d2 = (
        G * (-ad - u1 * bu + cu)
        - u1 * bt
        + ct
        + F * third
        + second * diff(G, u2)
        + first * diff(G, u1)
        - c * diff(G, u)
        - a * diff(G, t)
        - b * diff(G, x)
    )
    for name, d in (("d1", d1), ("d2", d2)):
        if "u3" in depends_on(d):
            raise AssertionError(f"{name} contains u3; the determining equations are mis-assembled")
    return DefectPair(d1, d2)


@dataclass
class GeneratorVerdict:
    index: int
    status: str  # pass | fail | indeterminate
    failed: tuple = ()
    witness: dict | None = None
    value: float | None = None
    reason: str = ""


@dataclass
class VerificationReport:
    verdicts: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v.status == "pass" for v in self.verdicts)

    @property
    def status(self) -> str:
        if self.ok:
            return "pass"
        if any(v.status == "fail" for v in self.verdicts):
            return "fail"
        return "indeterminate"


def check_generator(Q: VectorField, eq: EvolutionEquation, seed: int = 0, label="gen") -> GeneratorVerdict:
    pair = symmetry_defect(Q, eq)
    failed, witness, value, reasons = [], None, None, []
    indeterminate = False
    for name, d in (("deq1", pair.d1), ("deq2", pair.d2)):
        res = is_zero(d, eq.params, rng=rng_for(seed, label, name))
        if isinstance(res, NonZero):
            failed.append(name)
            if witness is None:
                witness, value = res.witness, res.value
        elif isinstance(res, Indeterminate):
            indeterminate = True
            reasons.append(f"{name}: {res.reason}")
    if failed:
        return GeneratorVerdict(0, "fail", tuple(failed), witness, value)
    if indeterminate:
        return GeneratorVerdict(0, "indeterminate", reason="; ".join(reasons))
    return GeneratorVerdict(0, "pass")


def check_invariance(basis, eq: EvolutionEquation, seed: int = 0, label: str = "") -> VerificationReport:
    """Per-generator verdict: pass iff both determining equations vanish identically."""
    report = VerificationReport()
    for k, Q in enumerate(basis):
        v = check_generator(Q, eq, seed, (label, k))
        v.index = k + 1
        report.verdicts.append(v)
    return report


def exact_defect(Q: VectorField, eq: EvolutionEquation) -> DefectPair:
    """Normalized defects, for exact comparisons on small inputs."""
    p = symmetry_defect(Q, eq)
    return DefectPair(normalize(p.d1), normalize(p.d2))
