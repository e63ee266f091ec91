"""Numeric evaluation, admissible sampling and randomized zero testing."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .core import VARS, JetAtom, ParamSpec, param_symbol

SAMPLE_LO, SAMPLE_HI = 1.1, 2.9
REL_TOL = 1e-8
MAX_RETRIES = 64
PARAM_REDRAW = 4  # failures of one column before its parameter group is redrawn


class EvaluationError(ArithmeticError):
    pass


class PoleError(EvaluationError):
    pass


class DomainError(EvaluationError):
    pass


def rng_for(seed: int, *labels) -> np.random.Generator:
    """Independent stream for one check, derived from the global seed and labels."""
    digest = hashlib.sha256("\x1f".join(str(s) for s in labels).encode()).digest()
    key = [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=key))


# evaluation ---------------------------------------------------------------

_UNARY = {
    sp.exp: np.exp,
    sp.log: np.log,
    sp.atan: np.arctan,
    sp.sin: np.sin,
    sp.cos: np.cos,
}


def _evaluate(e: sp.Expr, env: dict, width: int):
    """Evaluate over ``width`` columns at once; returns (values, max |subterm|)."""
    memo: dict = {}
    scale = np.zeros(width)
    stack = [(e, False)]
    while stack:
        node, ready = stack.pop()
        if node in memo:
            continue
        if node.is_Number or node is sp.S.Exp1 or node is sp.S.Pi:
            val = np.full(width, float(node))
        elif node.is_Symbol:
            try:
                val = env[node]
            except KeyError:
                raise KeyError(f"no value assigned to {node}") from None
        elif not ready:
            stack.append((node, True))
            stack.extend((a, False) for a in node.args if a not in memo)
            continue
        else:
            args = [memo[a] for a in node.args]
            if node.is_Add:
                val = np.sum(args, axis=0)
            elif node.is_Mul:
                val = np.prod(args, axis=0)
            elif node.is_Pow:
                b, n = node.args
                if n.is_Integer and int(n) < 0:
                    val = 1.0 / np.power(args[0], -int(n))
                elif n.is_Integer:
                    val = np.power(args[0], int(n))
                else:
                    val = np.power(args[0], args[1])
            elif isinstance(node, sp.Abs):
                val = args[0]
            else:
                fn = _UNARY.get(node.func)
                if fn is None:
                    raise TypeError(f"cannot evaluate node {node.func}")
                val = fn(args[0])
        val = np.broadcast_to(np.asarray(val, dtype=float), (width,))
        memo[node] = val
        with np.errstate(invalid="ignore"):
            np.fmax(scale, np.abs(val), out=scale)
    return memo[e], scale


def eval_numeric(e, assignment: dict) -> float:
    """IEEE double value of ``e``; keys may be names, jet labels or symbols."""
    e = sp.sympify(e)
    env = {}
    lookup = {s.name: s for s in e.free_symbols}
    for k, v in assignment.items():
        sym = lookup.get(k) if isinstance(k, str) else k
        if sym is not None:
            env[sym] = np.array([float(v)])
    with np.errstate(divide="raise", invalid="raise", over="raise"):
        try:
            val, _ = _evaluate(e, env, 1)
        except FloatingPointError as exc:
            if "divide" in str(exc):
                raise PoleError(str(exc)) from None
            raise DomainError(str(exc)) from None
    return float(val[0])


# sampling -------------------------------------------------------------------


def _draw_one(spec: ParamSpec, rng: np.random.Generator, k: int) -> float:
    # alternate signs across groups so sign-dependent identities are caught
    sign = 1.0 if k % 2 == 0 else -1.0
    kind = [c for c in spec.constraints if c[0] != "rel"]
    for c in kind:
        if c[0] == "choice":
            vals = c[1]
            return float(vals[k % len(vals)])
    for c in kind:
        if c[0] == "interval":
            _, lo, hi, _, _ = c
            lo = -3.0 if lo == -math.inf else float(lo)
            hi = lo + 3.0 if hi == math.inf else float(hi)
            return float(rng.uniform(lo, hi))
        if c[0] == "abs":
            _, lo, hi = c
            hi = float(lo) + 3.0 if hi == math.inf else float(hi)
            return float(rng.uniform(max(float(lo), 1e-3), hi) * sign)
        if c[0] == "int":
            _, lo, hi = c
            return float(rng.integers(lo, hi + 1))
    return float(rng.uniform(0.2, 2.5) * sign)


def _admissible(specs, values: dict) -> bool:
    for spec in specs:
        v = values[spec.symbol]
        for c in spec.constraints:
            kind = c[0]
            if kind == "nonzero" and abs(v) < 1e-6:
                return False
            if kind == "interval":
                _, lo, hi, lc, hc = c
                if v < lo or v > hi or (not lc and v == lo) or (not hc and v == hi):
                    return False
            if kind == "rel":
                _, lhs, op, rhs = c
                try:
                    a = eval_numeric(lhs, values)
                    b = eval_numeric(rhs, values)
                except (EvaluationError, KeyError):
                    return False
                ok = {
                    "<": a < b,
                    "<=": a <= b,
                    ">": a > b,
                    ">=": a >= b,
                    "!=": abs(a - b) > 1e-6,
                    "==": abs(a - b) <= 1e-12,
                }[op]
                if not ok:
                    return False
    return True


def sample_params(specs, rng: np.random.Generator, k: int = 0, tries: int = 500) -> dict:
    """One admissible assignment {symbol: float} for the given parameter specs."""
    specs = list(specs)
    for _ in range(tries):
        values = {spec.symbol: _draw_one(spec, rng, k) for spec in specs}
        if _admissible(specs, values):
            return values
    names = ", ".join(s.name for s in specs)
    raise ValueError(f"could not sample admissible values for parameters {names}")


def sample_columns(symbols, specs, rng, n_param: int, n_points: int) -> dict:
    """Arrays of n_param*n_points sample values for every symbol (params grouped)."""
    width = n_param * n_points
    env = {}
    param_syms = {s.symbol for s in specs}
    groups = [sample_params(specs, rng, k) for k in range(n_param)]
    for s in param_syms:
        env[s] = np.repeat([g[s] for g in groups], n_points)
    for s in sorted(symbols, key=lambda a: a.name):
        if s in param_syms:
            continue
        if s.is_Symbol and s.name not in VARS and not isinstance(s, JetAtom):
            raise KeyError(f"undeclared symbol {s.name} in sampled expression")
        env[s] = rng.uniform(SAMPLE_LO, SAMPLE_HI, size=width)
    return env


# zero test -------------------------------------------------------------------


@dataclass(frozen=True)
class Zero:
    method: str = "sampled"

    def __bool__(self):
        return True


@dataclass(frozen=True)
class NonZero:
    witness: dict = field(default_factory=dict)
    value: float = 0.0

    def __bool__(self):
        return False


@dataclass(frozen=True)
class Indeterminate:
    reason: str = ""

    def __bool__(self):
        return False


def _specs_for(e, params) -> list:
    specs = list(params or ())
    known = {s.name for s in specs}
    for s in e.free_symbols:
        if s.is_Symbol and not isinstance(s, JetAtom) and s.name not in VARS and s.name not in known:
            specs.append(ParamSpec(s.name))
            known.add(s.name)
    return sorted(specs, key=lambda s: s.name)


def is_zero(e, params=(), seed: int = 0, *, rng=None, n_param: int = 3, n_points: int = 8, symbolic_budget: int = 60):
    """Decide whether ``e`` vanishes identically.

    A cheap structural normalization is tried on small inputs; otherwise the
    expression is sampled at ``n_param`` admissible parameter assignments times
    ``n_points`` jet points.  Poles and domain failures are resampled, up to
    64 retries per sample column; a column that keeps failing also gets a
    fresh parameter group.
    """
    from .calculus import normalize

    e = sp.sympify(e)
    if e == 0:
        return Zero("structural")
    if sp.count_ops(e) <= symbolic_budget and normalize(e) == 0:
        return Zero("structural")
    if rng is None:
        rng = rng_for(seed, "is_zero")
    specs = _specs_for(e, params)
    symbols = e.free_symbols | {s.symbol for s in specs}
    width = n_param * n_points
    try:
        env = sample_columns(symbols, specs, rng, n_param, n_points)
    except ValueError as exc:
        return Indeterminate(str(exc))
    retries = np.zeros(width, dtype=int)
    strikes = np.zeros(width, dtype=int)
    while True:
        with np.errstate(all="ignore"):
            vals, scale = _evaluate(e, env, width)
        bad = ~np.isfinite(vals) | ~np.isfinite(scale)
        if not bad.any():
            break
        for j in np.flatnonzero(bad):
            retries[j] += 1
            if retries[j] > MAX_RETRIES:
                return Indeterminate(f"evaluation failed at every attempted sample after {MAX_RETRIES} retries")
            strikes[j] += 1
            for s in env:
                if s.name in VARS or isinstance(s, JetAtom):
                    env[s] = env[s].copy()
                    env[s][j] = rng.uniform(SAMPLE_LO, SAMPLE_HI)
            if specs and strikes[j] >= PARAM_REDRAW:
                # the parameter values themselves may put this group on a pole
                k = j // n_points
                group = sample_params(specs, rng, k)
                cols = slice(k * n_points, (k + 1) * n_points)
                for sym, v in group.items():
                    env[sym] = env[sym].copy()
                    env[sym][cols] = v
                strikes[cols] = 0
    over = np.abs(vals) > REL_TOL * (1.0 + scale)
    if not over.any():
        return Zero("sampled")
    j = int(np.flatnonzero(over)[0])
    witness = {s.name: float(env[s][j]) for s in sorted(env, key=lambda a: a.name)}
    return NonZero(witness, float(vals[j]))
