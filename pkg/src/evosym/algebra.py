"""Structure-constant tables of the solvable algebras and realization checks."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import sympy as sp

from .expr import Context, Indeterminate, NonZero, ParamSpec, is_zero, parse, rng_for, sample_params
from .vectorfield import Realization, VectorField, bracket, combination

INF = math.inf


@dataclass
class StructureTable:
    """[e_i, e_j] = sum_k c[(i, j)][k] e_k with 0-based indices and i < j."""

    name: str
    dim: int
    c: dict = field(default_factory=dict)
    params: list = field(default_factory=list)

    def coeff(self, i: int, j: int, k: int) -> sp.Expr:
        if i == j:
            return sp.S.Zero
        if i < j:
            return self.c.get((i, j), {}).get(k, sp.S.Zero)
        return -self.c.get((j, i), {}).get(k, sp.S.Zero)

    def nonzero(self) -> list:
        """Nonzero constants as (i, j, k, value), 1-based, i < j."""
        out = []
        for (i, j), row in sorted(self.c.items()):
            for k, v in sorted(row.items()):
                if v != 0:
                    out.append((i + 1, j + 1, k + 1, v))
        return out

    def bracket_vec(self, v, w):
        """Bracket of coordinate vectors (sequences of sympy numbers/exprs)."""
        out = [sp.S.Zero] * self.dim
        for i in range(self.dim):
            if v[i] == 0:
                continue
            for j in range(self.dim):
                if w[j] == 0 or i == j:
                    continue
                for k in range(self.dim):
                    cijk = self.coeff(i, j, k)
                    if cijk != 0:
                        out[k] += v[i] * w[j] * cijk
        return out

    def jacobi_defects(self) -> list:
        """All components of the abstract Jacobi identity (as expressions)."""
        n = self.dim
        basis = [[sp.S.One if a == b else sp.S.Zero for a in range(n)] for b in range(n)]
        out = []
        for i, j, k in combinations(range(n), 3):
            a, b, c = basis[i], basis[j], basis[k]
            t1 = self.bracket_vec(a, self.bracket_vec(b, c))
            t2 = self.bracket_vec(b, self.bracket_vec(c, a))
            t3 = self.bracket_vec(c, self.bracket_vec(a, b))
            out.extend(sp.expand(p + q + r) for p, q, r in zip(t1, t2, t3))
        return out

    def specialize(self, values: dict) -> "StructureTable":
        """Substitute fixed values (name -> expr) for parameters."""
        subs = {sp.Symbol(n, real=True): sp.sympify(v) for n, v in values.items()}
        c = {}
        for key, row in self.c.items():
            new = {k: sp.sympify(v).xreplace(subs) for k, v in row.items()}
            c[key] = {k: v for k, v in new.items() if v != 0}
        params = [p for p in self.params if p.name not in values]
        return StructureTable(self.name, self.dim, c, params)

    def check_jacobi(self, seed: int = 0) -> bool:
        return all(is_zero(d, self.params, rng=rng_for(seed, self.name, "jacobi", k)) for k, d in enumerate(self.jacobi_defects()))


# table definitions ------------------------------------------------------------

_REL = re.compile(r"\[e(\d+),\s*e(\d+)\]\s*=\s*([^;]+)")

# name -> (dim, relations, {param: constraints})
_BASE = {
    "A1": (1, "", {}),
    "A2.1": (2, "", {}),
    "A2.2": (2, "[e1,e2]=e1", {}),
    "A3.1": (3, "", {}),
    "A3.2": (3, "[e1,e2]=e1", {}),
    "A3.3": (3, "[e2,e3]=e1", {}),
    "A3.4": (3, "[e1,e3]=e1; [e2,e3]=e1+e2", {}),
    "A3.5": (3, "[e1,e3]=e1; [e2,e3]=e2", {}),
    "A3.6": (3, "[e1,e3]=e1; [e2,e3]=-e2", {}),
    "A3.7": (3, "[e1,e3]=e1; [e2,e3]=q*e2", {"q": (("abs", 0, 1),)}),
    "A3.8": (3, "[e1,e3]=-e2; [e2,e3]=e1", {}),
    "A3.9": (3, "[e1,e3]=q*e1-e2; [e2,e3]=e1+q*e2", {"q": (("interval", 0, INF, False, False),)}),
    "A4.1": (4, "[e2,e4]=e1; [e3,e4]=e2", {}),
    "A4.2": (4, "[e1,e4]=q*e1; [e2,e4]=e2; [e3,e4]=e2+e3", {"q": (("nonzero",),)}),
    "A4.3": (4, "[e1,e4]=e1; [e3,e4]=e2", {}),
    "A4.4": (4, "[e1,e4]=e1; [e2,e4]=e1+e2; [e3,e4]=e2+e3", {}),
    "A4.5": (
        4,
        "[e1,e4]=e1; [e2,e4]=q*e2; [e3,e4]=p*e3",
        {
            "p": (("interval", -1, 1, True, True), ("nonzero",)),
            "q": (("interval", -1, 1, True, True), ("nonzero",), ("rel", "p", "<=", "q")),
        },
    ),
    "A4.6": (
        4,
        "[e1,e4]=q*e1; [e2,e4]=p*e2-e3; [e3,e4]=e2+p*e3",
        {"q": (("nonzero",),), "p": (("interval", 0, INF, True, False),)},
    ),
    "A4.7": (4, "[e2,e3]=e1; [e1,e4]=2*e1; [e2,e4]=e2; [e3,e4]=e2+e3", {}),
    "A4.8": (4, "[e2,e3]=e1; [e1,e4]=(1+q)*e1; [e2,e4]=e2; [e3,e4]=q*e3", {"q": (("interval", -1, 1, True, True),)}),
    "A4.9": (
        4,
        "[e2,e3]=e1; [e1,e4]=2*q*e1; [e2,e4]=q*e2-e3; [e3,e4]=e2+q*e3",
        {"q": (("interval", 0, INF, True, False),)},
    ),
    "A4.10": (4, "[e1,e3]=e1; [e2,e3]=e2; [e1,e4]=-e2; [e2,e4]=e1", {}),
    "A5.3": (5, "[e2,e4]=e3; [e2,e5]=e1; [e4,e5]=e2", {}),
    "A5.4": (5, "[e2,e4]=e1; [e3,e5]=e1", {}),
    "A5.5": (5, "[e3,e4]=e1; [e2,e5]=e1; [e3,e5]=e2", {}),
    "A5.6": (5, "[e3,e4]=e1; [e2,e5]=e1; [e3,e5]=e2; [e4,e5]=e3", {}),
}

# A3.3 + A1 base with e5 acting; list of the four images [e1,e5], ..., [e4,e5]
_A5_33A1 = {
    "A5.19": (("(p+1)*e1", "e2", "p*e3", "q*e4"), {"p": (), "q": (("nonzero",),)}),
    "A5.20": (("(p+1)*e1", "e2", "p*e3", "e1+(p+1)*e4"), {"p": ()}),
    "A5.21": (("2*e1", "e2+e3", "e3+e4", "e4"), {}),
    "A5.22": (("0", "e3", "0", "e4"), {}),
    "A5.23": (("2*e1", "e2+e3", "e3", "p*e4"), {"p": (("nonzero",),)}),
    "A5.24": (("2*e1", "e2+e3", "e3", "epsilon*e1+2*e4"), {"epsilon": (("choice", (1, -1)),)}),
    "A5.25": (("2*p*e1", "p*e2+e3", "-e2+p*e3", "q*e4"), {"p": (), "q": (("nonzero",),)}),
    "A5.26": (("2*p*e1", "p*e2+e3", "-e2+p*e3", "epsilon*e1+2*p*e4"), {"p": (), "epsilon": (("choice", (1, -1)),)}),
    "A5.27": (("e1", "0", "e3+e4", "e1+e4"), {}),
    "A5.28": (("(p+1)*e1", "p*e2", "e3+e4", "e4"), {"p": ()}),
    "A5.29": (("e1", "e2", "e4", "0"), {}),
}

# A4.1 base with e5 acting
_A5_41 = {
    "A5.30": (("(p+2)*e1", "(p+1)*e2", "p*e3", "e4"), {"p": ()}),
    "A5.31": (("3*e1", "2*e2", "e3", "e3+e4"), {}),
    "A5.32": (("e1", "e2", "p*e1+e3", "0"), {"p": ()}),
}

_A5_OTHER = {
    "A5.33": ("[e1,e4]=e1; [e3,e4]=p*e3; [e2,e5]=e2; [e3,e5]=q*e3", {"p": (), "q": (("rel", "p^2+q^2", "!=", "0"),)}),
    "A5.34": ("[e1,e4]=p*e1; [e2,e4]=e2; [e3,e4]=e3; [e1,e5]=e1; [e3,e5]=e2", {"p": ()}),
    "A5.35": (
        "[e1,e4]=p*e1; [e2,e4]=e2; [e3,e4]=e3; [e1,e5]=q*e1; [e2,e5]=-e3; [e3,e5]=e2",
        {"p": (), "q": (("rel", "p^2+q^2", "!=", "0"),)},
    ),
    "A5.36": ("[e2,e3]=e1; [e1,e4]=e1; [e2,e4]=e2; [e2,e5]=-e2; [e3,e5]=e3", {}),
    "A5.37": ("[e2,e3]=e1; [e1,e4]=2*e1; [e2,e4]=e2; [e3,e4]=e3; [e2,e5]=-e3; [e3,e5]=e2", {}),
    "A5.38": ("[e1,e4]=e1; [e2,e5]=e2; [e4,e5]=e3", {}),
    "A5.39": ("[e1,e4]=e1; [e2,e4]=e2; [e1,e5]=-e2; [e2,e5]=e1; [e4,e5]=e3", {}),
}


def _register():
    for name, (images, params) in _A5_33A1.items():
        rel = "[e2,e3]=e1; " + "; ".join(f"[e{k + 1},e5]={img}" for k, img in enumerate(images) if img != "0")
        _BASE[name] = (5, rel, params)
    for name, (images, params) in _A5_41.items():
        rel = "[e2,e4]=e1; [e3,e4]=e2; " + "; ".join(f"[e{k + 1},e5]={img}" for k, img in enumerate(images) if img != "0")
        _BASE[name] = (5, rel, params)
    for name, (rel, params) in _A5_OTHER.items():
        _BASE[name] = (5, rel, params)


_register()


class UnknownAlgebra(KeyError):
    pass


def _param_specs(raw: dict) -> list:
    ctx = Context.build(params=list(raw))
    specs = []
    for name, cons in raw.items():
        parsed = []
        for c in cons:
            if c[0] == "rel":
                parsed.append(("rel", parse(c[1], ctx), c[2], parse(c[3], ctx)))
            else:
                parsed.append(c)
        specs.append(ParamSpec(name, tuple(parsed)))
    return specs


def _base_table(name: str) -> StructureTable:
    if name not in _BASE:
        raise UnknownAlgebra(name)
    dim, rels, raw = _BASE[name]
    specs = _param_specs(raw)
    ctx = Context.build(params=specs)
    ctx.extra.update({f"e{k + 1}": sp.Symbol(f"e{k + 1}") for k in range(dim)})
    es = [ctx.extra[f"e{k + 1}"] for k in range(dim)]
    c: dict = {}
    for m in _REL.finditer(rels):
        i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
        rhs = sp.expand(parse(m.group(3).strip(), ctx))
        row = {k: rhs.coeff(es[k]) for k in range(dim) if rhs.coeff(es[k]) != 0}
        if i > j:
            i, j = j, i
            row = {k: -v for k, v in row.items()}
        c[(i, j)] = row
    return StructureTable(name, dim, c, specs)


def canonical_name(name: str) -> str:
    return name.replace("⊕", "+").replace(" ", "")


def direct_sum(tables: list, name: str) -> StructureTable:
    c, params, off = {}, [], 0
    seen = set()
    for tb in tables:
        for (i, j), row in tb.c.items():
            c[(i + off, j + off)] = {k + off: v for k, v in row.items()}
        for p in tb.params:
            if p.name in seen:
                raise ValueError(f"parameter {p.name} appears in two summands of {name}")
            seen.add(p.name)
            params.append(p)
        off += tb.dim
    return StructureTable(name, off, c, params)


def builtin_table(name: str, params=None) -> StructureTable:
    """Table for a catalog id such as "A3.7", "A3.3+A1", "2A2.2+A1" or "A2.1⊕A2.2".

    ``params`` may override the default admissible set of a parameter.
    """
    cname = canonical_name(name)
    parts = []
    for piece in cname.split("+"):
        m = re.fullmatch(r"(\d*)(A\d+(?:\.\d+)?)", piece)
        if not m:
            raise UnknownAlgebra(name)
        mult = int(m.group(1) or 1)
        parts.extend([_base_table(m.group(2))] * mult)
    table = parts[0] if len(parts) == 1 else direct_sum(parts, cname)
    table.name = cname
    if params:
        override = {p.name: p for p in params}
        table.params = [override.pop(p.name, p) for p in table.params] + list(override.values())
    return table


def known_algebras() -> list:
    return sorted(_BASE)


# realization checks --------------------------------------------------------------


@dataclass
class PairVerdict:
    i: int
    j: int
    ok: bool
    defect: VectorField | None = None
    detail: object = None


@dataclass
class AlgebraReport:
    name: str
    verdicts: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    @property
    def indeterminate(self) -> bool:
        return any(isinstance(v.detail, Indeterminate) for v in self.verdicts)

    def failures(self) -> list:
        return [v for v in self.verdicts if not v.ok]


def check_realization(r: Realization, table: StructureTable, seed: int = 0) -> AlgebraReport:
    """Compare every bracket [e_i, e_j] with the table, identically in the parameters."""
    if r.dim != table.dim:
        raise ValueError(f"realization has {r.dim} fields, {table.name} has dimension {table.dim}")
    params = _merge_params(table.params, r.params)
    report = AlgebraReport(table.name)
    for i, j in combinations(range(r.dim), 2):
        br = bracket(r.basis[i], r.basis[j])
        expected = combination([table.coeff(i, j, k) for k in range(r.dim)], r.basis)
        defect = (br - expected).normalized()
        ok, detail = True, None
        for comp_no, comp in enumerate(defect.components):
            res = is_zero(comp, params, rng=rng_for(seed, table.name, "pair", i, j, comp_no))
            if not res:
                ok, detail = False, res
                break
        report.verdicts.append(PairVerdict(i + 1, j + 1, ok, None if ok else defect, detail))
    return report


def _merge_params(*groups) -> list:
    out = {}
    for g in groups:
        for p in g or ():
            if p.name not in out or (p.constraints and not out[p.name].constraints):
                out[p.name] = p
    return list(out.values())


# derived series --------------------------------------------------------------------


def _numeric_table(table: StructureTable, seed: int) -> StructureTable:
    if not table.params:
        return table
    values = sample_params(table.params, rng_for(seed, table.name, "derived"))
    subs = {s: sp.Rational(Fraction(v).limit_denominator(97)) for s, v in values.items()}
    c = {key: {k: sp.sympify(v).subs(subs) for k, v in row.items()} for key, row in table.c.items()}
    return StructureTable(table.name, table.dim, c, [])


def _span(vectors, dim) -> list:
    if not vectors:
        return []
    m = sp.Matrix(vectors)
    rows = m.rref()[0]
    return [list(rows.row(k)) for k in range(rows.rows) if any(x != 0 for x in rows.row(k))]


def derived_series(table: StructureTable, seed: int = 0) -> list:
    """Dimensions of g, [g,g], [[g,g],[g,g]], ... until they stabilize."""
    tb = _numeric_table(table, seed)
    n = tb.dim
    current = [[sp.S.One if a == b else sp.S.Zero for a in range(n)] for b in range(n)]
    dims = [n]
    while current:
        nxt = _span([tb.bracket_vec(v, w) for v, w in combinations(current, 2)], n)
        if len(nxt) == len(current):
            break
        current = nxt
        dims.append(len(current))
    return dims


def is_solvable(table: StructureTable, seed: int = 0) -> bool:
    return derived_series(table, seed)[-1] == 0


def is_abelian(r, seed: int = 0) -> bool:
    fields = r.basis if isinstance(r, Realization) else list(r)
    params = r.params if isinstance(r, Realization) else ()
    for i, j in combinations(range(len(fields)), 2):
        br = bracket(fields[i], fields[j])
        for k, comp in enumerate(br.components):
            if not is_zero(comp, params, rng=rng_for(seed, "abelian", i, j, k)):
                return False
    return True


__all__ = [
    "StructureTable", "AlgebraReport", "PairVerdict", "UnknownAlgebra", "builtin_table", "known_algebras",
    "check_realization", "derived_series", "is_solvable", "is_abelian", "direct_sum", "canonical_name",
    "NonZero",
]
