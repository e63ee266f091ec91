"""Flag realizations whose symmetry algebra forces a linearizable equation.

Two criteria: a three-dimensional solvable subalgebra of rank one, or an
abelian subalgebra of dimension at least four.  Candidates are subsets of the
basis; when none qualifies, sums and differences e_i +/- e_j are admitted
as extra candidate generators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
import sympy as sp

from .expr import JetAtom, rng_for
from .expr.core import VARS
from .expr.numeric import MAX_RETRIES, SAMPLE_HI, SAMPLE_LO, _evaluate, _specs_for, sample_columns
from .vectorfield import IndeterminateError, Realization, bracket

TOL = 1e-8


@dataclass
class LinearizabilityVerdict:
    flag: str = "not_flagged"
    reason: str = "none"
    subset: tuple = field(default_factory=tuple)

    @property
    def linearizing(self) -> bool:
        return self.flag == "linearizing"

    def __str__(self) -> str:
        if not self.linearizing:
            return "not_flagged"
        return f"linearizing {self.reason} <{', '.join(self.subset)}>"


def _label(coeffs) -> str:
    out = ""
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        term = f"e{k + 1}"
        if not out:
            out = term if c == 1 else f"-{term}"
        else:
            out += f" + {term}" if c == 1 else f" - {term}"
    return out


class _Numeric:
    """Basis fields and pairwise brackets evaluated at shared sample columns."""

    def __init__(self, r: Realization, seed: int, n_points: int = 8):
        n = r.dim
        self.n = n
        brs = {(i, j): bracket(r.basis[i], r.basis[j]) for i, j in combinations(range(n), 2)}
        exprs = [comp for f in r.basis for comp in f.components]
        exprs += [comp for key in sorted(brs) for comp in brs[key].components]
        exprs = [sp.sympify(e) for e in exprs]
        probe = sp.Add(*[sp.Dummy() * e for e in exprs])
        specs = _specs_for(probe, r.params)
        symbols = set().union(*(e.free_symbols for e in exprs)) | {s.symbol for s in specs}
        symbols |= {VARS["t"], VARS["x"], VARS["u"]}
        rng = rng_for(seed, "linearize")
        self.groups = 2 if specs else 1
        self.points = n_points
        width = self.groups * n_points
        env = sample_columns(symbols, specs, rng, self.groups, n_points)
        retries = 0
        while True:
            with np.errstate(all="ignore"):
                vals = np.array([_evaluate(e, env, width)[0] for e in exprs])
            bad = ~np.isfinite(vals).all(axis=0)
            if not bad.any():
                break
            for j in np.flatnonzero(bad):
                retries += 1
                if retries > MAX_RETRIES:
                    raise IndeterminateError("every sample hit a pole")
                for s in env:
                    if s.name in VARS or isinstance(s, JetAtom):
                        env[s] = env[s].copy()
                        env[s][j] = rng.uniform(SAMPLE_LO, SAMPLE_HI)
        self.E = vals[: 3 * n].reshape(n, 3, width)
        B = np.zeros((n, n, 3, width))
        rest = vals[3 * n :].reshape(len(brs), 3, width)
        for k, (i, j) in enumerate(sorted(brs)):
            B[i, j] = rest[k]
            B[j, i] = -rest[k]
        self.B = B

    def fields(self, C: np.ndarray) -> np.ndarray:
        return np.einsum("mi,icw->mcw", C, self.E)

    def bracket(self, c1: np.ndarray, c2: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijcw->cw", c1, c2, self.B)

    def rank(self, C: np.ndarray) -> int:
        F = np.moveaxis(self.fields(C), 2, 0)
        sv = np.linalg.svd(F, compute_uv=False)
        top = sv[:, :1]
        ranks = np.where(top[:, 0] > 0, (sv > 1e-9 * top).sum(axis=1), 0)
        return int(ranks.max())

    def structure(self, C: np.ndarray):
        """Constant structure constants of span(C) if it is closed, else None."""
        m = C.shape[0]
        F = self.fields(C)
        consts = np.zeros((self.groups, m, m, m))
        for g in range(self.groups):
            cols = slice(g * self.points, (g + 1) * self.points)
            A = F[:, :, cols].reshape(m, -1).T
            for a, b in combinations(range(m), 2):
                rhs = self.bracket(C[a], C[b])[:, cols].reshape(-1)
                alpha, *_ = np.linalg.lstsq(A, rhs, rcond=None)
                resid = np.abs(A @ alpha - rhs).max()
                scale = 1.0 + np.abs(rhs).max() + np.abs(A).max() * np.abs(alpha).max()
                if resid > TOL * scale:
                    return None
                consts[g, a, b] = alpha
                consts[g, b, a] = -alpha
        return consts

    def commute(self, c1, c2) -> bool:
        br = self.bracket(c1, c2)
        scale = 1.0 + np.abs(self.fields(np.array([c1, c2]))).max()
        return np.abs(br).max() <= TOL * scale * (1.0 + np.abs(c1).sum() * np.abs(c2).sum())


def _solvable(consts: np.ndarray) -> bool:
    m = consts.shape[1]
    for g in range(consts.shape[0]):
        cur = np.eye(m)
        while cur.shape[0]:
            vecs = [np.einsum("i,j,ijk->k", v, w, consts[g]) for v, w in combinations(cur, 2)]
            if not vecs:
                break
            _, s, vt = np.linalg.svd(np.array(vecs))
            r = int((s > 1e-9 * s[0]).sum()) if s.size and s[0] > 0 else 0
            if r == cur.shape[0]:
                return False
            cur = vt[:r]
    return True


def _candidates(n: int, with_combos: bool) -> list:
    base = [tuple(1 if k == i else 0 for k in range(n)) for i in range(n)]
    if not with_combos:
        return base
    extra = []
    for i, j in combinations(range(n), 2):
        for s in (1, -1):
            v = [0] * n
            v[i], v[j] = 1, s
            extra.append(tuple(v))
    return base + extra


def _independent(rows) -> bool:
    return np.linalg.matrix_rank(np.array(rows, dtype=float)) == len(rows)


def _cliques(adj: dict, size: int):
    """Cliques of exactly ``size`` vertices, in lexicographic order."""

    def grow(clique, pool):
        if len(clique) == size:
            yield tuple(clique)
            return
        last = clique[-1] if clique else -1
        for v in sorted(pool):
            if v > last:
                yield from grow(clique + [v], pool & adj[v])

    yield from grow([], set(adj))


def flag_linearizing(r: Realization, seed: int = 0) -> LinearizabilityVerdict:
    """Search basis subsets (then +/- pair combinations) for a linearizing subalgebra."""
    n = r.dim
    if n < 3:
        return LinearizabilityVerdict()
    num = _Numeric(r, seed)
    for with_combos in (False, True):
        cands = _candidates(n, with_combos)

        def fresh(rows):
            # the second pass only needs subsets that use a combination
            return not with_combos or any(sum(abs(c) for c in row) > 1 for row in rows)

        parallel = {a: set() for a in range(len(cands))}
        for a, b in combinations(range(len(cands)), 2):
            if num.rank(np.array([cands[a], cands[b]], dtype=float)) <= 1:
                parallel[a].add(b)
                parallel[b].add(a)
        for idx in _cliques(parallel, 3):
            trip = [cands[k] for k in idx]
            if not fresh(trip) or not _independent(trip):
                continue
            C = np.array(trip, dtype=float)
            if num.rank(C) != 1:
                continue
            consts = num.structure(C)
            if consts is not None and _solvable(consts):
                return LinearizabilityVerdict("linearizing", "rank1_solvable_3d", tuple(_label(c) for c in trip))
        if n >= 4:
            arr = [np.array(c, dtype=float) for c in cands]
            adj = {a: set() for a in range(len(cands))}
            for a, b in combinations(range(len(cands)), 2):
                if num.commute(arr[a], arr[b]):
                    adj[a].add(b)
                    adj[b].add(a)
            for clique in _cliques(adj, 4):
                rows = [cands[k] for k in clique]
                if fresh(rows) and _independent(rows):
                    return LinearizabilityVerdict("linearizing", "abelian_ge4", tuple(_label(c) for c in rows))
    return LinearizabilityVerdict()
