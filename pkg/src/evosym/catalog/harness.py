"""Batch verification of catalog entries and the per-dimension summary."""

from __future__ import annotations

import hashlib
import json
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from ..algebra import check_realization
from ..detsys import check_invariance
from ..expr import Indeterminate, NonZero
from ..linearize import flag_linearizing
from ..vectorfield import IndeterminateError
from .loader import CatalogEntry

# invariant-equation types claimed for dimensions 3, 4 and 5
CLAIMED = {3: 48, 4: 88, 5: 55}


def entry_seed(seed: int, entry_id: str) -> int:
    digest = hashlib.sha256(f"{seed}:{entry_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass
class EntryReport:
    id: str
    dimension: int
    kind: str
    expect: str
    status: str = "pass"
    failed_checks: list = field(default_factory=list)
    witness: dict | None = None
    linearizability: str = "not_flagged"
    matches: str | None = None
    note: str = ""
    seed: int = 0
    elapsed: float = 0.0

    def record(self) -> dict:
        """Machine record; no timing so that runs diff cleanly."""
        out = asdict(self)
        out.pop("elapsed")
        return out

    @property
    def annotated(self) -> bool:
        return self.expect != "verify"


def _witness(detail) -> dict | None:
    if isinstance(detail, NonZero):
        w = {k: float(v) for k, v in detail.witness.items()}
        w["value"] = float(detail.value)
        return w
    return None


def _raw_checks(entry: CatalogEntry, seed: int, siblings=()) -> EntryReport:
    rep = EntryReport(entry.id, entry.dimension, entry.kind, entry.expect, note=entry.note, seed=seed)
    if entry.expect in ("inadmissible", "absent"):
        rep.status = entry.expect
        return rep
    ctx = entry.context()
    r = entry.realization(ctx)
    outcomes = []

    alg = check_realization(r, entry.table(), seed)
    for v in alg.failures():
        rep.failed_checks.append(f"algebra[{v.i},{v.j}]")
        rep.witness = rep.witness or _witness(v.detail)
    outcomes.append("indeterminate" if alg.indeterminate else ("pass" if alg.ok else "fail"))

    try:
        verdict = flag_linearizing(r, seed)
        rep.linearizability = str(verdict)
        flagged = verdict.linearizing
        if flagged != (entry.expect == "linearizing"):
            rep.failed_checks.append("linearizing" if flagged else "not_linearizing")
            outcomes.append("fail")
    except IndeterminateError as exc:
        rep.linearizability = f"indeterminate ({exc})"
        outcomes.append("indeterminate")

    if entry.kind == "equation":
        eq = entry.equation(ctx)
        inv = check_invariance(r.basis, eq, seed, entry.id)
        for v in inv.verdicts:
            if v.status == "fail":
                rep.failed_checks.extend(f"gen{v.index}:{name}" for name in v.failed)
                if rep.witness is None and v.witness is not None:
                    rep.witness = {k: float(x) for k, x in v.witness.items()}
                    rep.witness["value"] = float(v.value)
        outcomes.append(inv.status)
        if inv.status == "fail" and siblings:
            rep.matches = _sibling_match(entry, siblings, seed)

    if "fail" in outcomes:
        raw = "fail"
    elif "indeterminate" in outcomes:
        raw = "indeterminate"
    else:
        raw = "pass"
    if entry.expect == "discrepancy":
        rep.status = {"fail": "discrepancy", "pass": "xpass"}.get(raw, raw)
    else:
        rep.status = raw
    return rep


def _sibling_match(entry: CatalogEntry, siblings, seed: int) -> str | None:
    """First sibling realization on which every generator passes for this (F, G)."""
    for sib in siblings:
        if sib.id == entry.realization_of or sib.dimension != entry.dimension:
            continue
        trial = CatalogEntry(
            entry.id, sib.algebra, list(sib.params) + list(entry.params), list(sib.basis),
            list(entry.aliases), list(sib.funcs) + list(entry.funcs), entry.F, entry.G,
        )
        try:
            ctx = trial.context()
            r = trial.realization(ctx)
            eq = trial.equation(ctx)
        except ValueError:
            continue
        if check_invariance(r.basis, eq, seed, (entry.id, sib.id)).ok:
            return sib.id
    return None


def verify_entry(entry: CatalogEntry, seed: int = 0, siblings=()) -> EntryReport:
    """Algebra table, linearizability and (for equations) invariance of one entry.

    Failures never raise: errors while building or checking are reported as
    an ``error`` check with status indeterminate.
    """
    s = entry_seed(seed, entry.id)
    start = time.perf_counter()
    try:
        rep = _raw_checks(entry, s, siblings)
    except (ValueError, ArithmeticError, KeyError) as exc:
        rep = EntryReport(entry.id, entry.dimension, entry.kind, entry.expect, "indeterminate",
                          [f"error: {exc}"], note=entry.note, seed=s)
    rep.seed = seed
    rep.elapsed = time.perf_counter() - start
    return rep


def _work(args):
    entry, seed, siblings = args
    return verify_entry(entry, seed, siblings)


@dataclass
class Summary:
    reports: list
    seed: int

    def rows(self) -> dict:
        """Per-dimension counters, only for dimensions that occur."""
        rows = {}
        for r in self.reports:
            row = rows.setdefault(r.dimension, Counter())
            row[f"{r.kind}:{r.status}"] += 1
            row[r.kind] += 1
            if r.kind == "equation" and r.status not in ("inadmissible", "absent"):
                row["admissible"] += 1
        return dict(sorted(rows.items()))

    def delta(self) -> dict:
        rows = self.rows()
        return {d: rows.get(d, Counter())["admissible"] - n for d, n in CLAIMED.items() if d in rows}

    @property
    def unannotated_failures(self) -> list:
        return [r for r in self.reports if r.status == "fail"]

    @property
    def indeterminate(self) -> list:
        return [r for r in self.reports if r.status == "indeterminate"]

    def clean_pass_rate(self, kind: str = "equation") -> float:
        pool = [r for r in self.reports if r.kind == kind and r.status not in ("inadmissible", "absent")]
        if not pool:
            return 1.0
        return sum(r.status == "pass" and not r.annotated for r in pool) / len(pool)

    @property
    def exit_code(self) -> int:
        if self.unannotated_failures:
            return 1
        if self.indeterminate:
            return 3
        return 0

    # rendering ---------------------------------------------------------------

    def machine(self) -> str:
        lines = [json.dumps(r.record(), sort_keys=True) for r in self.reports]
        for dim, row in self.rows().items():
            rec = {"summary": dim, "seed": self.seed, **dict(sorted(row.items()))}
            if dim in CLAIMED:
                rec["claimed"] = CLAIMED[dim]
                rec["delta"] = row["admissible"] - CLAIMED[dim]
            lines.append(json.dumps(rec, sort_keys=True))
        return "\n".join(lines) + "\n"

    def human(self) -> str:
        out = []
        for r in self.reports:
            extra = ""
            if r.failed_checks:
                extra = "  " + ", ".join(r.failed_checks[:4])
            if r.matches:
                extra += f"  (passes on {r.matches})"
            out.append(f"{r.id:<22} {r.kind:<11} {r.status:<13} {r.elapsed:6.2f}s{extra}")
        out.append("")
        out.append(f"seed {self.seed}")
        out.append(f"{'dim':>3} {'realiz.':>8} {'pass':>5} {'equations':>9} {'pass':>5} {'annot.':>6} {'fail':>5} {'indet':>5} {'n/a':>4}")
        for dim, row in self.rows().items():
            ann = row["equation:discrepancy"] + row["equation:xpass"]
            na = row["equation:inadmissible"] + row["equation:absent"]
            out.append(
                f"{dim:>3} {row['realization']:>8} {row['realization:pass']:>5} {row['equation']:>9} "
                f"{row['equation:pass']:>5} {ann:>6} {row['equation:fail']:>5} {row['equation:indeterminate']:>5} {na:>4}"
            )
        for dim, d in self.delta().items():
            got = self.rows()[dim]["admissible"]
            out.append(f"delta dim {dim}: encoded {got} admissible equations vs claimed {CLAIMED[dim]} -> {d:+d}")
        out.append(f"clean pass rate (equations): {100 * self.clean_pass_rate():.1f}%")
        out.append(f"unannotated failures: {len(self.unannotated_failures)}, indeterminate: {len(self.indeterminate)}")
        return "\n".join(out) + "\n"


def verify_all(entries, seed: int = 0, parallelism: int = 1) -> Summary:
    """Verify every entry; results are ordered like ``entries`` whatever the parallelism."""
    entries = list(entries)
    by_algebra: dict = {}
    for e in entries:
        if e.kind == "realization":
            by_algebra.setdefault((e.algebra, e.dimension), []).append(e)
    jobs = [(e, seed, tuple(by_algebra.get((e.algebra, e.dimension), ())) if e.kind == "equation" else ()) for e in entries]
    if parallelism <= 1 or len(jobs) < 2:
        reports = [_work(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            reports = list(pool.map(_work, jobs, chunksize=1))
    return Summary(reports, seed)
