"""Reader for the line-oriented catalog format.

    entry <id>
      algebra <name> [param <ident> <constraint>]*
      realization <entry-id>
      basis "<vf>" ; "<vf>" ; ...
      alias <ident> = "<expr>"
      func <ident>(<alias-or-var>, ...)
      F = "<expr>" ; G = "<expr>"
      expect verify | discrepancy "<note>" | linearizing "<note>"
             | inadmissible "<note>" | absent "<note>"
    end

Constraints: real, nonzero, positive, negative, in[lo,hi] (round brackets
for open ends), abs(lo,hi) for lo < |p| < hi, choice(v1,v2,...),
fixed "<expr>", and rel "<lhs> <op> <rhs>".  ``realization`` copies the
algebra, parameters, basis and functions of an earlier entry.  Placeholders
(inadmissible, absent) may omit the basis.  Lines starting with ``#`` are
comments.
"""

from __future__ import annotations

import math
import re
import shlex
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import sympy as sp

from ..algebra import StructureTable, UnknownAlgebra, builtin_table
from ..detsys import EvolutionEquation
from ..expr import Context, FuncSymbol, ParamSpec, ParseError, normalize, parse
from ..vectorfield import Realization, parse_vf

EXPECT_KINDS = ("verify", "discrepancy", "linearizing", "inadmissible", "absent")


class CatalogError(ValueError):
    """Malformed catalog input, located by file and line."""

    def __init__(self, message: str, path: str = "<string>", line: int = 0):
        self.path, self.line = path, line
        super().__init__(f"{path}:{line}: {message}")


@dataclass
class CatalogEntry:
    id: str
    algebra: str = ""
    params: list = field(default_factory=list)  # (name, constraint tokens)
    basis: list = field(default_factory=list)  # vector-field strings
    aliases: list = field(default_factory=list)  # (name, expr string)
    funcs: list = field(default_factory=list)  # (name, [slot names])
    F: str | None = None
    G: str | None = None
    expect: str = "verify"
    note: str = ""
    realization_of: str | None = None
    source: str = "<string>"
    line: int = 0

    @property
    def dimension(self) -> int:
        if not self.basis and self.algebra:
            return builtin_table(self.algebra).dim
        return len(self.basis)

    @property
    def kind(self) -> str:
        if self.F is not None or self.expect in ("inadmissible", "absent"):
            return "equation"
        return "realization"

    # building -------------------------------------------------------------

    def param_specs(self) -> tuple:
        """(ParamSpecs, fixed values) with defaults taken from the algebra table."""
        fixed, declared = {}, {}
        for name, tokens in self.params:
            cons = declared.setdefault(name, [])
            for tok in tokens:
                c = parse_constraint(tok, self.params_ctx())
                if c[0] == "fixed":
                    fixed[name] = c[1]
                elif c[0] != "real":
                    cons.append(c)
        return [ParamSpec(n, tuple(c)) for n, c in declared.items() if n not in fixed], fixed

    def params_ctx(self) -> Context:
        names = [p.name for p in builtin_table(self.algebra).params]
        return Context.build(params=names + [n for n, _ in self.params if n not in names])

    def table(self) -> StructureTable:
        specs, fixed = self.param_specs()
        base = builtin_table(self.algebra)
        names = {p.name for p in base.params}
        # an entry-level declaration replaces the default admissible set
        override = [s for s in specs if s.name in names and s.constraints]
        extra = [s for s in specs if s.name not in names]
        table = builtin_table(self.algebra, override + extra)
        return table.specialize(fixed) if fixed else table

    def context(self) -> Context:
        specs, fixed = self.param_specs()
        table = self.table()
        ctx = Context.build(params=_merge(table.params, specs))
        for name, value in fixed.items():
            ctx.aliases[name] = value
        for name, text in self.aliases:
            ctx.aliases[name] = parse(text, ctx)
        for name, slots in self.funcs:
            ctx.funcs[name] = FuncSymbol(name, tuple(parse(s, ctx) for s in slots))
        return ctx

    def realization(self, ctx: Context | None = None) -> Realization:
        ctx = ctx or self.context()
        return Realization([parse_vf(b, ctx) for b in self.basis], ctx.param_specs())

    def equation(self, ctx: Context | None = None) -> EvolutionEquation:
        ctx = ctx or self.context()
        return EvolutionEquation(parse(self.F, ctx), parse(self.G, ctx), ctx.param_specs())


def _merge(*groups) -> list:
    out = {}
    for g in groups:
        for p in g:
            if p.name not in out or (p.constraints and not out[p.name].constraints):
                out[p.name] = p
    return list(out.values())


_INTERVAL = re.compile(r"in([\[(])\s*([^,]+?)\s*,\s*([^\])]+?)\s*([\])])$")
_CALL = re.compile(r"(abs|choice)\((.*)\)$")


def _number(text: str) -> float:
    text = text.strip()
    if text in ("inf", "+inf"):
        return math.inf
    if text == "-inf":
        return -math.inf
    return float(Fraction(text))


def parse_constraint(tok, ctx: Context) -> tuple:
    """A constraint token, or a ("fixed" | "rel", text) pair, as a ParamSpec tuple."""
    if isinstance(tok, tuple):
        kind, arg = tok
        if kind == "fixed":
            return ("fixed", parse(arg, ctx))
        m = re.fullmatch(r"\s*(.+?)\s*(<=|>=|!=|==|<|>)\s*(.+?)\s*", arg)
        if not m:
            raise ValueError(f"bad relation {arg!r}")
        return ("rel", parse(m.group(1), ctx), m.group(2), parse(m.group(3), ctx))
    if tok in ("real", "nonzero"):
        return (tok,)
    if tok == "positive":
        return ("interval", 0, math.inf, False, False)
    if tok == "negative":
        return ("interval", -math.inf, 0, False, False)
    m = _INTERVAL.fullmatch(tok)
    if m:
        return ("interval", _number(m.group(2)), _number(m.group(3)), m.group(1) == "[", m.group(4) == "]")
    m = _CALL.fullmatch(tok)
    if m:
        vals = [_number(v) for v in m.group(2).split(",")]
        if m.group(1) == "abs":
            return ("abs", vals[0], vals[1])
        return ("choice", tuple(int(v) if v == int(v) else v for v in vals))
    raise ValueError(f"unknown constraint {tok!r}")


_FUNC = re.compile(r"([A-Za-z_]\w*)\s*\(([^)]*)\)\s*$")
_ALIAS = re.compile(r"([A-Za-z_]\w*)\s*=\s*(.*)$")


def _quoted(text: str, path, line) -> list:
    try:
        return shlex.split(text, posix=True)
    except ValueError as exc:
        raise CatalogError(str(exc), path, line) from None


def _algebra_line(rest: str, entry: CatalogEntry, path, line):
    toks = _quoted(rest, path, line)
    if not toks:
        raise CatalogError("algebra line without a name", path, line)
    entry.algebra = toks[0]
    i = 1
    while i < len(toks):
        if toks[i] != "param" or i + 1 >= len(toks):
            raise CatalogError(f"expected 'param <name> <constraint>', found {toks[i]!r}", path, line)
        name = toks[i + 1]
        i += 2
        cons = []
        while i < len(toks) and toks[i] != "param":
            if toks[i] in ("fixed", "rel"):
                if i + 1 >= len(toks):
                    raise CatalogError(f"{toks[i]} needs a quoted argument", path, line)
                cons.append((toks[i], toks[i + 1]))
                i += 2
            else:
                cons.append(toks[i])
                i += 1
        entry.params.append((name, tuple(cons)))


def _fg_line(text: str, entry: CatalogEntry, path, line):
    for part in _split_semicolons(text):
        m = re.fullmatch(r"\s*([FG])\s*=\s*\"(.*)\"\s*", part)
        if not m:
            raise CatalogError(f"expected F = \"...\" ; G = \"...\", found {part.strip()!r}", path, line)
        setattr(entry, m.group(1), m.group(2))


def _split_semicolons(text: str) -> list:
    out, cur, quoted = [], "", False
    for ch in text:
        if ch == '"':
            quoted = not quoted
        if ch == ";" and not quoted:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [p for p in out if p.strip()]


def loads(text: str, path: str = "<string>", known: dict | None = None) -> list:
    """Parse catalog text; ``known`` maps ids of earlier entries (for ``realization``)."""
    known = dict(known or {})
    entries, entry = [], None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "entry":
            if entry is not None:
                raise CatalogError(f"entry {entry.id} is not closed before a new entry", path, lineno)
            if not rest or " " in rest:
                raise CatalogError("entry needs a single id", path, lineno)
            entry = CatalogEntry(rest, source=path, line=lineno)
            continue
        if entry is None:
            raise CatalogError(f"{head!r} outside an entry", path, lineno)
        if head == "end":
            _finish(entry, known, path, lineno)
            known[entry.id] = entry
            entries.append(entry)
            entry = None
        elif head == "algebra":
            _algebra_line(rest, entry, path, lineno)
        elif head == "realization":
            ref = known.get(rest)
            if ref is None:
                raise CatalogError(f"unknown realization {rest!r}", path, lineno)
            entry.realization_of = rest
            entry.algebra = entry.algebra or ref.algebra
            entry.params = list(ref.params) + entry.params
            entry.basis = list(ref.basis)
            entry.funcs = list(ref.funcs) + entry.funcs
        elif head == "basis":
            entry.basis = [_strip_quotes(p, path, lineno) for p in _split_semicolons(rest)]
        elif head == "alias":
            m = _ALIAS.fullmatch(rest)
            if not m:
                raise CatalogError("expected alias <name> = \"<expr>\"", path, lineno)
            entry.aliases.append((m.group(1), _strip_quotes(m.group(2), path, lineno)))
        elif head == "func":
            m = _FUNC.fullmatch(rest)
            if not m:
                raise CatalogError("expected func <name>(<slot>, ...)", path, lineno)
            slots = [s.strip() for s in m.group(2).split(",") if s.strip()]
            entry.funcs.append((m.group(1), slots))
        elif head in ("F", "G", "F=", "G="):
            _fg_line(line, entry, path, lineno)
        elif head == "expect":
            toks = _quoted(rest, path, lineno)
            if not toks or toks[0] not in EXPECT_KINDS:
                raise CatalogError(f"expect must be one of {', '.join(EXPECT_KINDS)}", path, lineno)
            entry.expect = toks[0]
            entry.note = " ".join(toks[1:])
            if toks[0] != "verify" and not entry.note:
                raise CatalogError(f"expect {toks[0]} needs a note", path, lineno)
        else:
            raise CatalogError(f"unknown keyword {head!r}", path, lineno)
    if entry is not None:
        raise CatalogError(f"entry {entry.id} is missing 'end'", path, len(text.splitlines()))
    return entries


def _strip_quotes(text: str, path, line) -> str:
    text = text.strip()
    if len(text) < 2 or text[0] != '"' or text[-1] != '"':
        raise CatalogError(f"expected a quoted string, found {text!r}", path, line)
    return text[1:-1]


def _finish(entry: CatalogEntry, known: dict, path, line):
    """Cross-validate: names resolve, everything parses, F is not zero."""
    if entry.id in known:
        raise CatalogError(f"duplicate id {entry.id!r}", path, line)
    if not entry.algebra:
        raise CatalogError(f"entry {entry.id} names no algebra", path, line)
    if not entry.basis and entry.expect not in ("inadmissible", "absent"):
        raise CatalogError(f"entry {entry.id} has no basis", path, line)
    if (entry.F is None) != (entry.G is None):
        raise CatalogError(f"entry {entry.id} gives only one of F, G", path, line)
    try:
        table = entry.table()
        ctx = entry.context()
        r = entry.realization(ctx)
    except UnknownAlgebra:
        raise CatalogError(f"unknown algebra {entry.algebra!r}", path, line) from None
    except (ParseError, ValueError) as exc:
        raise CatalogError(f"entry {entry.id}: {exc}", path, line) from None
    if entry.basis and r.dim != table.dim:
        raise CatalogError(f"entry {entry.id}: {r.dim} fields for {table.name} of dimension {table.dim}", path, line)
    if entry.F is None:
        return
    try:
        F = parse(entry.F, ctx)
        parse(entry.G, ctx)
    except ParseError as exc:
        raise CatalogError(f"entry {entry.id}: {exc}", path, line) from None
    if normalize(F) == 0 and entry.expect != "inadmissible":
        raise CatalogError(f"entry {entry.id}: F vanishes, the equation is not third order", path, line)


def load(paths) -> list:
    """Entries of every file (directories contribute their *.cat files, sorted)."""
    if isinstance(paths, (str, Path)):
        paths = [paths]
    files = []
    for p in map(Path, paths):
        if p.is_dir():
            files.extend(sorted(p.glob("*.cat")))
        else:
            files.append(p)
    entries, known = [], {}
    for f in files:
        got = loads(f.read_text(encoding="utf-8"), str(f), known)
        for e in got:
            known[e.id] = e
        entries.extend(got)
    return entries


def data_dir() -> Path:
    """The catalog shipped with the package."""
    return Path(__file__).with_name("data")
