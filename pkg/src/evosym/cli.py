"""Command-line front-end: ``evosym <subcommand> ...``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or parse
error, 3 indeterminate.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fnmatch import fnmatch

from .algebra import UnknownAlgebra, builtin_table, check_realization
from .detsys import EvolutionEquation, check_invariance
from .expr import Context, FuncSymbol, Indeterminate, ParamSpec, ParseError, parse
from .linearize import flag_linearizing
from .transform import PointTransformation, TransformError, check_round_trip, pushforward, verify_equivalence
from .vectorfield import IndeterminateError, Realization, bracket, generic_rank, parse_vf, vf_to_text

OK, FAIL, USAGE, INDETERMINATE = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    seed: int = 0
    parallelism: int = 1
    output: str = "human"


def _default_seed() -> int:
    raw = os.environ.get("EVOSYM_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"EVOSYM_SEED must be an integer, got {raw!r}") from None


# argument parsing -----------------------------------------------------------------


def _common(seed_default: int) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=seed_default, help="global seed (env EVOSYM_SEED, default 0)")
    p.add_argument("--output", choices=("human", "machine"), default="human")
    return p


def _context_flags(p: argparse.ArgumentParser):
    p.add_argument("--param", action="append", default=[], metavar="NAME[:CONSTRAINT]",
                   help="declare a parameter, e.g. q or q:nonzero or q:in(0,1)")
    p.add_argument("--alias", action="append", default=[], metavar="NAME=EXPR", help="named invariant, e.g. tau=u2*u1^-3")
    p.add_argument("--func", action="append", default=[], metavar="NAME(SLOTS)", help="arbitrary function, e.g. f(tau)")


def build_parser(seed_default: int = 0) -> argparse.ArgumentParser:
    common = _common(seed_default)
    parser = argparse.ArgumentParser(prog="evosym", description="Lie symmetry checks for u_t = F*u3 + G.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("bracket", parents=[common], help="Lie bracket of two fields")
    p.add_argument("X")
    p.add_argument("Y")
    _context_flags(p)

    p = sub.add_parser("rank", parents=[common], help="generic rank of a ';'-separated basis")
    p.add_argument("basis")
    _context_flags(p)

    p = sub.add_parser("check-algebra", parents=[common], help="compare a basis with a structure table")
    p.add_argument("basis")
    p.add_argument("algebra", help="table name, e.g. A3.3 or A3.3+A1")
    _context_flags(p)

    p = sub.add_parser("check-invariance", parents=[common], help="determining equations for each generator")
    p.add_argument("basis")
    p.add_argument("--F", required=True, dest="F")
    p.add_argument("--G", required=True, dest="G")
    _context_flags(p)

    p = sub.add_parser("transform", parents=[common], help="push fields forward under a point transformation")
    p.add_argument("phi", help='"T = ...; X = ...; U = ...; Tinv = ...; Xinv = ...; Uinv = ..."')
    p.add_argument("basis")
    p.add_argument("--expect", metavar="BASIS", help="target basis for an equivalence check")
    p.add_argument("--basis-change", metavar="ROWS", help='constant matrix, rows separated by ";", e.g. "1,0,0; 0,0,-1; 0,1,0"')
    _context_flags(p)

    p = sub.add_parser("flag-linearizing", parents=[common], help="search for a linearizing subalgebra")
    p.add_argument("basis")
    p.add_argument("--expect", choices=("linearizing", "not_flagged"), help="exit 1 if the verdict differs")
    _context_flags(p)

    p = sub.add_parser("verify-catalog", parents=[common], help="verify catalog files or directories")
    p.add_argument("paths", nargs="*", help="catalog files or directories (default: the packaged catalog)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--only", metavar="GLOB", help="restrict to entry ids matching the glob")
    p.add_argument("--dimension", type=int, choices=(2, 3, 4, 5))
    p.add_argument("--figures", metavar="DIR", help="write a summary figure into DIR")
    return parser


def _context(args) -> Context:
    from .catalog.loader import parse_constraint

    ctx = Context()
    for decl in args.param:
        name, _, cons = decl.partition(":")
        name = name.strip()
        if not name.isidentifier():
            raise UsageError(f"bad parameter name {name!r}")
        tuples = [] if not cons.strip() else [parse_constraint(cons.strip(), ctx)]
        ctx.params[name] = ParamSpec(name, tuple(c for c in tuples if c[0] != "real"))
    for decl in args.alias:
        name, sep, text = decl.partition("=")
        if not sep:
            raise UsageError(f"alias needs NAME=EXPR, got {decl!r}")
        ctx.aliases[name.strip()] = parse(text, ctx)
    for decl in args.func:
        name, _, rest = decl.partition("(")
        if not rest.endswith(")"):
            raise UsageError(f"function needs NAME(SLOTS), got {decl!r}")
        slots = [s for s in rest[:-1].split(",") if s.strip()]
        ctx.funcs[name.strip()] = FuncSymbol(name.strip(), tuple(parse(s, ctx) for s in slots))
    return ctx


def _realization(text: str, ctx: Context) -> Realization:
    return Realization.parse(text, ctx)


def _emit(cfg: CliConfig, human: str, record: dict):
    if cfg.output == "machine":
        print(json.dumps({**record, "seed": cfg.seed}, sort_keys=True))
    else:
        print(human)


# subcommands ----------------------------------------------------------------------


def _cmd_bracket(args, cfg) -> int:
    ctx = _context(args)
    out = vf_to_text(bracket(parse_vf(args.X, ctx), parse_vf(args.Y, ctx)))
    _emit(cfg, out, {"command": "bracket", "result": out})
    return OK


def _cmd_rank(args, cfg) -> int:
    ctx = _context(args)
    r = _realization(args.basis, ctx)
    k = generic_rank(r, cfg.seed)
    _emit(cfg, str(k), {"command": "rank", "rank": k})
    return OK


def _cmd_check_algebra(args, cfg) -> int:
    ctx = _context(args)
    table = builtin_table(args.algebra, ctx.param_specs())
    for spec in table.params:
        ctx.params.setdefault(spec.name, spec)
    r = _realization(args.basis, ctx)
    rep = check_realization(r, table, cfg.seed)
    lines, records = [], []
    for v in rep.verdicts:
        status = "pass" if v.ok else ("indeterminate" if isinstance(v.detail, Indeterminate) else "fail")
        defect = vf_to_text(v.defect) if v.defect is not None and not v.ok else None
        lines.append(f"[e{v.i},e{v.j}] {status}" + (f"  defect {defect}" if defect else ""))
        records.append({"pair": [v.i, v.j], "status": status, "defect": defect})
    _emit(cfg, "\n".join(lines), {"command": "check-algebra", "algebra": table.name, "pairs": records, "ok": rep.ok})
    if rep.ok:
        return OK
    return INDETERMINATE if all(r["status"] != "fail" for r in records) else FAIL


def _cmd_check_invariance(args, cfg) -> int:
    ctx = _context(args)
    r = _realization(args.basis, ctx)
    eq = EvolutionEquation(parse(args.F, ctx), parse(args.G, ctx), ctx.param_specs())
    rep = check_invariance(r.basis, eq, cfg.seed, "cli")
    lines, records = [], []
    for v, Q in zip(rep.verdicts, r.basis):
        extra = ""
        if v.status == "fail":
            extra = "  " + ", ".join(v.failed)
            if v.witness:
                pts = ", ".join(f"{k}={x:.6g}" for k, x in sorted(v.witness.items()))
                extra += f"  at {pts}: {v.value:.6g}"
        lines.append(f"gen{v.index} {vf_to_text(Q)}: {v.status}{extra}")
        records.append({"generator": v.index, "status": v.status, "failed": list(v.failed),
                        "witness": {k: float(x) for k, x in (v.witness or {}).items()} or None})
    _emit(cfg, "\n".join(lines), {"command": "check-invariance", "generators": records, "status": rep.status})
    return {"pass": OK, "fail": FAIL}.get(rep.status, INDETERMINATE)


def _matrix(text: str) -> list:
    rows = [r for r in text.split(";") if r.strip()]
    try:
        return [[parse(c) for c in row.split(",")] for row in rows]
    except ParseError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cmd_transform(args, cfg) -> int:
    ctx = _context(args)
    phi = PointTransformation.parse(args.phi, ctx)
    if not check_round_trip(phi, ctx.param_specs(), cfg.seed):
        print("forward and inverse maps do not compose to the identity", file=sys.stderr)
        return FAIL
    src = _realization(args.basis, ctx)
    images = [vf_to_text(pushforward(Q, phi)) for Q in src.basis]
    record = {"command": "transform", "images": images}
    lines = list(images)
    code = OK
    if args.expect:
        dst = _realization(args.expect, ctx)
        M = _matrix(args.basis_change) if args.basis_change else None
        rep = verify_equivalence(src, dst, phi, M, cfg.seed)
        record["equivalence"] = [{"index": v.index, "ok": v.ok} for v in rep.verdicts]
        lines += [f"e'{v.index}: {'pass' if v.ok else 'fail'}" for v in rep.verdicts]
        code = OK if rep.ok else (INDETERMINATE if rep.indeterminate else FAIL)
    _emit(cfg, "\n".join(lines), record)
    return code


def _cmd_flag_linearizing(args, cfg) -> int:
    ctx = _context(args)
    verdict = flag_linearizing(_realization(args.basis, ctx), cfg.seed)
    _emit(cfg, str(verdict), {"command": "flag-linearizing", "flag": verdict.flag, "reason": verdict.reason,
                              "subset": list(verdict.subset)})
    if args.expect and args.expect != verdict.flag:
        return FAIL
    return OK


def _cmd_verify_catalog(args, cfg) -> int:
    from .catalog import data_dir, load, verify_all

    entries = load(args.paths or [data_dir()])
    if args.only:
        entries = [e for e in entries if fnmatch(e.id, args.only)]
    if args.dimension:
        entries = [e for e in entries if e.dimension == args.dimension]
    summary = verify_all(entries, cfg.seed, max(1, args.jobs))
    sys.stdout.write(summary.machine() if cfg.output == "machine" else summary.human())
    if args.figures:
        from .catalog.figures import summary_figure

        path = summary_figure(summary, args.figures)
        print(f"figure written to {path}", file=sys.stderr)
    return summary.exit_code


COMMANDS = {
    "bracket": _cmd_bracket,
    "rank": _cmd_rank,
    "check-algebra": _cmd_check_algebra,
    "check-invariance": _cmd_check_invariance,
    "transform": _cmd_transform,
    "flag-linearizing": _cmd_flag_linearizing,
    "verify-catalog": _cmd_verify_catalog,
}


def run(argv=None) -> int:
    from .catalog import CatalogError

    try:
        parser = build_parser(_default_seed())
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"evosym: {exc}", file=sys.stderr)
        return USAGE
    except SystemExit as exc:  # argparse reports usage errors this way
        return USAGE if exc.code not in (0, None) else OK
    cfg = CliConfig(args.seed, getattr(args, "jobs", 1), args.output)
    try:
        return COMMANDS[args.command](args, cfg)
    except (UsageError, ParseError, CatalogError, TransformError, UnknownAlgebra, ValueError, OSError) as exc:
        print(f"evosym: {exc}", file=sys.stderr)
        return USAGE
    except IndeterminateError as exc:
        print(f"evosym: indeterminate: {exc}", file=sys.stderr)
        return INDETERMINATE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
