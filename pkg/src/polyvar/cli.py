"""Command-line front end.

Exit codes: 0 success or certificate found, 1 negative verdict, 2 input or
configuration error. Every run starts with a header echoing the resolved
configuration, and output depends only on the arguments, files and seed.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .chainrules import chain_upper
from .fileformats import Scenario, dump_certificate, parse_map, parse_path, parse_scenario
from .inclusion import AdjointCertificate, certify_path, reachable, subdiff_upper
from .limits import decimal, hausdorff_convergence, pi_stability
from .oracle import sample_normals
from .polygeom import FormatError, PolyUnion, interval_bounds, merged_intervals
from .setmaps import DEFAULT_BUDGET, PieceBudgetError, SetMap
from .varcones import OffSetError, coderivative

COMMANDS = ("reach", "coderiv", "chain", "certify", "subdiff", "converge", "pi", "oracle-check")

OK, NEGATIVE, INPUT_ERROR = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    files: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)
    seed: int = 0
    budget: int | None = DEFAULT_BUDGET
    fmt: str = "text"

    def header(self) -> str:
        out = [f"# command: {self.command}"]
        for k, v in self.files.items():
            out.append(f"# {k}: {v}")
        for k, v in self.flags.items():
            out.append(f"# {k}: {v}")
        out.append(f"# seed: {self.seed}")
        out.append(f"# budget: {self.budget if self.budget is not None else 'none'}")
        out.append(f"# format: {self.fmt}")
        return "\n".join(out) + "\n"


def _rat(tok: str) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {tok!r}") from None


def _fmt(q) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _vec(v) -> str:
    return " ".join(_fmt(c) for c in v)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="polyvar", description="Exact polyhedral variational analysis")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--scenario")
    ap.add_argument("--map")
    ap.add_argument("--g")
    ap.add_argument("--f")
    ap.add_argument("--path")
    ap.add_argument("--point", nargs="+", type=_rat)
    ap.add_argument("--dir", nargs="+", type=_rat)
    ap.add_argument("--x0", nargs="+", type=_rat)
    ap.add_argument("--xN", nargs="+", type=_rat)
    ap.add_argument("--N", type=int)
    ap.add_argument("--Ns", nargs="+", type=int)
    ap.add_argument("--delta", nargs="+", type=_rat)
    ap.add_argument("--kind", choices=("regular", "limiting", "convexified"), default="limiting")
    ap.add_argument("--mode", choices=("finite", "vertex", "sampled"), default="vertex")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    ap.add_argument("--format", choices=("text", "csv"), default="text", dest="fmt")
    return ap


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} requires " + ", ".join(missing))


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _scenario(args) -> Scenario:
    extra = {}
    if args.map:
        m = parse_map(_read(args.map))
        extra[m.name] = m
    return parse_scenario(_read(args.scenario), extra)


def describe(u: PolyUnion) -> list[str]:
    """Human-readable lines: intervals in dimension 1, piece blocks otherwise."""
    if u.is_empty():
        return ["empty"]
    if u.dim == 1:
        out = []
        for lo, hi in merged_intervals(u):
            if lo is not None and lo == hi:
                out.append("point " + _fmt(lo) + f"  ({decimal(lo)})")
                continue
            los = _fmt(lo) if lo is not None else "-inf"
            his = _fmt(hi) if hi is not None else "inf"
            lod = decimal(lo) if lo is not None else "-inf"
            hid = decimal(hi) if hi is not None else "inf"
            out.append(f"interval [{lod}, {hid}]  exact [{los}, {his}]")
        return out
    return [f"dim {u.dim}"] + u.serialize().splitlines()


# -- commands -------------------------------------------------------------------------------------


def cmd_reach(args, cfg, out) -> int:
    _need(args, "scenario", "x0")
    sc = _scenario(args)
    di = sc.inclusion(args.N)
    cfg.flags.update({"x0": _vec(args.x0), "N": di.N, "T": _fmt(di.T)})
    if len(args.x0) != di.n:
        raise UsageError(f"--x0 needs {di.n} coordinates")
    out.append(cfg.header())
    r = reachable(di, tuple(args.x0), cfg.budget)
    if cfg.fmt == "csv":
        if r.dim != 1:
            raise UsageError("csv output of reachable sets needs dimension 1")
        out.append("lo_exact,hi_exact,lo_decimal,hi_decimal\n")
        for lo, hi in merged_intervals(r):
            out.append(f"{_fmt(lo)},{_fmt(hi)},{decimal(lo)},{decimal(hi)}\n")
    else:
        out.append(f"reachable set after {di.N} steps\n")
        out.extend(line + "\n" for line in describe(r))
    return OK if not r.is_empty() else NEGATIVE


def _point_split(args, n, m):
    if len(args.point) != n + m:
        raise UsageError(f"--point needs {n + m} coordinates (x then y)")
    return tuple(args.point[:n]), tuple(args.point[n:])


def cmd_coderiv(args, cfg, out) -> int:
    _need(args, "map", "point")
    s = parse_map(_read(args.map))
    x, y = _point_split(args, s.n, s.m)
    cfg.flags.update({"point": _vec(args.point), "kind": args.kind})
    if args.dir is not None:
        cfg.flags["dir"] = _vec(args.dir)
    out.append(cfg.header())
    d = coderivative(s, x, y, args.kind)
    out.append(f"coderivative of {s.name} at ({_vec(x)} | {_vec(y)}), kind {args.kind}\n")
    out.append(f"cone {d.cone!r}\n")
    if args.dir is not None:
        if len(args.dir) != s.m:
            raise UsageError(f"--dir needs {s.m} coordinates")
        val = d.apply(tuple(args.dir))
        out.append(f"value at u = ({_vec(args.dir)}):\n")
        out.extend(line + "\n" for line in describe(val))
    return OK


def _map_lines(label: str, s: SetMap) -> list[str]:
    return [f"{label} graph:"] + ["  " + ln for ln in describe(s.graph)]


def cmd_chain(args, cfg, out) -> int:
    _need(args, "g", "f", "point")
    g = parse_map(_read(args.g))
    f = parse_map(_read(args.f))
    if g.m != f.n:
        raise UsageError("output dimension of --g must equal input dimension of --f")
    x, z = _point_split(args, g.n, f.m)
    cfg.flags.update({"point": _vec(args.point), "kind": args.kind})
    out.append(cfg.header())
    v = chain_upper(f, g, x, z, args.kind, budget=cfg.budget)
    out.append(f"chain rule for {f.name} o {g.name} at ({_vec(x)} | {_vec(z)}), kind {args.kind}\n")
    out.extend(ln + "\n" for ln in _map_lines("LHS", v.lhs))
    out.extend(ln + "\n" for ln in _map_lines("RHS", v.rhs))
    out.append(v.report() + "\n")
    return OK if v.relation in ("=", "⊊") else NEGATIVE


def cmd_certify(args, cfg, out) -> int:
    _need(args, "scenario", "path")
    sc = _scenario(args)
    if sc.objective is None:
        raise UsageError("scenario has no objective block")
    di = sc.inclusion()
    path = parse_path(_read(args.path), di.dt)
    cfg.files["path"] = args.path
    out.append(cfg.header())
    if not path.is_feasible(di):
        out.append("path is not feasible for the scenario\n")
        return NEGATIVE
    res = certify_path(di, path, sc.objective, cfg.budget)
    if isinstance(res, AdjointCertificate):
        out.append("certificate found\n")
        out.append(dump_certificate(res))
        if all(p == res.costates[0] for p in res.costates):
            out.append(f"constant costate p = ({_vec(res.costates[0])})\n")
        out.append("verified: " + ("yes" if res.verify(di, sc.objective) else "no") + "\n")
        return OK
    out.append(f"refuted: {res.reason}\n")
    out.append(f"systems checked: {res.systems_checked}\n")
    return NEGATIVE


def cmd_subdiff(args, cfg, out) -> int:
    _need(args, "scenario", "x0")
    sc = _scenario(args)
    if sc.objective is None:
        raise UsageError("scenario has no objective block")
    di = sc.inclusion(args.N)
    cfg.flags.update({"x0": _vec(args.x0), "N": di.N, "mode": args.mode})
    out.append(cfg.header())
    est = subdiff_upper(di, sc.objective, tuple(args.x0), args.mode, cfg.budget)
    out.append(f"value {_fmt(est.value)}\n")
    for e in est.endpoints:
        out.append(f"minimising endpoint ({_vec(e)})\n")
    out.append(f"subgradient estimate ({'exact' if est.exact else 'upper bound'}):\n")
    out.extend(line + "\n" for line in describe(est.estimate))
    return OK if not est.estimate.is_empty() else NEGATIVE


def cmd_converge(args, cfg, out) -> int:
    _need(args, "scenario", "x0", "Ns")
    sc = _scenario(args)
    if sc.reference is None:
        raise UsageError("scenario has no reference block")
    cfg.flags.update({"x0": _vec(args.x0), "Ns": " ".join(map(str, args.Ns))})
    out.append(cfg.header())
    table = hausdorff_convergence(sc.inclusion(), args.Ns, tuple(args.x0), sc.reference,
                                  "reference", cfg.budget)
    out.append(table.render(cfg.fmt))
    mono = table.strictly_decreasing()
    if cfg.fmt == "text":
        out.append("strictly decreasing: " + ("yes" if mono else "no") + "\n")
    return OK


def cmd_pi(args, cfg, out) -> int:
    _need(args, "scenario", "x0", "xN", "dir", "Ns")
    sc = _scenario(args)
    deltas = args.delta or [Fraction(0)]
    cfg.flags.update({"x0": _vec(args.x0), "xN": _vec(args.xN), "dir": _vec(args.dir),
                      "Ns": " ".join(map(str, args.Ns)), "delta": _vec(deltas), "mode": args.mode})
    out.append(cfg.header())
    rep = pi_stability(sc.inclusion(), tuple(args.x0), tuple(args.xN), tuple(args.dir), args.Ns,
                       deltas, seed=cfg.seed, mode=args.mode, budget=cfg.budget)
    out.append(rep.render())
    return OK if not rep.finest.is_empty() else NEGATIVE


def cmd_oracle_check(args, cfg, out) -> int:
    _need(args, "map", "point")
    s = parse_map(_read(args.map))
    if args.kind == "convexified":
        raise UsageError("oracle-check supports --kind regular or limiting")
    _point_split(args, s.n, s.m)
    cfg.flags.update({"point": _vec(args.point), "kind": args.kind})
    out.append(cfg.header())
    rep = sample_normals(s.graph, tuple(args.point), args.kind, seed=cfg.seed)
    out.append(rep.render())
    good = rep.agreement_rate >= 0.99 and all(rep.recovered)
    out.append("agreement: " + ("yes" if good else "no") + "\n")
    return OK if good else NEGATIVE


HANDLERS = {"reach": cmd_reach, "coderiv": cmd_coderiv, "chain": cmd_chain,
            "certify": cmd_certify, "subdiff": cmd_subdiff, "converge": cmd_converge,
            "pi": cmd_pi, "oracle-check": cmd_oracle_check}


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return INPUT_ERROR if e.code else OK
    budget = args.budget if args.budget and args.budget > 0 else None
    files = {k: getattr(args, k) for k in ("scenario", "map", "g", "f") if getattr(args, k)}
    cfg = RunConfig(args.command, files, {}, args.seed, budget, args.fmt)
    if args.fmt == "csv" and args.command not in ("reach", "converge"):
        stderr.write("error: --format csv is only available for reach and converge\n")
        return INPUT_ERROR
    out: list[str] = []
    try:
        code = HANDLERS[args.command](args, cfg, out)
    except (UsageError, FormatError, OffSetError, PieceBudgetError, ValueError) as e:
        stdout.write("".join(out))
        stderr.write(f"error: {e}\n")
        return INPUT_ERROR
    stdout.write("".join(out))
    return code


def main() -> None:  # pragma: no cover - thin wrapper
    sys.exit(run())
