"""Text formats for maps, objectives, scenarios, paths and certificates.

All formats reuse the piece blocks of the geometry kernel and its rational
syntax. Top-level blocks:

``map <name>`` / ``dim <n> <m>`` / piece blocks
    A set-valued map given by the pieces of its graph in ``R^(n+m)``.
``objective`` / ``group`` / ``row c_1 ... c_d c0`` ...
    ``min`` over groups of ``max`` over rows of ``c . z + c0``.
``scenario [name]`` / ``dim n`` / ``horizon T`` / ``steps N`` /
``dynamics const <map>`` or ``dynamics at <k> <map>``
    A discrete inclusion; map and objective blocks may appear in the same
    file, and an optional ``reference`` block of piece blocks names a set
    used by convergence reports.
``path`` / ``state x_1 ... x_n`` (N+1 lines)
    A sequence of states.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .inclusion import AdjointCertificate, DiscreteInclusion, FeasiblePath
from .polygeom import FormatError, PolyUnion, parse_rat
from .polygeom.io import parse_piece, tokenize
from .setmaps import SetMap
from .varcones import PiecewiseAffine


class _Lines:
    """Token lines with one-line lookahead."""

    def __init__(self, text: str):
        self._items = tokenize(text)
        self._pos = 0

    def peek(self):
        return self._items[self._pos] if self._pos < len(self._items) else None

    def __iter__(self):
        return self

    def __next__(self):
        item = self.peek()
        if item is None:
            raise StopIteration
        self._pos += 1
        return item


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise FormatError(f"line {lineno}: expected an integer, got {tok!r}") from None


def _args(toks, count: int, lineno: int):
    if len(toks) - 1 != count:
        raise FormatError(f"line {lineno}: {toks[0]!r} takes {count} argument(s)")
    return toks[1:]


def _pieces(lines: _Lines, dim: int) -> list:
    out = []
    while (item := lines.peek()) is not None and item[1][0] == "piece":
        lineno, _ = next(lines)
        out.append(parse_piece(lines, dim, lineno))
    return out


def _map_block(lines: _Lines, name: str, lineno: int) -> SetMap:
    item = lines.peek()
    if item is None or item[1][0] != "dim":
        raise FormatError(f"line {lineno}: map {name!r} needs a 'dim n m' line")
    ln, toks = next(lines)
    n, m = (_int(t, ln) for t in _args(toks, 2, ln))
    return SetMap(n, m, PolyUnion(n + m, _pieces(lines, n + m)), name)


def _objective_block(lines: _Lines, lineno: int, dim: int | None = None) -> PiecewiseAffine:
    groups = []
    while (item := lines.peek()) is not None and item[1][0] in ("group", "row", "end"):
        ln, toks = next(lines)
        if toks[0] == "end":
            break
        if toks[0] == "group":
            groups.append([])
            continue
        if not groups:
            raise FormatError(f"line {ln}: 'row' outside a group")
        nums = [parse_rat(t, ln) for t in toks[1:]]
        if dim is None:
            dim = len(nums) - 1
        if len(nums) != dim + 1 or dim < 1:
            raise FormatError(f"line {ln}: row needs {dim + 1 if dim else 'd+1'} numbers")
        groups[-1].append((tuple(nums[:-1]), nums[-1]))
    if not groups or any(not g for g in groups):
        raise FormatError(f"line {lineno}: objective needs nonempty groups")
    return PiecewiseAffine(dim, groups)


def parse_maps(text: str) -> dict:
    """All ``map`` blocks of a file, by name."""
    lines = _Lines(text)
    maps = {}
    for lineno, toks in lines:
        if toks[0] != "map":
            raise FormatError(f"line {lineno}: expected 'map', got {toks[0]!r}")
        name = _args(toks, 1, lineno)[0]
        if name in maps:
            raise FormatError(f"line {lineno}: map {name!r} defined twice")
        maps[name] = _map_block(lines, name, lineno)
    if not maps:
        raise FormatError("no map block found")
    return maps


def parse_map(text: str) -> SetMap:
    """The single map of a map file."""
    maps = parse_maps(text)
    if len(maps) != 1:
        raise FormatError(f"expected one map, found {len(maps)}")
    return next(iter(maps.values()))


def dump_map(s: SetMap) -> str:
    return f"map {s.name or 'M'}\ndim {s.n} {s.m}\n" + s.graph.serialize() + "\n"


def parse_objective(text: str, dim: int | None = None) -> PiecewiseAffine:
    lines = _Lines(text)
    item = next(lines, None)
    if item is None or item[1][0] != "objective":
        raise FormatError("objective file must start with 'objective'")
    f = _objective_block(lines, item[0], dim)
    if lines.peek() is not None:
        raise FormatError(f"line {lines.peek()[0]}: trailing content after objective")
    return f


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def dump_objective(f: PiecewiseAffine) -> str:
    out = ["objective"]
    for g in f.groups:
        out.append("group")
        for c, c0 in g:
            out.append("row " + " ".join(_fmt(x) for x in c) + " " + _fmt(c0))
    return "\n".join(out) + "\nend\n"


@dataclass
class Scenario:
    name: str
    n: int
    T: Fraction
    N: int
    maps: dict
    schedule: list = field(default_factory=list)
    objective: PiecewiseAffine | None = None
    reference: PolyUnion | None = None

    def inclusion(self, N: int | None = None) -> DiscreteInclusion:
        """The discrete inclusion, optionally with a different step count."""
        N = self.N if N is None else N
        const = [name for k, name in self.schedule if k is None]
        if const:
            return DiscreteInclusion(self.maps[const[0]], self.T, N)
        if N != self.N:
            raise FormatError("time-varying scenarios cannot change the step count")
        by_step = dict(self.schedule)
        missing = [k for k in range(N) if k not in by_step]
        if missing:
            raise FormatError(f"no dynamics for step(s) {missing}")
        return DiscreteInclusion([self.maps[by_step[k]] for k in range(N)], self.T, N)


def parse_scenario(text: str, extra_maps: dict | None = None) -> Scenario:
    lines = _Lines(text)
    item = next(lines, None)
    if item is None or item[1][0] != "scenario":
        raise FormatError("scenario file must start with 'scenario'")
    name = " ".join(item[1][1:]) or "scenario"
    n = T = N = None
    maps = dict(extra_maps or {})
    schedule, objective, reference = [], None, None
    for lineno, toks in lines:
        kw = toks[0]
        if kw == "dim":
            n = _int(_args(toks, 1, lineno)[0], lineno)
        elif kw == "horizon":
            T = parse_rat(_args(toks, 1, lineno)[0], lineno)
        elif kw == "steps":
            N = _int(_args(toks, 1, lineno)[0], lineno)
        elif kw == "dynamics":
            if len(toks) == 3 and toks[1] == "const":
                schedule.append((None, toks[2]))
            elif len(toks) == 4 and toks[1] == "at":
                schedule.append((_int(toks[2], lineno), toks[3]))
            else:
                raise FormatError(f"line {lineno}: use 'dynamics const <map>' or 'dynamics at <k> <map>'")
        elif kw == "map":
            mname = _args(toks, 1, lineno)[0]
            maps[mname] = _map_block(lines, mname, lineno)
        elif kw == "objective":
            objective = _objective_block(lines, lineno, 2 * n if n else None)
        elif kw == "reference":
            if n is None:
                raise FormatError(f"line {lineno}: 'dim' must precede 'reference'")
            reference = PolyUnion(n, _pieces(lines, n))
        else:
            raise FormatError(f"line {lineno}: unexpected {kw!r} in scenario")
    for key, val in (("dim", n), ("horizon", T), ("steps", N)):
        if val is None:
            raise FormatError(f"scenario is missing '{key}'")
    if not schedule:
        raise FormatError("scenario has no 'dynamics' line")
    if any(k is None for k, _ in schedule) and len(schedule) > 1:
        raise FormatError("'dynamics const' cannot be mixed with other dynamics lines")
    for _, mname in schedule:
        if mname not in maps:
            raise FormatError(f"unknown map {mname!r}")
        if maps[mname].n != n or maps[mname].m != n:
            raise FormatError(f"map {mname!r} must have dim {n} {n}")
    if objective is not None and objective.dim != 2 * n:
        raise FormatError(f"objective rows must have {2 * n + 1} numbers")
    return Scenario(name, n, T, N, maps, schedule, objective, reference)


def parse_path(text: str, dt) -> FeasiblePath:
    lines = _Lines(text)
    item = next(lines, None)
    if item is None or item[1][0] != "path":
        raise FormatError("path file must start with 'path'")
    states = []
    for lineno, toks in lines:
        if toks[0] != "state":
            raise FormatError(f"line {lineno}: expected 'state'")
        states.append(tuple(parse_rat(t, lineno) for t in toks[1:]))
    if len(states) < 2 or len({len(s) for s in states}) != 1:
        raise FormatError("path needs at least two states of equal dimension")
    return FeasiblePath(tuple(states), Fraction(dt))


def dump_path(path: FeasiblePath) -> str:
    return "path\n" + "".join("state " + " ".join(_fmt(c) for c in s) + "\n" for s in path.states)


def dump_certificate(cert: AdjointCertificate) -> str:
    return "\n".join(cert.lines()) + "\n"
