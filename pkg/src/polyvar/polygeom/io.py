"""Line-oriented text format for polyhedra, unions and cones.

A piece block is ``piece`` followed by ``ineq``/``eq`` rows (H-form) or
``point``/``gen``/``lin`` rows (V-form), closed by ``end``. Numbers are
integers, ``p/q`` rationals or finite decimals; ``#`` starts a comment.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from .cone import ConePiece, VCone
from .polyhedron import PolyUnion, Polyhedron


class FormatError(ValueError):
    """Malformed input text; the message carries the line number."""


def parse_rat(tok: str, lineno: int = 0) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"line {lineno}: bad number {tok!r}") from None


def tokenize(text: str) -> list[tuple[int, list[str]]]:
    """Non-empty lines as ``(line number, tokens)`` with comments stripped."""
    out = []
    for i, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if line:
            out.append((i, line.split()))
    return out


def parse_piece(lines: Iterator[tuple[int, list[str]]], dim: int, start: int = 0
                ) -> Polyhedron:
    """Read rows after a ``piece`` keyword up to ``end``."""
    ins, eqs, pts, rays, lns = [], [], [], [], []
    for lineno, toks in lines:
        kw, args = toks[0], toks[1:]
        if kw == "end":
            break
        nums = [parse_rat(t, lineno) for t in args]
        if kw in ("ineq", "eq"):
            if len(nums) != dim + 1:
                raise FormatError(f"line {lineno}: {kw} needs {dim + 1} numbers, got {len(nums)}")
            (ins if kw == "ineq" else eqs).append((tuple(nums[:dim]), nums[dim]))
        elif kw in ("point", "gen", "lin"):
            if len(nums) != dim:
                raise FormatError(f"line {lineno}: {kw} needs {dim} numbers, got {len(nums)}")
            {"point": pts, "gen": rays, "lin": lns}[kw].append(tuple(nums))
        else:
            raise FormatError(f"line {lineno}: unexpected {kw!r} inside piece")
    else:
        raise FormatError(f"line {start}: piece block is not closed by 'end'")
    if (pts or rays or lns) and (ins or eqs):
        raise FormatError(f"line {start}: piece mixes H-rows and V-rows")
    if pts or rays or lns:
        if not pts:
            pts = [(Fraction(0),) * dim]
        return Polyhedron.from_generators(dim, pts, rays, lns)
    return Polyhedron(dim, tuple(ins), tuple(eqs))


def parse_union(text: str, dim: int | None = None) -> PolyUnion:
    """Parse a sequence of piece blocks (optionally preceded by ``dim d``)."""
    it = iter(tokenize(text))
    pieces = []
    for lineno, toks in it:
        if toks[0] == "dim":
            if len(toks) != 2:
                raise FormatError(f"line {lineno}: 'dim' takes one integer")
            dim = int(toks[1])
        elif toks[0] == "piece":
            if dim is None:
                raise FormatError(f"line {lineno}: dimension unknown before first piece")
            pieces.append(parse_piece(it, dim, lineno))
        else:
            raise FormatError(f"line {lineno}: unexpected {toks[0]!r}")
    if dim is None:
        raise FormatError("no dimension given")
    return PolyUnion(dim, pieces)


def parse_cone(text: str, dim: int | None = None) -> VCone:
    u = parse_union(text, dim)
    return VCone(u.dim, [ConePiece.from_polyhedron(p) for p in u.pieces])


def dump_union(u: PolyUnion) -> str:
    return f"dim {u.dim}\n" + u.serialize() + "\n"


def dump_cone(c: VCone) -> str:
    return f"dim {c.dim}\n" + c.serialize() + "\n"
