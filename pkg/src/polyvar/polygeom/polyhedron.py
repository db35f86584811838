"""Closed convex polyhedra and finite unions of them, in exact arithmetic."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import _dd, _fm
from ._linalg import (ONE, ZERO, Vec, dot, neg, primitive, primitive_with, reduce_mod,
                      rref, vec)


class DimensionError(ValueError):
    """Raised when operands live in different ambient dimensions."""


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """``{z : a.z <= b for (a, b) in inequalities, a.z == b for (a, b) in equalities}``."""

    dim: int
    inequalities: tuple = ()
    equalities: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError("dimension must be positive")
        ins = tuple((vec(a), Fraction(b)) for a, b in self.inequalities)
        eqs = tuple((vec(a), Fraction(b)) for a, b in self.equalities)
        for a, _ in ins + eqs:
            if len(a) != self.dim:
                raise DimensionError(f"row of length {len(a)} in dimension {self.dim}")
        object.__setattr__(self, "inequalities", ins)
        object.__setattr__(self, "equalities", eqs)

    # -- constructors -------------------------------------------------------

    @classmethod
    def universe(cls, dim: int) -> "Polyhedron":
        return cls(dim)

    @classmethod
    def point(cls, z: Sequence) -> "Polyhedron":
        z = vec(z)
        d = len(z)
        return cls(d, (), tuple((tuple(ONE if j == i else ZERO for j in range(d)), z[i])
                                for i in range(d)))

    @classmethod
    def box(cls, lo: Sequence, hi: Sequence) -> "Polyhedron":
        lo, hi = vec(lo), vec(hi)
        d = len(lo)
        rows = []
        for i in range(d):
            e = tuple(ONE if j == i else ZERO for j in range(d))
            rows.append((e, hi[i]))
            rows.append((neg(e), -lo[i]))
        return cls(d, tuple(rows))

    @classmethod
    def interval(cls, lo=None, hi=None) -> "Polyhedron":
        rows = []
        if hi is not None:
            rows.append(((ONE,), Fraction(hi)))
        if lo is not None:
            rows.append(((-ONE,), -Fraction(lo)))
        return cls(1, tuple(rows))

    @classmethod
    def from_generators(cls, dim: int, points: Iterable, rays: Iterable = (),
                        lines: Iterable = ()) -> "Polyhedron":
        """Closed convex hull of points plus the cone of rays and span of lines."""
        pts = [vec(p) + (ONE,) for p in points]
        if not pts:
            return cls.empty(dim)
        gens = pts + [vec(r) + (ZERO,) for r in rays]
        lns = [vec(l) + (ZERO,) for l in lines]
        hs, hp = _dd.generators(dim + 1, gens, lns)
        ins = [(h[:dim], -h[dim]) for h in hs if any(h[:dim])]
        eqs = [(h[:dim], -h[dim]) for h in hp if any(h[:dim])]
        return cls(dim, tuple(ins), tuple(eqs))

    @classmethod
    def empty(cls, dim: int) -> "Polyhedron":
        return cls(dim, (((ZERO,) * dim, Fraction(-1)),))

    # -- basic queries --------------------------------------------------------

    def _system(self):
        return list(self.equalities), [(a, b, False) for a, b in self.inequalities]

    @cached_property
    def is_empty(self) -> bool:
        e, i = self._system()
        return not _fm.feasible(self.dim, e, i)

    def contains(self, z: Sequence) -> bool:
        z = vec(z)
        if len(z) != self.dim:
            raise DimensionError(f"point of length {len(z)} in dimension {self.dim}")
        return (all(dot(a, z) <= b for a, b in self.inequalities)
                and all(dot(a, z) == b for a, b in self.equalities))

    def interior_point(self) -> Vec | None:
        """A point of the relative interior (None if empty)."""
        c = self.canonical()
        if c.is_empty:
            return None
        return _fm.find_point(self.dim, list(c.equalities),
                              [(a, b, True) for a, b in c.inequalities])

    def any_point(self) -> Vec | None:
        e, i = self._system()
        return _fm.find_point(self.dim, e, i)

    # -- algebra --------------------------------------------------------------

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        if other.dim != self.dim:
            raise DimensionError("intersect: dimension mismatch")
        return Polyhedron(self.dim, self.inequalities + other.inequalities,
                          self.equalities + other.equalities)

    def add_constraints(self, inequalities=(), equalities=()) -> "Polyhedron":
        return Polyhedron(self.dim, self.inequalities + tuple(inequalities),
                          self.equalities + tuple(equalities))

    def project(self, keep: Sequence[int]) -> "Polyhedron":
        """Orthogonal projection onto the coordinates ``keep`` (0-based, in order)."""
        keep = list(keep)
        if not keep or any(not 0 <= k < self.dim for k in keep) or len(set(keep)) != len(keep):
            raise DimensionError(f"bad coordinate selection {keep} for dimension {self.dim}")
        e, i = self._system()
        res = _fm.project(self.dim, e, i, keep)
        if res is None:
            return Polyhedron.empty(len(keep))
        e2, i2 = res
        return Polyhedron(len(keep), tuple((a, b) for a, b, _ in i2), tuple(e2))

    def lift(self, dim: int, coords: Sequence[int]) -> "Polyhedron":
        """Cylinder in dimension ``dim``: coordinate ``k`` of self becomes ``coords[k]``."""
        def up(a):
            out = [ZERO] * dim
            for k, c in zip(coords, a):
                out[k] += c
            return tuple(out)
        return Polyhedron(dim, tuple((up(a), b) for a, b in self.inequalities),
                          tuple((up(a), b) for a, b in self.equalities))

    def linear_preimage(self, mat: Sequence[Sequence], offset: Sequence | None = None) -> "Polyhedron":
        """``{w : mat w + offset in self}``; ``mat`` has ``self.dim`` rows."""
        mat = [vec(r) for r in mat]
        k = len(mat[0])
        off = vec(offset) if offset is not None else (ZERO,) * self.dim

        def pull(a, b):
            row = tuple(sum((a[i] * mat[i][j] for i in range(self.dim)), ZERO) for j in range(k))
            return row, b - dot(a, off)
        return Polyhedron(k, tuple(pull(a, b) for a, b in self.inequalities),
                          tuple(pull(a, b) for a, b in self.equalities))

    def linear_image(self, mat: Sequence[Sequence]) -> "Polyhedron":
        """Image under ``z -> mat z`` (mat has ``out`` rows, ``self.dim`` columns)."""
        mat = [vec(r) for r in mat]
        out = len(mat)
        d = self.dim
        big = d + out
        ins = [(tuple(a) + (ZERO,) * out, b) for a, b in self.inequalities]
        eqs = [(tuple(a) + (ZERO,) * out, b) for a, b in self.equalities]
        for i, row in enumerate(mat):
            r = list(row) + [ZERO] * out
            r[d + i] = Fraction(-1)
            eqs.append((tuple(r), ZERO))
        return Polyhedron(big, tuple(ins), tuple(eqs)).project(range(d, big))

    def slice(self, fixed: Sequence[int], values: Sequence) -> "Polyhedron":
        """Fix coordinates ``fixed`` to ``values``; result lives in the other coordinates."""
        values = vec(values)
        fixed = list(fixed)
        free = [j for j in range(self.dim) if j not in fixed]
        if not free:
            raise DimensionError("slice would leave no coordinates")

        def sub(a, b):
            return tuple(a[j] for j in free), b - sum((a[k] * v for k, v in zip(fixed, values)), ZERO)
        return Polyhedron(len(free), tuple(sub(a, b) for a, b in self.inequalities),
                          tuple(sub(a, b) for a, b in self.equalities))

    def minkowski_sum(self, other: "Polyhedron") -> "Polyhedron":
        d = self.dim
        if other.dim != d:
            raise DimensionError("minkowski_sum: dimension mismatch")
        # variables (p, q, z) with z = p + q
        a = self.lift(3 * d, range(d))
        b = other.lift(3 * d, range(d, 2 * d))
        eqs = []
        for i in range(d):
            r = [ZERO] * (3 * d)
            r[i], r[d + i], r[2 * d + i] = ONE, ONE, Fraction(-1)
            eqs.append((tuple(r), ZERO))
        return a.intersect(b).add_constraints(equalities=eqs).project(range(2 * d, 3 * d))

    def includes(self, other: "Polyhedron") -> bool:
        """``other`` is a subset of ``self``."""
        if other.dim != self.dim:
            raise DimensionError("includes: dimension mismatch")
        e, i = other._system()
        for a, b in self.inequalities:
            if _fm.feasible(self.dim, e, i + [(neg(a), -b, True)]):
                return False
        for a, b in self.equalities:
            if _fm.feasible(self.dim, e, i + [(neg(a), -b, True)]):
                return False
            if _fm.feasible(self.dim, e, i + [(a, b, True)]):
                return False
        return True

    def minimize(self, c: Sequence) -> tuple[Fraction | None, bool] | None:
        """Infimum of ``c.z``: ``(value or None for -inf, attained)``; None if empty."""
        e, i = self._system()
        return _fm.linear_min(self.dim, e, i, vec(c))

    # -- generators -----------------------------------------------------------

    @cached_property
    def _generators(self):
        d = self.dim
        hs = [tuple(a) + (-b,) for a, b in self.inequalities]
        hs.append((ZERO,) * d + (Fraction(-1),))
        hp = [tuple(a) + (-b,) for a, b in self.equalities]
        rays, lines = _dd.generators(d + 1, hs, hp)
        pts, rr = [], []
        for r in rays:
            if r[d] > 0:
                pts.append(tuple(x / r[d] for x in r[:d]))
            else:
                rr.append(primitive(r[:d]))
        if not pts:
            return (), (), ()
        return tuple(sorted(pts)), tuple(sorted(set(rr))), tuple(l[:d] for l in lines)

    def generators(self) -> tuple[tuple[Vec, ...], tuple[Vec, ...], tuple[Vec, ...]]:
        """``(points, rays, lines)`` with self = conv(points) + cone(rays) + span(lines)."""
        return self._generators

    def vertices(self) -> tuple[Vec, ...]:
        return self._generators[0]

    def is_bounded(self) -> bool:
        _, rays, lines = self._generators
        return not rays and not lines

    def is_cone(self) -> bool:
        """Nonempty and equal to its own recession cone (so apex at the origin)."""
        if self.is_empty:
            return False
        if not self.contains((ZERO,) * self.dim):
            return False
        rec = self.recession_cone()
        return self.includes(rec) and rec.includes(self)

    def recession_cone(self) -> "Polyhedron":
        return Polyhedron(self.dim, tuple((a, ZERO) for a, _ in self.inequalities),
                          tuple((a, ZERO) for a, _ in self.equalities))

    # -- canonical form -------------------------------------------------------

    def canonical(self) -> "Polyhedron":
        return self._canonical

    @cached_property
    def _canonical(self) -> "Polyhedron":
        d = self.dim
        if self.is_empty:
            return Polyhedron.empty(d)
        e, ins = self._system()
        ineqs = [(a, b) for a, b, _ in _fm._prune(ins)] if ins else []
        eq_rows = [tuple(a) + (b,) for a, b in e]
        # implicit equalities
        remaining = []
        for k, (a, b) in enumerate(ineqs):
            rest = [(x, y, False) for x, y in ineqs]
            if not _fm.feasible(d, e, rest + [(a, b, True)]):
                eq_rows.append(tuple(a) + (b,))
                e = e + [(a, b)]
            else:
                remaining.append((a, b))
        red, piv = rref(eq_rows, d + 1) if eq_rows else ([], [])
        eqs = tuple((primitive_with(r[:d], r[d])) for r in red)
        red_n = [r for r in red]
        piv_n = list(piv)

        def reduce(a, b):
            v = reduce_mod(tuple(a) + (b,), red_n, piv_n)
            return v[:d], v[d]
        cand = []
        for a, b in remaining:
            a2, b2 = reduce(a, b)
            if not any(a2):
                continue
            cand.append(primitive_with(a2, b2))
        cand = sorted(set(cand))
        sys_e = [(a, b) for a, b in eqs]
        i = 0
        while i < len(cand):
            a, b = cand[i]
            others = [(x, y, False) for x, y in cand[:i] + cand[i + 1:]]
            if not _fm.feasible(d, sys_e, others + [(neg(a), -b, True)]):
                cand.pop(i)
            else:
                i += 1
        eqs = tuple(sorted(eqs))
        c = Polyhedron(d, tuple(cand), eqs)
        object.__setattr__(c, "_canonical", c)
        c.__dict__["is_empty"] = False
        return c

    def serialize(self) -> str:
        c = self.canonical()
        lines = ["piece"]
        for a, b in c.equalities:
            lines.append("eq " + " ".join(_fmt(x) for x in a) + " " + _fmt(b))
        for a, b in c.inequalities:
            lines.append("ineq " + " ".join(_fmt(x) for x in a) + " " + _fmt(b))
        lines.append("end")
        return "\n".join(lines)

    def __eq__(self, other):
        if not isinstance(other, Polyhedron):
            return NotImplemented
        return self.dim == other.dim and self.serialize() == other.serialize()

    def __hash__(self):
        return hash((self.dim, self.serialize()))

    def __repr__(self):
        if self.dim == 1 and not self.is_empty:
            lo, hi = interval_bounds(self)
            return f"Polyhedron[{_fmt(lo) if lo is not None else '-inf'}, {_fmt(hi) if hi is not None else 'inf'}]"
        return f"Polyhedron(dim={self.dim}, ineqs={len(self.inequalities)}, eqs={len(self.equalities)})"


def interval_bounds(p: Polyhedron) -> tuple[Fraction | None, Fraction | None]:
    """``(lo, hi)`` of a nonempty 1-D polyhedron; None marks an infinite end."""
    if p.dim != 1:
        raise DimensionError("interval_bounds needs a 1-D polyhedron")
    lo = hi = None
    for (a,), b in p.equalities:
        if a:
            return b / a, b / a
    for (a,), b in p.inequalities:
        if a > 0:
            hi = b / a if hi is None else min(hi, b / a)
        elif a < 0:
            lo = b / a if lo is None else max(lo, b / a)
    return lo, hi


class PolyUnion:
    """A finite union of closed convex polyhedra of a common dimension.

    Empty pieces are dropped and the rest are kept in canonical order, so
    permuting the input pieces does not change :meth:`serialize`.
    ``==`` is set equality (decided exactly); ``<=`` is inclusion.
    """

    __slots__ = ("dim", "pieces", "__weakref__")

    def __init__(self, dim: int, pieces: Iterable[Polyhedron] = ()):
        pieces = list(pieces)
        for p in pieces:
            if p.dim != dim:
                raise DimensionError(f"piece of dimension {p.dim} in a union of dimension {dim}")
        seen = {}
        for p in pieces:
            if p.is_empty:
                continue
            seen.setdefault(p.serialize(), p.canonical())
        self.dim = dim
        self.pieces = tuple(seen[k] for k in sorted(seen))

    @classmethod
    def of(cls, *pieces: Polyhedron) -> "PolyUnion":
        if not pieces:
            raise ValueError("PolyUnion.of needs at least one piece; use PolyUnion(dim) for empty")
        return cls(pieces[0].dim, pieces)

    @classmethod
    def points(cls, pts: Iterable[Sequence]) -> "PolyUnion":
        pts = [vec(p) for p in pts]
        return cls(len(pts[0]), [Polyhedron.point(p) for p in pts])

    def __iter__(self):
        return iter(self.pieces)

    def __len__(self):
        return len(self.pieces)

    def is_empty(self) -> bool:
        return not self.pieces

    def contains(self, z: Sequence) -> bool:
        return any(p.contains(z) for p in self.pieces)

    def union(self, other: "PolyUnion") -> "PolyUnion":
        _check(self, other)
        return PolyUnion(self.dim, self.pieces + other.pieces)

    def intersect(self, other: "PolyUnion | Polyhedron") -> "PolyUnion":
        others = other.pieces if isinstance(other, PolyUnion) else (other,)
        if any(o.dim != self.dim for o in others):
            raise DimensionError("intersect: dimension mismatch")
        return PolyUnion(self.dim, [p.intersect(q) for p in self.pieces for q in others])

    def project(self, keep: Sequence[int]) -> "PolyUnion":
        keep = list(keep)
        return PolyUnion(len(keep), [p.project(keep) for p in self.pieces])

    def slice(self, fixed: Sequence[int], values: Sequence) -> "PolyUnion":
        return union_slice(self, fixed, values)

    def map_pieces(self, fn, dim: int | None = None) -> "PolyUnion":
        return PolyUnion(self.dim if dim is None else dim, [fn(p) for p in self.pieces])

    def issubset(self, other: "PolyUnion") -> bool:
        _check(self, other)
        targets = [(list(q.equalities), list(q.inequalities)) for q in other.pieces]
        for p in self.pieces:
            if len(other.pieces) == 1 and other.pieces[0].includes(p):
                continue
            if any(q.includes(p) for q in other.pieces):
                continue
            e, i = p._system()
            if not _fm.covered(self.dim, e, i, targets):
                return False
        return True

    def __le__(self, other):
        return self.issubset(other)

    def __ge__(self, other):
        return other.issubset(self)

    def __eq__(self, other):
        if not isinstance(other, PolyUnion):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if self.serialize() == other.serialize():
            return True
        return self.issubset(other) and other.issubset(self)

    __hash__ = None

    def simplify(self) -> "PolyUnion":
        """Same set with subsumed pieces removed (and intervals merged in 1-D)."""
        if self.dim == 1:
            return PolyUnion(1, [Polyhedron.interval(lo, hi) for lo, hi in merged_intervals(self)])
        keep: list[Polyhedron] = []
        ps = sorted(self.pieces, key=lambda p: -len(p.vertices()) - 100 * len(p.generators()[1]))
        for i, p in enumerate(ps):
            if any(q.includes(p) for q in keep):
                continue
            if any(q.includes(p) and not p.includes(q) for q in ps[i + 1:]):
                continue
            keep.append(p)
        return PolyUnion(self.dim, keep)

    def is_bounded(self) -> bool:
        return all(p.is_bounded() for p in self.pieces)

    def serialize(self) -> str:
        return "\n".join(p.serialize() for p in self.pieces)

    def __str__(self):
        """Bare set notation for 1-D unions, e.g. ``{1} u [2, 3]``."""
        if self.dim == 1:
            parts = []
            for lo, hi in merged_intervals(self):
                if lo is not None and lo == hi:
                    parts.append("{" + _fmt(lo) + "}")
                else:
                    parts.append(f"[{_fmt(lo) if lo is not None else '-inf'}, "
                                 f"{_fmt(hi) if hi is not None else 'inf'}]")
            return " u ".join(parts) if parts else "empty"
        return f"dim={self.dim}, pieces={len(self.pieces)}"

    def __repr__(self):
        return f"PolyUnion({self})"


def _check(a: PolyUnion, b: PolyUnion):
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")


def merged_intervals(u: PolyUnion) -> list[tuple[Fraction | None, Fraction | None]]:
    """Disjoint sorted closed intervals covering a 1-D union."""
    if u.dim != 1:
        raise DimensionError("merged_intervals needs a 1-D union")
    iv = sorted((interval_bounds(p) for p in u.pieces),
                key=lambda t: (t[0] is not None, t[0] if t[0] is not None else 0))
    out: list[list] = []
    for lo, hi in iv:
        if out:
            plo, phi = out[-1]
            if phi is None or (lo is not None and lo <= phi) or lo is None:
                if phi is not None and (hi is None or hi > phi):
                    out[-1][1] = hi
                continue
        out.append([lo, hi])
    return [tuple(t) for t in out]


def union_slice(u: PolyUnion, fixed: Sequence[int], values: Sequence) -> PolyUnion:
    """Fix some coordinates of every piece; empty slices are dropped."""
    fixed = list(fixed)
    if any(not 0 <= k < u.dim for k in fixed):
        raise DimensionError(f"bad fixed coordinates {fixed} for dimension {u.dim}")
    if len(vec(values)) != len(fixed):
        raise DimensionError("one value per fixed coordinate is required")
    return PolyUnion(u.dim - len(fixed), [p.slice(fixed, values) for p in u.pieces])


def poly_contains(p: Polyhedron, z: Sequence) -> bool:
    return p.contains(z)


def project(p: Polyhedron, keep: Sequence[int]) -> Polyhedron:
    return p.project(keep)


def union_hull(u: PolyUnion) -> Polyhedron:
    """Closed convex hull of a union, via the generators of every piece."""
    pts, rays, lines = [], [], []
    for p in u.pieces:
        a, b, c = p.generators()
        pts += a
        rays += b
        lines += c
    return Polyhedron.from_generators(u.dim, pts, rays, lines)
