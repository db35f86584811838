"""Tangent and normal cones of polyhedral unions, coderivatives and subdifferentials.

Locally around a point, a finite union of polyhedra coincides with the union
of the tangent cones of the pieces through that point. Limiting normals are
therefore computed on that union of cones: the arrangement of all their
bounding hyperplanes is enumerated face by face, and on each face the regular
normal cone is constant. Their union is the limiting normal cone.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .polygeom import (ConePiece, DimensionError, PolyUnion, Polyhedron, VCone, cone_hull,
                       union_hull)
from .polygeom import _fm
from .polygeom._linalg import ONE, ZERO, dot, neg, primitive_with, vec
from .setmaps import SetMap, convexify_values, eval_map

KINDS = ("regular", "limiting", "convexified")


class OffSetError(ValueError):
    """The base point does not belong to the set or graph."""


def _check_member(u: PolyUnion, xbar) -> tuple:
    xbar = vec(xbar)
    if len(xbar) != u.dim:
        raise DimensionError(f"point of length {len(xbar)} in dimension {u.dim}")
    if not u.contains(xbar):
        raise OffSetError("point is not in the set")
    return xbar


def _local_cones(u: PolyUnion, xbar) -> list[ConePiece]:
    """Tangent cone of every piece containing ``xbar`` (active rows only)."""
    out = []
    for p in u.pieces:
        if not p.contains(xbar):
            continue
        act = [a for a, b in p.inequalities if dot(a, xbar) == b]
        out.append(ConePiece.from_halfspaces(u.dim, act, [a for a, _ in p.equalities]))
    return out


def tangent_cone(u: PolyUnion, xbar: Sequence) -> VCone:
    """Union of the tangent cones of the pieces containing ``xbar``."""
    xbar = _check_member(u, xbar)
    return VCone(u.dim, _local_cones(u, xbar)).simplify()


def regular_normal_cone(u: PolyUnion, xbar: Sequence) -> VCone:
    """Polar of the tangent cone, i.e. the intersection of the piece polars."""
    xbar = _check_member(u, xbar)
    return VCone(u.dim, [_regular_at(_local_cones(u, xbar), (ZERO,) * u.dim, u.dim)])


def _regular_at(cones: list[ConePiece], z, dim: int) -> ConePiece:
    """Regular normal cone of the union of ``cones`` at a point ``z`` of it."""
    result = None
    for c in cones:
        if not c.contains(z):
            continue
        act = [a for a in c.halfspaces if dot(a, z) == 0]
        nc = ConePiece.from_generators(dim, act, c.hyperplanes)
        result = nc if result is None else result.intersect(nc)
    if result is None:
        raise OffSetError("point is not in the union")
    return result


def arrangement_points(dim: int, normals: Sequence[tuple]) -> list[tuple]:
    """One relative-interior point of every face of a central hyperplane arrangement."""
    return face_points(dim, [(n, ZERO) for n in normals])


def face_points(dim: int, hyperplanes: Sequence[tuple], eqs: Sequence = (),
                ineqs: Sequence = ()) -> list[tuple]:
    """One relative-interior point of every face of an affine arrangement.

    ``hyperplanes`` are pairs ``(a, b)`` for ``a.z = b``; faces are cut down to
    the polyhedron ``eqs``/``ineqs`` (pairs meaning ``a.z == b`` / ``a.z <= b``).
    Faces are built one hyperplane at a time, keeping only sign patterns that
    are feasible with strict inequalities.
    """
    hyper = set()
    for a, b in hyperplanes:
        a, b = vec(a), Fraction(b)
        if not any(a):
            continue
        if not _first_pos(a):
            a, b = neg(a), -b
        hyper.add(primitive_with(a, b))
    base_i = [(vec(a), Fraction(b), False) for a, b in ineqs]
    cells: list[tuple[list, list]] = [([(vec(a), Fraction(b)) for a, b in eqs], base_i)]
    if not _fm.feasible(dim, *cells[0]):
        return []
    for h, c in sorted(hyper):
        nxt = []
        for e, i in cells:
            for sign in (-1, 0, 1):
                if sign == 0:
                    e2, i2 = e + [(h, c)], i
                elif sign < 0:
                    e2, i2 = e, i + [(h, c, True)]
                else:
                    e2, i2 = e, i + [(neg(h), -c, True)]
                if _fm.feasible(dim, e2, i2):
                    nxt.append((e2, i2))
        cells = nxt
    return [_fm.find_point(dim, e, i) for e, i in cells]


def _first_pos(n) -> bool:
    for x in n:
        if x:
            return x > 0
    return True


def limiting_normal_cone(u: PolyUnion, xbar: Sequence) -> VCone:
    """Union of the regular normal cones over all faces of the local arrangement."""
    xbar = _check_member(u, xbar)
    cones = _local_cones(u, xbar)
    normals = [a for c in cones for a in c.halfspaces + c.hyperplanes]
    pieces = {}
    for z in arrangement_points(u.dim, normals):
        if not any(c.contains(z) for c in cones):
            continue
        nc = _regular_at(cones, z, u.dim)
        pieces.setdefault(nc.key(), nc)
    return VCone(u.dim, pieces.values()).simplify()


def normal_cone(u: PolyUnion, xbar: Sequence, kind: str = "limiting") -> VCone:
    if kind == "regular":
        return regular_normal_cone(u, xbar)
    if kind in ("limiting", "convexified"):
        return limiting_normal_cone(u, xbar)
    raise ValueError(f"unknown kind {kind!r}")


# -- coderivatives -----------------------------------------------------------------------


@dataclass
class CoderivAtPoint:
    """Coderivative of a map at a graph point.

    ``cone`` lives in (u, v) space, u in R^m (output side) first, v in R^n:
    ``(u, v)`` belongs to it iff ``(v, -u)`` is normal to the graph.
    For ``kind == "convexified"`` values are hulled per query u, unless
    ``graph_hull`` is set, in which case the whole cone is hulled.
    """

    base: tuple
    cone: VCone
    kind: str
    n: int
    m: int
    graph_hull: bool = False

    def apply(self, u: Sequence) -> PolyUnion:
        return coderiv_apply(self, u)

    __call__ = apply

    def as_map(self) -> SetMap:
        """The coderivative as a set-valued map u => v."""
        if self.kind == "convexified" and self.graph_hull:
            return SetMap(self.m, self.n, cone_hull(self.cone).to_polyunion())
        raw = SetMap(self.m, self.n, self.cone.to_polyunion())
        if self.kind == "convexified":
            return convexify_values(raw)
        return raw


def normal_to_coderiv(nc: VCone, n: int, m: int) -> VCone:
    """Map graph normals (a, b) in R^n x R^m to coderivative pairs (u, v) = (-b, a)."""
    mat = []
    for i in range(m):
        mat.append(tuple(-ONE if j == n + i else ZERO for j in range(n + m)))
    for i in range(n):
        mat.append(tuple(ONE if j == i else ZERO for j in range(n + m)))
    return nc.linear_image(mat)


def coderivative(s: SetMap, xbar: Sequence, ybar: Sequence, kind: str = "limiting",
                 graph_hull: bool = False) -> CoderivAtPoint:
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    xbar, ybar = vec(xbar), vec(ybar)
    if len(xbar) != s.n or len(ybar) != s.m:
        raise DimensionError("base point does not match the map dimensions")
    if not s.contains(xbar, ybar):
        raise OffSetError("point is not on the graph")
    nc = normal_cone(s.graph, xbar + ybar, kind)
    return CoderivAtPoint((xbar, ybar), normal_to_coderiv(nc, s.n, s.m), kind, s.n, s.m, graph_hull)


def coderiv_apply(d: CoderivAtPoint, u: Sequence) -> PolyUnion:
    """``D*S(xbar|ybar)(u)``; hulled for the convexified kind."""
    u = vec(u)
    if len(u) != d.m:
        raise DimensionError(f"direction of length {len(u)}, expected {d.m}")
    if d.kind == "convexified" and d.graph_hull:
        return cone_hull(d.cone).slice(range(d.m), u)
    val = d.cone.slice(range(d.m), u)
    if d.kind == "convexified" and not val.is_empty():
        return PolyUnion.of(union_hull(val))
    return val


# -- piecewise-affine functions and subdifferentials ---------------------------------------------


class PiecewiseAffine:
    """``f(z) = min over groups of max over rows of (c.z + c0)``.

    Each group is a list of rows ``(c, c0)``. Covers every continuous
    piecewise-affine function, e.g. ``-|x - 1/2| = min(x - 1/2, 1/2 - x)``.
    """

    __slots__ = ("dim", "groups")

    def __init__(self, dim: int, groups: Sequence[Sequence[tuple]]):
        gs = []
        for g in groups:
            rows = []
            for c, c0 in g:
                c = vec(c)
                if len(c) != dim:
                    raise DimensionError(f"row of length {len(c)} for a function on R^{dim}")
                rows.append((c, Fraction(c0)))
            if not rows:
                raise ValueError("empty group")
            gs.append(tuple(rows))
        if not gs:
            raise ValueError("a function needs at least one group")
        self.dim, self.groups = dim, tuple(gs)

    @classmethod
    def affine(cls, c: Sequence, c0=0) -> "PiecewiseAffine":
        return cls(len(c), [[(c, c0)]])

    @classmethod
    def max_of(cls, rows) -> "PiecewiseAffine":
        rows = list(rows)
        return cls(len(rows[0][0]), [rows])

    @classmethod
    def min_of(cls, rows) -> "PiecewiseAffine":
        rows = list(rows)
        return cls(len(rows[0][0]), [[r] for r in rows])

    def __call__(self, z: Sequence) -> Fraction:
        z = vec(z)
        return min(max(dot(c, z) + c0 for c, c0 in g) for g in self.groups)

    def is_convex(self) -> bool:
        return len(self.groups) == 1

    def epigraph(self) -> PolyUnion:
        d = self.dim
        pieces = []
        for g in self.groups:
            pieces.append(Polyhedron(d + 1, tuple((c + (-ONE,), -c0) for c, c0 in g)))
        return PolyUnion(d + 1, pieces)

    def minimize_over(self, p: Polyhedron) -> tuple[Fraction | None, list[Polyhedron]]:
        """Minimum value over ``p`` and the pieces of the argmin set.

        Returns ``(None, [])`` when the infimum is not attained or is -inf.
        """
        d = self.dim
        best, arg = None, []
        for g in self.groups:
            ext = p.lift(d + 1, range(d)).add_constraints(tuple((c + (-ONE,), -c0) for c, c0 in g))
            res = ext.minimize((ZERO,) * d + (ONE,))
            if res is None:
                continue
            val, attained = res
            if val is None or not attained:
                return None, []
            rows = tuple((c, val - c0) for c, c0 in g)
            cell = p.add_constraints(rows)
            if best is None or val < best:
                best, arg = val, [cell]
            elif val == best:
                arg.append(cell)
        return best, arg

    def gradients_near(self, z: Sequence) -> list[tuple]:
        """Gradients of the affine rows that are active at z in an active group."""
        z = vec(z)
        v = self(z)
        out = set()
        for g in self.groups:
            if max(dot(c, z) + c0 for c, c0 in g) == v:
                for c, c0 in g:
                    if dot(c, z) + c0 == v:
                        out.add(c)
        return sorted(out)

    def __repr__(self):
        return f"PiecewiseAffine(dim={self.dim}, groups={len(self.groups)})"


@dataclass
class SubdiffTriple:
    """Limiting, horizon and Clarke subdifferentials at one point."""

    limiting: PolyUnion
    horizon: VCone
    clarke: Polyhedron | None


def subdifferential(f: PiecewiseAffine, xbar: Sequence) -> SubdiffTriple:
    """Slices of the limiting normal cone of the epigraph at levels -1 and 0."""
    xbar = vec(xbar)
    if len(xbar) != f.dim:
        raise DimensionError(f"point of length {len(xbar)} for a function on R^{f.dim}")
    d = f.dim
    nc = limiting_normal_cone(f.epigraph(), xbar + (f(xbar),))
    lim = nc.slice([d], [-1])
    hor_pieces = []
    for p in nc.pieces:
        cut = p.to_polyhedron().slice([d], [0])
        hor_pieces.append(ConePiece.from_polyhedron(cut))
    horizon = VCone(d, hor_pieces).simplify()
    clarke = union_hull(lim) if not lim.is_empty() else None
    return SubdiffTriple(lim.simplify() if d == 1 else lim, horizon, clarke)


def regular_subdifferential(f: PiecewiseAffine, xbar: Sequence) -> PolyUnion:
    xbar = vec(xbar)
    nc = regular_normal_cone(f.epigraph(), xbar + (f(xbar),))
    return nc.slice([f.dim], [-1])
