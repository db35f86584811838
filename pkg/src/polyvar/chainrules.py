"""Chain rules for coderivatives of compositions and marginal functions.

Intermediate points ``y`` in ``G(x) n F^-1(z)`` can form a continuum. The
coderivatives at ``y`` only depend on which graph constraints are tight, so
the set is split into faces of the arrangement of those constraints and one
relative-interior point per face is used.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .polygeom import ConePiece, PolyUnion, Polyhedron, VCone, union_hull
from .polygeom._linalg import ONE, ZERO, dot, vec
from .setmaps import DEFAULT_BUDGET, SetMap, compose, convexify_values, eval_map, inverse
from .varcones import (CoderivAtPoint, OffSetError, PiecewiseAffine, coderivative, face_points,
                       limiting_normal_cone, subdifferential)

SUBSET, SUPSET, EQUAL, INCOMPARABLE = "⊊", "⊋", "=", "≠"


def relation(a: PolyUnion, b: PolyUnion) -> str:
    """Set relation of ``a`` to ``b``: one of ``=``, ``⊊``, ``⊋``, ``≠``."""
    ab, ba = a <= b, b <= a
    if ab and ba:
        return EQUAL
    if ab:
        return SUBSET
    if ba:
        return SUPSET
    return INCOMPARABLE


def _map_relation(a: SetMap, b: SetMap) -> str:
    if a.hull_values or b.hull_values:
        raise NotImplementedError("relation between lazily hulled maps")
    return relation(a.graph, b.graph)


# -- intermediate points ---------------------------------------------------------------------


def _graph_hyperplanes(s: SetMap, fixed_in: Sequence | None, fixed_out: Sequence | None):
    """Constraint hyperplanes of a graph restricted to one free block of coordinates."""
    n, m = s.n, s.m
    out = []
    for p in s.graph.pieces:
        rows = list(p.inequalities) + list(p.equalities)
        for a, b in rows:
            if fixed_in is not None:
                out.append((a[n:], b - dot(a[:n], fixed_in)))
            else:
                out.append((a[:n], b - dot(a[n:], fixed_out)))
    return out


def intermediate_points(f: SetMap, g: SetMap, xbar: Sequence, zbar: Sequence) -> tuple[PolyUnion, list]:
    """``S = G(xbar) n F^-1(zbar)`` and one representative point per stratum."""
    xbar, zbar = vec(xbar), vec(zbar)
    s = eval_map(g, xbar).intersect(eval_map(inverse(f), zbar))
    hyper = _graph_hyperplanes(g, xbar, None) + _graph_hyperplanes(f, None, zbar)
    reps = set()
    for piece in s.pieces:
        reps.update(face_points(s.dim, hyper, piece.equalities, piece.inequalities))
    return s, sorted(reps)


# -- qualification condition -------------------------------------------------------------------


def zero_slice(d: CoderivAtPoint) -> VCone:
    """``D*S(xbar|ybar)(0)`` as a union of cones."""
    pieces = []
    for p in d.cone.pieces:
        cut = p.to_polyhedron().slice(range(d.m), (ZERO,) * d.m)
        pieces.append(ConePiece.from_polyhedron(cut))
    return VCone(d.n, pieces)


@dataclass
class CQResult:
    ok: bool
    witness: tuple | None = None


def check_cq(f: SetMap, g: SetMap, ybar: Sequence, zbar: Sequence, xbar: Sequence) -> CQResult:
    """``D*F(y|z)(0) n -D*G^-1(y|x)(0) = {0}``, decided exactly."""
    ybar, zbar, xbar = vec(ybar), vec(zbar), vec(xbar)
    if not g.contains(xbar, ybar) or not f.contains(ybar, zbar):
        raise OffSetError("intermediate point is not on both graphs")
    a = zero_slice(coderivative(f, ybar, zbar))
    b = zero_slice(coderivative(inverse(g), ybar, xbar)).negate()
    for p in a.intersect(b).pieces:
        if not p.is_zero():
            w = p.rays[0] if p.rays else p.lines[0]
            return CQResult(False, w)
    return CQResult(True)


# -- composition chain rule --------------------------------------------------------------------


@dataclass
class ChainVerdict:
    """Directly computed coderivative of ``F o G`` against a composed bound."""

    lhs: SetMap
    rhs: SetMap
    relation: str
    cq: list = field(default_factory=list)
    intermediate: PolyUnion | None = None
    locally_bounded: bool = True

    @property
    def certified(self) -> bool:
        return all(r.ok for _, r in self.cq) and self.locally_bounded

    def report(self) -> str:
        lines = [f"LHS {self.relation} RHS"]
        for y, r in self.cq:
            pt = " ".join(_fmt(c) for c in y)
            lines.append(f"cq at y = ({pt}): {'ok' if r.ok else 'FAILS'}")
        lines.append("certified: " + ("yes" if self.certified else "no"))
        return "\n".join(lines)


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _union_maps(n: int, m: int, maps: list[SetMap]) -> SetMap:
    return SetMap(n, m, PolyUnion(n + m, [p for s in maps for p in s.graph.pieces]))


def composed_bound(f: SetMap, g: SetMap, xbar, zbar, inner: str = "limiting",
                   outer: str = "limiting", hull: bool = False,
                   budget: int | None = DEFAULT_BUDGET) -> tuple[SetMap, list, PolyUnion]:
    """``union over y of D*G(x|y) o D*F(y|z)`` with chosen kinds per factor.

    ``inner`` is the kind for F, ``outer`` for G; ``hull`` hulls the union valuewise.
    Returns the map, the CQ results per representative, and the intermediate set.
    """
    s, reps = intermediate_points(f, g, xbar, zbar)
    if not reps:
        raise OffSetError("zbar is not a value of the composition at xbar")
    parts, cqs = [], []
    for y in reps:
        dg = coderivative(g, xbar, y, outer).as_map()
        df = coderivative(f, y, zbar, inner).as_map()
        parts.append(compose(dg, df, budget))
        cqs.append((y, check_cq(f, g, y, zbar, xbar)))
    total = _union_maps(f.m, g.n, parts)
    if hull:
        total = convexify_values(total)
    return total, cqs, s


def chain_upper(f: SetMap, g: SetMap, xbar: Sequence, zbar: Sequence, kind: str = "limiting",
                relaxed: bool = False, budget: int | None = DEFAULT_BUDGET) -> ChainVerdict:
    """Compare ``D*(F o G)(x|z)`` with the union-over-y composed bound.

    ``kind="convexified"`` uses the hulled form ``co U co D*G o D*F``;
    ``relaxed`` additionally convexifies ``D*F``.
    """
    h = compose(f, g, budget)
    lhs = coderivative(h, xbar, zbar, kind).as_map()
    if kind == "convexified":
        rhs, cqs, s = composed_bound(f, g, xbar, zbar, "convexified" if relaxed else "limiting",
                                     "convexified", hull=True, budget=budget)
    else:
        rhs, cqs, s = composed_bound(f, g, xbar, zbar, kind, kind, budget=budget)
    return ChainVerdict(lhs, rhs, _map_relation(lhs, rhs), cqs, s, s.is_bounded())


def tightness_pattern(f: SetMap, g: SetMap, xbar: Sequence, zbar: Sequence) -> tuple[str, str]:
    """Relations in ``co D*(F o G) ? co D*G o D*F ? co D*G o co D*F``."""
    h = compose(f, g)
    lhs = coderivative(h, xbar, zbar, "convexified").as_map()
    mid, _, _ = composed_bound(f, g, xbar, zbar, "limiting", "convexified", hull=True)
    right, _, _ = composed_bound(f, g, xbar, zbar, "convexified", "convexified", hull=True)
    return _map_relation(lhs, mid), _map_relation(mid, right)


@dataclass
class ConvexChain:
    """Exact composition for graph-convex maps, with the per-point check."""

    coderiv: SetMap
    independent: bool
    matches_direct: bool
    checked_points: list


def chain_convex_exact(f: SetMap, g: SetMap, xbar: Sequence, zbar: Sequence,
                       budget: int | None = DEFAULT_BUDGET) -> ConvexChain:
    """``D*(F o G)(x|z) = D*G(x|y) o D*F(y|z)`` for any y, when both graphs are convex."""
    if not f.is_graph_convex() or not g.is_graph_convex():
        raise ValueError("both maps must have convex graphs")
    s, reps = intermediate_points(f, g, xbar, zbar)
    if not reps:
        raise OffSetError("zbar is not a value of the composition at xbar")
    for y in reps:
        if not check_cq(f, g, y, zbar, xbar).ok:
            raise ValueError("qualification condition fails at an intermediate point")
    maps = []
    for y in reps:
        dg = coderivative(g, xbar, y).as_map()
        df = coderivative(f, y, zbar).as_map()
        maps.append(compose(dg, df, budget))
    first = maps[0]
    independent = all(m_ == first for m_ in maps[1:])
    direct = coderivative(compose(f, g, budget), xbar, zbar).as_map()
    return ConvexChain(first, independent, direct == first, reps)


# -- marginal functions ---------------------------------------------------------------------------


def restrict(phi: PiecewiseAffine, fixed: Sequence, n: int) -> PiecewiseAffine:
    """``y -> phi(fixed, y)`` for phi on ``R^n x R^m``."""
    fixed = vec(fixed)
    groups = [[(c[n:], c0 + dot(c[:n], fixed)) for c, c0 in g] for g in phi.groups]
    return PiecewiseAffine(phi.dim - n, groups)


def argmin_set(phi: PiecewiseAffine, g: SetMap, xbar: Sequence) -> tuple[Fraction | None, PolyUnion]:
    """Optimal value of ``min phi(x, y) over y in G(x)`` and the argmin set."""
    psi = restrict(phi, xbar, g.n)
    best, cells = None, []
    for piece in eval_map(g, xbar).pieces:
        val, arg = psi.minimize_over(piece)
        if val is None:
            continue
        if best is None or val < best:
            best, cells = val, list(arg)
        elif val == best:
            cells += arg
    return best, PolyUnion(g.m, cells)


def _marginal_points(phi: PiecewiseAffine, g: SetMap, xbar, argset: PolyUnion) -> list:
    hyper = _graph_hyperplanes(g, xbar, None)
    rows = [r for grp in phi.groups for r in grp]
    n = g.n
    for i, (c1, d1) in enumerate(rows):
        for c2, d2 in rows[i + 1:]:
            diff = tuple(a - b for a, b in zip(c1, c2))
            hyper.append((diff[n:], d2 - d1 - dot(diff[:n], xbar)))
    reps = set()
    for piece in argset.pieces:
        reps.update(face_points(argset.dim, hyper, piece.equalities, piece.inequalities))
    return sorted(reps)


def _shift_image(sub: PolyUnion, cd: SetMap, n: int, m: int) -> PolyUnion:
    """``{x* + v : (x*, y*) in sub, v in cd(y*)}`` exactly, by projection."""
    # variables (x*, y*, v, w) with w = x* + v
    total = 3 * n + m
    out = []
    for p in sub.pieces:
        a = p.lift(total, range(n + m))
        for q in cd.graph.pieces:
            b = q.lift(total, range(n, 2 * n + m))
            eqs = []
            for i in range(n):
                row = [ZERO] * total
                row[i], row[n + m + i], row[2 * n + m + i] = ONE, ONE, -ONE
                eqs.append((tuple(row), ZERO))
            out.append(a.intersect(b).add_constraints(equalities=eqs).project(range(2 * n + m, total)))
    return PolyUnion(n, out)


@dataclass
class MarginalEstimate:
    estimate: PolyUnion
    exact: bool
    certified: bool
    points: list
    value: Fraction | None


def marginal_subdiff(phi: PiecewiseAffine, g: SetMap, xbar: Sequence, mode: str = "limiting"
                     ) -> MarginalEstimate:
    """Subgradient estimate for ``f(x) = min { phi(x, y) : y in G(x) }``.

    ``mode``: ``limiting`` (union over minimisers), ``clarke`` (hulled, with
    convexified coderivatives) or ``convex`` (exact equality for graph-convex
    G and convex phi, using a single minimiser).
    """
    if mode not in ("limiting", "clarke", "convex"):
        raise ValueError(f"unknown mode {mode!r}")
    xbar = vec(xbar)
    n, m = g.n, g.m
    if phi.dim != n + m:
        raise ValueError("objective dimension must equal n + m")
    val, argset = argmin_set(phi, g, xbar)
    if val is None:
        raise ValueError("the minimum is not attained")
    if mode == "convex":
        if not (g.is_graph_convex() and phi.is_convex()):
            raise ValueError("convex mode needs a graph-convex map and a convex objective")
    reps = _marginal_points(phi, g, xbar, argset)
    if mode == "convex":
        reps = reps[:1]
    certified = argset.is_bounded()
    parts = []
    for y in reps:
        point = xbar + y
        sd = subdifferential(phi, point)
        if not _cq_marginal(sd.horizon, g, point):
            certified = False
        kind = "convexified" if mode == "clarke" else "limiting"
        cd = coderivative(g, xbar, y, kind).as_map()
        parts.extend(_shift_image(sd.limiting, cd, n, m).pieces)
    est = PolyUnion(n, parts)
    if mode == "clarke" and not est.is_empty():
        est = PolyUnion.of(union_hull(est))
    elif n == 1:
        est = est.simplify()
    return MarginalEstimate(est, mode == "convex", certified, reps, val)


def _cq_marginal(horizon: VCone, g: SetMap, point) -> bool:
    nc = limiting_normal_cone(g.graph, point).negate()
    return all(p.is_zero() for p in horizon.intersect(nc).pieces)


# -- filtered chain (counterexample probe) ---------------------------------------------------------


def _filter_polyhedron(g_val: PolyUnion, ybar) -> Polyhedron:
    """``{q : <q, ybar - y'> <= 0 for all y' in G(xbar)}``."""
    d = g_val.dim
    ins, eqs = [], []
    for p in g_val.pieces:
        pts, rays, lines = p.generators()
        for y in pts:
            ins.append((tuple(a - b for a, b in zip(ybar, y)), ZERO))
        for r in rays:
            ins.append((tuple(-x for x in r), ZERO))
        for l in lines:
            eqs.append((l, ZERO))
    return Polyhedron(d, tuple(ins), tuple(eqs))


def wp_filtered_chain(f: SetMap, g: SetMap, xbar: Sequence, zbar: Sequence, r: Sequence) -> PolyUnion:
    """Right-hand side of the would-be chain rule with a maximum-principle filter.

    Union over intermediate y of ``co D*G(x|y)(q)`` for ``q`` in
    ``co D*F(y|z)(r)`` with ``<q, y - y'> <= 0`` for every ``y'`` in ``G(x)``.
    This is *not* an upper bound in general.
    """
    xbar, zbar, r = vec(xbar), vec(zbar), vec(r)
    _, reps = intermediate_points(f, g, xbar, zbar)
    g_val = eval_map(g, xbar)
    out = []
    for y in reps:
        qs = coderivative(f, y, zbar, "convexified").apply(r)
        allowed = qs.intersect(_filter_polyhedron(g_val, y))
        if allowed.is_empty():
            continue
        cg = coderivative(g, xbar, y, "convexified").as_map()
        for q in allowed.pieces:
            lifted = q.lift(g.m + g.n, range(g.m))
            for piece in cg.graph.pieces:
                out.append(piece.intersect(lifted).project(range(g.m, g.m + g.n)))
    res = PolyUnion(g.n, out)
    return res.simplify() if g.n == 1 else res
