"""Pompeiu-Hausdorff distance between bounded polyhedral unions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from ._linalg import Vec, dot, norm2, project_onto_affine, sub, vec
from .polyhedron import DimensionError, PolyUnion, Polyhedron, merged_intervals


class UnboundedSetError(ValueError):
    def __init__(self):
        super().__init__("unbounded set")


@dataclass(frozen=True)
class Distance:
    """A distance value; ``exact`` is False when it is only a lower bound.

    ``squared`` holds the exact square when the value is the root of a rational.
    """

    value: Fraction | float
    exact: bool
    squared: Fraction | None = None

    def __float__(self):
        return float(self.value)


def _sqrt_rat(q: Fraction) -> Fraction | float:
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return math.sqrt(q)


def _excess_1d(a, b) -> Fraction:
    """``sup_{s in A} dist(s, B)`` for sorted disjoint closed intervals."""
    def dist(s):
        best = None
        for lo, hi in b:
            d = lo - s if s < lo else (s - hi if s > hi else Fraction(0))
            best = d if best is None or d < best else best
        return best
    cands = [x for iv in a for x in iv]
    for (_, h1), (l2, _) in zip(b, b[1:]):
        mid = (h1 + l2) / 2
        if any(lo <= mid <= hi for lo, hi in a):
            cands.append(mid)
    return max(dist(s) for s in cands)


def nearest_point(z: Sequence, p: Polyhedron) -> Vec:
    """Exact Euclidean projection of a point onto a nonempty polyhedron.

    The nearest point is the projection onto the affine hull of some face, so
    it suffices to try every face given by at most ``dim`` tight rows.
    """
    z = vec(z)
    c = p.canonical()
    if c.is_empty:
        raise ValueError("projection onto an empty set")
    if c.contains(z):
        return z
    eq_a = [a for a, _ in c.equalities]
    eq_b = [b for _, b in c.equalities]
    ins = list(c.inequalities)
    best, arg = None, None
    for k in range(0, min(len(ins), p.dim) + 1):
        for sub_rows in combinations(ins, k):
            q = project_onto_affine(z, eq_a + [a for a, _ in sub_rows], eq_b + [b for _, b in sub_rows])
            if q is None or not c.contains(q):
                continue
            d = norm2(sub(z, q))
            if best is None or d < best:
                best, arg = d, q
    if arg is None:  # pragma: no cover - some face always holds the projection
        raise RuntimeError("projection search failed")
    return arg


def point_distance_sq(z: Sequence, p: Polyhedron) -> Fraction:
    """Exact squared Euclidean distance from a point to a nonempty polyhedron."""
    z = vec(z)
    return norm2(sub(z, nearest_point(z, p)))


def _vertex_excess_sq(a: PolyUnion, b: PolyUnion) -> Fraction:
    best = Fraction(0)
    for p in a.pieces:
        for v in p.vertices():
            d = min(point_distance_sq(v, q) for q in b.pieces)
            best = max(best, d)
    return best


def _support(u: PolyUnion, dirs: np.ndarray) -> np.ndarray:
    verts = np.array([[float(x) for x in v] for p in u.pieces for v in p.vertices()])
    return (dirs @ verts.T).max(axis=1)


def hausdorff(u1: PolyUnion, u2: PolyUnion, dirs: int = 64, seed: int = 0) -> Distance:
    """Hausdorff distance between two bounded unions.

    Exact in dimension 1. In higher dimension a lower bound is returned: the
    larger of sampled support-function gaps and exact vertex-to-set distances.
    """
    if u1.dim != u2.dim:
        raise DimensionError(f"dimension mismatch: {u1.dim} vs {u2.dim}")
    if not u1.is_bounded() or not u2.is_bounded():
        raise UnboundedSetError()
    if u1.is_empty() or u2.is_empty():
        if u1.is_empty() and u2.is_empty():
            return Distance(Fraction(0), True, Fraction(0))
        return Distance(math.inf, True)
    if u1.dim == 1:
        a, b = merged_intervals(u1), merged_intervals(u2)
        d = max(_excess_1d(a, b), _excess_1d(b, a))
        return Distance(d, True, d * d)
    sq = max(_vertex_excess_sq(u1, u2), _vertex_excess_sq(u2, u1))
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((dirs, u1.dim))
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    gap = float(np.abs(_support(u1, y) - _support(u2, y)).max()) if dirs > 0 else 0.0
    exact_part = _sqrt_rat(sq)
    if gap > float(exact_part):
        return Distance(gap, False)
    return Distance(exact_part, False, sq)
