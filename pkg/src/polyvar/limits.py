"""Diagnostics for the passage from discrete inclusions to the continuous limit.

The continuous reachable set and adjoint set are never computed here: a
reference set has to be supplied (a closed form, or a fine discretisation
labelled as a proxy).
"""
from __future__ import annotations

import random
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .inclusion import DiscreteInclusion, FeasiblePath, adjoint_reachable_pi, reachable
from .polygeom import (Distance, PolyUnion, Polyhedron, hausdorff, nearest_point, union_hull)
from .polygeom._linalg import add, norm2, scale, sub, vec
from .setmaps import DEFAULT_BUDGET


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def decimal(x, digits: int = 12) -> str:
    """Decimal rendering with ``digits`` significant digits."""
    return f"{float(x):.{digits}g}"


@dataclass(frozen=True)
class InterpolatedPath:
    """Piecewise-linear path through discrete states at times ``j dt``."""

    times: tuple
    values: tuple

    @property
    def T(self) -> Fraction:
        return self.times[-1]

    def __call__(self, t) -> tuple:
        t = Fraction(t)
        if not 0 <= t <= self.T:
            raise ValueError(f"time {t} outside [0, {self.T}]")
        j = min(bisect_right(self.times, t) - 1, len(self.times) - 2)
        t0, t1 = self.times[j], self.times[j + 1]
        a = (t - t0) / (t1 - t0)
        return add(scale(a, self.values[j + 1]), scale(1 - a, self.values[j]))

    def derivative(self, t) -> tuple:
        """Slope on the open interval containing ``t``; undefined at breakpoints."""
        t = Fraction(t)
        if not 0 < t < self.T or t in self.times:
            raise ValueError(f"derivative is only defined inside the open intervals, not at {t}")
        j = bisect_right(self.times, t) - 1
        dt = self.times[j + 1] - self.times[j]
        return scale(1 / dt, sub(self.values[j + 1], self.values[j]))

    def interval_index(self, t) -> int:
        return bisect_right(self.times, Fraction(t)) - 1


def interpolate(path: FeasiblePath, T) -> InterpolatedPath:
    T = Fraction(T)
    N = len(path.states) - 1
    if N * path.dt != T:
        raise ValueError("horizon does not match the path's step size")
    return InterpolatedPath(tuple(k * path.dt for k in range(N + 1)), tuple(path.states))


# -- convergence tables ---------------------------------------------------------------------


@dataclass
class ConvergenceRow:
    N: int
    distance: Distance


@dataclass
class ConvergenceTable:
    rows: list
    reference_label: str = "reference"

    def strictly_decreasing(self) -> bool:
        ds = [float(r.distance.value) for r in self.rows]
        return all(b < a for a, b in zip(ds, ds[1:]))

    def render(self, fmt: str = "text") -> str:
        if fmt == "csv":
            out = ["N,distance_exact,distance_decimal,exact"]
            for r in self.rows:
                d = r.distance
                ex = _fmt(d.value) if isinstance(d.value, Fraction) else ""
                out.append(f"{r.N},{ex},{decimal(d.value)},{'yes' if d.exact else 'no'}")
            return "\n".join(out) + "\n"
        out = [f"{'N':>8}  {'d_N':>20}  exact  ({self.reference_label})"]
        for r in self.rows:
            d = r.distance
            out.append(f"{r.N:>8}  {decimal(d.value):>20}  {'yes' if d.exact else 'no ':>5}")
        return "\n".join(out) + "\n"


def hausdorff_convergence(di: DiscreteInclusion, Ns: Sequence[int], x0: Sequence,
                          reference: PolyUnion, label: str = "reference",
                          budget: int | None = DEFAULT_BUDGET) -> ConvergenceTable:
    """``d(reference, R_N(x0))`` for each N; monotonicity is reported, not assumed."""
    rows = []
    for N in Ns:
        r = reachable(di.with_steps(N), x0, budget)
        rows.append(ConvergenceRow(N, hausdorff(reference, r)))
    return ConvergenceTable(rows, label)


# -- stability of the adjoint-reachable set -----------------------------------------------------------


def snap(point: Sequence, target: PolyUnion) -> tuple[tuple, Fraction]:
    """Nearest point of a union and the squared snap distance."""
    best = None
    for p in target.pieces:
        q = nearest_point(point, p)
        d = norm2(sub(vec(point), q))
        if best is None or d < best[1] or (d == best[1] and q < best[0]):
            best = (q, d)
    if best is None:
        raise ValueError("cannot snap onto an empty set")
    return best


@dataclass
class PiCell:
    N: int
    delta: Fraction
    hull: Polyhedron | None
    max_snap_sq: Fraction
    samples: int


@dataclass
class PiStabilityReport:
    cells: list
    intersection: Polyhedron | None
    finest: PolyUnion
    finest_N: int

    def render(self) -> str:
        out = []
        for c in self.cells:
            h = _show(c.hull)
            out.append(f"N>={c.N} delta={_fmt(c.delta)} hull={h} max_snap^2={_fmt(c.max_snap_sq)}")
        out.append(f"intersection={_show(self.intersection)}")
        out.append(f"Pi at N={self.finest_N}: {self.finest}")
        return "\n".join(out) + "\n"


def _show(h: Polyhedron | None) -> str:
    if h is None:
        return "empty"
    return str(PolyUnion.of(h))


def pi_stability(di: DiscreteInclusion, xbar: Sequence, ybar: Sequence, v: Sequence,
                 Ns: Sequence[int], deltas: Sequence, samples: int = 4, seed: int = 0,
                 mode: str = "vertex", budget: int | None = DEFAULT_BUDGET) -> PiStabilityReport:
    """Hulls of adjoint-reachable sets over perturbed endpoints and step counts.

    Cell ``(N, delta)`` is the hull of ``Pi_i(x, y, v)`` over ``i`` in ``Ns``
    with ``i >= N`` and endpoints within ``delta`` (box) of ``(xbar, ybar)``;
    each perturbed ``y`` is snapped onto ``R_i(x)`` first. The unperturbed
    endpoints are always among the samples.
    """
    xbar, ybar = vec(xbar), vec(ybar)
    Ns = sorted(Ns)
    rng = random.Random(seed)
    cells = []
    cache: dict = {}
    for N in Ns:
        for delta in deltas:
            delta = Fraction(delta)
            pts, worst, count = [], Fraction(0), 0
            for i in [k for k in Ns if k >= N]:
                dii = di.with_steps(i)
                offsets = [(0,) * (2 * di.n)]
                for _ in range(samples):
                    offsets.append(tuple(rng.randint(-8, 8) for _ in range(2 * di.n)))
                for off in offsets:
                    x = tuple(c + delta * Fraction(o, 8) for c, o in zip(xbar, off[:di.n]))
                    y = tuple(c + delta * Fraction(o, 8) for c, o in zip(ybar, off[di.n:]))
                    key = (i, x, y)
                    if key not in cache:
                        reach = reachable(dii, x, budget)
                        ys, dsq = snap(y, reach)
                        cache[key] = (adjoint_reachable_pi(dii, x, ys, v, mode, budget).value, dsq)
                    val, dsq = cache[key]
                    worst = max(worst, dsq)
                    count += 1
                    pts.extend(val.pieces)
            u = PolyUnion(di.n, pts)
            cells.append(PiCell(N, delta, union_hull(u) if not u.is_empty() else None, worst, count))
    inter = None
    empty = False
    for c in cells:
        if c.hull is None:
            empty = True
            break
        inter = c.hull if inter is None else inter.intersect(c.hull)
    if empty or (inter is not None and inter.is_empty):
        inter = None
    else:
        inter = inter.canonical()
    finest_N = Ns[-1]
    finest = adjoint_reachable_pi(di.with_steps(finest_N), xbar, ybar, v, mode, budget).value
    return PiStabilityReport(cells, inter, finest, finest_N)


# -- nested hulls ----------------------------------------------------------------------------------


class NotNestedError(ValueError):
    pass


@dataclass
class NestedHullVerdict:
    equal: bool
    hull_of_intersection: Polyhedron | None
    intersection_of_hulls: Polyhedron | None


def nested_hull_check(family: Sequence[PolyUnion], require_nested: bool = True) -> NestedHullVerdict:
    """Compare ``co (A_1 n ... n A_k)`` with ``co A_1 n ... n co A_k``.

    Only a finite prefix can be checked; the limit statement is not claimed.
    """
    family = list(family)
    if not family:
        raise ValueError("empty family")
    for a in family:
        if not a.is_bounded():
            raise ValueError("unbounded set")
    if require_nested:
        for a, b in zip(family, family[1:]):
            if not b <= a:
                raise NotNestedError("family is not nested (decreasing)")
    inter = family[0]
    for a in family[1:]:
        inter = inter.intersect(a)
    lhs = union_hull(inter).canonical() if not inter.is_empty() else None
    rhs = None
    for a in family:
        if a.is_empty():
            rhs = None
            break
        h = union_hull(a)
        rhs = h if rhs is None else rhs.intersect(h)
    else:
        rhs = None if rhs is None or rhs.is_empty else rhs.canonical()
    return NestedHullVerdict(lhs == rhs, lhs, rhs)
