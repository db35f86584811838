"""Set-valued maps ``S: R^n => R^m`` stored as the polyhedral union of their graph.

Graph coordinates are ordered inputs first, then outputs.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Sequence

from .polygeom import (ConePiece, DimensionError, PolyUnion, Polyhedron, VCone,
                       point_distance_sq, union_hull)
from .polygeom._fm import project as _fm_project
from .polygeom._linalg import ONE, ZERO, norm2, vec

DEFAULT_BUDGET = 10_000


class PieceBudgetError(RuntimeError):
    def __init__(self, count: int | None = None, budget: int | None = None):
        detail = f" ({count} > {budget})" if count is not None else ""
        super().__init__("piece budget exceeded" + detail)


def check_budget(count: int, budget: int | None):
    if budget is not None and count > budget:
        raise PieceBudgetError(count, budget)


class SetMap:
    """A set-valued map given by its graph.

    With ``hull_values`` set, :meth:`eval` returns the convex hull of each
    value; this is how value-convexification is carried for output dimension
    above one, where the hulled graph is not materialised.
    """

    __slots__ = ("n", "m", "graph", "name", "hull_values")

    def __init__(self, n: int, m: int, graph: PolyUnion | Iterable[Polyhedron], name: str = "",
                 hull_values: bool = False):
        if not isinstance(graph, PolyUnion):
            graph = PolyUnion(n + m, graph)
        if graph.dim != n + m:
            raise DimensionError(f"graph of dimension {graph.dim} for a map R^{n} => R^{m}")
        self.n, self.m, self.graph, self.name = n, m, graph, name
        self.hull_values = hull_values

    # -- constructors ---------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "SetMap":
        return cls.affine([[1 if i == j else 0 for j in range(n)] for i in range(n)], name="id")

    @classmethod
    def affine(cls, mat: Sequence[Sequence], offset: Sequence | None = None, name: str = "") -> "SetMap":
        """Single-valued ``x -> mat x + offset``."""
        mat = [vec(r) for r in mat]
        m, n = len(mat), len(mat[0])
        off = vec(offset) if offset is not None else (ZERO,) * m
        eqs = []
        for i in range(m):
            row = list(mat[i]) + [ZERO] * m
            row[n + i] = Fraction(-1)
            eqs.append((tuple(row), -off[i]))
        return cls(n, m, [Polyhedron(n + m, (), tuple(eqs))], name)

    @classmethod
    def constant(cls, n: int, value: PolyUnion, name: str = "") -> "SetMap":
        """``x -> value`` for every x."""
        m = value.dim
        return cls(n, m, [p.lift(n + m, range(n, n + m)) for p in value.pieces], name)

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"SetMap{label}(R^{self.n} => R^{self.m}, pieces={len(self.graph)})"

    def __eq__(self, other):
        if not isinstance(other, SetMap):
            return NotImplemented
        return (self.n, self.m, self.hull_values) == (other.n, other.m, other.hull_values) \
            and self.graph == other.graph

    __hash__ = None

    # -- queries --------------------------------------------------------------

    def eval(self, x: Sequence) -> PolyUnion:
        return eval_map(self, x)

    __call__ = eval

    def domain(self) -> PolyUnion:
        return self.graph.project(range(self.n))

    def contains(self, x: Sequence, y: Sequence) -> bool:
        return self.graph.contains(tuple(vec(x)) + tuple(vec(y)))

    def is_graph_convex(self) -> bool:
        if len(self.graph) <= 1:
            return True
        return PolyUnion.of(union_hull(self.graph)) <= self.graph

    def is_homogeneous(self) -> bool:
        """Graph is a union of cones with apex at the origin."""
        return all(p.is_cone() for p in self.graph.pieces)


def eval_map(s: SetMap, x: Sequence) -> PolyUnion:
    """The value set ``S(x)``."""
    x = vec(x)
    if len(x) != s.n:
        raise DimensionError(f"point of length {len(x)} for a map on R^{s.n}")
    val = s.graph.slice(range(s.n), x)
    if s.hull_values and not val.is_empty():
        return PolyUnion.of(union_hull(val))
    return val


def compose(s2: SetMap, s1: SetMap, budget: int | None = DEFAULT_BUDGET) -> SetMap:
    """Graph of ``S2 o S1``: ``x -> union of S2(y) over y in S1(x)``."""
    if s1.m != s2.n:
        raise DimensionError(f"cannot compose R^{s2.n} => R^{s2.m} after R^{s1.n} => R^{s1.m}")
    for s in (s1, s2):
        if s.hull_values and s.m > 1:
            raise NotImplementedError("composition with lazily hulled values (output dimension > 1)")
    n, k, m = s1.n, s1.m, s2.m
    total = n + k + m
    keep = list(range(n)) + list(range(n + k, total))
    pieces = []
    for p1 in s1.graph.pieces:
        a = p1.lift(total, range(n + k))
        for p2 in s2.graph.pieces:
            b = p2.lift(total, range(n, total))
            both = a.intersect(b)
            res = _fm_project(total, list(both.equalities),
                              [(r, c, False) for r, c in both.inequalities], keep)
            if res is None:
                continue
            e, i = res
            pieces.append(Polyhedron(n + m, tuple((r, c) for r, c, _ in i), tuple(e)))
            check_budget(len(pieces), budget)
    name = f"{s2.name}o{s1.name}" if s1.name and s2.name else ""
    return SetMap(n, m, pieces, name)


def step_map(f: SetMap, dt) -> SetMap:
    """Graph of ``x -> x + dt F(x)``."""
    dt = Fraction(dt)
    if dt <= 0:
        raise ValueError("step size must be positive")
    if f.n != f.m:
        raise DimensionError("step map needs F: R^n => R^n")
    n = f.n
    # (x, v) = (x, (y - x)/dt) as a linear function of (x, y)
    mat = []
    for i in range(n):
        mat.append(tuple(ONE if j == i else ZERO for j in range(2 * n)))
    for i in range(n):
        row = [ZERO] * (2 * n)
        row[i] = -1 / dt
        row[n + i] = 1 / dt
        mat.append(tuple(row))
    pieces = [p.linear_preimage(mat) for p in f.graph.pieces]
    return SetMap(n, n, pieces, f"M[{f.name}]" if f.name else "", f.hull_values)


def inverse(s: SetMap) -> SetMap:
    """Graph with input and output swapped."""
    n, m = s.n, s.m
    # new coordinates (y, x); graph membership is tested on the old order (x, y)
    perm = [tuple(ONE if j == (m + k if k < n else k - n) else ZERO for j in range(n + m))
            for k in range(n + m)]
    return SetMap(m, n, [p.linear_preimage(perm) for p in s.graph.pieces],
                  f"{s.name}^-1" if s.name else "")


# -- value convexification ---------------------------------------------------------


def _bound_rows(p: Polyhedron, n: int):
    """Split rows of a graph piece (output dim 1) into domain, lower and upper rows."""
    rows = list(p.inequalities)
    for a, b in p.equalities:
        rows += [(a, b), (tuple(-x for x in a), -b)]
    dom, lower, upper = [], [], []
    for a, b in rows:
        if a[n] > 0:
            upper.append((a, b))
        elif a[n] < 0:
            lower.append((a, b))
        else:
            dom.append((a, b))
    return lower, upper


def convexify_values(s: SetMap) -> SetMap:
    """Map ``x -> conv S(x)``.

    Exact graph for output dimension 1: the hull of ``S(x)`` is the union,
    over piece pairs ``(i, j)`` whose domains both contain x, of the interval
    from the lower end of piece i to the upper end of piece j. For larger
    output dimension the hull is taken at evaluation time.
    """
    if s.m != 1:
        return SetMap(s.n, s.m, s.graph, s.name, hull_values=True)
    n = s.n
    doms = [p.project(range(n)).lift(n + 1, range(n)) for p in s.graph.pieces]
    bounds = [_bound_rows(p, n) for p in s.graph.pieces]
    pieces = []
    for i, j in product(range(len(doms)), repeat=2):
        lower = bounds[i][0]
        upper = bounds[j][1]
        dom = doms[i].intersect(doms[j])
        pieces.append(dom.add_constraints(tuple(lower) + tuple(upper)))
    out = SetMap(n, 1, pieces, f"co {s.name}" if s.name else "")
    return SetMap(n, 1, out.graph.simplify() if n == 1 else out.graph, out.name)


# -- outer norm --------------------------------------------------------------------


@dataclass(frozen=True)
class OuterNorm:
    """Outer norm value; ``exact`` False means a lower bound.

    ``squared`` is the exact rational square when finite.
    """

    value: Fraction | float
    exact: bool
    squared: Fraction | None = None

    @property
    def infinite(self) -> bool:
        return self.value == math.inf


def _root(q: Fraction) -> Fraction | float:
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return math.sqrt(q)


def outer_norm(h: SetMap) -> OuterNorm:
    """``sup { |z| : z in H(w), |w| <= 1 }`` for a positively homogeneous H.

    Euclidean norms on both sides. Exact for input dimension 1 (maximum over
    the vertices of the unit slices); for larger input dimension the maximum
    over extreme rays is a lower bound.
    """
    if not h.is_homogeneous():
        raise ValueError("outer norm needs a positively homogeneous map (cone graph)")
    n, m = h.n, h.m
    best = ZERO
    zero_in = [tuple(ONE if j == i else ZERO for j in range(n + m)) for i in range(n)]
    for p in h.graph.pieces:
        cone = ConePiece.from_polyhedron(p)
        vertical = ConePiece.from_halfspaces(n + m, cone.halfspaces, cone.hyperplanes + tuple(zero_in))
        if not vertical.is_zero():
            return OuterNorm(math.inf, True)
        if n == 1:
            for w in (ONE, -ONE):
                for v in p.slice([0], [w]).vertices():
                    best = max(best, norm2(v))
        else:
            gens = list(cone.rays) + list(cone.lines)
            for g in gens:
                best = max(best, norm2(g[n:]) / norm2(g[:n]))
    return OuterNorm(_root(best), n == 1, best)


@dataclass
class PrefanCheckReport:
    """Verdicts on the prefan conditions; failures carry a witness input."""

    positively_homogeneous: bool
    values_convex_compact: bool
    outer_norm: OuterNorm | None
    witness: tuple | None = None

    @property
    def ok(self) -> bool:
        return (self.positively_homogeneous and self.values_convex_compact
                and self.outer_norm is not None and not self.outer_norm.infinite)


def check_prefan(h: SetMap, probes: Sequence[Sequence] | None = None) -> PrefanCheckReport:
    """Check homogeneity, convex compact nonempty values on probe inputs, finite outer norm."""
    if not h.is_homogeneous():
        return PrefanCheckReport(False, False, None, None)
    if probes is None:
        probes = [tuple(s * (ONE if j == i else ZERO) for j in range(h.n))
                  for i in range(h.n) for s in (ONE, -ONE)] + [(ZERO,) * h.n]
    for w in probes:
        val = eval_map(h, w)
        if val.is_empty() or not val.is_bounded():
            return PrefanCheckReport(True, False, outer_norm(h), tuple(vec(w)))
        if not PolyUnion.of(union_hull(val)) <= val:
            return PrefanCheckReport(True, False, outer_norm(h), tuple(vec(w)))
    return PrefanCheckReport(True, True, outer_norm(h))


# -- sampled H-differentiability -------------------------------------------------------


@dataclass
class HDiffReport:
    """``passed`` is evidence only; a failure is a proof with ``witness = (x, x2, y)``."""

    passed: bool
    checked: int
    radii: tuple
    witness: tuple | None = None

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def _minkowski(a: PolyUnion, b: PolyUnion) -> PolyUnion:
    return PolyUnion(a.dim, [p.minkowski_sum(q) for p in a.pieces for q in b.pieces])


def _test_points(val: PolyUnion) -> list:
    pts = []
    for p in val.pieces:
        pts += list(p.vertices())
        ip = p.interior_point()
        if ip is not None:
            pts.append(ip)
    return sorted(set(pts))


def check_h_diff(s: SetMap, xbar: Sequence, ybar: Sequence, h: SetMap, delta,
                 radii: Sequence = (Fraction(1, 4), Fraction(1, 16), Fraction(1, 64)),
                 samples: int = 20, seed: int = 0, grid: int = 16) -> HDiffReport:
    """Sampled test of ``S(x) n V  c  S(x2) + H(x - x2) + delta |x - x2| B``.

    Pairs ``x, x2`` are drawn from a rational grid in the box of each radius
    around ``xbar``, and V is the box of the same radius around ``ybar``.
    Each test point y is a vertex or relative-interior point of ``S(x) n V``.
    """
    xbar, ybar = vec(xbar), vec(ybar)
    if not s.contains(xbar, ybar):
        raise ValueError("base point is not on the graph")
    delta = Fraction(delta)
    rng = random.Random(seed)
    checked = 0
    radii = tuple(Fraction(r) for r in radii)
    for r in radii:
        box = Polyhedron.box([c - r for c in ybar], [c + r for c in ybar])

        def draw():
            return tuple(c + r * Fraction(rng.randint(-grid, grid), grid) for c in xbar)
        for _ in range(samples):
            x, x2 = draw(), draw()
            if x == x2:
                continue
            w = tuple(a - b for a, b in zip(x, x2))
            near = eval_map(s, x).intersect(box)
            if near.is_empty():
                continue
            target = _minkowski(eval_map(s, x2), eval_map(h, w))
            slack = delta * delta * norm2(w)
            for y in _test_points(near):
                checked += 1
                if target.is_empty() or min(point_distance_sq(y, q) for q in target.pieces) > slack:
                    return HDiffReport(False, checked, radii, (x, x2, y))
    return HDiffReport(True, checked, radii)
