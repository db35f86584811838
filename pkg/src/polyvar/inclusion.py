"""Discrete inclusions ``x_k in x_{k-1} + dt F_{k-1}(x_{k-1})`` and their adjoints.

Costates are propagated backwards through the step-map coderivatives
``D*M(x|y)(p) = p + dt D*F(x|(y - x)/dt)(p)``; everything is exact.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .chainrules import _shift_image
from .polygeom import PolyUnion, Polyhedron, VCone
from .polygeom import _fm
from .polygeom._linalg import ONE, ZERO, Vec, add, scale, sub, vec
from .setmaps import DEFAULT_BUDGET, SetMap, check_budget, compose, eval_map, step_map
from .varcones import CoderivAtPoint, PiecewiseAffine, coderivative, face_points, subdifferential


class DiscreteInclusion:
    """Horizon ``T``, ``N`` steps of size ``dt = T/N`` and per-step dynamics."""

    __slots__ = ("n", "T", "N", "dt", "_dyn")

    def __init__(self, dynamics: SetMap | Sequence[SetMap], T, N: int):
        T = Fraction(T)
        if T <= 0 or N < 1:
            raise ValueError("horizon must be positive and steps at least 1")
        if isinstance(dynamics, SetMap):
            dyn = (dynamics,) * N
        else:
            dyn = tuple(dynamics)
            if len(dyn) != N:
                raise ValueError(f"{len(dyn)} dynamics maps for {N} steps")
        n = dyn[0].n
        for f in dyn:
            if f.n != n or f.m != n:
                raise ValueError("dynamics must map R^n into R^n with a common n")
        self.n, self.T, self.N, self.dt, self._dyn = n, T, N, T / N, dyn

    def dynamics(self, k: int) -> SetMap:
        """``F_{k,N}``, used on the step from ``x_k`` to ``x_{k+1}``."""
        return self._dyn[k]

    def step(self, k: int) -> SetMap:
        return step_map(self._dyn[k], self.dt)

    def with_steps(self, N: int) -> "DiscreteInclusion":
        if len({id(f) for f in self._dyn}) != 1:
            raise ValueError("only time-invariant dynamics can change the step count")
        return DiscreteInclusion(self._dyn[0], self.T, N)

    def __repr__(self):
        return f"DiscreteInclusion(n={self.n}, T={self.T}, N={self.N})"


@dataclass(frozen=True)
class FeasiblePath:
    states: tuple
    dt: Fraction

    @property
    def velocities(self) -> tuple:
        return tuple(scale(1 / self.dt, sub(b, a)) for a, b in zip(self.states, self.states[1:]))

    def is_feasible(self, di: DiscreteInclusion) -> bool:
        if len(self.states) != di.N + 1 or self.dt != di.dt:
            return False
        return all(di.dynamics(k).contains(self.states[k], v) for k, v in enumerate(self.velocities))

    def __repr__(self):
        body = ", ".join("(" + " ".join(_fmt(c) for c in s) + ")" for s in self.states)
        return f"FeasiblePath[{body}]"


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# -- reachable sets ---------------------------------------------------------------------------


def _image(u: PolyUnion, s: SetMap, budget) -> PolyUnion:
    n, m = s.n, s.m
    out = []
    for p in u.pieces:
        lifted = p.lift(n + m, range(n))
        for q in s.graph.pieces:
            out.append(q.intersect(lifted).project(range(n, n + m)))
            check_budget(len(out), budget)
    res = PolyUnion(m, out)
    return res.simplify() if m == 1 else res


def reachable(di: DiscreteInclusion, x0: Sequence, budget: int | None = DEFAULT_BUDGET) -> PolyUnion:
    """``R_N(x0)`` by propagating the exact image through every step map."""
    u = PolyUnion.points([vec(x0)])
    for k in range(di.N):
        u = _image(u, di.step(k), budget)
    return u


def reachable_graph(di: DiscreteInclusion, budget: int | None = DEFAULT_BUDGET,
                    fold: str = "left") -> SetMap:
    """Graph of ``R_N = M_{N-1} o ... o M_0``; ``fold`` picks the bracketing."""
    steps = [di.step(k) for k in range(di.N)]
    if fold == "left":
        r = steps[0]
        for s in steps[1:]:
            r = _tidy(compose(s, r, budget))
    else:
        r = steps[-1]
        for s in reversed(steps[:-1]):
            r = _tidy(compose(r, s, budget))
    return r


def _tidy(s: SetMap) -> SetMap:
    return SetMap(s.n, s.m, s.graph.simplify(), s.name)


# -- path enumeration -----------------------------------------------------------------------


def _point_value(val: PolyUnion) -> list:
    pts = []
    for p in val.pieces:
        v = p.vertices()
        if len(v) != 1 or not p.is_bounded():
            raise ValueError("finite mode needs dynamics made of single-valued affine selections")
        pts.append(v[0])
    return pts


def _finite_paths(di: DiscreteInclusion, x0, xN, budget) -> list:
    frontier = [(vec(x0),)]
    for k in range(di.N):
        nxt = set()
        for states in frontier:
            x = states[-1]
            for v in _point_value(eval_map(di.dynamics(k), x)):
                nxt.add(states + (add(x, scale(di.dt, v)),))
        frontier = sorted(nxt)
        check_budget(len(frontier), budget)
    return [FeasiblePath(s, di.dt) for s in frontier if s[-1] == vec(xN)]


def path_polyhedron(di: DiscreteInclusion, x0, xN, seq: Sequence[int]) -> Polyhedron:
    """States ``(x_0, ..., x_N)`` with step k using graph piece ``seq[k]``."""
    n, N, dt = di.n, di.N, di.dt
    dim = n * (N + 1)
    ins, eqs = [], []
    for k, j in enumerate(seq):
        piece = di.dynamics(k).graph.pieces[j]
        # (x, v) = (x_k, (x_{k+1} - x_k)/dt)
        mat = []
        for i in range(n):
            row = [ZERO] * dim
            row[k * n + i] = ONE
            mat.append(tuple(row))
        for i in range(n):
            row = [ZERO] * dim
            row[k * n + i] = -1 / dt
            row[(k + 1) * n + i] = 1 / dt
            mat.append(tuple(row))
        pulled = piece.linear_preimage(mat)
        ins += pulled.inequalities
        eqs += pulled.equalities
    for i in range(n):
        e0 = [ZERO] * dim
        e0[i] = ONE
        eqs.append((tuple(e0), vec(x0)[i]))
        eN = [ZERO] * dim
        eN[N * n + i] = ONE
        eqs.append((tuple(eN), vec(xN)[i]))
    return Polyhedron(dim, tuple(ins), tuple(eqs))


def _split(z: Vec, n: int) -> tuple:
    return tuple(tuple(z[i:i + n]) for i in range(0, len(z), n))


def _sequences(di: DiscreteInclusion, budget):
    counts = [len(di.dynamics(k).graph.pieces) for k in range(di.N)]
    total = 1
    for c in counts:
        total *= c
    check_budget(total, budget)
    return product(*[range(c) for c in counts])


def enumerate_paths(di: DiscreteInclusion, x0: Sequence, xN: Sequence, mode: str = "finite",
                    samples: int = 8, seed: int = 0, budget: int | None = DEFAULT_BUDGET) -> list:
    """Feasible paths from ``x0`` to ``xN``.

    ``finite``: exhaustive, for dynamics made of single-valued selections.
    ``vertex``: every vertex of each path polyhedron plus one relative-interior path.
    ``sampled``: random convex combinations of those vertices (seeded).
    Only ``finite`` is exhaustive; the other modes give a partial list.
    """
    if mode == "finite":
        return _finite_paths(di, x0, xN, budget)
    if mode not in ("vertex", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    found = set()
    for seq in _sequences(di, budget):
        p = path_polyhedron(di, x0, xN, seq)
        if p.is_empty:
            continue
        verts = list(p.vertices())
        if mode == "vertex":
            found.update(verts)
            found.add(p.interior_point())
        else:
            found.add(p.interior_point())
            for _ in range(samples):
                w = [Fraction(rng.randint(0, 16)) for _ in verts]
                tot = sum(w) or ONE
                if not sum(w):
                    w[0] = ONE
                z = tuple(sum((wi * v[c] for wi, v in zip(w, verts)), ZERO) / tot
                          for c in range(p.dim))
                found.add(z)
        check_budget(len(found), budget)
    return [FeasiblePath(_split(z, di.n), di.dt) for z in sorted(found)]


# -- coderivatives along paths -----------------------------------------------------------------


def step_coderiv_map(f: SetMap, dt, x: Sequence, v: Sequence, kind: str = "limiting") -> SetMap:
    """``p -> p + dt D*F(x|v)(p)`` as a cone map (graph in (p, q) coordinates)."""
    dt = Fraction(dt)
    d = coderivative(f, x, v, kind)
    n = f.n
    mat = [tuple(ONE if j == i else ZERO for j in range(2 * n)) for i in range(n)]
    for i in range(n):
        row = [ZERO] * (2 * n)
        row[i] = ONE
        row[n + i] = dt
        mat.append(tuple(row))
    cone = d.cone.linear_image(mat)
    return SetMap(n, n, cone.to_polyunion())


def path_coderiv(di: DiscreteInclusion, path: FeasiblePath, budget=DEFAULT_BUDGET) -> SetMap:
    """``D*M_0(x_0|x_1) o ... o D*M_{N-1}(x_{N-1}|x_N)`` along one path."""
    vel = path.velocities
    maps = [step_coderiv_map(di.dynamics(k), di.dt, path.states[k], vel[k]) for k in range(di.N)]
    g = maps[-1]
    for m_ in reversed(maps[:-1]):
        g = _tidy(compose(m_, g, budget))
    return g


@dataclass
class ReachableCoderiv:
    per_path: list
    union: SetMap
    exhaustive: bool


def coderiv_reachable(di: DiscreteInclusion, x0, xN, paths: Sequence[FeasiblePath],
                      exhaustive: bool = False, budget=DEFAULT_BUDGET) -> ReachableCoderiv:
    """Union over the given paths of the composed step coderivatives."""
    per = [(p, path_coderiv(di, p, budget)) for p in paths]
    n = di.n
    union = SetMap(n, n, PolyUnion(2 * n, [q for _, g in per for q in g.graph.pieces]))
    return ReachableCoderiv(per, _tidy(union), exhaustive)


def adjoint_propagate(di: DiscreteInclusion, path: FeasiblePath, pN: Sequence,
                      budget=DEFAULT_BUDGET) -> list:
    """Costate tube ``[P_0, ..., P_N]`` with ``P_N = {pN}``; empty sets mean no costate."""
    vel = path.velocities
    tube = [PolyUnion.points([vec(pN)])]
    for k in reversed(range(di.N)):
        m_ = step_coderiv_map(di.dynamics(k), di.dt, path.states[k], vel[k])
        tube.append(_image(tube[-1], m_, budget))
    return tube[::-1]


# -- certification -----------------------------------------------------------------------------


@dataclass
class AdjointCertificate:
    path: FeasiblePath
    costates: tuple
    transversality: tuple

    def verify(self, di: DiscreteInclusion, phi: PiecewiseAffine) -> bool:
        """Re-check the adjoint recursion and the endpoint condition."""
        p, x, vel = self.costates, self.path.states, self.path.velocities
        for k in range(1, di.N + 1):
            m_ = step_coderiv_map(di.dynamics(k - 1), di.dt, x[k - 1], vel[k - 1])
            if not m_.contains(p[k], p[k - 1]):
                return False
        pair = tuple(-c for c in p[0]) + tuple(p[-1])
        sd = subdifferential(phi, tuple(x[0]) + tuple(x[-1]))
        return sd.limiting.contains(pair)

    def lines(self) -> list[str]:
        out = [f"costate {k} " + " ".join(_fmt(c) for c in pk) for k, pk in enumerate(self.costates)]
        out.append("transversality " + " ".join(_fmt(c) for c in self.transversality))
        return out


@dataclass
class Refutation:
    reason: str
    systems_checked: int


def certify_path(di: DiscreteInclusion, path: FeasiblePath, phi: PiecewiseAffine,
                 budget=DEFAULT_BUDGET) -> AdjointCertificate | Refutation:
    """Search exactly for costates meeting the adjoint recursion and transversality.

    Unknowns are ``(p_0, ..., p_N)``. For every piece of the endpoint
    subdifferential and every choice of pieces of the step coderivatives, the
    constraints form one polyhedron; the first nonempty one yields rational
    costates. If all are empty no costate sequence exists.
    """
    if not path.is_feasible(di):
        raise ValueError("path is not feasible for this inclusion")
    n, N = di.n, di.N
    dim = n * (N + 1)
    vel = path.velocities
    steps = [step_coderiv_map(di.dynamics(k), di.dt, path.states[k], vel[k]) for k in range(N)]
    sd = subdifferential(phi, tuple(path.states[0]) + tuple(path.states[-1]))
    checked = 0

    def place(p: Polyhedron, coords: list[int]) -> tuple[list, list]:
        lifted = p.lift(dim, coords)
        return list(lifted.equalities), [(a, b, False) for a, b in lifted.inequalities]

    def search(k, eqs, ins):
        nonlocal checked
        checked += 1
        check_budget(checked, budget)
        if not _fm.feasible(dim, eqs, ins):
            return None
        if k == 0:
            return _fm.find_point(dim, eqs, ins)
        # step k: (p_k, p_{k-1}) in graph of step map k-1
        coords = [k * n + i for i in range(n)] + [(k - 1) * n + i for i in range(n)]
        for piece in steps[k - 1].graph.pieces:
            e, i = place(piece, coords)
            z = search(k - 1, eqs + e, ins + i)
            if z is not None:
                return z
        return None

    for piece in sd.limiting.pieces:
        # (-p_0, p_N) in piece
        flip = piece.linear_preimage([tuple(-ONE if j == i else ZERO for j in range(2 * n))
                                      for i in range(n)]
                                     + [tuple(ONE if j == n + i else ZERO for j in range(2 * n))
                                        for i in range(n)])
        e, i = place(flip, list(range(n)) + [N * n + c for c in range(n)])
        z = search(N, e, i)
        if z is not None:
            costates = _split(z, n)
            pair = tuple(-c for c in costates[0]) + tuple(costates[-1])
            return AdjointCertificate(path, costates, pair)
    return Refutation("no costate sequence satisfies both the adjoint recursion and "
                      "the endpoint condition", checked)


# -- value-function subgradients and the adjoint-reachable set ---------------------------------------


@dataclass
class SubdiffEstimate:
    estimate: PolyUnion
    exact: bool
    exhaustive: bool
    endpoints: list
    value: Fraction | None


def _endpoint_reps(phi: PiecewiseAffine, x0, reach: PolyUnion) -> tuple[Fraction, list]:
    n = reach.dim
    from .chainrules import restrict
    psi = restrict(phi, x0, n)
    best, cells = None, []
    for piece in reach.pieces:
        val, arg = psi.minimize_over(piece)
        if val is None:
            continue
        if best is None or val < best:
            best, cells = val, list(arg)
        elif val == best:
            cells += arg
    if best is None:
        raise ValueError("objective is unbounded below on the reachable set")
    rows = [r for g in psi.groups for r in g]
    hyper = []
    for i, (c1, d1) in enumerate(rows):
        for c2, d2 in rows[i + 1:]:
            hyper.append((tuple(a - b for a, b in zip(c1, c2)), d2 - d1))
    reps = set()
    for cell in cells:
        for piece in reach.pieces:
            both = cell.intersect(piece)
            reps.update(face_points(n, hyper + [(a, b) for a, b in piece.inequalities],
                                    both.equalities, both.inequalities))
    return best, sorted(reps)


def subdiff_upper(di: DiscreteInclusion, phi: PiecewiseAffine, x0: Sequence, mode: str = "vertex",
                  budget=DEFAULT_BUDGET) -> SubdiffEstimate:
    """Upper estimate of the subdifferential of ``x0 -> min phi(x0, x_N)`` over reachable ``x_N``.

    Union over minimising endpoints, feasible paths and subgradient pairs
    ``(x*, y*)`` of ``x* + G(y*)`` with G the composed step coderivatives.
    ``exact`` is set when all dynamics have convex graphs and phi is convex.
    """
    x0 = vec(x0)
    n = di.n
    reach = reachable(di, x0, budget)
    val, ends = _endpoint_reps(phi, x0, reach)
    convex = phi.is_convex() and all(di.dynamics(k).is_graph_convex() for k in range(di.N))
    parts = []
    exhaustive = mode == "finite"
    for xN in ends:
        paths = enumerate_paths(di, x0, xN, mode, budget=budget)
        if convex:
            paths = paths[:1]
        sd = subdifferential(phi, x0 + xN)
        for path in paths:
            g = path_coderiv(di, path, budget)
            parts.extend(_shift_image(sd.limiting, g, n, n).pieces)
    est = PolyUnion(n, parts)
    if n == 1:
        est = est.simplify()
    return SubdiffEstimate(est, convex, exhaustive or convex, ends, val)


@dataclass
class PiResult:
    value: PolyUnion
    exhaustive: bool
    paths: int


def adjoint_reachable_pi(di: DiscreteInclusion, x: Sequence, y: Sequence, v: Sequence,
                         mode: str = "vertex", budget=DEFAULT_BUDGET) -> PiResult:
    """Initial costates of adjoint tubes ending at ``v`` over paths from x to y."""
    paths = enumerate_paths(di, x, y, mode, budget=budget)
    out = []
    for p in paths:
        out.extend(adjoint_propagate(di, p, v, budget)[0].pieces)
    res = PolyUnion(di.n, out)
    return PiResult(res.simplify() if di.n == 1 else res, mode == "finite", len(paths))
