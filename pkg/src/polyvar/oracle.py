"""Floating-point sampling oracles used to cross-check the exact kernel.

These are evidence generators: they only see H-representations of pieces
and plain sampling, never the cone machinery they are checked against.
Every routine takes an explicit seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .polygeom import PolyUnion, Polyhedron, VCone
from .polygeom._linalg import add, scale, vec
from .setmaps import eval_map
from .varcones import PiecewiseAffine, normal_cone, subdifferential

DEFAULT_RADII = (0.25, 0.0625, 0.015625)


@dataclass
class SampleReport:
    """Outcome of an oracle run; witnesses can be re-checked exactly."""

    seed: int
    radii: tuple
    tested: int
    agreements: int
    disagreements: list = field(default_factory=list)
    ambiguous: int = 0
    recovered: list = field(default_factory=list)
    detail: dict = field(default_factory=dict)

    @property
    def agreement_rate(self) -> float:
        return self.agreements / self.tested if self.tested else 1.0

    def render(self) -> str:
        out = [f"seed {self.seed}", "radii " + " ".join(f"{r:g}" for r in self.radii),
               f"tested {self.tested}", f"agreements {self.agreements}",
               f"ambiguous {self.ambiguous}", f"rate {self.agreement_rate:.6f}"]
        for w in self.disagreements[:10]:
            out.append("disagree " + " ".join(f"{c:.6g}" for c in w))
        if self.recovered:
            out.append(f"recovered generators {sum(self.recovered)}/{len(self.recovered)}")
        return "\n".join(out) + "\n"


# -- point sampling inside polyhedra ---------------------------------------------------------------


def _float_rows(rows):
    if not rows:
        return None, None
    a = np.array([[float(x) for x in r] for r, _ in rows])
    b = np.array([float(c) for _, c in rows])
    return a, b


def _sample_in_piece(p: Polyhedron, center: np.ndarray, radius: float, count: int,
                     rng: np.random.Generator, extra_eqs=()) -> np.ndarray:
    """Points of ``p`` (with ``extra_eqs`` made tight) in the ball around ``center``."""
    eqs = list(p.equalities) + list(extra_eqs)
    d = p.dim
    ea, eb = _float_rows(eqs)
    ia, ib = _float_rows(list(p.inequalities))
    if ea is not None:
        base, *_ = np.linalg.lstsq(ea, eb - ea @ center, rcond=None)
        base = center + base
        if np.abs(ea @ base - eb).max() > 1e-9:
            return np.zeros((0, d))
        _, s, vt = np.linalg.svd(ea)
        rank = int((s > 1e-12).sum())
        basis = vt[rank:].T
    else:
        base, basis = center.copy(), np.eye(d)
    k = basis.shape[1]
    if np.linalg.norm(base - center) > radius:
        return np.zeros((0, d))
    if k == 0:
        pts = base[None, :]
    else:
        dirs = rng.standard_normal((count, k))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        rad = radius * rng.random(count) ** (1.0 / k)
        pts = base + (dirs * rad[:, None]) @ basis.T
    if ia is not None:
        ok = (pts @ ia.T <= ib + 1e-12).all(axis=1)
        pts = pts[ok]
    ok = np.linalg.norm(pts - center, axis=1) <= radius * (1 + 1e-12)
    return pts[ok]


def _faces(p: Polyhedron, near: np.ndarray, radius: float):
    """Row subsets to make tight: every subset of at most ``dim`` rows near ``near``."""
    from itertools import combinations
    rows = list(p.inequalities)
    close = []
    for a, b in rows:
        af = np.array([float(x) for x in a])
        gap = float(b) - af @ near
        if gap <= radius * np.linalg.norm(af) + 1e-12:
            close.append((a, b))
    out = []
    for k in range(0, min(len(close), p.dim) + 1):
        out.extend(combinations(close, k))
    return out


def _local_cloud(u: PolyUnion, center: np.ndarray, radius: float, count: int,
                 rng: np.random.Generator) -> np.ndarray:
    parts = [center[None, :]]
    for p in u.pieces:
        for face in _faces(p, center, radius):
            parts.append(_sample_in_piece(p, center, radius, count, rng, face))
    return np.vstack(parts)


def _base_points(u: PolyUnion, xbar: np.ndarray, scale_: float, count: int,
                 rng: np.random.Generator) -> np.ndarray:
    """Points of U at distance roughly between scale/2 and scale from xbar, on every face."""
    cloud = _local_cloud(u, xbar, scale_, count, rng)
    dist = np.linalg.norm(cloud - xbar, axis=1)
    keep = cloud[(dist >= scale_ / 2) & (dist <= scale_)]
    return np.vstack([xbar[None, :], keep])


# -- normal cones -------------------------------------------------------------------------------


def _normal_verdicts(u: PolyUnion, base: np.ndarray, dirs: np.ndarray, radii, tol: float,
                     count: int, rng: np.random.Generator) -> np.ndarray:
    """Directions passing ``max <y, x - base> <= tau r`` at every radius (tau halving)."""
    ok = np.ones(len(dirs), dtype=bool)
    tau = tol / 2 * 2 ** (len(radii) - 1)
    for r in radii:
        cloud = _local_cloud(u, base, r, count, rng)
        worst = (dirs @ (cloud - base).T).max(axis=1)
        ok &= worst <= tau * r
        tau /= 2
    return ok


def _exact_member(cone: VCone, y: np.ndarray) -> bool:
    return cone.contains(tuple(Fraction(float(c)) for c in y))


def _angle_to_cone_sq(cone: VCone, y: np.ndarray) -> float:
    from .polygeom import point_distance_sq
    z = tuple(Fraction(float(c)) for c in y)
    return min(float(point_distance_sq(z, p.to_polyhedron())) for p in cone.pieces)


def _ambiguous(cone: VCone, y: np.ndarray, tol: float) -> bool:
    """y lies within angle ``tol`` of the cone boundary."""
    m0 = _exact_member(cone, y)
    if not m0 and cone.pieces and _angle_to_cone_sq(cone, y) <= np.sin(tol) ** 2:
        return True
    _, _, vt = np.linalg.svd(y[None, :])
    for e in vt[1:]:
        for s in (1, -1):
            z = np.cos(tol) * y + s * np.sin(tol) * e
            if _exact_member(cone, z) != m0:
                return True
    return False


def sample_normals(u: PolyUnion, xbar: Sequence, kind: str = "limiting", radii=DEFAULT_RADII,
                   samples: int = 1000, tol: float = 1e-2, seed: int = 0,
                   points_per_face: int = 64) -> SampleReport:
    """Classify random unit directions as normal or not, and compare with the exact cone.

    ``kind="regular"`` tests at ``xbar`` itself. ``kind="limiting"`` also
    tests at base points of U near ``xbar`` (on every face), with a test
    radius well below their distance to ``xbar``; a direction counts as a
    limiting normal if some base point accepts it at every scale.
    Directions within angle ``tol`` of the exact cone's boundary are counted
    as ambiguous (agreeing). The exact generators are also fed to the oracle
    and ``recovered`` records whether each is accepted.
    """
    if kind not in ("regular", "limiting"):
        raise ValueError(f"unknown kind {kind!r}")
    rng = np.random.default_rng(seed)
    xb = np.array([float(c) for c in vec(xbar)])
    d = len(xb)
    exact = normal_cone(u, vec(xbar), kind)
    dirs = rng.standard_normal((samples, d))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    gens = []
    for p in exact.pieces:
        for g in list(p.rays) + list(p.lines) + [tuple(-c for c in l) for l in p.lines]:
            gf = np.array([float(c) for c in g])
            gens.append(gf / np.linalg.norm(gf))
    gen_arr = np.array(gens).reshape(-1, d)
    allv = np.vstack([dirs, gen_arr])

    radii = tuple(float(r) for r in radii)
    if kind == "regular":
        verdict = _normal_verdicts(u, xb, allv, radii, tol, points_per_face, rng)
    else:
        verdict = np.zeros(len(allv), dtype=bool)
        scales = [radii[0]]
        bases = _base_points(u, xb, scales[0], 32, rng)
        for b in bases:
            s = max(float(np.linalg.norm(b - xb)), radii[-1])
            sub = tuple(r * s / 8 / radii[0] for r in radii) if np.any(b != xb) else radii
            verdict |= _normal_verdicts(u, b, allv, sub, tol, points_per_face, rng)

    agree, amb, bad = 0, 0, []
    for y, v in zip(dirs, verdict[:samples]):
        if v == _exact_member(exact, y):
            agree += 1
        elif _ambiguous(exact, y, tol):
            agree += 1
            amb += 1
        else:
            bad.append(tuple(float(c) for c in y))
    recovered = [bool(v) for v in verdict[samples:]]
    return SampleReport(seed, radii, samples, agree, bad, amb, recovered,
                        {"kind": kind, "accepted": int(verdict[:samples].sum())})


# -- reachability -------------------------------------------------------------------------------------


@dataclass
class GridCloud:
    points: list
    branches: int
    grid_step: Fraction

    def as_array(self) -> np.ndarray:
        return np.array([[float(c) for c in p] for p in self.points])


def _velocities(val: PolyUnion, spacing: Fraction) -> set:
    out = set()
    for p in val.pieces:
        verts = p.vertices()
        if not p.is_bounded():
            raise ValueError("grid reachability needs bounded velocity sets")
        out.update(verts)
        lo = [min(v[i] for v in verts) for i in range(p.dim)]
        hi = [max(v[i] for v in verts) for i in range(p.dim)]
        axes = []
        for a, b in zip(lo, hi):
            k0 = -((-a) // spacing)
            k1 = b // spacing
            axes.append([spacing * k for k in range(int(k0), int(k1) + 1)])
        grid = [()]
        for ax in axes:
            grid = [g + (c,) for g in grid for c in ax]
        out.update(g for g in grid if p.contains(g))
    return out


def grid_reachable(di, x0: Sequence, grid_step, max_points: int = 200_000) -> GridCloud:
    """Brute-force reachable cloud: lattice velocities of spacing ``grid_step/dt``.

    Velocities are the vertices of each value piece plus every lattice point
    inside it, so every successor is exactly reachable.
    """
    if di.n > 2:
        raise ValueError("grid reachability is limited to n <= 2")
    grid_step = Fraction(grid_step)
    spacing = grid_step / di.dt
    frontier = {vec(x0): 1}
    for k in range(di.N):
        nxt: dict = {}
        for x, mult in frontier.items():
            for v in _velocities(eval_map(di.dynamics(k), x), spacing):
                y = add(x, scale(di.dt, v))
                nxt[y] = nxt.get(y, 0) + mult
        if len(nxt) > max_points:
            raise RuntimeError("region explosion: too many grid points")
        frontier = nxt
    return GridCloud(sorted(frontier), sum(frontier.values()), grid_step)


# -- subdifferentials ------------------------------------------------------------------------------


def sample_subdiff(f: PiecewiseAffine, xbar: Sequence, samples: int = 400, radius: float = 1e-3,
                   seed: int = 0) -> SampleReport:
    """Gradients of f at random points near xbar, and agreement with the exact Clarke set."""
    rng = np.random.default_rng(seed)
    xb = np.array([float(c) for c in vec(xbar)])
    d = f.dim
    grads = set()
    gs = [(np.array([[float(c) for c in r[0]] for r in g]), np.array([float(r[1]) for r in g]))
          for g in f.groups]
    for _ in range(samples):
        z = xb + radius * rng.uniform(-1, 1, d)
        vals = [(a @ z + b) for a, b in gs]
        maxes = [v.max() for v in vals]
        gi = int(np.argmin(maxes))
        ri = int(np.argmax(vals[gi]))
        srt = np.sort(vals[gi])
        if len(srt) > 1 and srt[-1] - srt[-2] < 1e-12:
            continue
        grads.add(tuple(float(c) for c in gs[gi][0][ri]))
    exact = subdifferential(f, vec(xbar)).clarke
    pts = np.array(sorted(grads))
    inside = all(exact.contains(tuple(Fraction(c) for c in g)) or
                 _near(exact, g, 1e-6) for g in grads)
    covered = True
    for v in exact.vertices():
        vf = np.array([float(c) for c in v])
        if len(pts) == 0 or np.linalg.norm(pts - vf, axis=1).min() > 1e-2:
            covered = False
    agreements = int(inside) + int(covered)
    return SampleReport(seed, (radius,), 2, agreements, [] if inside and covered else [tuple(g) for g in grads],
                        detail={"gradients": sorted(grads), "inside": inside, "covered": covered})


def _near(p: Polyhedron, g, tol: float) -> bool:
    from .polygeom import point_distance_sq
    return float(point_distance_sq(tuple(Fraction(c) for c in g), p)) <= tol * tol
