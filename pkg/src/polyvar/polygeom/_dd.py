"""Double-description conversion between the two forms of a polyhedral cone.

``generators(dim, halfspaces, hyperplanes)`` turns
``{z : a.z <= 0 (a in halfspaces), e.z == 0 (e in hyperplanes)}`` into
``cone(rays) + span(lines)``. Applying it to the generators themselves gives
the polar cone, which is how the reverse conversion is done.

Output is canonical: lines are primitive RREF rows, rays are extreme rays
reduced modulo the lines, made primitive and sorted.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ._linalg import Vec, dot, primitive, rank, reduce_mod, rref, unit


def _combine(p: Vec, n: Vec, a: Vec) -> Vec:
    ap, an = dot(a, p), dot(a, n)
    return primitive(tuple(ap * y - an * x for x, y in zip(p, n)))


def generators(dim: int, halfspaces: Sequence[Vec], hyperplanes: Sequence[Vec] = ()
               ) -> tuple[tuple[Vec, ...], tuple[Vec, ...]]:
    lines: list[Vec] = [unit(dim, i) for i in range(dim)]
    rays: list[Vec] = []
    eq_rows: list[Vec] = []
    ineq_rows: list[Vec] = []
    queue: list[Vec] = []

    for e in hyperplanes:
        e = tuple(Fraction(x) for x in e)
        if not any(e):
            continue
        eq_rows.append(e)
        piv = next((l for l in lines if dot(e, l)), None)
        if piv is None:
            # lineality already orthogonal: an equality is then a pair of cuts
            queue.append(e)
            queue.append(tuple(-x for x in e))
            continue
        el = dot(e, piv)
        lines = [primitive(tuple(x - dot(e, l) / el * y for x, y in zip(l, piv)))
                 for l in lines if l is not piv]
        rays = [primitive(tuple(x - dot(e, r) / el * y for x, y in zip(r, piv))) for r in rays]

    for a in list(queue) + [tuple(Fraction(x) for x in h) for h in halfspaces]:
        if not any(a):
            continue
        ineq_rows.append(a)
        piv = next((l for l in lines if dot(a, l)), None)
        if piv is not None:
            al = dot(a, piv)
            new_ray = primitive(piv if al < 0 else tuple(-x for x in piv))
            lines = [primitive(tuple(x - dot(a, l) / al * y for x, y in zip(l, piv)))
                     for l in lines if l is not piv]
            rays = [primitive(tuple(x - dot(a, r) / al * y for x, y in zip(r, piv)))
                    for r in rays]
            rays.append(new_ray)
        else:
            pos = [r for r in rays if dot(a, r) > 0]
            if not pos:
                continue
            zer = [r for r in rays if dot(a, r) == 0]
            ngs = [r for r in rays if dot(a, r) < 0]
            rays = ngs + zer + [_combine(p, n, a) for p in pos for n in ngs]
        rays = _extreme(dim, rays, ineq_rows, eq_rows)

    red, piv = rref(lines, dim) if lines else ([], [])
    lines_c = tuple(sorted(primitive(r) for r in red))
    red_p = [tuple(x / r[p] for x in r) for r, p in zip(red, piv)]
    out = set()
    for r in rays:
        v = primitive(reduce_mod(r, red_p, piv))
        if any(v):
            out.add(v)
    return tuple(sorted(out)), lines_c


def _extreme(dim: int, rays: list[Vec], ineq_rows: list[Vec], eq_rows: list[Vec]) -> list[Vec]:
    full = rank(ineq_rows + eq_rows, dim)
    seen: dict[frozenset, Vec] = {}
    for r in rays:
        if not any(r):
            continue
        act = frozenset(i for i, a in enumerate(ineq_rows) if dot(a, r) == 0)
        if act in seen:
            continue
        if rank([ineq_rows[i] for i in act] + eq_rows, dim) == full - 1:
            seen[act] = r
    return list(seen.values())
