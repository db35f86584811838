"""Ready-made maps and functions used in the worked examples, demos and tests."""
from __future__ import annotations

from fractions import Fraction

from .polygeom import PolyUnion, Polyhedron
from .setmaps import SetMap
from .varcones import PiecewiseAffine

_H = Fraction(1, 2)


def _p(*ineqs, eqs=()) -> Polyhedron:
    return Polyhedron(2, tuple(ineqs), tuple(eqs))


def two_branch_map() -> SetMap:
    """``x -> {-x} u {x}``."""
    return SetMap(1, 1, [_p(eqs=[((1, 1), 0)]), _p(eqs=[((1, -1), 0)])], "F")


def split_cone_map() -> SetMap:
    """``x -> R`` for ``x <= 0`` and ``(-inf, -x] u [x, inf)`` for ``x >= 0``."""
    return SetMap(1, 1, [_p(((1, 0), 0)),
                         _p(((-1, 0), 0), ((1, 1), 0)),
                         _p(((-1, 0), 0), ((1, -1), 0))], "G1")


def min_floor_map() -> SetMap:
    """``x -> [min(0, x), inf)``."""
    return SetMap(1, 1, [_p(((1, -1), 0)), _p(((0, -1), 0))], "G2")


def max_floor_map() -> SetMap:
    """``x -> [max(x/2, x), inf)``."""
    return SetMap(1, 1, [_p(((_H, -1), 0), ((1, -1), 0))], "G3")


def gap_bands_map() -> SetMap:
    """``x -> [x+1, x+2] u [x-2, x-1]``."""
    return SetMap(1, 1, [_p(((1, -1), -1), ((-1, 1), 2)),
                         _p(((1, -1), 2), ((-1, 1), -1))], "Gband")


def kink_function() -> PiecewiseAffine:
    """``x -> -|x - 1/2|`` as ``min(x - 1/2, 1/2 - x)``."""
    return PiecewiseAffine.min_of([((1,), -_H), ((-1,), _H)])


def function_map(f: PiecewiseAffine, name: str = "f") -> SetMap:
    """Graph of a piecewise-affine function of one variable as a single-valued map."""
    if f.dim != 1:
        raise ValueError("only functions of one variable")
    # graph = union over groups and rows r of {y = row_r(x), row_r >= other rows in the group,
    # group value <= every other group's value}; built from the epigraph and hypograph pieces
    pieces = []
    for gi, g in enumerate(f.groups):
        for c, c0 in g:
            ins = []
            for c2, d2 in g:
                # c2 x + d2 <= c x + c0
                ins.append(((c2[0] - c[0],), c0 - d2))
            others = [h for hj, h in enumerate(f.groups) if hj != gi]
            # value of this group must not exceed the max of every other group:
            # for each other group, some row is >= ours; enumerate choices
            choices = [[]]
            for h in others:
                choices = [ch + [(c3, d3)] for ch in choices for c3, d3 in h]
            for ch in choices:
                extra = [((c[0] - c3[0],), d3 - c0) for c3, d3 in ch]
                dom = ins + extra
                pieces.append(Polyhedron(2, tuple(((a[0], 0), b) for a, b in dom),
                                         (((c[0], -1), -c0),)))
    return SetMap(1, 1, pieces, name)


def interval_dynamics(lo=-1, hi=1) -> SetMap:
    """Constant velocity set ``[lo, hi]``."""
    return SetMap(1, 1, [_p(((0, 1), hi), ((0, -1), -Fraction(lo)))], "Fbox")


def two_velocity_dynamics(a=-1, b=1) -> SetMap:
    """Constant velocity set ``{a} u {b}``."""
    return SetMap(1, 1, [_p(eqs=[((0, 1), a)]), _p(eqs=[((0, 1), b)])], "Fpm1")


def growth_dynamics() -> SetMap:
    """``x -> [0, x]`` for ``x >= 0`` (graph ``0 <= v <= x``)."""
    return SetMap(1, 1, [_p(((0, -1), 0), ((-1, 1), 0))], "Fgrow")


def band_map(width=1) -> SetMap:
    """``x -> [x - width, x + width]``."""
    w = Fraction(width)
    return SetMap(1, 1, [_p(((-1, 1), w), ((1, -1), w))], "band")


def zero_dynamics(n: int = 1) -> SetMap:
    return SetMap.affine([[0] * n for _ in range(n)], name="zero")


def abs_objective_shifted() -> PiecewiseAffine:
    """``(x0, xN) -> |x0 + 1/2| + xN``."""
    return PiecewiseAffine.max_of([((1, 1), _H), ((-1, 1), -_H)])


def scaled_abs_cone(kappa) -> SetMap:
    """``w -> kappa |w| [-1, 1]``."""
    k = Fraction(kappa)
    return SetMap(1, 1, [_p(((-k, 1), 0), ((-k, -1), 0)),
                         _p(((k, 1), 0), ((k, -1), 0))], "H")


def constant_zero_map() -> SetMap:
    """``x -> {0}`` (graph ``R x {0}``)."""
    return SetMap.constant(1, PolyUnion.of(Polyhedron.point((0,))), "zero")


def vertical_map() -> SetMap:
    """Graph ``{0} x R``: empty off the origin, everything at it."""
    return SetMap(1, 1, [_p(eqs=[((1, 0), 0)])], "vert")
