import random
from fractions import Fraction
from itertools import combinations

import pytest
from conftest import random_map
from hypothesis import given, settings
from hypothesis import strategies as st

from polyvar.catalog import (band_map, constant_zero_map, function_map, gap_bands_map,
                             kink_function, max_floor_map, min_floor_map, split_cone_map,
                             two_branch_map, vertical_map)
from polyvar.chainrules import (argmin_set, chain_convex_exact, chain_upper, check_cq,
                                intermediate_points, marginal_subdiff, relation,
                                tightness_pattern, wp_filtered_chain)
from polyvar.polygeom import PolyUnion, Polyhedron
from polyvar.setmaps import SetMap, compose, eval_map
from polyvar.varcones import OffSetError, PiecewiseAffine, coderivative

F = Fraction
H = F(1, 2)


def pts(*vals):
    return PolyUnion.points([(F(v),) for v in vals])


def iv(lo=None, hi=None):
    return PolyUnion.of(Polyhedron.interval(lo, hi))


def test_relation_symbols():
    a, b = iv(0, 1), iv(0, 2)
    assert relation(a, b) == "⊊" and relation(b, a) == "⊋"
    assert relation(a, a) == "=" and relation(iv(0, 1), iv(2, 3)) == "≠"


def test_intermediate_points_single_stratum():
    s, reps = intermediate_points(function_map(kink_function()), gap_bands_map(), (0,), (-H,))
    assert s == pts(1) and reps == [(F(1),)]


def test_intermediate_points_cover_every_stratum():
    # G(0) = R and F = {-y, y}: z = 0 forces y = 0
    s, reps = intermediate_points(two_branch_map(), split_cone_map(), (0,), (0,))
    assert s == pts(0) and reps == [(F(0),)]
    s, reps = intermediate_points(two_branch_map(), split_cone_map(), (-1,), (3,))
    assert s == pts(-3, 3) and reps == [(F(-3),), (F(3),)]


def test_check_cq_examples():
    assert check_cq(two_branch_map(), min_floor_map(), (0,), (0,), (0,)).ok
    res = check_cq(vertical_map(), constant_zero_map(), (0,), (0,), (0,))
    assert not res.ok and res.witness is not None and any(res.witness)
    lin = SetMap.affine([[2]])
    assert check_cq(lin, SetMap.affine([[3]]), (3,), (6,), (1,)).ok


def test_check_cq_requires_graph_points():
    with pytest.raises(OffSetError):
        check_cq(two_branch_map(), min_floor_map(), (1,), (0,), (0,))


def test_chain_rule_first_fixture_values():
    f, g = two_branch_map(), split_cone_map()
    v = chain_upper(f, g, (0,), (0,), "convexified")
    relaxed = chain_upper(f, g, (0,), (0,), "convexified", relaxed=True)
    for u in (F(1), F(-3, 2)):
        assert eval_map(v.lhs, (u,)) == pts(abs(u))
        assert eval_map(v.rhs, (u,)) == pts(abs(u))
        assert eval_map(relaxed.rhs, (u,)) == iv(0, abs(u))
    assert v.relation == "=" and relaxed.relation == "⊊" and v.certified
    assert relaxed.report().splitlines()[0] == "LHS ⊊ RHS"


def test_chain_rule_second_fixture_values():
    f, g = two_branch_map(), min_floor_map()
    v = chain_upper(f, g, (0,), (0,), "convexified")
    assert eval_map(v.lhs, (0,)) == pts(0)
    assert eval_map(v.lhs, (1,)).is_empty() and eval_map(v.lhs, (-1,)).is_empty()
    assert eval_map(v.rhs, (2,)) == iv(0, 2)


def test_tightness_pattern_for_the_three_fixtures():
    f = two_branch_map()
    assert tightness_pattern(f, split_cone_map(), (0,), (0,)) == ("=", "⊊")
    assert tightness_pattern(f, min_floor_map(), (0,), (0,)) == ("⊊", "=")
    assert tightness_pattern(f, max_floor_map(), (0,), (0,)) == ("⊊", "⊊")


def test_chain_upper_soundness_on_random_pairs():
    rng = random.Random(3)
    certified = 0
    for _ in range(60):
        f, g = random_map(rng), random_map(rng)
        h = compose(f, g)
        if h.graph.is_empty():
            continue
        cands = [v for p in h.graph.pieces for v in p.vertices()]
        cands += [p.any_point() for p in h.graph.pieces]
        z = rng.choice(cands)
        v = chain_upper(f, g, z[:1], z[1:], "limiting")
        if v.certified:
            certified += 1
            assert v.relation in ("=", "⊊")
    assert certified > 10


def test_chain_convex_exact_band():
    g, f = band_map(1), SetMap.affine([[2]])
    res = chain_convex_exact(f, g, (0,), (2,))
    assert res.independent and res.matches_direct
    assert eval_map(res.coderiv, (-1,)) == pts(-2)
    assert eval_map(res.coderiv, (1,)).is_empty()


def test_chain_convex_exact_affine_pair_is_transpose_product():
    g, f = SetMap.affine([[3]]), SetMap.affine([[-2]])
    res = chain_convex_exact(f, g, (1,), (-6,))
    assert eval_map(res.coderiv, (1,)) == pts(-6)


def test_chain_convex_exact_independent_of_intermediate_point():
    # F(y) = {0} for every y: every y in G(0) = [-1, 1] is intermediate
    g, f = band_map(1), SetMap.affine([[0]])
    res = chain_convex_exact(f, g, (0,), (0,))
    assert len(res.checked_points) > 1 and res.independent


def test_chain_convex_exact_rejects_nonconvex_graphs():
    with pytest.raises(ValueError):
        chain_convex_exact(two_branch_map(), band_map(1), (0,), (0,))


# -- marginal functions ----------------------------------------------------------------------------

def test_marginal_band_convex_mode():
    phi = PiecewiseAffine.affine((0, 1))
    for x in (F(0), F(5, 3)):
        est = marginal_subdiff(phi, band_map(1), (x,), "convex")
        assert est.exact and est.estimate == pts(1) and est.value == x - 1


def test_marginal_min_floor_contains_both_slopes():
    est = marginal_subdiff(PiecewiseAffine.affine((0, 1)), min_floor_map(), (0,), "limiting")
    assert pts(0, 1) <= est.estimate and est.value == 0
    clarke = marginal_subdiff(PiecewiseAffine.affine((0, 1)), min_floor_map(), (0,), "clarke")
    assert clarke.estimate == iv(0, 1)


def test_marginal_objective_independent_of_y():
    phi = PiecewiseAffine.max_of([((1, 0), 0), ((-1, 0), 0)])
    est = marginal_subdiff(phi, band_map(1), (0,), "limiting")
    assert est.estimate == iv(-1, 1)


def _brute_marginal(rows, width, x):
    """min over y in [x - w, x + w] of max_r (a x + b y + c), by candidate enumeration."""
    cands = {x - width, x + width}
    for (a1, b1, c1), (a2, b2, c2) in combinations(rows, 2):
        if b1 != b2:
            y = ((a2 - a1) * x + c2 - c1) / (b1 - b2)
            if x - width <= y <= x + width:
                cands.add(y)
    return min(max(a * x + b * y + c for a, b, c in rows) for y in cands)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(*[st.integers(-3, 3).map(F)] * 3), min_size=1, max_size=3),
       st.integers(1, 3).map(F), st.fractions(min_value=-2, max_value=2, max_denominator=5))
def test_marginal_convex_mode_matches_brute_force_slopes(rows, width, x):
    phi = PiecewiseAffine.max_of([((a, b), c) for a, b, c in rows])
    est = marginal_subdiff(phi, band_map(width), (x,), "convex")
    h = F(1, 10 ** 6)
    f0 = _brute_marginal(rows, width, x)
    left = (f0 - _brute_marginal(rows, width, x - h)) / h
    right = (_brute_marginal(rows, width, x + h) - f0) / h
    assert est.value == f0
    assert est.estimate == iv(left, right)


def test_argmin_set_band():
    val, arg = argmin_set(PiecewiseAffine.affine((0, 1)), band_map(1), (F(2),))
    assert val == 1 and arg == pts(1)


# -- filtered chain -------------------------------------------------------------------------------

def test_filtered_chain_counterexample():
    f, g = function_map(kink_function()), gap_bands_map()
    assert wp_filtered_chain(f, g, (0,), (-H,), (-1,)).is_empty()
    direct = coderivative(compose(f, g), (0,), (-H,)).apply((-1,))
    assert direct == pts(1)


@pytest.mark.parametrize("r", [F(-1), F(1), F(2)])
def test_filtered_chain_covers_convex_valued_band(r):
    g, f = band_map(1), SetMap.affine([[2]])
    direct = coderivative(compose(f, g), (0,), (2,)).apply((r,))
    assert direct <= wp_filtered_chain(f, g, (0,), (2,), (r,))


def test_filtered_chain_inactive_for_single_valued_pair():
    g, f = SetMap.affine([[3]]), SetMap.affine([[-2]])
    assert wp_filtered_chain(f, g, (1,), (-6,), (1,)) == pts(-6)
