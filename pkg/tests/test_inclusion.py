from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyvar.catalog import (abs_objective_shifted, growth_dynamics, interval_dynamics,
                             two_branch_map, two_velocity_dynamics, zero_dynamics)
from polyvar.inclusion import (AdjointCertificate, DiscreteInclusion, FeasiblePath, Refutation,
                               adjoint_propagate, adjoint_reachable_pi, certify_path,
                               coderiv_reachable, enumerate_paths, path_coderiv, reachable,
                               reachable_graph, subdiff_upper)
from polyvar.polygeom import PolyUnion, Polyhedron, union_slice
from polyvar.setmaps import PieceBudgetError, SetMap, eval_map, step_map
from polyvar.varcones import PiecewiseAffine, coderivative

F = Fraction
H = F(1, 2)


def pts(*vals):
    return PolyUnion.points([(F(v),) for v in vals])


def iv(lo=None, hi=None):
    return PolyUnion.of(Polyhedron.interval(lo, hi))


def box_di(N, T=1):
    return DiscreteInclusion(interval_dynamics(-1, 1), T, N)


def lower_path(di, x0):
    return FeasiblePath(tuple((x0 - k * di.dt,) for k in range(di.N + 1)), di.dt)


def test_discrete_inclusion_validation():
    di = box_di(3, F(3, 2))
    assert di.dt == H and di.dt * di.N == di.T
    with pytest.raises(ValueError):
        DiscreteInclusion(interval_dynamics(), 1, 0)
    with pytest.raises(ValueError):
        DiscreteInclusion([interval_dynamics()] * 2, 1, 3)
    with pytest.raises(ValueError):
        DiscreteInclusion(SetMap.affine([[1, 0]]), 1, 2)


# -- reachable sets --------------------------------------------------------------------------------

def test_reachable_examples():
    assert reachable(box_di(4), (0,)) == iv(-1, 1)
    assert reachable(DiscreteInclusion(growth_dynamics(), 1, 2), (1,)) == iv(1, F(9, 4))
    assert reachable(DiscreteInclusion(two_branch_map(), 1, 2), (1,)) == pts(F(1, 4), F(3, 4), F(9, 4))


def test_reachable_budget():
    # constant velocities collapse to N + 1 points, which still exceeds a budget of 3
    di = DiscreteInclusion(two_velocity_dynamics(), 1, 5)
    assert len(reachable(di, (0,)).pieces) == 6
    with pytest.raises(PieceBudgetError):
        reachable(di, (0,), budget=3)


def test_reachable_graph_examples():
    strip = SetMap(1, 1, [Polyhedron(2, (((-1, 1), 2), ((1, -1), 2)))])
    assert reachable_graph(box_di(4, 2)) == strip
    a = F(-1, 3)
    di = DiscreteInclusion(SetMap.affine([[a]]), 2, 3)
    factor = (1 + di.dt * a) ** 3
    assert reachable_graph(di) == SetMap.affine([[factor]])
    di1 = DiscreteInclusion(two_branch_map(), F(1, 5), 1)
    assert reachable_graph(di1) == step_map(two_branch_map(), F(1, 5))


@pytest.mark.parametrize("di,x0", [
    (box_di(3), (F(1, 3),)),
    (DiscreteInclusion(growth_dynamics(), 1, 3), (2,)),
    (DiscreteInclusion(two_branch_map(), 1, 3), (H,)),
    (DiscreteInclusion(two_velocity_dynamics(), 1, 4), (0,)),
])
def test_reachable_agrees_with_graph_slice_and_folds(di, x0):
    left = reachable_graph(di)
    assert reachable(di, x0) == union_slice(left.graph, [0], x0)
    assert reachable_graph(di, fold="right") == left


def test_time_varying_dynamics():
    dyn = [interval_dynamics(0, 1), two_velocity_dynamics(-1, 1)]
    di = DiscreteInclusion(dyn, 1, 2)
    # first step moves into [0, 1/2], second adds -1/2 or +1/2
    assert reachable(di, (0,)) == iv(-H, 0).union(iv(H, 1))
    with pytest.raises(ValueError):
        di.with_steps(4)


# -- paths ---------------------------------------------------------------------------------------

def test_enumerate_paths_examples():
    di = DiscreteInclusion(two_velocity_dynamics(), 1, 2)
    paths = enumerate_paths(di, (0,), (0,), "finite")
    assert sorted(p.velocities for p in paths) == [((-1,), (1,)), ((1,), (-1,))]
    one = enumerate_paths(box_di(2), (0,), (1,), "vertex")
    assert [p.states for p in one] == [((0,), (H,), (1,))]
    assert enumerate_paths(box_di(2), (0,), (3,), "vertex") == []
    assert enumerate_paths(di, (0,), (H,), "finite") == []


@pytest.mark.parametrize("mode", ["vertex", "sampled"])
def test_enumerated_paths_are_feasible(mode):
    di = box_di(3)
    paths = enumerate_paths(di, (0,), (H,), mode, seed=4)
    assert len(paths) > 1
    for p in paths:
        assert p.is_feasible(di) and p.states[0] == (0,) and p.states[-1] == (H,)


def test_sampled_paths_are_reproducible():
    di = box_di(3)
    a = enumerate_paths(di, (0,), (H,), "sampled", seed=9)
    assert a == enumerate_paths(di, (0,), (H,), "sampled", seed=9)


def test_feasibility_checks():
    di = box_di(2)
    assert lower_path(di, F(0)).is_feasible(di)
    assert not FeasiblePath(((0,), (1,), (1,)), di.dt).is_feasible(di)
    assert not FeasiblePath(((0,), (0,)), di.dt).is_feasible(di)


# -- coderivatives of the reachable map ------------------------------------------------------------

def test_path_coderiv_of_affine_is_transpose_power():
    a = F(3, 4)
    di = DiscreteInclusion(SetMap.affine([[a]]), 1, 3)
    states = tuple(((1 + di.dt * a) ** k,) for k in range(4))
    g = path_coderiv(di, FeasiblePath(states, di.dt))
    assert g == SetMap.affine([[(1 + di.dt * a) ** 3]])


def test_path_coderiv_lower_extreme_path():
    di = box_di(3)
    g = path_coderiv(di, lower_path(di, F(0)))
    assert g.graph == PolyUnion.of(Polyhedron(2, (((-1, 0), 0),), (((1, -1), 0),)))


def test_coderiv_reachable_two_velocity_union():
    di = DiscreteInclusion(two_velocity_dynamics(), 1, 2)
    paths = enumerate_paths(di, (0,), (0,), "finite")
    res = coderiv_reachable(di, (0,), (0,), paths, exhaustive=True)
    assert res.exhaustive and len(res.per_path) == 2
    assert res.union == SetMap.identity(1)
    direct = coderivative(reachable_graph(di), (0,), (0,)).as_map()
    assert direct.graph <= res.union.graph


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 4), st.fractions(min_value=-1, max_value=1, max_denominator=6),
       st.data())
def test_graph_convex_coderivative_is_path_independent(N, x0, data):
    di = box_di(N)
    assert reachable(di, (x0,)) == iv(x0 - 1, x0 + 1)
    t = data.draw(st.fractions(min_value=0, max_value=1, max_denominator=4))
    xN = (x0 - 1 + 2 * t,)
    direct = coderivative(reachable_graph(di), (x0,), xN).as_map()
    for path in enumerate_paths(di, (x0,), xN, "vertex"):
        assert path_coderiv(di, path) == direct


# -- adjoint tubes and certificates ----------------------------------------------------------------

def test_adjoint_propagate_examples():
    di = box_di(4)
    tube = adjoint_propagate(di, lower_path(di, F(0)), (1,))
    assert all(p == pts(1) for p in tube)
    interior = FeasiblePath(tuple((F(0),) for _ in range(5)), di.dt)
    assert adjoint_propagate(di, interior, (1,))[0].is_empty()
    a = F(-2)
    aff = DiscreteInclusion(SetMap.affine([[a]]), 1, 4)
    states = tuple(((1 + aff.dt * a) ** k,) for k in range(5))
    p0 = adjoint_propagate(aff, FeasiblePath(states, aff.dt), (3,))[0]
    assert p0 == pts(3 * (1 + aff.dt * a) ** 4)


def test_certify_extreme_and_interior_paths():
    di = box_di(8)
    phi = abs_objective_shifted()
    good = certify_path(di, lower_path(di, -H), phi)
    assert isinstance(good, AdjointCertificate)
    assert all(p == (1,) for p in good.costates) and good.transversality == (-1, 1)
    assert good.verify(di, phi)
    bad = certify_path(di, lower_path(di, F(0)), phi)
    assert isinstance(bad, Refutation) and bad.systems_checked > 0


def test_certify_zero_dynamics():
    di = DiscreteInclusion(zero_dynamics(), 1, 3)
    phi = PiecewiseAffine.max_of([((1, 0), 0), ((-1, 0), 0)])
    path = FeasiblePath(tuple((F(0),) for _ in range(4)), di.dt)
    cert = certify_path(di, path, phi)
    assert isinstance(cert, AdjointCertificate) and all(p == (0,) for p in cert.costates)


def test_certify_rejects_infeasible_path():
    di = box_di(2)
    with pytest.raises(ValueError):
        certify_path(di, FeasiblePath(((0,), (2,), (2,)), di.dt), abs_objective_shifted())


def test_certificate_verify_detects_tampering():
    di = box_di(4)
    phi = abs_objective_shifted()
    cert = certify_path(di, lower_path(di, -H), phi)
    forged = AdjointCertificate(cert.path, ((F(2),),) + cert.costates[1:], cert.transversality)
    assert not forged.verify(di, phi)


# -- value-function subgradients and the adjoint-reachable set -------------------------------------

def test_subdiff_upper_examples():
    di = box_di(4)
    est = subdiff_upper(di, PiecewiseAffine.affine((0, 1)), (F(3, 7),))
    assert est.exact and est.estimate == pts(1) and est.value == F(3, 7) - 1
    est = subdiff_upper(di, abs_objective_shifted(), (-H,))
    assert est.estimate == iv(0, 2) and est.estimate.contains((0,))
    est = subdiff_upper(di, PiecewiseAffine.max_of([((1, 0), 0), ((-1, 0), 0)]), (0,))
    assert est.estimate == iv(-1, 1)


def test_subdiff_upper_two_branch_is_flagged():
    di = DiscreteInclusion(two_branch_map(), 1, 2)
    est = subdiff_upper(di, PiecewiseAffine.affine((0, 1)), (1,), mode="finite")
    assert not est.exact and est.exhaustive and est.endpoints == [(F(1, 4),)]
    assert est.estimate == pts(F(1, 4))


def test_adjoint_reachable_pi_examples():
    di = box_di(4)
    assert adjoint_reachable_pi(di, (0,), (-1,), (1,)).value == pts(1)
    assert adjoint_reachable_pi(di, (0,), (-1,), (-1,)).value.is_empty()
    a = F(1, 2)
    aff = DiscreteInclusion(SetMap.affine([[a]]), 1, 2)
    y = ((1 + aff.dt * a) ** 2,)
    res = adjoint_reachable_pi(aff, (1,), y, (1,), mode="finite")
    assert res.value == pts((1 + aff.dt * a) ** 2) and res.exhaustive


def test_step_map_eval_consistent_with_inclusion_step():
    di = box_di(2)
    assert eval_map(di.step(0), (0,)) == iv(-H, H)
