import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from strategies import cone_pieces, interval_unions, polyhedra

from polyvar.polygeom import (ConePiece, DimensionError, FormatError, PolyUnion, Polyhedron,
                              UnboundedSetError, VCone, cone_hull, cone_includes, dump_cone,
                              dump_union, hausdorff, nearest_point, parse_cone, parse_union,
                              poly_contains, polar, project, union_hull, union_slice)
from polyvar.polygeom import _fm, _linalg

F = Fraction
H = F(1, 2)


def test_linalg_rref_and_nullspace():
    rows = [(F(1), F(2), F(3)), (F(2), F(4), F(6)), (F(0), F(1), F(1))]
    assert _linalg.rank(rows) == 2
    ns = _linalg.nullspace(rows, 3)
    assert len(ns) == 1
    assert all(_linalg.dot(r, ns[0]) == 0 for r in rows)


def test_linalg_primitive_scales_to_coprime_integers():
    assert _linalg.primitive((F(2, 3), F(-4, 3))) == (F(1), F(-2))


# -- membership and projection ----------------------------------------------------------------

def test_poly_contains_examples():
    half = Polyhedron(1, (((F(1),), F(1)),))
    assert poly_contains(half, (1,))
    assert not poly_contains(half, (F(3, 2),))
    tri = Polyhedron(2, (((1, 1), 1), ((-1, 0), 0), ((0, -1), 0)))
    assert poly_contains(tri, (H, H))


def test_poly_contains_rejects_wrong_dimension():
    with pytest.raises(DimensionError):
        poly_contains(Polyhedron.universe(2), (1,))


def test_project_unit_square():
    sq = Polyhedron.box((0, 0), (1, 1))
    assert project(sq, [0]) == Polyhedron.interval(0, 1)


def test_project_min_floor_graph_has_full_domain():
    # y >= min(0, x) as two pieces; each piece projects onto the whole line
    pieces = [Polyhedron(2, (((1, -1), 0),)), Polyhedron(2, (((0, -1), 0),))]
    assert PolyUnion(2, pieces).project([0]) == PolyUnion.of(Polyhedron.universe(1))


def test_project_eliminates_sum_variable():
    p = Polyhedron(3, (((-1, 0, 0), 0), ((1, 0, 0), 1), ((0, -1, 0), 0), ((0, 1, 0), 1)),
                   (((1, 1, -1), 0),))
    expected = Polyhedron(2, (((-1, 0), 0), ((1, 0), 1), ((1, -1), 0), ((-1, 1), 1)))
    assert project(p, [0, 2]) == expected


@settings(max_examples=40, deadline=None)
@given(polyhedra(3), polyhedra(3), st.sampled_from([[0], [1], [0, 2], [1, 2]]))
def test_project_is_monotone(p, q, keep):
    small = p.intersect(q)
    assume(not small.is_empty)
    assert project(p, keep).includes(project(small, keep))


# -- canonical forms and generators -------------------------------------------------------------

def test_canonical_equality_ignores_redundant_rows():
    a = Polyhedron(1, (((F(1),), F(1)), ((F(2),), F(5))))
    b = Polyhedron(1, (((F(3),), F(3)),))
    assert a == b and hash(a) == hash(b)


def test_implicit_equalities_detected():
    p = Polyhedron(2, (((1, 0), 1), ((-1, 0), -1)))
    assert p.canonical().equalities and p == Polyhedron(2, (), (((1, 0), 1),))


def test_empty_polyhedra_are_equal():
    assert Polyhedron(1, (((1,), 0), ((-1,), -1))).is_empty
    assert Polyhedron.empty(2) == Polyhedron(2, (((0, 1), -1), ((0, -1), 0)))


@settings(max_examples=60, deadline=None)
@given(polyhedra(2))
def test_double_description_round_trip(p):
    pts, rays, lines = p.generators()
    assert Polyhedron.from_generators(2, pts, rays, lines) == p


@settings(max_examples=60, deadline=None)
@given(cone_pieces())
def test_cone_double_description_round_trip(c):
    again = ConePiece.from_halfspaces(c.dim, c.halfspaces, c.hyperplanes)
    assert again.includes(c) and c.includes(again)


@settings(max_examples=60, deadline=None)
@given(cone_pieces())
def test_polar_involution(c):
    k = VCone.of(c)
    assert polar(polar(k)) == k


@settings(max_examples=40, deadline=None)
@given(st.lists(polyhedra(2), min_size=1, max_size=3), st.randoms(use_true_random=False))
def test_canonical_serialization_ignores_piece_order(pieces, rnd):
    shuffled = list(pieces)
    rnd.shuffle(shuffled)
    assert PolyUnion(2, pieces).serialize() == PolyUnion(2, shuffled).serialize()


# -- cones ---------------------------------------------------------------------------------------

def test_cone_hull_examples():
    assert cone_hull(VCone.span((1, 1)).union(VCone.span((1, -1)))) == VCone.full(2)
    wedge = cone_hull(VCone.ray((1, 1)).union(VCone.ray((1, -1))))
    expected = VCone.of(ConePiece.from_halfspaces(2, [(-1, 1), (-1, -1)]))
    assert wedge == expected
    assert cone_hull(VCone.ray((2, 3))) == VCone.ray((2, 3))


def test_cone_includes_examples():
    wedge = VCone.of(ConePiece.from_halfspaces(2, [(-1, 1), (-1, -1)]))
    assert cone_includes(VCone.ray((1, 1)), wedge)
    assert not cone_includes(VCone.full(2), VCone.ray((1, 0)))
    assert cone_includes(wedge, VCone.of(ConePiece.from_halfspaces(2, [(-1, 0)])))


def test_cone_includes_nonconvex_target_uses_cover_test():
    # the wedge is covered by its two halves but not by either alone
    wedge = VCone.of(ConePiece.from_halfspaces(2, [(-1, 1), (-1, -1)]))
    upper = ConePiece.from_halfspaces(2, [(-1, 1), (0, -1)])
    lower = ConePiece.from_halfspaces(2, [(-1, -1), (0, 1)])
    assert cone_includes(wedge, VCone.of(upper, lower))
    assert not cone_includes(wedge, VCone.of(upper))


def test_polar_of_halfline():
    assert polar(VCone.ray((1,))) == VCone.ray((-1,))
    assert polar(VCone.zero(2)) == VCone.full(2)


# -- slices ----------------------------------------------------------------------------------------

def test_union_slice_examples():
    g3 = PolyUnion.of(Polyhedron(2, (((H, -1), 0), ((1, -1), 0))))
    assert union_slice(g3, [0], [1]) == PolyUnion.of(Polyhedron.interval(1, None))
    f = PolyUnion(2, [Polyhedron(2, (), (((1, 1), 0),)), Polyhedron(2, (), (((1, -1), 0),))])
    assert union_slice(f, [0], [2]) == PolyUnion.points([(-2,), (2,)])
    strip = PolyUnion.of(Polyhedron.box((0, 0), (1, 1)))
    assert union_slice(strip, [0], [5]).is_empty()


# -- unions ---------------------------------------------------------------------------------------

def test_union_set_equality_across_decompositions():
    a = PolyUnion(1, [Polyhedron.interval(0, 1), Polyhedron.interval(1, 2)])
    b = PolyUnion.of(Polyhedron.interval(0, 2))
    assert a == b and a <= b and b <= a
    assert not PolyUnion.of(Polyhedron.interval(0, 3)) <= b


def test_union_hull_of_points():
    u = PolyUnion.points([(0, 0), (1, 0), (0, 1)])
    assert union_hull(u).contains((F(1, 3), F(1, 3)))
    assert not union_hull(u).contains((1, 1))


# -- distances ------------------------------------------------------------------------------------

def test_hausdorff_examples():
    d = hausdorff(PolyUnion.of(Polyhedron.interval(0, 1)), PolyUnion.of(Polyhedron.interval(0, 2)))
    assert d.value == 1 and d.exact
    d = hausdorff(PolyUnion.points([(-1,), (1,)]), PolyUnion.of(Polyhedron.interval(-1, 1)))
    assert d.value == 1 and d.exact
    e = F(math.e)
    d = hausdorff(PolyUnion.of(Polyhedron.interval(1, F(9, 4))), PolyUnion.of(Polyhedron.interval(1, e)))
    assert d.exact and d.value == e - F(9, 4)
    assert abs(float(d.value) - 0.46828) < 1e-5


def test_hausdorff_rejects_unbounded():
    with pytest.raises(UnboundedSetError, match="unbounded set"):
        hausdorff(PolyUnion.of(Polyhedron.interval(0, None)), PolyUnion.of(Polyhedron.interval(0, 1)))


def test_hausdorff_two_dimensional_is_flagged_lower_bound():
    a = PolyUnion.of(Polyhedron.box((0, 0), (1, 1)))
    b = PolyUnion.of(Polyhedron.box((0, 0), (2, 1)))
    d = hausdorff(a, b)
    assert not d.exact and d.value == 1


@settings(max_examples=60, deadline=None)
@given(interval_unions(), interval_unions(), interval_unions())
def test_hausdorff_is_a_metric_in_one_dimension(a, b, c):
    dab, dba = hausdorff(a, b).value, hausdorff(b, a).value
    assert dab == dba
    assert (dab == 0) == (a == b)
    assert hausdorff(a, c).value <= dab + hausdorff(b, c).value


def test_nearest_point_on_triangle():
    tri = Polyhedron(2, (((1, 1), 1), ((-1, 0), 0), ((0, -1), 0)))
    assert nearest_point((1, 1), tri) == (H, H)
    assert nearest_point((-1, F(1, 3)), tri) == (0, F(1, 3))


# -- text format ----------------------------------------------------------------------------------

def test_union_text_round_trip():
    u = PolyUnion(2, [Polyhedron.box((0, 0), (1, F(1, 3))), Polyhedron(2, (), (((1, -1), 0),))])
    assert parse_union(dump_union(u)) == u


def test_cone_text_round_trip_and_vertex_rows():
    c = VCone.ray((1, 1)).union(VCone.span((1, -1)))
    assert parse_cone(dump_cone(c)) == c
    text = "dim 2\npiece  # a ray\ngen 1 2\nend\n"
    assert parse_cone(text) == VCone.ray((1, 2))
    seg = parse_union("dim 1\npiece\npoint 0\npoint 3/2\nend\n")
    assert seg == PolyUnion.of(Polyhedron.interval(0, F(3, 2)))


@pytest.mark.parametrize("text", [
    "piece\nineq 1 0\nend\n",                 # no dimension
    "dim 1\npiece\nineq 1\nend\n",            # wrong row length
    "dim 1\npiece\nineq 1 x\nend\n",          # bad number
    "dim 1\npiece\nineq 1 0\n",               # unclosed
    "dim 1\npiece\nineq 1 0\ngen 1\nend\n",   # mixed forms
])
def test_parse_errors(text):
    with pytest.raises(FormatError):
        parse_union(text)


def test_find_point_gives_relative_interior():
    # open strip 0 < x < 1 with y = x
    z = _fm.find_point(2, [((F(1), F(-1)), F(0))],
                       [((F(-1), F(0)), F(0), True), ((F(1), F(0)), F(1), True)])
    assert 0 < z[0] < 1 and z[0] == z[1]
