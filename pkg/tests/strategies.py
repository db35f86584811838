"""Hypothesis strategies for small exact polyhedral instances."""
from fractions import Fraction

from hypothesis import strategies as st

from polyvar.polygeom import ConePiece, PolyUnion, Polyhedron
from polyvar.setmaps import SetMap

small = st.integers(-3, 3).map(Fraction)
rationals = st.fractions(min_value=-4, max_value=4, max_denominator=6)


def vectors(dim, elements=small):
    return st.tuples(*[elements] * dim)


def nonzero_vectors(dim):
    return vectors(dim).filter(any)


@st.composite
def cone_pieces(draw, dim=None):
    dim = dim or draw(st.integers(1, 3))
    rays = draw(st.lists(nonzero_vectors(dim), max_size=4))
    lines = draw(st.lists(nonzero_vectors(dim), max_size=1))
    return ConePiece.from_generators(dim, rays, lines)


@st.composite
def polyhedra(draw, dim=2, nonempty=True):
    rows = draw(st.lists(st.tuples(nonzero_vectors(dim), small), min_size=0, max_size=4))
    eqs = draw(st.lists(st.tuples(nonzero_vectors(dim), small), max_size=1))
    p = Polyhedron(dim, tuple(rows), tuple(eqs))
    if nonempty:
        from hypothesis import assume
        assume(not p.is_empty)
    return p


@st.composite
def intervals(draw):
    lo = draw(rationals)
    width = draw(st.fractions(min_value=0, max_value=3, max_denominator=4))
    return Polyhedron.interval(lo, lo + width)


def interval_unions(max_size=4):
    return st.lists(intervals(), min_size=1, max_size=max_size).map(lambda ps: PolyUnion(1, ps))


@st.composite
def maps(draw, n=1, m=1, max_pieces=2):
    pieces = draw(st.lists(polyhedra(n + m), min_size=1, max_size=max_pieces))
    return SetMap(n, m, pieces)
