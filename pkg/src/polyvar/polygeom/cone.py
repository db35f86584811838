"""Polyhedral cones with both representations, and finite unions of them."""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from . import _dd
from ._linalg import ZERO, Vec, dot, neg, primitive, vec
from .polyhedron import DimensionError, PolyUnion, Polyhedron, _fmt


class ConePiece:
    """A closed convex cone ``cone(rays) + span(lines)``.

    The same cone is also ``{z : a.z <= 0 (a in halfspaces), e.z == 0 (e in hyperplanes)}``.
    Both lists are canonical, so two pieces are equal iff their generators are.
    """

    __slots__ = ("dim", "rays", "lines", "halfspaces", "hyperplanes")

    def __init__(self, dim, rays, lines, halfspaces, hyperplanes):
        self.dim = dim
        self.rays = rays
        self.lines = lines
        self.halfspaces = halfspaces
        self.hyperplanes = hyperplanes

    @classmethod
    def from_generators(cls, dim: int, rays: Iterable = (), lines: Iterable = ()) -> "ConePiece":
        rays = [vec(r) for r in rays]
        lines = [vec(l) for l in lines]
        for g in rays + lines:
            if len(g) != dim:
                raise DimensionError(f"generator of length {len(g)} in dimension {dim}")
        hs, hp = _dd.generators(dim, rays, lines)
        r2, l2 = _dd.generators(dim, hs, hp)
        return cls(dim, r2, l2, hs, hp)

    @classmethod
    def from_halfspaces(cls, dim: int, halfspaces: Iterable = (), hyperplanes: Iterable = ()
                        ) -> "ConePiece":
        hs = [vec(a) for a in halfspaces]
        hp = [vec(a) for a in hyperplanes]
        for g in hs + hp:
            if len(g) != dim:
                raise DimensionError(f"row of length {len(g)} in dimension {dim}")
        rays, lines = _dd.generators(dim, hs, hp)
        return cls.from_generators(dim, rays, lines)

    @classmethod
    def from_polyhedron(cls, p: Polyhedron) -> "ConePiece":
        if p.is_empty or not p.contains((ZERO,) * p.dim):
            raise ValueError("polyhedron is not a cone with apex at the origin")
        rec = p.recession_cone()
        if not p.includes(rec):
            raise ValueError("polyhedron is not a cone with apex at the origin")
        return cls.from_halfspaces(p.dim, [a for a, _ in p.inequalities],
                                   [a for a, _ in p.equalities])

    @classmethod
    def zero(cls, dim: int) -> "ConePiece":
        return cls.from_generators(dim)

    @classmethod
    def full(cls, dim: int) -> "ConePiece":
        return cls.from_generators(dim, (), [tuple(1 if j == i else 0 for j in range(dim))
                                             for i in range(dim)])

    def polar(self) -> "ConePiece":
        return ConePiece(self.dim, self.halfspaces, self.hyperplanes, self.rays, self.lines)

    def contains(self, z: Sequence) -> bool:
        z = vec(z)
        return all(dot(a, z) <= 0 for a in self.halfspaces) and all(dot(e, z) == 0 for e in self.hyperplanes)

    def includes(self, other: "ConePiece") -> bool:
        """``other`` is a subset of ``self`` (generator test)."""
        return (all(self.contains(r) for r in other.rays)
                and all(self.contains(l) and self.contains(neg(l)) for l in other.lines))

    def is_zero(self) -> bool:
        return not self.rays and not self.lines

    def to_polyhedron(self) -> Polyhedron:
        return Polyhedron(self.dim, tuple((a, ZERO) for a in self.halfspaces),
                          tuple((e, ZERO) for e in self.hyperplanes))

    def intersect(self, other: "ConePiece") -> "ConePiece":
        return ConePiece.from_halfspaces(self.dim, self.halfspaces + other.halfspaces,
                                         self.hyperplanes + other.hyperplanes)

    def linear_image(self, mat: Sequence[Sequence]) -> "ConePiece":
        mat = [vec(r) for r in mat]
        img = lambda g: tuple(dot(row, g) for row in mat)  # noqa: E731
        return ConePiece.from_generators(len(mat), [img(r) for r in self.rays],
                                         [img(l) for l in self.lines])

    def key(self):
        return (self.lines, self.rays)

    def serialize(self) -> str:
        out = ["piece"]
        out += ["lin " + " ".join(_fmt(x) for x in l) for l in self.lines]
        out += ["gen " + " ".join(_fmt(x) for x in r) for r in self.rays]
        out.append("end")
        return "\n".join(out)

    def __eq__(self, other):
        if not isinstance(other, ConePiece):
            return NotImplemented
        return self.dim == other.dim and self.key() == other.key()

    def __hash__(self):
        return hash((self.dim, self.key()))

    def __repr__(self):
        fmt = lambda v: "(" + ", ".join(_fmt(x) for x in v) + ")"  # noqa: E731
        parts = [f"span{fmt(l)}" for l in self.lines] + [f"ray{fmt(r)}" for r in self.rays]
        return "cone[" + (" + ".join(parts) if parts else "0") + "]"


class VCone:
    """A finite union of polyhedral cones of a common dimension.

    Duplicate pieces are merged and the order is canonical. ``==`` is set
    equality of the unions.
    """

    __slots__ = ("dim", "pieces")

    def __init__(self, dim: int, pieces: Iterable[ConePiece] = ()):
        uniq = {}
        for p in pieces:
            if p.dim != dim:
                raise DimensionError(f"cone piece of dimension {p.dim} in a union of dimension {dim}")
            uniq.setdefault(p.key(), p)
        self.dim = dim
        self.pieces = tuple(uniq[k] for k in sorted(uniq))

    @classmethod
    def of(cls, *pieces: ConePiece) -> "VCone":
        return cls(pieces[0].dim, pieces)

    @classmethod
    def ray(cls, *dirs: Sequence) -> "VCone":
        """Single convex piece spanned by the given rays."""
        return cls(len(dirs[0]), [ConePiece.from_generators(len(dirs[0]), dirs)])

    @classmethod
    def span(cls, *dirs: Sequence) -> "VCone":
        return cls(len(dirs[0]), [ConePiece.from_generators(len(dirs[0]), (), dirs)])

    @classmethod
    def zero(cls, dim: int) -> "VCone":
        return cls(dim, [ConePiece.zero(dim)])

    @classmethod
    def full(cls, dim: int) -> "VCone":
        return cls(dim, [ConePiece.full(dim)])

    @classmethod
    def from_polyunion(cls, u: PolyUnion) -> "VCone":
        return cls(u.dim, [ConePiece.from_polyhedron(p) for p in u.pieces])

    def __iter__(self):
        return iter(self.pieces)

    def __len__(self):
        return len(self.pieces)

    def is_empty(self) -> bool:
        return not self.pieces

    def is_convex(self) -> bool:
        return len(self.simplify().pieces) <= 1

    def contains(self, z: Sequence) -> bool:
        return any(p.contains(z) for p in self.pieces)

    def to_polyunion(self) -> PolyUnion:
        return PolyUnion(self.dim, [p.to_polyhedron() for p in self.pieces])

    def hull(self) -> ConePiece:
        return cone_hull(self).pieces[0]

    def slice(self, fixed: Sequence[int], values: Sequence) -> PolyUnion:
        return self.to_polyunion().slice(fixed, values)

    def union(self, other: "VCone") -> "VCone":
        if other.dim != self.dim:
            raise DimensionError("union: dimension mismatch")
        return VCone(self.dim, self.pieces + other.pieces)

    def intersect(self, other: "VCone") -> "VCone":
        if other.dim != self.dim:
            raise DimensionError("intersect: dimension mismatch")
        return VCone(self.dim, [p.intersect(q) for p in self.pieces for q in other.pieces])

    def linear_image(self, mat: Sequence[Sequence]) -> "VCone":
        return VCone(len(mat), [p.linear_image(mat) for p in self.pieces])

    def permute(self, order: Sequence[int]) -> "VCone":
        """Coordinate ``i`` of the result is coordinate ``order[i]`` of self."""
        mat = [tuple(1 if j == k else 0 for j in range(self.dim)) for k in order]
        return self.linear_image(mat)

    def negate(self) -> "VCone":
        mat = [tuple(-1 if j == i else 0 for j in range(self.dim)) for i in range(self.dim)]
        return self.linear_image(mat)

    def simplify(self) -> "VCone":
        """Drop pieces contained in another piece."""
        ps = list(self.pieces)
        keep = []
        for i, p in enumerate(ps):
            dominated = False
            for j, q in enumerate(ps):
                if i != j and q.includes(p) and (not p.includes(q) or j < i):
                    dominated = True
                    break
            if not dominated:
                keep.append(p)
        return VCone(self.dim, keep)

    def includes(self, other: "VCone") -> bool:
        return cone_includes(other, self)

    def __le__(self, other: "VCone") -> bool:
        return cone_includes(self, other)

    def __ge__(self, other: "VCone") -> bool:
        return cone_includes(other, self)

    def __eq__(self, other):
        if not isinstance(other, VCone):
            return NotImplemented
        if self.dim != other.dim:
            return False
        if [p.key() for p in self.pieces] == [p.key() for p in other.pieces]:
            return True
        return cone_includes(self, other) and cone_includes(other, self)

    __hash__ = None

    def serialize(self) -> str:
        return "\n".join(p.serialize() for p in self.pieces)

    def __repr__(self):
        if not self.pieces:
            return "VCone(empty)"
        return "VCone(" + " u ".join(repr(p) for p in self.pieces) + ")"


def cone_hull(c: VCone) -> VCone:
    """Closed convex conic hull of a union, as a one-piece VCone."""
    rays, lines = [], []
    for p in c.pieces:
        rays += p.rays
        lines += p.lines
    return VCone(c.dim, [ConePiece.from_generators(c.dim, rays, lines)])


def cone_includes(c1: VCone, c2: VCone) -> bool:
    """Whether ``c1`` is a subset of ``c2``.

    Exact in both cases: by generators when a single piece of ``c2`` covers a
    piece of ``c1``, otherwise by an exact set-difference cover test.
    """
    if c1.dim != c2.dim:
        raise DimensionError(f"dimension mismatch: {c1.dim} vs {c2.dim}")
    rest = []
    for p in c1.pieces:
        if any(q.includes(p) for q in c2.pieces):
            continue
        rest.append(p)
    if not rest:
        return True
    if len(c2.pieces) <= 1:
        return False
    target = c2.to_polyunion()
    return PolyUnion(c1.dim, [p.to_polyhedron() for p in rest]).issubset(target)


def polar(c: VCone) -> VCone:
    """Polar cone of a union (the polar of its convex hull)."""
    if not c.pieces:
        return VCone.full(c.dim)
    return VCone(c.dim, [cone_hull(c).pieces[0].polar()])
