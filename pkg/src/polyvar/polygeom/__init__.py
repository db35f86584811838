"""Exact rational polyhedral geometry: polyhedra, unions, cones, distances."""
from .cone import ConePiece, VCone, cone_hull, cone_includes, polar
from .hausdorff import Distance, UnboundedSetError, hausdorff, nearest_point, point_distance_sq
from .io import FormatError, dump_cone, dump_union, parse_cone, parse_rat, parse_union
from .polyhedron import (DimensionError, PolyUnion, Polyhedron, interval_bounds,
                         merged_intervals, poly_contains, project, union_hull, union_slice)

__all__ = [
    "ConePiece", "DimensionError", "Distance", "FormatError", "PolyUnion", "Polyhedron",
    "UnboundedSetError", "VCone", "cone_hull", "cone_includes", "dump_cone", "dump_union",
    "hausdorff", "interval_bounds", "nearest_point", "merged_intervals", "parse_cone", "parse_rat",
    "parse_union", "point_distance_sq", "poly_contains", "polar", "project", "union_hull",
    "union_slice",
]
