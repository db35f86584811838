"""Exact polyhedral variational analysis.

Set-valued maps are represented by their graphs, finite unions of rational
polyhedra. On top of that kernel the package computes normal cones,
coderivatives and subdifferentials, checks chain rules, and analyses
discrete differential inclusions and their adjoint systems.
"""
from .chainrules import (ChainVerdict, chain_convex_exact, chain_upper, check_cq,
                         marginal_subdiff, tightness_pattern, wp_filtered_chain)
from .inclusion import (AdjointCertificate, DiscreteInclusion, FeasiblePath, Refutation,
                        adjoint_propagate, adjoint_reachable_pi, certify_path, enumerate_paths,
                        path_coderiv, reachable, reachable_graph, step_coderiv_map, subdiff_upper)
from .limits import hausdorff_convergence, interpolate, nested_hull_check, pi_stability
from .polygeom import PolyUnion, Polyhedron, VCone, hausdorff
from .setmaps import (PieceBudgetError, SetMap, compose, convexify_values, eval_map, inverse,
                      outer_norm, step_map)
from .varcones import (PiecewiseAffine, coderivative, limiting_normal_cone, normal_cone,
                       regular_normal_cone, subdifferential, tangent_cone)

__all__ = [
    "AdjointCertificate", "ChainVerdict", "DiscreteInclusion", "FeasiblePath", "PieceBudgetError",
    "PiecewiseAffine", "PolyUnion", "Polyhedron", "Refutation", "SetMap", "VCone",
    "adjoint_propagate", "adjoint_reachable_pi", "certify_path", "chain_convex_exact",
    "chain_upper", "check_cq", "coderivative", "compose", "convexify_values", "enumerate_paths",
    "eval_map", "hausdorff", "hausdorff_convergence", "interpolate", "inverse",
    "limiting_normal_cone", "marginal_subdiff", "nested_hull_check", "normal_cone", "outer_norm",
    "path_coderiv", "pi_stability", "reachable", "reachable_graph", "regular_normal_cone",
    "step_coderiv_map", "step_map", "subdiff_upper", "subdifferential", "tangent_cone",
    "tightness_pattern", "wp_filtered_chain",
]
