#!/usr/bin/env python3
"""Float sampling against exact normal cones.

Random unit directions are tested against the graph of each map near the
origin at shrinking radii; the verdicts are compared with exact cone
membership. A second check runs brute-force grid reachability next to the
exact reachable set.
"""
from __future__ import annotations

from fractions import Fraction

from polyvar import compose
from polyvar.catalog import (max_floor_map, min_floor_map, split_cone_map, two_branch_map,
                             two_velocity_dynamics)
from polyvar.inclusion import DiscreteInclusion, reachable
from polyvar.oracle import grid_reachable, sample_normals
from polyvar.polygeom import PolyUnion


def main() -> None:
    f = two_branch_map()
    maps = {"F": f, "split": split_cone_map(), "floor": min_floor_map(), "ceiling": max_floor_map()}
    maps.update({f"F o {k}": compose(f, g) for k, g in list(maps.items())[1:]})
    print(f"{'graph':<12} {'kind':<9} {'rate':>7} {'ambiguous':>10} {'generators':>11}")
    for name, s in maps.items():
        for kind in ("regular", "limiting"):
            rep = sample_normals(s.graph, (0, 0), kind, samples=1000, seed=11)
            gens = f"{sum(rep.recovered)}/{len(rep.recovered)}"
            print(f"{name:<12} {kind:<9} {rep.agreement_rate:>7.3f} {rep.ambiguous:>10} {gens:>11}")
    print()
    di = DiscreteInclusion(two_velocity_dynamics(), 1, 6)
    cloud = grid_reachable(di, (0,), Fraction(1, 6))
    exact = reachable(di, (0,))
    print(f"two velocities, 6 steps: {cloud.branches} branches, {len(cloud.points)} distinct points")
    print(f"grid cloud equals exact set: {PolyUnion.points(cloud.points) == exact}")


if __name__ == "__main__":
    main()
