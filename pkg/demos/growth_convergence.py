#!/usr/bin/env python3
"""Reachable sets of x' in [0, x] from x0 = 1 approach [1, e] as the grid is refined.

The N-step reachable set is [1, (1 + 1/N)^N], so the Hausdorff distance to
[1, e] is e - (1 + 1/N)^N. Distances are computed exactly against a rational
stand-in for e and compared with that closed form.
"""
from __future__ import annotations

import math
import time
from fractions import Fraction

from polyvar.catalog import growth_dynamics
from polyvar.inclusion import DiscreteInclusion
from polyvar.limits import hausdorff_convergence
from polyvar.polygeom import PolyUnion, Polyhedron


def main() -> None:
    e = Fraction(math.e)
    ref = PolyUnion.of(Polyhedron.interval(1, e))
    di = DiscreteInclusion(growth_dynamics(), 1, 1)
    t0 = time.perf_counter()
    table = hausdorff_convergence(di, [10, 20, 40, 80, 100, 160], (1,), ref, label="[1, e]")
    elapsed = time.perf_counter() - t0
    print(table.render(), end="")
    print(f"{'N':>8}  {'e - (1+1/N)^N':>20}")
    for r in table.rows:
        print(f"{r.N:>8}  {math.e - (1 + 1 / r.N) ** r.N:>20.12g}")
    print(f"strictly decreasing: {table.strictly_decreasing()}   ({elapsed:.2f}s)")


if __name__ == "__main__":
    main()
