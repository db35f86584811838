#!/usr/bin/env python3
"""Costate certificates for a discretised control problem.

Velocities lie in [-1, 1], the horizon is 1 with 8 steps, and the cost is
|x0 + 1/2| + xN. The best path starts at -1/2 and moves left at full speed.
A costate sequence that satisfies the discrete adjoint recursion and the
endpoint condition exists for that path and for no path starting at 0.
"""
from __future__ import annotations

from fractions import Fraction

from polyvar.catalog import abs_objective_shifted, interval_dynamics
from polyvar.inclusion import (AdjointCertificate, DiscreteInclusion, FeasiblePath, certify_path,
                               subdiff_upper)


def lower_path(di: DiscreteInclusion, x0: Fraction) -> FeasiblePath:
    return FeasiblePath(tuple((x0 - k * di.dt,) for k in range(di.N + 1)), di.dt)


def main() -> None:
    di = DiscreteInclusion(interval_dynamics(-1, 1), 1, 8)
    phi = abs_objective_shifted()
    for x0 in (Fraction(-1, 2), Fraction(0)):
        res = certify_path(di, lower_path(di, x0), phi)
        print(f"path from x0 = {x0} at velocity -1")
        if isinstance(res, AdjointCertificate):
            print("  costates:", " ".join(str(p[0]) for p in res.costates))
            print("  endpoint pair (-p0, pN):", " ".join(str(c) for c in res.transversality))
            print("  re-verified:", res.verify(di, phi))
        else:
            print("  refuted:", res.reason, f"({res.systems_checked} systems)")
    est = subdiff_upper(di, phi, (Fraction(-1, 2),))
    print()
    print(f"value at x0 = -1/2: {est.value}")
    print(f"subgradient estimate: {est.estimate}  (contains 0: {est.estimate.contains((0,))})")


if __name__ == "__main__":
    main()
