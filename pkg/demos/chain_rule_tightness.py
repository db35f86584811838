#!/usr/bin/env python3
"""Where the composition rule for coderivatives is tight and where it is loose.

The outer map is F(y) = {-y} u {y}. Three inner maps are composed with it at
the origin:

  split    G(x) = (-inf, -x] u [x, inf) for x >= 0, the whole line otherwise
  floor    G(x) = [min(0, x), inf)
  ceiling  G(x) = [max(x/2, x), inf)

For each pair the convexified coderivative of F o G is compared with two
composed bounds: one that keeps the limiting coderivative of F, and one that
convexifies both factors. Relations are decided by exact cone inclusion.
"""
from __future__ import annotations

from fractions import Fraction

from polyvar import chain_upper, compose, coderivative, tightness_pattern
from polyvar.catalog import max_floor_map, min_floor_map, split_cone_map, two_branch_map
from polyvar.setmaps import eval_map


def show(label, s, us):
    vals = ", ".join(f"u={u}: {eval_map(s, (u,))}" for u in us)
    print(f"    {label:<28} {vals}")


def main() -> None:
    f = two_branch_map()
    us = (Fraction(1), Fraction(-2))
    for name, g in (("split", split_cone_map()), ("floor", min_floor_map()),
                    ("ceiling", max_floor_map())):
        first, second = tightness_pattern(f, g, (0,), (0,))
        print(f"{name}: co D*(F o G)  {first}  co D*G o D*F  {second}  co D*G o co D*F")
        direct = coderivative(compose(f, g), (0,), (0,), "convexified").as_map()
        mid = chain_upper(f, g, (0,), (0,), "convexified")
        loose = chain_upper(f, g, (0,), (0,), "convexified", relaxed=True)
        show("direct", direct, us)
        show("limiting inner factor", mid.rhs, us)
        show("both factors convexified", loose.rhs, us)
        print(f"    qualification condition holds: {mid.certified}")
        print()


if __name__ == "__main__":
    main()
