"""Fourier-Motzkin elimination over exact rationals.

A *system* is a pair ``(eqs, ineqs)`` in a fixed ambient dimension:

* ``eqs``   -- list of ``(a, b)`` meaning ``a . z == b``
* ``ineqs`` -- list of ``(a, b, strict)`` meaning ``a . z <= b`` (``< b`` if strict)

Strict inequalities are what make exact emptiness of set differences and of
relatively open arrangement cells decidable without an LP solver.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from ._linalg import ZERO, Vec, dot, neg, primitive_with

Eq = tuple  # (Vec, Fraction)
Ineq = tuple  # (Vec, Fraction, bool)

# above this many inequalities an exact redundancy sweep is run between steps
_PRUNE_THRESHOLD = 28


class _Infeasible(Exception):
    pass


def _prune(ineqs: Iterable[Ineq]) -> list[Ineq]:
    """Drop trivial rows, keep the tightest row per direction, detect clashes."""
    best: dict[Vec, tuple[Fraction, bool]] = {}
    for a, b, s in ineqs:
        if not any(a):
            if b < 0 or (b == 0 and s):
                raise _Infeasible
            continue
        a2, b2 = primitive_with(a, b)
        prev = best.get(a2)
        if prev is None or b2 < prev[0] or (b2 == prev[0] and s and not prev[1]):
            best[a2] = (b2, s)
    for a2, (b2, s2) in best.items():
        opp = best.get(neg(a2))
        if opp is not None:
            tot = b2 + opp[0]
            if tot < 0 or (tot == 0 and (s2 or opp[1])):
                raise _Infeasible
    return [(a, b, s) for a, (b, s) in best.items()]


def _substitute(c: Vec, d: Fraction, a: Vec, b: Fraction, p: int) -> tuple[Vec, Fraction]:
    f = c[p] / a[p]
    return tuple(ci - f * ai for ci, ai in zip(c, a)), d - f * b


def _eliminate(dim: int, eqs: Sequence[Eq], ineqs: Sequence[Ineq], drop: Iterable[int],
               record: list | None = None) -> tuple[list[Eq], list[Ineq]]:
    drop = set(drop)
    eqs = [(tuple(a), Fraction(b)) for a, b in eqs]
    ineqs = _prune((tuple(a), Fraction(b), bool(s)) for a, b, s in ineqs)

    kept_eqs: list[Eq] = []
    pending = list(eqs)
    while pending:
        a, b = pending.pop(0)
        if not any(a):
            if b != 0:
                raise _Infeasible
            continue
        p = next((j for j in sorted(drop) if a[j]), None)
        if p is None:
            kept_eqs.append((a, b))
            continue
        if record is not None:
            record.append(("eq", p, a, b))
        pending = [(_substitute(c, d, a, b, p)) if c[p] else (c, d) for c, d in pending]
        kept_eqs = [(_substitute(c, d, a, b, p)) if c[p] else (c, d) for c, d in kept_eqs]
        ineqs = _prune(
            (*_substitute(c, d, a, b, p), s) if c[p] else (c, d, s) for c, d, s in ineqs
        )
    # equalities that lost all their dropped variables may now be trivial
    cleaned = []
    for a, b in kept_eqs:
        if not any(a):
            if b != 0:
                raise _Infeasible
            continue
        cleaned.append((a, b))
    kept_eqs = cleaned

    remaining = {j for j in drop if any(c[j] for c, _, _ in ineqs)}
    while remaining:
        def cost(j):
            pos = sum(1 for c, _, _ in ineqs if c[j] > 0)
            ng = sum(1 for c, _, _ in ineqs if c[j] < 0)
            return pos * ng - pos - ng, j
        j = min(remaining, key=cost)
        remaining.discard(j)
        pos = [r for r in ineqs if r[0][j] > 0]
        ngs = [r for r in ineqs if r[0][j] < 0]
        rest = [r for r in ineqs if not r[0][j]]
        if record is not None:
            record.append(("fm", j, pos + ngs))
        for cp, dp, sp in pos:
            for cn, dn, sn in ngs:
                lp, ln = -cn[j], cp[j]
                c = tuple(lp * x + ln * y for x, y in zip(cp, cn))
                rest.append((c, lp * dp + ln * dn, sp or sn))
        ineqs = _prune(rest)
        if len(ineqs) > _PRUNE_THRESHOLD:
            ineqs = _drop_redundant(dim, kept_eqs, ineqs)
        remaining = {k for k in remaining if any(c[k] for c, _, _ in ineqs)}
    return kept_eqs, ineqs


def _drop_redundant(dim: int, eqs: list[Eq], ineqs: list[Ineq]) -> list[Ineq]:
    out = list(ineqs)
    i = 0
    while i < len(out):
        a, b, s = out[i]
        others = out[:i] + out[i + 1:]
        # row i is redundant iff others together with its violation are infeasible
        viol = (neg(a), -b, not s)
        if not feasible(dim, eqs, others + [viol]):
            out = others
        else:
            i += 1
    return out


def feasible(dim: int, eqs: Sequence[Eq], ineqs: Sequence[Ineq]) -> bool:
    try:
        _eliminate(dim, eqs, ineqs, range(dim))
    except _Infeasible:
        return False
    return True


def _pick(lo, lo_strict, hi, hi_strict) -> Fraction:
    if lo is not None and hi is not None:
        if lo == hi:
            return lo
        return (lo + hi) / 2
    if lo is not None:
        return Fraction(lo.__floor__() + 1)
    if hi is not None:
        return Fraction(hi.__ceil__() - 1)
    return ZERO


def find_point(dim: int, eqs: Sequence[Eq], ineqs: Sequence[Ineq]) -> Vec | None:
    """A rational point of the system, or None if it is empty.

    Open bounds are resolved by midpoints, so strict rows hold strictly.
    """
    record: list = []
    try:
        _eliminate(dim, eqs, ineqs, range(dim), record)
    except _Infeasible:
        return None
    z = [ZERO] * dim
    for entry in reversed(record):
        if entry[0] == "fm":
            _, j, cons = entry
            lo = hi = None
            lo_s = hi_s = False
            for c, d, s in cons:
                r = d - sum(c[i] * z[i] for i in range(dim) if i != j and c[i])
                val = r / c[j]
                if c[j] > 0:
                    if hi is None or val < hi or (val == hi and s):
                        hi, hi_s = val, s
                else:
                    if lo is None or val > lo or (val == lo and s):
                        lo, lo_s = val, s
            z[j] = _pick(lo, lo_s, hi, hi_s)
        else:
            _, p, a, b = entry
            r = b - sum(a[i] * z[i] for i in range(dim) if i != p and a[i])
            z[p] = r / a[p]
    return tuple(z)


def project(dim: int, eqs: Sequence[Eq], ineqs: Sequence[Ineq], keep: Sequence[int]
            ) -> tuple[list[Eq], list[Ineq]] | None:
    """Projection onto the coordinates ``keep`` (in that order); None if empty."""
    keep = list(keep)
    drop = [j for j in range(dim) if j not in keep]
    try:
        e, i = _eliminate(dim, eqs, ineqs, drop)
    except _Infeasible:
        return None
    if not feasible(dim, e, i):
        return None
    e2 = [(tuple(a[k] for k in keep), b) for a, b in e]
    i2 = [(tuple(a[k] for k in keep), b, s) for a, b, s in i]
    return e2, i2


def covered(dim: int, eqs: Sequence[Eq], ineqs: Sequence[Ineq],
            pieces: Sequence[tuple[Sequence[Eq], Sequence[Ineq]]]) -> bool:
    """Whether the system is contained in the union of closed ``pieces``.

    Pieces are ``(eqs, ineqs)`` with non-strict rows. The difference is
    peeled off piece by piece, each cut producing strictly violated rows.
    """
    eqs = list(eqs)
    ineqs = list(ineqs)
    if not feasible(dim, eqs, ineqs):
        return True
    if not pieces:
        return False
    (qe, qi), rest = pieces[0], pieces[1:]
    if not feasible(dim, eqs + list(qe), ineqs + [(a, b, False) for a, b, *_ in qi]):
        return covered(dim, eqs, ineqs, rest)
    rows: list[tuple[Vec, Fraction]] = [(tuple(a), Fraction(b)) for a, b, *_ in qi]
    for a, b in qe:
        rows.append((tuple(a), Fraction(b)))
        rows.append((neg(tuple(a)), -Fraction(b)))
    prefix: list[Ineq] = []
    for a, b in rows:
        cut = ineqs + prefix + [(neg(a), -b, True)]
        if feasible(dim, eqs, cut) and not covered(dim, eqs, cut, rest):
            return False
        prefix.append((a, b, False))
    return True


def linear_min(dim: int, eqs: Sequence[Eq], ineqs: Sequence[Ineq], c: Vec
               ) -> tuple[Fraction | None, bool] | None:
    """Infimum of ``c . z`` over the system.

    Returns ``(value, attained)`` with value None for -inf, or None if the
    system is empty. Done by projecting onto an extra coordinate t = c . z.
    """
    ext_eqs = [(tuple(a) + (ZERO,), b) for a, b in eqs]
    ext_eqs.append((tuple(c) + (Fraction(-1),), ZERO))
    ext_in = [(tuple(a) + (ZERO,), b, s) for a, b, s in ineqs]
    res = project(dim + 1, ext_eqs, ext_in, [dim])
    if res is None:
        return None
    e, i = res
    for a, b in e:
        return b / a[0], True
    lo = None
    lo_s = False
    for a, b, s in i:
        if a[0] < 0:
            val = b / a[0]
            if lo is None or val > lo or (val == lo and s):
                lo, lo_s = val, s
    if lo is None:
        return None, False
    return lo, not lo_s


