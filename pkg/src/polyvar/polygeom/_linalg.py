"""Small exact linear-algebra helpers over ``fractions.Fraction``.

Vectors are plain tuples of Fractions; matrices are lists of such tuples.
Everything here is sized for the tiny systems of the geometry kernel
(dimension at most ~10), so clarity beats speed.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Vec = tuple  # tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_rat(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        # exact binary value; callers wanting decimals should pass strings
        return Fraction(x)
    return Fraction(x)


def vec(v: Iterable) -> Vec:
    return tuple(to_rat(x) for x in v)


def zeros(d: int) -> Vec:
    return (ZERO,) * d


def unit(d: int, i: int) -> Vec:
    return tuple(ONE if j == i else ZERO for j in range(d))


def dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    s = ZERO
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


def add(a: Vec, b: Vec) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Vec, b: Vec) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Vec) -> Vec:
    return tuple(c * x for x in a)


def neg(a: Vec) -> Vec:
    return tuple(-x for x in a)


def is_zero(a: Sequence[Fraction]) -> bool:
    return not any(a)


def norm2(a: Sequence[Fraction]) -> Fraction:
    return dot(a, a)


def primitive(v: Sequence[Fraction]) -> Vec:
    """Positive rescaling of ``v`` to a primitive integer vector."""
    if not any(v):
        return tuple(ZERO for _ in v)
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for i in ints:
        g = gcd(g, i)
    return tuple(Fraction(i // g) for i in ints)


def primitive_with(v: Sequence[Fraction], rhs: Fraction) -> tuple[Vec, Fraction]:
    """Rescale ``(v, rhs)`` jointly by a positive factor making ``v`` primitive."""
    if not any(v):
        return tuple(v), rhs
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for i in ints:
        g = gcd(g, i)
    f = Fraction(den, g)
    return tuple(Fraction(i // g) for i in ints), rhs * f


def rref(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> tuple[list[Vec], list[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(m)):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows: Sequence[Sequence[Fraction]], ncols: int | None = None) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols)[0])


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vec]:
    """Basis of {z : row . z = 0 for all rows} as primitive integer vectors."""
    if not rows:
        return [unit(ncols, i) for i in range(ncols)]
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        z = [ZERO] * ncols
        z[f] = ONE
        for row, p in zip(red, piv):
            z[p] = -row[f]
        basis.append(primitive(z))
    return basis


def row_basis(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vec]:
    """Canonical basis (primitive RREF rows) of the row space."""
    red, _ = rref(rows, ncols)
    return [primitive(r) for r in red]


def reduce_mod(v: Vec, basis_rref: Sequence[Vec], pivots: Sequence[int]) -> Vec:
    """Remove from ``v`` the components along an RREF basis (zeroes pivot columns)."""
    out = list(v)
    for row, p in zip(basis_rref, pivots):
        c = out[p]
        if c:
            out = [x - c * y for x, y in zip(out, row)]
    return tuple(out)


def solve(a: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> Vec | None:
    """One solution of ``a z = b`` (free variables set to 0), or None."""
    if not a:
        return None
    n = len(a[0])
    aug = [tuple(row) + (rhs,) for row, rhs in zip(a, b)]
    red, piv = rref(aug, n + 1)
    if n in piv:
        return None
    z = [ZERO] * n
    for row, p in zip(red, piv):
        z[p] = row[n]
    return tuple(z)


def project_onto_affine(p: Vec, a: Sequence[Vec], b: Sequence[Fraction]) -> Vec | None:
    """Euclidean projection of ``p`` onto {z : a z = b}; None if inconsistent."""
    if not a:
        return tuple(p)
    aug = [tuple(row) + (rhs,) for row, rhs in zip(a, b)]
    n = len(p)
    red, piv = rref(aug, n + 1)
    if n in piv:
        return None
    rows = [r[:n] for r in red]
    rhs = [r[n] for r in red]
    k = len(rows)
    # z = p - A^T lam with (A A^T) lam = A p - b
    gram = [[dot(rows[i], rows[j]) for j in range(k)] for i in range(k)]
    resid = [dot(rows[i], p) - rhs[i] for i in range(k)]
    lam = solve(gram, resid)
    if lam is None:  # pragma: no cover - rows are independent after rref
        return None
    z = list(p)
    for i in range(k):
        if lam[i]:
            z = [zi - lam[i] * ai for zi, ai in zip(z, rows[i])]
    return tuple(z)
