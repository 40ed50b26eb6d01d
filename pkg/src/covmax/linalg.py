"""Exact rational linear algebra over ``fractions.Fraction``.

Matrices are plain nested sequences (row-major); every function here returns
fresh ``list`` objects and never mutates its inputs.  No floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Rat = Fraction
RatVector = list[Fraction]
RatMatrix = list[list[Fraction]]


def frac(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction (floats refused)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted in exact code paths")
    return Fraction(x)


def rat_str(x: Fraction) -> str:
    x = frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def vec(xs: Iterable) -> RatVector:
    return [frac(x) for x in xs]


def mat(rows: Iterable[Iterable]) -> RatMatrix:
    m = [vec(r) for r in rows]
    if m and any(len(r) != len(m[0]) for r in m):
        raise ValueError("ragged matrix")
    return m


def identity(n: int) -> RatMatrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def zeros(r: int, c: int) -> RatMatrix:
    return [[Fraction(0)] * c for _ in range(r)]


def transpose(m: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*m)]


def dot(u: Sequence, v: Sequence):
    if len(u) != len(v):
        raise ValueError(f"dimension mismatch: {len(u)} vs {len(v)}")
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def matvec(m: Sequence[Sequence], v: Sequence) -> list:
    return [dot(row, v) for row in m]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = transpose(b)
    return [[dot(row, col) for col in bt] for row in a]


def quad(q: Sequence[Sequence], x: Sequence) -> Fraction:
    """Q[x] = x^t Q x."""
    return dot(x, matvec(q, x))


def is_symmetric(m: Sequence[Sequence]) -> bool:
    n = len(m)
    return all(len(r) == n for r in m) and all(
        m[i][j] == m[j][i] for i in range(n) for j in range(i + 1, n)
    )


def _integer_rows(m: Sequence[Sequence]) -> list[list[int]]:
    out = []
    for row in m:
        row = [frac(x) for x in row]
        d = lcm(*(x.denominator for x in row)) if row else 1
        out.append([int(x * d) for x in row])
    return out


def _bareiss(rows: list[list[int]]) -> tuple[int, int]:
    """Fraction-free elimination in place; returns (rank, signed last pivot).

    For a square full-rank input the second value is the determinant.
    """
    nr = len(rows)
    nc = len(rows[0]) if rows else 0
    prev = 1
    sign = 1
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if rows[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            rows[r], rows[piv] = rows[piv], rows[r]
            sign = -sign
        pr = rows[r]
        p = pr[c]
        for i in range(r + 1, nr):
            ri = rows[i]
            a = ri[c]
            for j in range(c + 1, nc):
                ri[j] = (p * ri[j] - a * pr[j]) // prev
            ri[c] = 0
        prev = p
        r += 1
        if r == nr:
            break
    return r, sign * prev


def rank(m: Sequence[Sequence]) -> int:
    """Exact rank via Bareiss elimination (rows scaled to integers first)."""
    if not m or not m[0]:
        return 0
    return _bareiss(_integer_rows(m))[0]


def det(m: Sequence[Sequence]) -> Fraction:
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("det of a non-square matrix")
    if n == 0:
        return Fraction(1)
    scale = 1
    rows = []
    for row in m:
        row = [frac(x) for x in row]
        d = lcm(*(x.denominator for x in row))
        scale *= d
        rows.append([int(x * d) for x in row])
    r, d = _bareiss(rows)
    if r < n:
        return Fraction(0)
    return Fraction(d, scale)


def int_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix (Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    rows = [list(r) for r in m]
    r, d = _bareiss(rows)
    return d if r == n else 0


def rref(m: Sequence[Sequence]) -> tuple[RatMatrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = [[frac(x) for x in row] for row in m]
    nr = len(a)
    nc = len(a[0]) if a else 0
    pivots: list[int] = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a, pivots


def solve(a: Sequence[Sequence], b: Sequence) -> RatVector | None:
    """One exact solution of A x = b, or None when the system is inconsistent."""
    if len(a) != len(b):
        raise ValueError("A and b have different row counts")
    nc = len(a[0]) if a else 0
    aug = [list(row) + [bb] for row, bb in zip(a, b)]
    red, pivots = rref(aug)
    if nc in pivots:
        return None
    x = [Fraction(0)] * nc
    for i, c in enumerate(pivots):
        x[c] = red[i][nc]
    return x


def nullspace(m: Sequence[Sequence], ncols: int | None = None) -> RatMatrix:
    """Basis (as rows) of {x : M x = 0}."""
    nc = len(m[0]) if m else (ncols or 0)
    if not m:
        return identity(nc)
    red, pivots = rref(m)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * nc
        x[f] = Fraction(1)
        for i, c in enumerate(pivots):
            x[c] = -red[i][f]
        basis.append(x)
    return basis


def inverse(m: Sequence[Sequence]) -> RatMatrix:
    n = len(m)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in red]


def ldl_pivots(q: Sequence[Sequence]) -> list[Fraction]:
    """Pivots of the symmetric LDL^t decomposition (stops at the first zero pivot)."""
    a = [[frac(x) for x in row] for row in q]
    n = len(a)
    pivots = []
    for k in range(n):
        p = a[k][k]
        pivots.append(p)
        if p == 0:
            break
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for j in range(k + 1, n):
                    a[i][j] -= f * a[k][j]
    return pivots


def is_positive_definite(q: Sequence[Sequence]) -> bool:
    if not is_symmetric(q):
        raise ValueError("is_positive_definite expects a symmetric matrix")
    piv = ldl_pivots(q)
    return len(piv) == len(q) and all(p > 0 for p in piv)


def leading_minors(q: Sequence[Sequence]) -> list[Fraction]:
    return [det([row[:k] for row in q[:k]]) for k in range(1, len(q) + 1)]


def primitive(v: Sequence) -> list[int]:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    v = [frac(x) for x in v]
    d = lcm(*(x.denominator for x in v)) if v else 1
    iv = [int(x * d) for x in v]
    g = 0
    for x in iv:
        g = gcd(g, x)
    return [x // g for x in iv] if g else iv


def common_denominator(xs: Iterable) -> int:
    d = 1
    for x in xs:
        d = lcm(d, frac(x).denominator)
    return d


def int_echelon(m: Sequence[Sequence[int]]) -> list[list[int]]:
    """Nonzero rows of an integer row echelon form (fraction-free, gcd-reduced)."""
    rows = [list(r) for r in m]
    nc = len(rows[0]) if rows else 0
    out = []
    for c in range(nc):
        piv = next((i for i, r in enumerate(rows) if r[c] != 0), None)
        if piv is None:
            continue
        pr = rows.pop(piv)
        p = pr[c]
        nxt = []
        for r in rows:
            a = r[c]
            if a:
                r = [p * x - a * y for x, y in zip(r, pr)]
                g = 0
                for x in r:
                    g = gcd(g, x)
                if g > 1:
                    r = [x // g for x in r]
            if any(r):
                nxt.append(r)
        rows = nxt
        out.append(pr)
        if not rows:
            break
    return out


def int_kernel_vector(m: Sequence[Sequence[int]]) -> list[int] | None:
    """Primitive generator of the integer kernel when it is one-dimensional, else None."""
    ech = int_echelon(m)
    nc = len(m[0])
    if len(ech) != nc - 1:
        return None
    pivots = [next(j for j, x in enumerate(r) if x) for r in ech]
    free = next(j for j in range(nc) if j not in pivots)
    x = [0] * nc
    x[free] = 1
    for r, c in zip(reversed(ech), reversed(pivots)):
        s = sum(r[j] * x[j] for j in range(c + 1, nc))
        p = r[c]
        mult = abs(p) // gcd(p, s)
        if mult != 1:
            x = [v * mult for v in x]
        x[c] = -s * mult // p
    return primitive(x)


def solve_unique(a: Sequence[Sequence], b: Sequence) -> RatVector | None:
    """The unique solution of a square system (Cramer over integers), or None if singular."""
    rows = _integer_rows([list(r) + [bb] for r, bb in zip(a, b)])
    n = len(rows)
    base = [r[:n] for r in rows]
    d = int_det(base)
    if d == 0:
        return None
    out = []
    for j in range(n):
        m = [r[:j] + [r[n]] + r[j + 1 : n] for r in rows]
        out.append(Fraction(int_det(m), d))
    return out
