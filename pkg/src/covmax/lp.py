"""Exact two-phase simplex (Bland's rule) and the tiered feasibility verdict.

The verdict mirrors the eutactic / semieutactic / weakly eutactic tiers:

* ``strictly-feasible``: the largest uniform lower bound ``eps`` on the
  ``eps``-constrained variables is positive (capped at 1),
* ``feasible``: a solution with the sign constraints exists but ``eps* = 0``,
* ``solvable-free``: only the unconstrained linear system is solvable,
* ``infeasible``: not even that.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Sequence

from .linalg import RatVector, frac, solve

Kind = Literal["free", "nonneg", "eps"]

EPS_CAP = Fraction(1)


@dataclass(frozen=True)
class LPProblem:
    A: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]
    kinds: tuple[str, ...]

    def __post_init__(self):
        if len(self.A) != len(self.b):
            raise ValueError("A and b row counts differ")
        nvar = len(self.kinds)
        if any(len(row) != nvar for row in self.A):
            raise ValueError("constraint width does not match the number of variables")
        bad = set(self.kinds) - {"free", "nonneg", "eps"}
        if bad:
            raise ValueError(f"unknown variable kinds {sorted(bad)}")

    @classmethod
    def build(cls, A: Sequence[Sequence], b: Sequence, kinds: Sequence[str] | str) -> "LPProblem":
        A = tuple(tuple(frac(x) for x in row) for row in A)
        if isinstance(kinds, str):
            width = len(A[0]) if A else 0
            kinds = (kinds,) * width
        return cls(A, tuple(frac(x) for x in b), tuple(kinds))

    def residual(self, x: Sequence) -> list[Fraction]:
        return [sum((a * xi for a, xi in zip(row, x)), Fraction(0)) - bi for row, bi in zip(self.A, self.b)]


@dataclass(frozen=True)
class LPVerdict:
    status: Literal["strictly-feasible", "feasible", "solvable-free", "infeasible"]
    witness: RatVector | None = None
    eps: Fraction | None = None
    capped: bool = field(default=False)


class Unbounded(Exception):
    pass


def _pivot(t: list[list[Fraction]], r: int, c: int) -> None:
    row = t[r]
    p = row[c]
    if p != 1:
        inv = 1 / p
        row = [x * inv for x in row]
        t[r] = row
    nz = [j for j, x in enumerate(row) if x]
    for i, other in enumerate(t):
        if i != r:
            f = other[c]
            if f:
                for j in nz:
                    other[j] -= f * row[j]


def _simplex(t: list[list[Fraction]], basis: list[int], allowed: int) -> None:
    """Minimise the objective stored in the last row of ``t`` (reduced costs).

    Columns ``>= allowed`` may not enter.  Bland's rule throughout.
    """
    m = len(basis)
    while True:
        obj = t[m]
        enter = next((j for j in range(allowed) if obj[j] < 0), None)
        if enter is None:
            return
        best = None
        for i in range(m):
            a = t[i][enter]
            if a > 0:
                ratio = t[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            raise Unbounded
        r = best[1]
        _pivot(t, r, enter)
        basis[r] = enter


def simplex_min(A: Sequence[Sequence[Fraction]], b: Sequence[Fraction], c: Sequence[Fraction]):
    """min c.x s.t. A x = b, x >= 0.  Returns (value, x) or None if infeasible.

    Raises ``Unbounded`` for an unbounded objective.
    """
    m = len(A)
    nvar = len(c)
    rows = []
    rhs = []
    for row, bi in zip(A, b):
        row = [frac(x) for x in row]
        bi = frac(bi)
        if bi < 0:
            row = [-x for x in row]
            bi = -bi
        rows.append(row)
        rhs.append(bi)
    # phase I: artificial columns nvar .. nvar+m-1
    t = [rows[i] + [Fraction(int(i == k)) for k in range(m)] + [rhs[i]] for i in range(m)]
    obj = [Fraction(0)] * (nvar + m + 1)
    for i in range(m):
        for j in range(nvar):
            obj[j] -= t[i][j]
        obj[-1] -= t[i][-1]
    t.append(obj)
    basis = list(range(nvar, nvar + m))
    _simplex(t, basis, nvar)
    if t[m][-1] != 0:
        return None
    # drive artificials out of the basis; drop redundant rows
    i = 0
    while i < len(basis):
        if basis[i] >= nvar:
            col = next((j for j in range(nvar) if t[i][j] != 0), None)
            if col is None:
                del t[i]
                del basis[i]
                continue
            _pivot(t, i, col)
            basis[i] = col
        i += 1
    m = len(basis)
    t = [row[:nvar] + [row[-1]] for row in t[:m]]
    obj = [frac(x) for x in c] + [Fraction(0)]
    for i, bj in enumerate(basis):
        cb = obj[bj]
        if cb:
            obj = [o - cb * x for o, x in zip(obj, t[i])]
    t.append(obj)
    _simplex(t, basis, nvar)
    x = [Fraction(0)] * nvar
    for i, bj in enumerate(basis):
        x[bj] = t[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), Fraction(0))
    return value, x


def lp_feasible(p: LPProblem) -> LPVerdict:
    nvar = len(p.kinds)
    # standard-form columns: one per nonneg/eps variable, two per free variable
    cols: list[tuple[int, int]] = []  # (original index, sign)
    for k, kind in enumerate(p.kinds):
        cols.append((k, 1))
        if kind == "free":
            cols.append((k, -1))

    def lift(x_std: Sequence[Fraction], eps: Fraction = Fraction(0)) -> RatVector:
        x = [Fraction(0)] * nvar
        for (k, s), v in zip(cols, x_std):
            x[k] += s * v
        for k, kind in enumerate(p.kinds):
            if kind == "eps":
                x[k] += eps
        return x

    A_std = [[s * row[k] for (k, s) in cols] for row in p.A]
    res = simplex_min(A_std, p.b, [Fraction(0)] * len(cols))
    if res is None:
        x = solve([list(r) for r in p.A], list(p.b))
        if x is None:
            return LPVerdict("infeasible")
        return LPVerdict("solvable-free", witness=x)
    if "eps" not in p.kinds:
        return LPVerdict("feasible", witness=lift(res[1]))
    # maximise eps: x_eps = y + eps, 0 <= eps <= cap (slack column last)
    eps_col = [sum((row[k] for k, kind in enumerate(p.kinds) if kind == "eps"), Fraction(0)) for row in p.A]
    A2 = [r + [e, Fraction(0)] for r, e in zip(A_std, eps_col)]
    A2.append([Fraction(0)] * len(cols) + [Fraction(1), Fraction(1)])
    b2 = list(p.b) + [EPS_CAP]
    c2 = [Fraction(0)] * len(cols) + [Fraction(-1), Fraction(0)]
    value, x2 = simplex_min(A2, b2, c2)
    eps = -value
    x = lift(x2[: len(cols)], eps)
    if eps > 0:
        return LPVerdict("strictly-feasible", witness=x, eps=eps, capped=eps == EPS_CAP)
    return LPVerdict("feasible", witness=x, eps=Fraction(0))
