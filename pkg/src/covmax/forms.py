"""Quadratic forms, quadratic functions and their Hermite invariants."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Literal, Sequence

from . import linalg as la
from .lp import LPProblem, lp_feasible

Tier = Literal["eutactic", "semieutactic", "weakly-eutactic", "none"]

_TIER = {
    "strictly-feasible": "eutactic",
    "feasible": "semieutactic",
    "solvable-free": "weakly-eutactic",
    "infeasible": "none",
}


def _tup(m) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(la.frac(x) for x in row) for row in m)


@dataclass(frozen=True)
class QForm:
    """Positive definite quadratic form given by its exact Gram matrix."""

    gram: tuple[tuple[Fraction, ...], ...]

    def __init__(self, gram):
        g = _tup(gram)
        object.__setattr__(self, "gram", g)
        if not la.is_positive_definite(g):
            raise ValueError("quadratic form is not positive definite")

    @property
    def n(self) -> int:
        return len(self.gram)

    def __call__(self, x: Sequence) -> Fraction:
        return la.quad(self.gram, x)

    def det(self) -> Fraction:
        return la.det(self.gram)

    def inverse(self) -> la.RatMatrix:
        return la.inverse(self.gram)

    def scaled(self, lam) -> "QForm":
        lam = la.frac(lam)
        return QForm([[lam * x for x in row] for row in self.gram])

    def transformed(self, g: Sequence[Sequence]) -> "QForm":
        """g^t Q g."""
        return QForm(la.matmul(la.transpose(g), la.matmul(self.gram, g)))


@dataclass(frozen=True)
class QFunc:
    """f(x) = alpha + 2 b.x + Q[x]; ``gram`` need not be definite."""

    alpha: Fraction
    b: tuple[Fraction, ...]
    gram: tuple[tuple[Fraction, ...], ...]

    def __init__(self, alpha, b, gram):
        object.__setattr__(self, "alpha", la.frac(alpha))
        object.__setattr__(self, "b", tuple(la.frac(x) for x in b))
        g = gram.gram if isinstance(gram, QForm) else _tup(gram)
        if len(g) != len(self.b) or any(len(r) != len(self.b) for r in g):
            raise ValueError("inconsistent quadratic function dimensions")
        if not la.is_symmetric(g):
            raise ValueError("quadratic part must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def n(self) -> int:
        return len(self.b)

    def __add__(self, other: "QFunc") -> "QFunc":
        _same_dim(self, other)
        return QFunc(
            self.alpha + other.alpha,
            [x + y for x, y in zip(self.b, other.b)],
            [[x + y for x, y in zip(r, s)] for r, s in zip(self.gram, other.gram)],
        )

    def __sub__(self, other: "QFunc") -> "QFunc":
        return self + other.scale(-1)

    def scale(self, lam) -> "QFunc":
        lam = la.frac(lam)
        return QFunc(lam * self.alpha, [lam * x for x in self.b], [[lam * x for x in r] for r in self.gram])

    def __call__(self, x: Sequence) -> Fraction:
        return evaluate(self, x)

    def as_vector(self) -> list[Fraction]:
        """Coordinates (alpha, b, upper triangle of Q) w.r.t. which the pairing is diagonal."""
        n = self.n
        return [self.alpha, *self.b, *(self.gram[i][j] for i in range(n) for j in range(i, n))]

    @classmethod
    def from_vector(cls, v: Sequence, n: int) -> "QFunc":
        v = la.vec(v)
        g = la.zeros(n, n)
        k = n + 1
        for i in range(n):
            for j in range(i, n):
                g[i][j] = g[j][i] = v[k]
                k += 1
        return cls(v[0], v[1 : n + 1], g)

    @classmethod
    def from_center(cls, q: "QForm | Sequence", c: Sequence, mu) -> "QFunc":
        """The function Q[x - c] - mu."""
        g = q.gram if isinstance(q, QForm) else _tup(q)
        c = la.vec(c)
        qc = la.matvec(g, c)
        return cls(la.dot(c, qc) - la.frac(mu), [-x for x in qc], g)


def _same_dim(f: QFunc, g: QFunc) -> None:
    if f.n != g.n:
        raise ValueError(f"dimension mismatch: {f.n} vs {g.n}")


def ev(x: Sequence) -> QFunc:
    """ev_x(y) = (1 + x.y)^2 as the quadratic function (1, x, x x^t)."""
    x = la.vec(x)
    return QFunc(1, x, [[a * b for b in x] for a in x])


def evaluate(f: QFunc, x: Sequence) -> Fraction:
    x = la.vec(x)
    if len(x) != f.n:
        raise ValueError(f"dimension mismatch: function has n={f.n}, point has {len(x)}")
    return f.alpha + 2 * la.dot(f.b, x) + la.quad(f.gram, x)


def inner_product(f: QFunc, g: QFunc) -> Fraction:
    _same_dim(f, g)
    qq = sum((a * b for r, s in zip(f.gram, g.gram) for a, b in zip(r, s)), Fraction(0))
    return f.alpha * g.alpha + 2 * la.dot(f.b, g.b) + qq


def center_and_min(f: QFunc) -> tuple[list[Fraction], Fraction]:
    """Center c_f = -Q_f^{-1} b_f and mu(f) = Q_f[c_f] - alpha_f."""
    if not la.is_positive_definite(f.gram):
        raise ValueError("center_and_min needs a positive definite quadratic part")
    c = [-x for x in la.solve(f.gram, list(f.b))]
    return c, la.quad(f.gram, c) - f.alpha


def inverse_function(q: QForm | Sequence) -> QFunc:
    """Q^{-1} embedded as the quadratic function (0, 0, Q^{-1})."""
    g = q.gram if isinstance(q, QForm) else _tup(q)
    return QFunc(0, [0] * len(g), la.inverse(g))


def gradient_direction(f: QFunc) -> QFunc:
    """ev_{c_f} + (mu(f)/n) Q_f^{-1}: minus the (unnormalised) gradient of H at f."""
    c, mu = center_and_min(f)
    return ev(c) + inverse_function(f.gram).scale(mu / f.n)


@dataclass(frozen=True)
class HermiteValue:
    """A Hermite-type invariant stored through its exact n-th power."""

    power: Fraction
    n: int

    @property
    def approx(self) -> float:
        return float(self.power) ** (1.0 / self.n) if self.power >= 0 else -(float(-self.power) ** (1.0 / self.n))

    def __lt__(self, other: "HermiteValue") -> bool:
        if self.n != other.n:
            raise ValueError("comparing invariants of different dimensions")
        return self.power < other.power


def hermite_homogeneous(q: QForm, minimum) -> HermiteValue:
    return HermiteValue(la.frac(minimum) ** q.n / q.det(), q.n)


def hermite_inhomogeneous(q: QForm, mu) -> HermiteValue:
    return HermiteValue(la.frac(mu) ** q.n / q.det(), q.n)


def hermite_function(f: QFunc) -> HermiteValue:
    """H(f)^n = mu(f)^n / det Q_f; only meaningful for mu(f) >= 0."""
    _, mu = center_and_min(f)
    return HermiteValue(mu ** f.n / la.det(f.gram), f.n)


def _sym_vector(v: Sequence) -> list[Fraction]:
    v = la.vec(v)
    n = len(v)
    return [v[i] * v[j] for i in range(n) for j in range(i, n)]


def voronoi_perfect(q: QForm, minvecs: Sequence[Sequence[int]]) -> bool:
    if not minvecs:
        raise ValueError("empty list of minimal vectors")
    return la.rank([_sym_vector(v) for v in minvecs]) == q.n * (q.n + 1) // 2


@dataclass(frozen=True)
class HomogeneousEutaxy:
    tier: Tier
    weights: tuple[Fraction, ...] | None


def voronoi_eutactic(q: QForm, minvecs: Sequence[Sequence[int]]) -> HomogeneousEutaxy:
    if not minvecs:
        raise ValueError("empty list of minimal vectors")
    n = q.n
    qinv = q.inverse()
    rhs = [qinv[i][j] for i in range(n) for j in range(i, n)]
    cols = [_sym_vector(v) for v in minvecs]
    A = la.transpose(cols)
    verdict = lp_feasible(LPProblem.build(A, rhs, "eps"))
    w = tuple(verdict.witness) if verdict.witness is not None else None
    return HomogeneousEutaxy(_TIER[verdict.status], w)


def tier_from_lp(status: str) -> Tier:
    return _TIER[status]
