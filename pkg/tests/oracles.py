"""Brute-force oracles shared by the test modules.

None of these touch the enumeration code under test: they scan integer
boxes and grids directly, in exact or plain float arithmetic.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache

import numpy as np

from covmax import catalog, certify, delone
from covmax.forms import QForm


def quad(q, x) -> Fraction:
    n = len(x)
    return sum((Fraction(q[i][j]) * x[i] * x[j] for i in range(n) for j in range(n)), Fraction(0))


def box_radius(q, bound) -> list[int]:
    """|x_i| <= sqrt(bound * Q^{-1}_ii) on the ellipsoid Q[x] <= bound."""
    qi = np.linalg.inv(np.array(q, dtype=float))
    return [math.isqrt(int(float(bound) * qi[i][i] + 1)) + 1 for i in range(len(q))]


def box_points(radii, center=None):
    center = center or [0] * len(radii)
    ranges = [range(math.floor(c) - r, math.ceil(c) + r + 1) for c, r in zip(center, radii)]
    return itertools.product(*ranges)


def brute_in_ellipsoid(q, center, bound) -> list[tuple[tuple[int, ...], Fraction]]:
    radii = box_radius(q, bound)
    out = []
    for v in box_points(radii, center):
        val = quad(q, [a - Fraction(c) for a, c in zip(v, center)])
        if val <= bound:
            out.append((v, val))
    return sorted(out)


def brute_min(q) -> tuple[Fraction, list[tuple[int, ...]]]:
    """Homogeneous minimum and minimal vectors by box scan (bound: smallest diagonal entry)."""
    bound = min(Fraction(q[i][i]) for i in range(len(q)))
    pts = [(v, val) for v, val in brute_in_ellipsoid(q, [0] * len(q), bound) if any(v)]
    lam = min(val for _, val in pts)
    return lam, sorted(v for v, val in pts if val == lam)


def brute_closest(q, x) -> tuple[Fraction, list[tuple[int, ...]]]:
    r = [round(float(c)) for c in x]
    bound = quad(q, [a - Fraction(c) for a, c in zip(r, x)])
    pts = brute_in_ellipsoid(q, x, bound)
    best = min(val for _, val in pts)
    return best, sorted(v for v, val in pts if val == best)


def grid_mu(q, steps: int) -> tuple[float, float]:
    """Max over a grid of [0,1)^n of the squared distance to Z^n, and the guaranteed gap.

    A deep hole lies within Q-distance delta of a grid point, with
    delta^2 <= (h/2)^2 sum |Q_ij|, so mu - grid <= 2 sqrt(mu) delta - delta^2.
    """
    qf = np.array(q, dtype=float)
    n = len(q)
    h = 1.0 / steps
    bound = float(np.abs(qf).sum())
    radii = box_radius(q, bound)
    cand = np.array(list(itertools.product(*[range(-r, r + 2) for r in radii])), dtype=float)
    axes = [np.arange(steps) * h] * n
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, n)
    best = 0.0
    for chunk in np.array_split(grid, max(1, len(grid) // 4096)):
        d = chunk[:, None, :] - cand[None, :, :]
        vals = np.einsum("gvi,ij,gvj->gv", d, qf, d)
        best = max(best, float(vals.min(axis=1).max()))
    delta2 = (h / 2) ** 2 * bound
    return best, delta2


def random_pd(rng, n: int) -> list[list[Fraction]]:
    """A random positive definite rational Gram matrix A^t A + D/k."""
    while True:
        a = rng.integers(-3, 4, size=(n, n))
        if round(abs(np.linalg.det(a))) >= 1:
            break
    g = (a.T @ a).tolist()
    k = int(rng.integers(2, 6))
    return [[Fraction(g[i][j]) + (Fraction(int(rng.integers(1, 4)), k) if i == j else 0) for j in range(n)] for i in range(n)]


@lru_cache(maxsize=None)
def subdivision(name: str) -> delone.DeloneSubdivision:
    e = catalog.get(name)
    return delone.enumerate_delone(e.gram, e.aut_generators)


@lru_cache(maxsize=None)
def certificate(name: str) -> certify.Certificate:
    e = catalog.get(name)
    return certify.classify(e.gram, e.aut_generators, sub=subdivision(name), name=name)


def float_hermite(alpha: float, b: np.ndarray, Q: np.ndarray) -> float:
    n = len(b)
    mu = float(b @ np.linalg.solve(Q, b)) - alpha
    return mu / np.linalg.det(Q) ** (1.0 / n)


def qform(name: str) -> QForm:
    return catalog.get(name).gram
