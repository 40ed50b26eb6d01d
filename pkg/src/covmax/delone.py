"""Lattice point enumeration, empty spheres and Delone subdivisions of PQFs.

Enumeration is Fincke-Pohst over a floating point triangular decomposition
with slightly inflated bounds; every returned point is re-checked with exact
integer arithmetic, so results are exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull

from . import linalg as la
from . import polytope
from .forms import QForm

IntVector = tuple[int, ...]

MAX_DIM = 8
_INFLATE = 1 + 1e-9


class DeloneError(RuntimeError):
    """An exact certification step failed (pipeline bug or numerical trouble)."""


class DimensionRefused(ValueError):
    pass


def _as_qform(q) -> QForm:
    return q if isinstance(q, QForm) else QForm(q)


class _Exact:
    """Integer-scaled evaluation of Q[v - c] for a fixed (Q, c)."""

    def __init__(self, gram, c):
        c = la.vec(c)
        self.dq = la.common_denominator(x for r in gram for x in r)
        self.qn = [[int(x * self.dq) for x in r] for r in gram]
        self.dc = la.common_denominator(c)
        self.cn = [int(x * self.dc) for x in c]
        self.den = self.dq * self.dc * self.dc

    def numerator(self, v: Sequence[int]) -> int:
        w = [self.dc * a - b for a, b in zip(v, self.cn)]
        qn = self.qn
        return sum(w[i] * sum(qn[i][j] * w[j] for j in range(len(w))) for i in range(len(w)))

    def value(self, v: Sequence[int]) -> Fraction:
        return Fraction(self.numerator(v), self.den)


def _decompose(gram) -> tuple[list[float], list[list[float]]]:
    """Q[y] = sum_i d_i (y_i + sum_{j>i} m_ij y_j)^2 in floating point."""
    a = np.array([[float(x) for x in r] for r in gram])
    n = len(a)
    d = [0.0] * n
    m = [[0.0] * n for _ in range(n)]
    a = a.copy()
    for i in range(n):
        d[i] = a[i, i]
        if d[i] <= 0:
            raise DeloneError("form is not numerically positive definite")
        for j in range(i + 1, n):
            m[i][j] = a[i, j] / d[i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                a[j, k] -= m[i][j] * a[i, k]
    return d, m


def _fincke_pohst(d, m, c, bound: float):
    """Integer points y with float Q[y - c] <= bound (superset, inflated)."""
    n = len(d)
    bound = bound * _INFLATE + 1e-12
    x = [0] * n
    out = []

    def rec(i: int, rem: float):
        ci = c[i] - sum(m[i][j] * (x[j] - c[j]) for j in range(i + 1, n))
        if rem < 0:
            return
        r = math.sqrt(rem / d[i]) + 1e-9
        lo = math.ceil(ci - r)
        hi = math.floor(ci + r)
        for xi in range(lo, hi + 1):
            t = xi - ci
            nrem = rem - d[i] * t * t
            if nrem < -1e-12 * (1 + bound):
                continue
            x[i] = xi
            if i == 0:
                out.append(tuple(x))
            else:
                rec(i - 1, nrem)
        x[i] = 0

    rec(n - 1, bound)
    return out


def _babai(d, m, c) -> list[int]:
    n = len(d)
    x = [0] * n
    for i in range(n - 1, -1, -1):
        ci = c[i] - sum(m[i][j] * (x[j] - c[j]) for j in range(i + 1, n))
        x[i] = round(ci)
    return x


def enumerate_in_ellipsoid(q, c: Sequence, bound) -> list[tuple[IntVector, Fraction]]:
    """All v in Z^n with Q[v - c] <= bound, with their exact values, sorted."""
    q = _as_qform(q)
    bound = la.frac(bound)
    if bound < 0:
        return []
    c = la.vec(c)
    d, m = _decompose(q.gram)
    ex = _Exact(q.gram, c)
    limit = bound * ex.den
    out = []
    for v in _fincke_pohst(d, m, [float(x) for x in c], float(bound)):
        num = ex.numerator(v)
        if num <= limit:
            out.append((v, Fraction(num, ex.den)))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def shortest_vectors(q) -> tuple[Fraction, list[IntVector]]:
    q = _as_qform(q)
    n = q.n
    bound = min(q.gram[i][i] for i in range(n))
    zero = (0,) * n
    pts = [(v, val) for v, val in enumerate_in_ellipsoid(q, [0] * n, bound) if v != zero]
    lam = min(val for _, val in pts)
    return lam, sorted(v for v, val in pts if val == lam)


def closest_vectors(q, c: Sequence) -> tuple[Fraction, list[IntVector]]:
    """Exact minimum of Q[v - c] over Z^n and all minimisers."""
    q = _as_qform(q)
    c = la.vec(c)
    d, m = _decompose(q.gram)
    start = _babai(d, m, [float(x) for x in c])
    ex = _Exact(q.gram, c)
    best = ex.numerator(start)
    cands = _fincke_pohst(d, m, [float(x) for x in c], best / ex.den)
    vals = [(ex.numerator(v), v) for v in cands]
    lo = min(num for num, _ in vals)
    return Fraction(lo, ex.den), sorted(v for num, v in vals if num == lo)


def circumsphere(q, pts: Sequence[Sequence]) -> tuple[list[Fraction], Fraction] | None:
    """Center (within the affine hull of pts) and squared radius of the Q-sphere through pts."""
    q = _as_qform(q)
    if len(pts) < 2:
        raise ValueError("circumsphere needs at least two points")
    pts = [la.vec(p) for p in pts]
    p0 = pts[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in pts[1:]]
    red, piv = la.rref(diffs)
    basis = [red[i] for i in range(len(piv))]  # rows spanning the hull directions
    g = q.gram
    # c = p0 + sum_k t_k basis_k ; 2 (p_i - p0)^t Q (c - p0) = Q[p_i - p0]
    qb = [la.matvec(g, b) for b in basis]
    A = [[2 * la.dot(di, qbk) for qbk in qb] for di in diffs]
    rhs = [la.quad(g, di) for di in diffs]
    t = la.solve(A, rhs)
    if t is None:
        return None
    c = [p0[j] + sum((tk * b[j] for tk, b in zip(t, basis)), Fraction(0)) for j in range(len(p0))]
    r2 = la.quad(g, [a - b for a, b in zip(p0, c)])
    return c, r2


def verify_empty_sphere(q, center: Sequence, sq_radius, claimed: Sequence[Sequence[int]]) -> bool:
    found = enumerate_in_ellipsoid(q, center, sq_radius)
    r2 = la.frac(sq_radius)
    if any(val != r2 for _, val in found):
        return False
    return sorted(v for v, _ in found) == sorted(tuple(int(x) for x in v) for v in claimed)


def voronoi_relevant_vectors(q) -> list[IntVector]:
    """Facet vectors of the Voronoi cell at 0 (strict +-minima of their coset mod 2Z^n)."""
    q = _as_qform(q)
    n = q.n
    out = []
    for s in itertools.product((0, 1), repeat=n):
        if not any(s):
            continue
        half = [Fraction(-x, 2) for x in s]
        _, ws = closest_vectors(q, half)
        if len(ws) == 2:
            for w in ws:
                out.append(tuple(a + 2 * b for a, b in zip(s, w)))
    return sorted(out)


@dataclass(frozen=True)
class DeloneCell:
    vertices: tuple[IntVector, ...]
    center: tuple[Fraction, ...]
    sq_radius: Fraction

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def dim(self) -> int:
        return polytope.affine_rank(self.vertices)

    @property
    def is_simplex(self) -> bool:
        return len(self.vertices) == self.dim + 1

    @cached_property
    def facets(self) -> list[polytope.Facet]:
        return polytope.facets_of(self.vertices)

    @cached_property
    def volume(self) -> Fraction:
        return cell_volume(self)

    def translated(self, t: Sequence[int]) -> "DeloneCell":
        return DeloneCell(
            tuple(sorted(tuple(a + b for a, b in zip(v, t)) for v in self.vertices)),
            tuple(a + b for a, b in zip(self.center, t)),
            self.sq_radius,
        )

    def canonical(self) -> "DeloneCell":
        """Translate so that the lexicographically smallest vertex sits at the origin."""
        v0 = min(self.vertices)
        return self.translated([-x for x in v0])


@dataclass
class DeloneSubdivision:
    """One representative cell per translation class."""

    gram: tuple[tuple[Fraction, ...], ...]
    cells: list[DeloneCell]
    orbit_of: list[int] | None = None
    orbit_sizes: dict[int, int] = field(default_factory=dict)

    @property
    def n_orbits(self) -> int | None:
        return None if self.orbit_of is None else len(set(self.orbit_of))

    def orbit_representatives(self) -> list[int]:
        if self.orbit_of is None:
            return list(range(len(self.cells)))
        seen = {}
        for i, o in enumerate(self.orbit_of):
            seen.setdefault(o, i)
        return sorted(seen.values())


def _voronoi_vertices(q: QForm, relevant: list[IntVector]) -> list[list[Fraction]]:
    """Voronoi vertices reduced modulo Z^n, one per translation class (exact)."""
    n = q.n
    g = q.gram
    if n == 1:
        return [[Fraction(1, 2)]]
    qf = np.array([[float(x) for x in r] for r in g])
    rel = np.array(relevant, dtype=float)
    norms = np.einsum("ij,jk,ik->i", rel, qf, rel)
    pts = 2 * (rel @ qf) / norms[:, None]
    hull = ConvexHull(pts)
    verts = -hull.equations[:, :-1] / hull.equations[:, -1:]
    frac_part = verts - np.floor(verts + 1e-7)
    keys = np.round(frac_part * 1e6).astype(np.int64) % 1_000_000
    _, first = np.unique(keys, axis=0, return_index=True)
    out = {}
    rows = [[2 * x for x in la.matvec(g, v)] for v in relevant]
    rhs = [la.quad(g, v) for v in relevant]
    for idx in sorted(first):
        simplex = hull.simplices[idx]
        A = [rows[i] for i in simplex]
        b = [rhs[i] for i in simplex]
        x = la.solve_unique(A, b)
        if x is None:
            # degenerate qhull simplex: use every relevant vector on the float facet
            near = [i for i in range(len(relevant)) if abs(pts[i] @ verts[idx] - 1) < 1e-7]
            A = [rows[i] for i in near]
            b = [rhs[i] for i in near]
            x = la.solve(A, b)
            if x is None or la.rank(A) < n:
                raise DeloneError("could not recover a Voronoi vertex exactly")
        x = [xi - math.floor(xi) for xi in x]
        out[tuple(x)] = x
    return [out[k] for k in sorted(out)]


def _check_aut(q: QForm, aut) -> list[list[list[int]]]:
    gens = []
    for g in aut:
        g = [[int(x) for x in row] for row in g]
        if q.transformed(g).gram != q.gram:
            raise ValueError("automorphism generator does not preserve the form")
        gens.append(g)
    return gens


def apply_matrix(g: Sequence[Sequence[int]], v: Sequence) -> tuple:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in g)


def enumerate_delone(q, aut=None, max_dim: int = MAX_DIM) -> DeloneSubdivision:
    """Delone subdivision of Q, one cell per translation class.

    Voronoi vertices come from the polar of the relevant-vector polytope; each
    vertex class yields its Delone cell by exact closest-vector enumeration.
    Completeness is certified by the tiling identity sum(volumes) == 1.
    """
    q = _as_qform(q)
    n = q.n
    if n > max_dim:
        raise DimensionRefused(f"dimension {n} exceeds the limit {max_dim}")
    gens = _check_aut(q, aut) if aut is not None else None
    relevant = voronoi_relevant_vectors(q)
    cells: dict[tuple, DeloneCell] = {}
    for x in _voronoi_vertices(q, relevant):
        r2, verts = closest_vectors(q, x)
        if polytope.affine_rank(verts) != n:
            raise DeloneError(f"point {x} is not a Voronoi vertex")
        cell = DeloneCell(tuple(sorted(verts)), tuple(x), r2).canonical()
        cells.setdefault(cell.vertices, cell)
    ordered = [cells[k] for k in sorted(cells)]
    sub = DeloneSubdivision(q.gram, ordered)
    if gens is not None:
        # automorphisms are unimodular, so one volume per orbit suffices
        attach_orbits(sub, gens)
        total = sum(
            (sub.orbit_sizes[sub.orbit_of[i]] * sub.cells[i].volume for i in sub.orbit_representatives()),
            Fraction(0),
        )
    else:
        total = sum((c.volume for c in ordered), Fraction(0))
    if total != 1:
        raise DeloneError(f"Delone cells do not tile a fundamental domain (volume sum {total})")
    return sub


def attach_orbits(sub: DeloneSubdivision, gens) -> None:
    """Orbits of translation classes under the group generated by gens and -1."""
    n = len(sub.gram)
    minus = [[-int(i == j) for j in range(n)] for i in range(n)]
    gens = list(gens) + [minus]
    index = {c.vertices: i for i, c in enumerate(sub.cells)}
    parent = list(range(len(sub.cells)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, c in enumerate(sub.cells):
        for g in gens:
            img = DeloneCell(
                tuple(sorted(apply_matrix(g, v) for v in c.vertices)),
                apply_matrix(g, c.center),
                c.sq_radius,
            ).canonical()
            j = index.get(img.vertices)
            if j is None:
                raise DeloneError("automorphism image of a Delone cell is not a known class")
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    roots = [find(i) for i in range(len(sub.cells))]
    relabel = {r: k for k, r in enumerate(sorted(set(roots)))}
    sub.orbit_of = [relabel[r] for r in roots]
    sub.orbit_sizes = {}
    for o in sub.orbit_of:
        sub.orbit_sizes[o] = sub.orbit_sizes.get(o, 0) + 1


def inhomogeneous_minimum(q, sub: DeloneSubdivision) -> tuple[Fraction, list[tuple[tuple[Fraction, ...], DeloneCell]]]:
    mu = max(c.sq_radius for c in sub.cells)
    return mu, [(c.center, c) for c in sub.cells if c.sq_radius == mu]


@dataclass(frozen=True)
class HullVolume:
    """Volume of a lower-dimensional polytope: its squared k-volume w.r.t. Q."""

    dim: int
    squared: Fraction


def cell_volume(cell: DeloneCell | Sequence[Sequence], q=None, method: str = "pyramid"):
    """Exact volume in the lattice coordinates.

    Full-dimensional cells give a Fraction; lower-dimensional point sets give a
    ``HullVolume`` carrying the squared volume in their affine hull under Q.
    """
    pts = [la.vec(v) for v in (cell.vertices if isinstance(cell, DeloneCell) else cell)]
    n = len(pts[0])
    k = polytope.affine_rank(pts)
    if k == n:
        if method == "triangulation":
            return polytope.triangulated_volume(pts)
        return polytope.pyramid_volume(pts)
    if q is None:
        raise ValueError("a form is needed to measure a lower-dimensional cell")
    q = _as_qform(q)
    p0 = pts[0]
    diffs = [[a - b for a, b in zip(p, p0)] for p in pts[1:]]
    red, piv = la.rref(diffs)
    basis = [red[i] for i in range(len(piv))]
    bt = la.transpose(basis)
    coords = [la.solve(bt, [a - b for a, b in zip(p, p0)]) for p in pts]
    if k == 0:
        return HullVolume(0, Fraction(1))
    vol = polytope.pyramid_volume(coords) if k > 0 else Fraction(1)
    gram = la.matmul(basis, la.matmul(q.gram, bt))
    return HullVolume(k, vol * vol * la.det(gram))


def facets(cell: DeloneCell) -> list[polytope.Facet]:
    return cell.facets
