"""Exact facets and volumes of rational polytopes given by their vertices.

Facet candidates come from qhull in floating point; every candidate is
re-derived and checked in exact arithmetic (supporting hyperplane through the
candidate's points, all points on the inner side).  Volumes are Lebesgue
volumes in the coordinates supplied.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd
from typing import Sequence

import numpy as np
from scipy.spatial import ConvexHull

from . import linalg as la


class HullError(RuntimeError):
    """Exact verification of a float hull candidate failed."""


@dataclass(frozen=True)
class Facet:
    """Supporting inequality ``normal . x >= offset`` and its incident vertex indices.

    ``(normal, offset)`` is a primitive integer vector; the inequality is
    strict at the centroid.
    """

    normal: tuple[int, ...]
    offset: int
    vertices: tuple[int, ...]

    def value(self, x: Sequence) -> Fraction:
        return la.dot(self.normal, la.vec(x)) - self.offset


def _scaled_int_points(points: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    pts = [la.vec(p) for p in points]
    d = la.common_denominator(x for p in pts for x in p)
    return [[int(x * d) for x in p] for p in pts], d


def affine_rank(points: Sequence[Sequence]) -> int:
    if len(points) <= 1:
        return 0
    p0 = la.vec(points[0])
    return la.rank([[a - b for a, b in zip(la.vec(p), p0)] for p in points[1:]])


def _primitive_ints(v: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for x in v:
        g = gcd(g, x)
    return tuple(x // g for x in v) if g else tuple(v)


def _hyperplane_through(ipts: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], int] | None:
    """Integer (a, a0) with a.x = a0 on all points, or None if not unique."""
    w = la.int_kernel_vector([list(p) + [-1] for p in ipts])
    if w is None:
        return None
    return tuple(w[:-1]), w[-1]


def _simplex_facets(ipts: list[list[int]]) -> list[tuple[tuple[int, ...], int, tuple[int, ...]]]:
    d = len(ipts[0])
    out = []
    for skip in range(d + 1):
        idx = tuple(i for i in range(d + 1) if i != skip)
        a, a0 = _hyperplane_through([ipts[i] for i in idx])
        if sum(x * y for x, y in zip(a, ipts[skip])) < a0:
            a, a0 = tuple(-x for x in a), -a0
        out.append((a, a0, idx))
    return out


def _hull_candidates(ipts: list[list[int]]):
    """Group qhull's simplices by float-coplanarity; one group per candidate facet."""
    arr = np.asarray(ipts, dtype=float)
    hull = ConvexHull(arr)
    eq = hull.equations
    keys = np.round(eq / np.max(np.abs(eq[:, :-1]), axis=1)[:, None], 7)
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    groups: dict[int, list[tuple[int, ...]]] = {}
    for g, simplex in zip(inverse.ravel().tolist(), hull.simplices.tolist()):
        groups.setdefault(g, []).append(tuple(simplex))
    return groups, hull


def facets_of(points: Sequence[Sequence]) -> list[Facet]:
    """Irredundant facet list of conv(points); points must span their ambient space."""
    ipts, den = _scaled_int_points(points)
    if affine_rank(ipts) != len(ipts[0]):
        raise ValueError("facets_of expects a full-dimensional point set")
    out = []
    for a, a0, on in _int_facets(ipts):
        # a.X = a0 for scaled points X = den*x  <=>  (den*a).x = a0
        w = _primitive_ints([den * x for x in a] + [a0])
        out.append(Facet(tuple(w[:-1]), w[-1], on))
    out.sort(key=lambda f: (f.normal, f.offset))
    return out


def _int_facets(ipts: list[list[int]]) -> list[tuple[tuple[int, ...], int, tuple[int, ...]]]:
    """Facets (a, a0, incident indices) of a full-dimensional integer point set, a.x >= a0."""
    npts = len(ipts)
    d = len(ipts[0])
    if d == 1:
        xs = [p[0] for p in ipts]
        lo, hi = min(xs), max(xs)
        return [((1,), lo, tuple(i for i, x in enumerate(xs) if x == lo)),
                ((-1,), -hi, tuple(i for i, x in enumerate(xs) if x == hi))]
    if npts == d + 1:
        return _simplex_facets(ipts)
    groups, _ = _hull_candidates(ipts)
    seen: dict[tuple, tuple] = {}
    tot = [sum(col) for col in zip(*ipts)]
    for simplices in groups.values():
        plane = None
        for s in simplices:
            plane = _hyperplane_through([ipts[i] for i in s])
            if plane is not None:
                break
        if plane is None:
            continue
        a, a0 = plane
        if sum(x * y for x, y in zip(a, tot)) < a0 * npts:
            a, a0 = tuple(-x for x in a), -a0
        if (a, a0) in seen:
            continue
        vals = [sum(x * y for x, y in zip(a, p)) - a0 for p in ipts]
        if min(vals) < 0:
            raise HullError("float hull produced an invalid supporting hyperplane")
        # the plane came from a qhull simplex, so its points span it
        seen[(a, a0)] = tuple(i for i, v in enumerate(vals) if v == 0)
    return [(a, a0, on) for (a, a0), on in seen.items()]


def centroid(points: Sequence[Sequence]) -> list[Fraction]:
    pts = [la.vec(p) for p in points]
    return [sum(col, Fraction(0)) / len(pts) for col in zip(*pts)]


def simplex_volume(points: Sequence[Sequence]) -> Fraction:
    ipts, den = _scaled_int_points(points)
    p0 = ipts[0]
    d = len(p0)
    m = [[a - b for a, b in zip(p, p0)] for p in ipts[1:]]
    return Fraction(abs(la.int_det(m)), factorial(d) * den**d)


def pyramid_volume(points: Sequence[Sequence]) -> Fraction:
    """Volume by recursive cone decomposition over facets, apex at each face's centroid.

    A k-face is measured through its projection onto its k pivot coordinates
    (the leading columns of an echelon basis of its direction space).  The
    pivots of a facet are those of the face minus one coordinate, so the cone
    over a facet is height-along-that-axis times facet measure over k.  Face
    measures are memoised by vertex set, so each face is visited once and all
    arithmetic stays integral.
    """
    ipts, den = _scaled_int_points(points)
    d = len(ipts[0])
    if affine_rank(ipts) != d:
        raise ValueError("pyramid_volume expects a full-dimensional point set")
    return _FaceVolumes(ipts).volume(tuple(range(len(ipts)))) / den**d


class _FaceVolumes:
    def __init__(self, ipts: list[list[int]]):
        self.pts = ipts
        self.memo: dict[tuple[int, ...], Fraction] = {}
        self.pivots: dict[tuple[int, ...], list[int]] = {}

    def pivot_columns(self, face: tuple[int, ...]) -> list[int]:
        got = self.pivots.get(face)
        if got is None:
            p0 = self.pts[face[0]]
            ech = la.int_echelon([[a - b for a, b in zip(self.pts[i], p0)] for i in face[1:]])
            got = [next(j for j, x in enumerate(r) if x) for r in ech]
            self.pivots[face] = got
        return got

    def volume(self, face: tuple[int, ...]) -> Fraction:
        got = self.memo.get(face)
        if got is not None:
            return got
        piv = self.pivot_columns(face)
        k = len(piv)
        local = [[self.pts[i][c] for c in piv] for i in face]
        if k == 1:
            xs = [p[0] for p in local]
            vol = Fraction(max(xs) - min(xs))
        elif len(face) == k + 1:
            p0 = local[0]
            vol = Fraction(abs(la.int_det([[a - b for a, b in zip(p, p0)] for p in local[1:]])), factorial(k))
        else:
            npts = len(local)
            tot = [sum(col) for col in zip(*local)]
            vol = Fraction(0)
            for a, a0, on in _int_facets(local):
                sub = tuple(face[j] for j in on)
                sub_piv = self.pivot_columns(sub)
                m = next(t for t, c in enumerate(piv) if c not in sub_piv)
                height = Fraction(sum(x * y for x, y in zip(a, tot)) - a0 * npts, npts * abs(a[m]))
                vol += height * self.volume(sub) / k
        self.memo[face] = vol
        return vol


def triangulated_volume(points: Sequence[Sequence], apex: Sequence | None = None) -> Fraction:
    """Volume as a sum of exact simplex cones over qhull's triangulated boundary."""
    ipts, den = _scaled_int_points(points)
    d = len(ipts[0])
    if len(ipts) == d + 1:
        return simplex_volume(points)
    groups, hull = _hull_candidates(ipts)
    # apex in coordinates scaled by den * scale
    if apex is None:
        scale = len(ipts)
        apex_num = [sum(col) for col in zip(*ipts)]
    else:
        ap = la.vec(apex)
        scale = la.common_denominator(ap)
        apex_num = [int(x * den * scale) for x in ap]
    total = 0
    for simplices in groups.values():
        for s in simplices:
            m = [[scale * ipts[i][j] - apex_num[j] for j in range(d)] for i in s]
            total += abs(la.int_det(m))
    return Fraction(total, factorial(d) * (scale * den) ** d)


def cone_volume(facet_points: Sequence[Sequence], apex: Sequence) -> Fraction:
    """vol(conv(F, apex)) for a facet F of a full-dimensional polytope."""
    pts = [la.vec(p) for p in facet_points]
    apex = la.vec(apex)
    d = len(apex)
    ipts, _ = _scaled_int_points(pts + [apex])
    plane = _hyperplane_through(ipts[:-1])
    if plane is None:
        raise ValueError("facet points do not span a hyperplane")
    a, a0 = plane
    k = min((i for i in range(d) if a[i] != 0), key=lambda i: (abs(a[i]), i))
    # the integer plane lives in scaled coordinates; height ratio is scale free
    height = Fraction(abs(sum(x * y for x, y in zip(a, ipts[-1])) - a0), abs(a[k]))
    den = la.common_denominator(x for p in pts + [apex] for x in p)
    height /= den
    base = pyramid_volume([p[:k] + p[k + 1 :] for p in pts]) if d > 1 else Fraction(1)
    return height * base / d
