"""The family [L_n, Q_n] (n >= 6) of local covering maxima and its full verification.

Everything here is stated in ambient coordinates, where L_n is generated by
(D_{n-1}, 0) and w = (-1/2, (1/2)^{n-2}, 1).  ``SeriesInstance.to_lattice``
converts points to coordinates in the lattice basis used by the generic
pipeline.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb, factorial
from typing import Callable, Literal, Sequence

from . import linalg as la
from . import polytope
from .delone import circumsphere, verify_empty_sphere
from .forms import QForm, QFunc, ev, inner_product

Point = tuple[Fraction, ...]
Affine = tuple[list[list[int]], tuple[Fraction, ...]]  # x -> M x + t

HALF = Fraction(1, 2)


class SeriesRefused(ValueError):
    pass


def half_cube(k: int) -> list[tuple[int, ...]]:
    return [v for v in itertools.product((0, 1), repeat=k) if sum(v) % 2 == 0]


def _g(v: Sequence) -> tuple:
    """Flip the first coordinate: x_1 -> 1 - x_1."""
    return (1 - v[0], *v[1:])


def _pt(*parts) -> Point:
    out: list[Fraction] = []
    for p in parts:
        if isinstance(p, (list, tuple)):
            out.extend(la.frac(x) for x in p)
        else:
            out.append(la.frac(p))
    return tuple(out)


@dataclass(frozen=True)
class SeriesInstance:
    n: int

    def __post_init__(self):
        if self.n < 6:
            raise SeriesRefused(f"the series is defined for n >= 6 (got n = {self.n})")

    @property
    def even(self) -> bool:
        return self.n % 2 == 0

    @property
    def C(self) -> int:
        return self.n - 3 if self.even else self.n - 5

    @cached_property
    def form(self) -> QForm:
        n = self.n
        g = la.identity(n)
        g[n - 1][n - 1] = Fraction(self.C, 4)
        return QForm(g)

    @cached_property
    def basis(self) -> list[list[Fraction]]:
        """Rows: D_{n-1} simple roots (extended by 0) and w."""
        n = self.n
        rows = []
        for i in range(n - 2):
            r = [Fraction(0)] * n
            r[i], r[i + 1] = Fraction(1), Fraction(-1)
            rows.append(r)
        r = [Fraction(0)] * n
        r[n - 3] = r[n - 2] = Fraction(1)
        rows.append(r)
        rows.append([-HALF] + [HALF] * (n - 2) + [Fraction(1)])
        return rows

    @cached_property
    def zform(self) -> QForm:
        b = self.basis
        return QForm(la.matmul(b, la.matmul(self.form.gram, la.transpose(b))))

    @cached_property
    def _binv_t(self) -> list[list[Fraction]]:
        return la.transpose(la.inverse(self.basis))

    def to_lattice(self, p: Sequence) -> tuple[Fraction, ...]:
        """Ambient point p = B^t z  ->  z."""
        return tuple(la.matvec(self._binv_t, la.vec(p)))

    def to_ambient(self, z: Sequence) -> Point:
        return tuple(la.matvec(la.transpose(self.basis), la.vec(z)))

    def in_lattice(self, p: Sequence) -> bool:
        return all(x.denominator == 1 for x in self.to_lattice(p))

    @property
    def aut_order(self) -> int:
        """|Aut(D_{n-1})| realised as the signed permutation group of the first n-1 axes."""
        return 2 ** (self.n - 1) * factorial(self.n - 1)

    def ambient_aut_generators(self) -> list[list[list[int]]]:
        n = self.n
        gens = []
        for i in range(n - 2):
            m = [[int(a == b) for b in range(n)] for a in range(n)]
            m[i][i] = m[i + 1][i + 1] = 0
            m[i][i + 1] = m[i + 1][i] = 1
            gens.append(m)
        dbl = [[int(a == b) for b in range(n)] for a in range(n)]
        dbl[0][0] = dbl[1][1] = -1
        gens.append(dbl)
        odd = [[int(a == b) for b in range(n)] for a in range(n)]
        odd[n - 1][n - 1] = -1
        if self.even:
            odd[0][0] = -1
        gens.append(odd)
        gens.append([[-int(a == b) for b in range(n)] for a in range(n)])
        return gens

    def z_aut_generators(self) -> list[list[list[int]]]:
        """Generators in lattice coordinates: g_z = B^{-t} g B^t (checked integral)."""
        bt = la.transpose(self.basis)
        out = []
        for g in self.ambient_aut_generators():
            gz = la.matmul(self._binv_t, la.matmul(g, bt))
            if any(x.denominator != 1 for r in gz for x in r):
                raise AssertionError("ambient generator does not preserve L_n")
            out.append([[int(x) for x in r] for r in gz])
        return out

    # closed forms -------------------------------------------------------

    @property
    def mu_P(self) -> Fraction:
        n = self.n
        return Fraction((n - 2) ** 2, 4 * (n - 3)) if self.even else Fraction(n - 1, 4)

    @property
    def c_P(self) -> Point:
        n = self.n
        return _pt([HALF] * (n - 1), Fraction(1, n - 3) if self.even else 0)

    @property
    def stab_P(self) -> int:
        n = self.n
        return factorial(n - 1) * 2 ** (n - 2 if self.even else n - 1)

    def hij_pairs(self) -> list[tuple[int, int]]:
        return [(i, self.n - 1 - i) for i in range(3, (self.n - 1) // 2 + 1)]

    def mu_H(self, i: int, j: int) -> Fraction:
        C = self.C
        return Fraction(C * C + 2 * C * (self.n - 1) + (j - i) ** 2, 16 * C)

    def c_H(self, i: int, j: int) -> Point:
        return _pt([HALF] * i, [0] * j, Fraction(self.C + j - i, 2 * self.C))

    def vol_H(self, i: int, j: int) -> Fraction:
        return Fraction((factorial(i) - 2 ** (i - 1)) * (factorial(j) - 2 ** (j - 1)), factorial(self.n))

    def stab_H(self, i: int, j: int) -> int:
        s = 2 ** (i - 1) * factorial(i) * 2 ** (j - 1) * factorial(j)
        return 2 * s if i == j else s

    @property
    def mu_S(self) -> Fraction:
        n = self.n
        return Fraction(n - 5, 4) + Fraction(n - 1, (n - 3) ** 2)

    @property
    def c_S(self) -> Point:
        return _pt([Fraction(1, self.n - 3)] * (self.n - 1), 1)

    @property
    def vol_S(self) -> Fraction:
        return Fraction(self.n - 3, factorial(self.n))

    @property
    def stab_S(self) -> int:
        return 2 * factorial(self.n - 1)

    @property
    def V(self) -> Fraction:
        """Closed-form lower bound for vol(P_n); the j-sum uses i = n - 2 - j."""
        n = self.n
        nf = factorial(n)
        if self.even:
            v = 2 * (n - 1) * Fraction(1, n * (n - 1)) * (1 - Fraction(2 ** (n - 3), factorial(n - 2)))
            v += 2 ** (n - 2) * 2 ** (n - 3) * Fraction(n - 3, nf)
            top, lead = n - 3, 2 ** (n - 2)
        else:
            v = 2 * (n - 1) * (n - 2) * Fraction(4, n * (n - 1) * (n - 2)) * (1 - Fraction(2 ** (n - 4), factorial(n - 3)))
            v += 2 ** (n - 1) * Fraction(n - 1, 2 * nf)
            top, lead = n - 4, 2 ** (n - 1)
        for j in range(3, top + 1):
            i = n - 2 - j
            v += Fraction(lead * factorial(n - 1), factorial(i + 1) * 2 ** (j - 1) * factorial(j)) * (
                factorial(j) - 2 ** (j - 1)
            ) * Fraction(n - j - 1, 2 * nf)
        if self.even:
            v += Fraction(2 ** (n - 1), nf) + 2 ** (n - 2) * Fraction(n - 1, 2 * nf) + 2 ** (n - 2) * Fraction(n - 3, 2 * nf)
        else:
            v += 2 ** (n - 1) * 2 ** (n - 3) * Fraction(n - 3, nf) + 2 * Fraction(2 ** (n - 1), nf)
            v += 2 ** (n - 2) * (n - 1) * Fraction(n - 4, nf)
        return v

    def eutaxy_coefficients(self) -> dict[str, Fraction]:
        """The closed-form coefficients under their customary labels."""
        n = self.n
        if self.even:
            d = n * (n - 3) ** 2
            return {
                "a-1": Fraction(n - 2, 2 * d),
                "a0": Fraction((n - 2) * (n * n - 5 * n + 2), 2 ** (n - 2) * d),
                "a1": Fraction(2, d),
            }
        d = n * (n - 5)
        return {"a+-1": Fraction(1, 4 * d), "a0": Fraction(n * n - 6 * n + 1, 2 ** (n - 2) * d)}

    def eutaxy_weights(self) -> dict[int, Fraction]:
        """Vertex weight by last coordinate.

        For even n the coefficient labelled a-1 belongs to the 2(n-1) vertices
        with last coordinate +1 and a1 to the single vertex with -1; only this
        assignment satisfies the identity once n > 6.
        """
        a = self.eutaxy_coefficients()
        if self.even:
            return {-1: a["a1"], 0: a["a0"], 1: a["a-1"]}
        return {-1: a["a+-1"], 0: a["a0"], 1: a["a+-1"]}

    # vertex sets --------------------------------------------------------

    def P_vertices(self) -> list[Point]:
        n = self.n
        half = [HALF] * (n - 1)
        top = [1] if self.even else [1, -1]
        out = []
        for t in top:
            for i in range(n - 1):
                for s in (1, -1):
                    v = list(half)
                    v[i] += s
                    out.append(_pt(v, t))
        if self.even:
            out.append(_pt(half, -1))
        out += [_pt(h, 0) for h in half_cube(n - 1)]
        return sorted(out)

    def H_vertices(self, i: int, j: int) -> list[Point]:
        out = [_pt(h, [0] * j, 0) for h in half_cube(i)]
        out += [_pt([HALF] * i, [HALF - x for x in _g(h)], 1) for h in half_cube(j)]
        return sorted(out)

    def S_vertices(self) -> list[Point]:
        n = self.n
        out = [_pt([0] * n), _pt([0] * (n - 1), 2)]
        for j in range(n - 1):
            v = [HALF] * (n - 1)
            v[j] -= 1
            out.append(_pt(v, 1))
        return sorted(out)

    def P_stabilizer_generators(self) -> list[Affine]:
        """Affine maps fixing P_n: coordinate permutations, paired flips x_i -> 1 - x_i, and x_n -> -x_n (odd n)."""
        n = self.n
        gens: list[Affine] = []
        zero = tuple(Fraction(0) for _ in range(n))
        for i in range(n - 2):
            m = [[int(a == b) for b in range(n)] for a in range(n)]
            m[i][i] = m[i + 1][i + 1] = 0
            m[i][i + 1] = m[i + 1][i] = 1
            gens.append((m, zero))
        m = [[int(a == b) for b in range(n)] for a in range(n)]
        m[0][0] = m[1][1] = -1
        gens.append((m, _pt(1, 1, [0] * (n - 2))))
        if not self.even:
            m = [[int(a == b) for b in range(n)] for a in range(n)]
            m[n - 1][n - 1] = -1
            gens.append((m, zero))
        return gens


def build(n: int) -> SeriesInstance:
    return SeriesInstance(n)


def apply_affine(a: Affine, p: Sequence) -> Point:
    m, t = a
    return tuple(sum((r[k] * p[k] for k in range(len(p))), Fraction(0)) + tk for r, tk in zip(m, t))


@dataclass
class CellCheck:
    kind: str
    vertices: list[Point]
    center: Point
    sq_radius: Fraction
    volume: Fraction
    orbit_size: int
    claimed_center: Point
    claimed_sq_radius: Fraction
    claimed_volume: Fraction
    empty_sphere: bool

    @property
    def closed_forms_match(self) -> bool:
        return (
            self.center == self.claimed_center
            and self.sq_radius == self.claimed_sq_radius
            and self.volume == self.claimed_volume
        )


def _check_cell(inst: SeriesInstance, kind: str, verts: list[Point], center, r2, vol, orbit,
                volume_fn: Callable[[list[Point]], Fraction] | None = None) -> CellCheck:
    cs = circumsphere(inst.form, verts)
    if cs is None:
        raise AssertionError(f"{kind}: vertices are not cospherical")
    c, rr = cs
    for v in verts:
        if inst.form([a - b for a, b in zip(v, c)]) != rr:
            raise AssertionError(f"{kind}: vertex {v} is off the circumsphere")
    if not all(inst.in_lattice(v) for v in verts):
        raise AssertionError(f"{kind}: a vertex is not in L_n")
    zv = [tuple(int(x) for x in inst.to_lattice(v)) for v in verts]
    empty = verify_empty_sphere(inst.zform, inst.to_lattice(c), rr, zv)
    volume = (volume_fn or polytope.pyramid_volume)(verts)
    return CellCheck(kind, verts, tuple(c), rr, volume, orbit, tuple(center), r2, vol, empty)


def big_cell(inst: SeriesInstance, volume_method: str = "triangulation") -> CellCheck:
    fn = polytope.triangulated_volume if volume_method == "triangulation" else polytope.pyramid_volume
    return _check_cell(inst, "P", inst.P_vertices(), inst.c_P, inst.mu_P, inst.V, inst.aut_order // inst.stab_P, fn)


def side_cells(inst: SeriesInstance) -> list[CellCheck]:
    out = []
    for i, j in inst.hij_pairs():
        out.append(_check_cell(inst, f"H{i},{j}", inst.H_vertices(i, j), inst.c_H(i, j), inst.mu_H(i, j),
                               inst.vol_H(i, j), inst.aut_order // inst.stab_H(i, j)))
    if not inst.even:
        out.append(_check_cell(inst, "S", inst.S_vertices(), inst.c_S, inst.mu_S, inst.vol_S,
                               inst.aut_order // inst.stab_S))
    return out


@dataclass
class EutaxyCheck:
    weights: dict[int, Fraction]
    exact: bool
    residual_zero: bool


def eutaxy_coefficients(inst: SeriesInstance, weights: dict[int, Fraction] | None = None) -> EutaxyCheck:
    """Substitute per-layer weights (default: the closed forms) into the eutaxy identity for P_n."""
    w = inst.eutaxy_weights() if weights is None else weights
    n = inst.n
    lhs = QFunc(0, [0] * n, la.zeros(n, n))
    for v in inst.P_vertices():
        lhs = lhs + ev(v).scale(w[int(v[-1])])
    qinv = inst.form.inverse()
    rhs = ev(inst.c_P) + QFunc(0, [0] * n, qinv).scale(inst.mu_P / n)
    diff = lhs - rhs
    zero = inner_product(diff, diff) == 0
    return EutaxyCheck(w, zero and all(x > 0 for x in w.values()), zero)


# facet census ---------------------------------------------------------------

FacetKind = str


def _listed_hyperplanes(inst: SeriesInstance) -> dict[FacetKind, tuple[tuple[int, ...], int]]:
    """Primitive (a, a0) with a.x >= a0 for each listed facet type (representative)."""
    n = inst.n
    raw: dict[str, tuple[list[Fraction], Fraction]] = {}
    raw["F1"] = ([Fraction(1)] * (n - 1) + [Fraction(n - 5, 2)], Fraction(1))
    raw["F2"] = ([Fraction(0)] * (n - 1) + [Fraction(-1)], Fraction(-1))
    raw["F3"] = ([Fraction(1)] * (n - 1) + [Fraction(n - 3, 2)], Fraction(0))
    if inst.even:
        raw["F4"] = ([Fraction(2)] + [Fraction(0)] * (n - 2) + [Fraction(-1)], Fraction(0))
        raw["F5"] = ([Fraction(1)] * (n - 1) + [Fraction(n - 1, 2)], Fraction(1))
    else:
        raw["F6"] = ([Fraction(1), Fraction(1)] + [Fraction(0)] * (n - 2), Fraction(0))
        raw["F7"] = ([Fraction(1)] * (n - 2) + [Fraction(n - 4), Fraction(0)], Fraction(1))
    lo = 1 if inst.even else 2
    for j in range(3, n - 1 - lo):
        i = n - 2 - j
        a = [Fraction(0)] * j + [Fraction(1)] * (n - 1 - j) + [Fraction(1 - i, 2)]
        raw[f"F{i},{j}"] = (a, Fraction(0))
    out = {}
    for k, (a, a0) in raw.items():
        w = la.primitive(a + [a0])
        out[k] = (tuple(w[:-1]), w[-1])
    return out


def listed_facet_data(inst: SeriesInstance) -> dict[FacetKind, tuple[Fraction, int]]:
    """(cone volume from c, orbit size) per facet type, with orbit sizes read off V_n."""
    n = inst.n
    nf = factorial(n)
    lead = 2 ** (n - 2) if inst.even else 2 ** (n - 1)
    d: dict[str, tuple[Fraction, int]] = {
        "F1": (Fraction(2 ** (n - 3) * (n - 3), nf), 2 ** (n - 2) if inst.even else 2 ** (n - 1)),
        "F2": (Fraction(2 ** (n - 1), nf), 1 if inst.even else 2),
        "F3": (Fraction(n - 1, 2 * nf), 2 ** (n - 2) if inst.even else 2 ** (n - 1)),
    }
    if inst.even:
        d["F4"] = (Fraction(1, n * (n - 1)) * (1 - Fraction(2 ** (n - 3), factorial(n - 2))), 2 * (n - 1))
        d["F5"] = (Fraction(n - 3, 2 * nf), 2 ** (n - 2))
    else:
        d["F6"] = (Fraction(4, n * (n - 1) * (n - 2)) * (1 - Fraction(2 ** (n - 4), factorial(n - 3))), 2 * (n - 1) * (n - 2))
        d["F7"] = (Fraction(n - 4, nf), 2 ** (n - 2) * (n - 1))
    lo = 1 if inst.even else 2
    for j in range(3, n - 1 - lo):
        i = n - 2 - j
        size = Fraction(lead * factorial(n - 1), factorial(i + 1) * 2 ** (j - 1) * factorial(j))
        if size.denominator != 1:
            raise AssertionError("non-integral facet orbit size")
        d[f"F{i},{j}"] = ((factorial(j) - 2 ** (j - 1)) * Fraction(n - j - 1, 2 * nf), int(size))
    return d


@dataclass
class FacetOrbit:
    kind: FacetKind | None
    size: int
    cone_volume: Fraction
    normal: tuple[int, ...]
    offset: int
    expected_size: int | None
    expected_volume: Fraction | None
    hyperplane_as_listed: bool = False
    n_vertices: int = 0

    @property
    def ok(self) -> bool:
        return self.kind is not None and self.size == self.expected_size and self.cone_volume == self.expected_volume


def facet_volume_census(inst: SeriesInstance) -> list[FacetOrbit]:
    verts = inst.P_vertices()
    facets = polytope.facets_of(verts)
    index = {v: k for k, v in enumerate(verts)}
    by_vertices = {f.vertices: k for k, f in enumerate(facets)}
    gens = inst.P_stabilizer_generators()
    perms = []
    for g in gens:
        img = [index.get(apply_affine(g, v)) for v in verts]
        if None in img:
            raise AssertionError("stabilizer generator does not fix P_n")
        perms.append(img)
    orbit_of = [-1] * len(facets)
    orbits: list[list[int]] = []
    for k in range(len(facets)):
        if orbit_of[k] >= 0:
            continue
        oid = len(orbits)
        members = [k]
        orbit_of[k] = oid
        stack = [k]
        while stack:
            f = facets[stack.pop()]
            for p in perms:
                img = tuple(sorted(p[i] for i in f.vertices))
                m = by_vertices[img]
                if orbit_of[m] < 0:
                    orbit_of[m] = oid
                    members.append(m)
                    stack.append(m)
        orbits.append(members)
    listed = _listed_hyperplanes(inst)
    data = listed_facet_data(inst)
    apex = list(inst.c_P[:-1]) + [Fraction(0)]
    found = []
    for members in orbits:
        planes = {(facets[m].normal, facets[m].offset): m for m in members}
        kind = next((k for k, pl in listed.items() if pl in planes), None)
        rep = planes[listed[kind]] if kind is not None else members[0]
        f = facets[rep]
        vol = polytope.cone_volume([verts[i] for i in f.vertices], apex)
        found.append([kind, kind is not None, len(members), vol, f])
    # orbits whose listed hyperplane is not literally a facet: match on (size, cone volume)
    used = {k for k, *_ in found if k is not None}
    for item in found:
        if item[0] is None:
            cands = [k for k, (v, sz) in data.items() if k not in used and (sz, v) == (item[2], item[3])]
            if len(cands) == 1:
                item[0] = cands[0]
                used.add(cands[0])
    out = []
    for kind, literal, size, vol, f in found:
        exp = data.get(kind) if kind else None
        out.append(FacetOrbit(kind, size, vol, f.normal, f.offset, exp[1] if exp else None,
                              exp[0] if exp else None, literal, len(f.vertices)))
    out.sort(key=lambda o: (o.kind is None, o.kind or "", o.normal))
    return out


@dataclass
class SeriesReport:
    n: int
    mu: Fraction
    V: Fraction
    big: CellCheck
    sides: list[CellCheck]
    eutaxy: EutaxyCheck
    perfect_rank: int
    target_rank: int
    identity_residue: Fraction
    census: list[FacetOrbit] | None = None
    failures: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> Literal["inhomogeneous-extreme", "failed"]:
        return "failed" if self.failures else "inhomogeneous-extreme"


def verify(inst: SeriesInstance, census: bool = True) -> SeriesReport:
    n = inst.n
    big = big_cell(inst)
    sides = side_cells(inst)
    eut = eutaxy_coefficients(inst)
    rank = la.rank([QFunc.as_vector(ev(v)) for v in big.vertices])
    target = (n + 2) * (n + 1) // 2 - 1
    total = big.orbit_size * inst.V + sum((c.orbit_size * c.claimed_volume for c in sides), Fraction(0))
    residue = 2 - total
    fails = []

    def need(ok: bool, what: str, lhs, rhs):
        if not ok:
            fails.append(f"{what}: {lhs} != {rhs}")

    for c in [big, *sides]:
        need(c.empty_sphere, f"{c.kind} empty sphere", False, True)
        need(c.center == c.claimed_center, f"{c.kind} center", c.center, c.claimed_center)
        need(c.sq_radius == c.claimed_sq_radius, f"{c.kind} squared radius", c.sq_radius, c.claimed_sq_radius)
        need(c.volume == c.claimed_volume, f"{c.kind} volume", c.volume, c.claimed_volume)
    for c in sides:
        need(c.sq_radius < inst.mu_P, f"{c.kind} radius below mu_P", c.sq_radius, f"< {inst.mu_P}")
    need(residue == 0, "volume identity 2 - sum |O(D)| vol(D)", residue, 0)
    need(eut.residual_zero, "eutaxy substitution", "nonzero residual", 0)
    need(all(x > 0 for x in eut.weights.values()), "eutaxy weights positive", eut.weights, "> 0")
    need(rank == target, "perfectness rank", rank, target)
    cen = None
    if census:
        cen = facet_volume_census(inst)
        missing = set(listed_facet_data(inst)) - {o.kind for o in cen}
        need(not missing, "listed facet types found", sorted(missing), [])
        for o in cen:
            need(o.ok, f"facet orbit {o.kind or o.normal}", (o.size, o.cone_volume), (o.expected_size, o.expected_volume))
        vsum = sum((o.size * o.cone_volume for o in cen), Fraction(0))
        need(vsum == inst.V, "facet cone volumes sum to V_n", vsum, inst.V)
    return SeriesReport(n, inst.mu_P, inst.V, big, sides, eut, rank, target, residue, cen, fails)


def expected_translation_classes(inst: SeriesInstance) -> dict[str, tuple[int, Fraction, Fraction]]:
    """kind -> (orbit size, squared radius, volume in lattice coordinates)."""
    out = {"P": (inst.aut_order // inst.stab_P, inst.mu_P, inst.V / 2)}
    for i, j in inst.hij_pairs():
        out[f"H{i},{j}"] = (inst.aut_order // inst.stab_H(i, j), inst.mu_H(i, j), inst.vol_H(i, j) / 2)
    if not inst.even:
        out["S"] = (inst.aut_order // inst.stab_S, inst.mu_S, inst.vol_S / 2)
    return out


def orbit_size_H(n: int, i: int, j: int) -> int:
    return 4 * comb(n - 1, i) // (2 if i == j else 1)
