"""Extremality certificates for PQFs at their deep holes.

Exact checks: inhomogeneous perfection (rank), three-tier eutaxy (exact LP),
spherical design strength (exact polynomial identities), Morse
non-degeneracy (subspace containment) and the Barnes-Dickson local minimum
test.  The float perturbation helpers at the bottom are empirical
cross-checks only.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, prod
from typing import Literal, Sequence

import numpy as np
from scipy.spatial import Delaunay, QhullError

from . import linalg as la
from .delone import DeloneCell, DeloneSubdivision, enumerate_delone
from .forms import QForm, QFunc, Tier, center_and_min, ev, tier_from_lp
from .lp import LPProblem, lp_feasible

Verdict = Literal[
    "inhomogeneous-extreme", "pessimum", "degenerate-critical", "local-minimum-candidate", "none-of-these"
]
VERDICT_ORDER: tuple[Verdict, ...] = (
    "inhomogeneous-extreme",
    "pessimum",
    "degenerate-critical",
    "local-minimum-candidate",
)
DEFAULT_STRENGTH_CAP = 7
_TIER_RANK = {"eutactic": 3, "semieutactic": 2, "weakly-eutactic": 1, "none": 0}


def _as_qform(q) -> QForm:
    return q if isinstance(q, QForm) else QForm(q)


def _eval_row(v: Sequence) -> list[Fraction]:
    """Row r with r . f.as_vector() = f(v)."""
    v = la.vec(v)
    n = len(v)
    quad = [v[i] * v[j] * (1 if i == j else 2) for i in range(n) for j in range(i, n)]
    return [Fraction(1), *(2 * x for x in v), *quad]


# perfection and eutaxy -------------------------------------------------------


def inhom_perfect(cell: DeloneCell) -> tuple[bool, int]:
    n = cell.n
    r = la.rank([ev(v).as_vector() for v in cell.vertices])
    return r == (n + 2) * (n + 1) // 2 - 1, r


@dataclass(frozen=True)
class EutaxyWitness:
    tier: Tier
    weights: dict[tuple[int, ...], Fraction] | None

    def residual(self, cell: DeloneCell, q: QForm) -> QFunc:
        """sum alpha_v ev_v - (ev_c + mu/n Q^{-1}); zero for a valid witness."""
        n = q.n
        acc = QFunc(0, [0] * n, la.zeros(n, n))
        for v, a in (self.weights or {}).items():
            acc = acc + ev(v).scale(a)
        return acc - eutaxy_target(cell, q)


def eutaxy_target(cell: DeloneCell, q: QForm) -> QFunc:
    n = q.n
    return ev(cell.center) + QFunc(0, [0] * n, q.inverse()).scale(cell.sq_radius / n)


def inhom_eutaxy(cell: DeloneCell, q) -> EutaxyWitness:
    q = _as_qform(q)
    target = eutaxy_target(cell, q).as_vector()
    cols = [ev(v).as_vector() for v in cell.vertices]
    # uniform weights settle every 2-design hole without an LP
    u = Fraction(1, len(cols))
    if all(sum(c[k] for c in cols) * u == target[k] for k in range(len(target))):
        return EutaxyWitness("eutactic", {v: u for v in cell.vertices})
    verdict = lp_feasible(LPProblem.build(la.transpose(cols), target, "eps"))
    w = None if verdict.witness is None else dict(zip(cell.vertices, verdict.witness))
    return EutaxyWitness(tier_from_lp(verdict.status), w)


# design strength -------------------------------------------------------------


@dataclass(frozen=True)
class DesignReport:
    strength: int
    failing_moment: int | None
    cap: int


def _quad_power(qi: list[list[int]], m: int) -> dict[tuple[int, ...], int]:
    n = len(qi)
    base: dict[tuple[int, ...], int] = {}
    for i in range(n):
        for j in range(n):
            e = [0] * n
            e[i] += 1
            e[j] += 1
            base[tuple(e)] = base.get(tuple(e), 0) + qi[i][j]
    out: dict[tuple[int, ...], int] = {(0,) * n: 1}
    for _ in range(m):
        nxt: dict[tuple[int, ...], int] = {}
        for a, ca in out.items():
            for b, cb in base.items():
                k = tuple(x + y for x, y in zip(a, b))
                nxt[k] = nxt.get(k, 0) + ca * cb
        out = nxt
    return out


def _moment_holds(U: list[list[int]], k: int, qi: list[list[int]], qden: int, rhs_scale: Fraction) -> bool:
    """Compare sum_x (U_x . z)^k with the isotropic right-hand side coefficientwise."""
    n = len(U[0])
    if k % 2 == 0:
        target = _quad_power(qi, k // 2)
        scale = rhs_scale / Fraction(qden) ** (k // 2)
    for combo in itertools.combinations_with_replacement(range(n), k):
        alpha = [0] * n
        for i in combo:
            alpha[i] += 1
        mult = factorial(k) // prod(factorial(a) for a in alpha)
        s = sum(prod(u[i] ** a for i, a in enumerate(alpha) if a) for u in U)
        lhs = mult * s
        if k % 2:
            if lhs:
                return False
        elif lhs != scale * target.get(tuple(alpha), 0):
            return False
    return True


def design_strength(X: Sequence[Sequence[int]], q, c: Sequence, r2, cap: int = DEFAULT_STRENGTH_CAP) -> DesignReport:
    """Largest t <= cap such that X is a spherical t-design on the Q-sphere (c, r2).

    The moment identities are polynomial identities in z = y - c:
    sum_x (u_x . z)^k = 0 for odd k and
    (1*3*...*(k-1)) / (n(n+2)...(n+k-2)) |X| r2^{k/2} Q[z]^{k/2} for even k,
    with u_x = Q(x - c); they are compared coefficient by coefficient.
    """
    q = _as_qform(q)
    n = q.n
    c = la.vec(c)
    r2 = la.frac(r2)
    for x in X:
        if q([a - b for a, b in zip(la.vec(x), c)]) != r2:
            raise ValueError(f"point {tuple(x)} is not on the sphere of squared radius {r2}")
    u = [la.matvec(q.gram, [a - b for a, b in zip(la.vec(x), c)]) for x in X]
    D = la.common_denominator(v for row in u for v in row)
    U = [[int(v * D) for v in row] for row in u]
    qden = la.common_denominator(v for row in q.gram for v in row)
    qi = [[int(v * qden) for v in row] for row in q.gram]
    for k in range(1, cap + 1):
        rhs_scale = Fraction(0)
        if k % 2 == 0:
            num = prod(range(1, k, 2))
            den = prod(range(n, n + k - 1, 2))
            rhs_scale = Fraction(num, den) * len(X) * r2 ** (k // 2) * Fraction(D) ** k
        if not _moment_holds(U, k, qi, qden, rhs_scale):
            return DesignReport(k - 1, k, cap)
    return DesignReport(cap, None, cap)


def strongly_perfect(reports: Sequence[DesignReport]) -> bool:
    return bool(reports) and all(r.strength >= 4 for r in reports)


# secondary-cone spans and Morse non-degeneracy -------------------------------


def lin_delta_span(cell: DeloneCell | Sequence[Sequence[int]]) -> list[QFunc]:
    """Basis of the quadratic functions vanishing on every vertex of the cell."""
    verts = cell.vertices if isinstance(cell, DeloneCell) else [tuple(v) for v in cell]
    n = len(verts[0])
    basis = la.nullspace([_eval_row(v) for v in verts])
    return [QFunc.from_vector(b, n) for b in basis]


def _q_part(f: QFunc) -> list[Fraction]:
    n = f.n
    return [f.gram[i][j] for i in range(n) for j in range(i, n)]


def _span_q_parts(cell: DeloneCell) -> list[list[Fraction]]:
    return [_q_part(f) for f in lin_delta_span(cell)]


def _critical(tiers: Sequence[Tier]) -> bool:
    return all(_TIER_RANK[t] >= 1 for t in tiers)


def morse_nondegenerate_cells(cells: Sequence[DeloneCell]) -> bool:
    """True iff one span (projected to quadratic parts) contains all the others."""
    spans = [_span_q_parts(c) for c in cells]
    total = la.rank([r for s in spans for r in s])
    return any(la.rank(s) == total for s in spans)


# Barnes-Dickson ----------------------------------------------------------------


def _barycentric(cell: DeloneCell) -> list[Fraction]:
    verts = [la.vec(v) for v in cell.vertices]
    A = [[v[i] for v in verts] for i in range(cell.n)] + [[Fraction(1)] * len(verts)]
    b = list(cell.center) + [Fraction(1)]
    x = la.solve(A, b)
    if x is None:
        raise ValueError("center is not in the affine hull of the cell")
    return x


def barnes_dickson_matrix(cell: DeloneCell) -> list[list[Fraction]]:
    alpha = _barycentric(cell)
    n = cell.n
    c = cell.center
    return [
        [sum((a * v[i] * v[j] for a, v in zip(alpha, cell.vertices)), Fraction(0)) - c[i] * c[j] for j in range(n)]
        for i in range(n)
    ]


def barnes_dickson_cells(q: QForm, cells: Sequence[DeloneCell]) -> bool | None:
    if not cells or not all(c.is_simplex for c in cells):
        return None
    n = q.n
    qinv = q.inverse()
    rhs = [qinv[i][j] for i in range(n) for j in range(i, n)]
    cols = []
    for c in cells:
        m = barnes_dickson_matrix(c)
        cols.append([m[i][j] for i in range(n) for j in range(i, n)])
    verdict = lp_feasible(LPProblem.build(la.transpose(cols), rhs, "nonneg"))
    return verdict.status in ("strictly-feasible", "feasible")


# certificate -------------------------------------------------------------------


@dataclass
class HoleCertificate:
    cell: DeloneCell
    classes: int
    perfect: bool
    rank: int
    eutaxy: EutaxyWitness
    design: DesignReport


@dataclass
class Certificate:
    form: QForm
    name: str | None
    mu: Fraction
    n_classes: int
    n_orbits: int | None
    holes: list[HoleCertificate]
    attaining_classes: int
    attaining_orbits: int | None
    perfect: bool
    eutaxy_tier: Tier
    strongly_perfect: bool
    any_simplex_hole: bool
    morse_nondegenerate: bool | None
    barnes_dickson: bool | None
    flags: list[Verdict] = field(default_factory=list)

    @property
    def verdict(self) -> Verdict:
        return self.flags[0] if self.flags else "none-of-these"

    @property
    def closest_counts(self) -> list[int]:
        return sorted({len(h.cell.vertices) for h in self.holes})

    @property
    def strengths(self) -> list[int]:
        return sorted({h.design.strength for h in self.holes})


def _certify_hole(args) -> tuple[bool, int, EutaxyWitness, DesignReport]:
    cell, q, cap = args
    perfect, rank = inhom_perfect(cell)
    eut = inhom_eutaxy(cell, q)
    des = design_strength(cell.vertices, q, cell.center, cell.sq_radius, cap)
    return perfect, rank, eut, des


def attaining_cells(sub: DeloneSubdivision) -> tuple[Fraction, list[int]]:
    mu = max(c.sq_radius for c in sub.cells)
    return mu, [i for i, c in enumerate(sub.cells) if c.sq_radius == mu]


def classify(
    q,
    aut=None,
    cap: int = DEFAULT_STRENGTH_CAP,
    sub: DeloneSubdivision | None = None,
    name: str | None = None,
    jobs: int = 1,
) -> Certificate:
    q = _as_qform(q)
    if sub is None:
        sub = enumerate_delone(q, aut)
    mu, idx = attaining_cells(sub)
    # one certificate per orbit of attaining classes (all classes when no group is known)
    reps: dict[int, list[int]] = {}
    for i in idx:
        key = sub.orbit_of[i] if sub.orbit_of is not None else i
        reps.setdefault(key, []).append(i)
    groups = [reps[k] for k in sorted(reps)]
    work = [(sub.cells[g[0]], q, cap) for g in groups]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_certify_hole, work))
    else:
        results = [_certify_hole(w) for w in work]
    holes = [HoleCertificate(sub.cells[g[0]], len(g), *r) for g, r in zip(groups, results)]
    cells = [sub.cells[i] for i in idx]
    perfect = all(h.perfect for h in holes)
    tier = min((h.eutaxy.tier for h in holes), key=_TIER_RANK.__getitem__)
    simplex = any(c.is_simplex for c in cells)
    morse = morse_nondegenerate_cells(cells) if _critical([h.eutaxy.tier for h in holes]) else None
    bd = barnes_dickson_cells(q, cells)
    flags: list[Verdict] = []
    eutactic = tier == "eutactic"
    extreme = perfect and eutactic
    if extreme:
        flags.append("inhomogeneous-extreme")
    if eutactic and not extreme and not simplex:
        flags.append("pessimum")
    if morse is False:
        flags.append("degenerate-critical")
    if bd is True:
        flags.append("local-minimum-candidate")
    return Certificate(
        form=q,
        name=name,
        mu=mu,
        n_classes=len(sub.cells),
        n_orbits=sub.n_orbits,
        holes=holes,
        attaining_classes=len(idx),
        attaining_orbits=len(groups) if sub.orbit_of is not None else None,
        perfect=perfect,
        eutaxy_tier=tier,
        strongly_perfect=strongly_perfect([h.design for h in holes]),
        any_simplex_hole=simplex,
        morse_nondegenerate=morse,
        barnes_dickson=bd,
        flags=flags,
    )


def morse_nondegenerate(q, aut=None, sub: DeloneSubdivision | None = None) -> bool | None:
    q = _as_qform(q)
    sub = sub or enumerate_delone(q, aut)
    _, idx = attaining_cells(sub)
    cells = [sub.cells[i] for i in idx]
    if not _critical([inhom_eutaxy(c, q).tier for c in cells]):
        return None
    return morse_nondegenerate_cells(cells)


def barnes_dickson_local_min(q, aut=None, sub: DeloneSubdivision | None = None) -> bool | None:
    q = _as_qform(q)
    sub = sub or enumerate_delone(q, aut)
    _, idx = attaining_cells(sub)
    return barnes_dickson_cells(q, [sub.cells[i] for i in idx])


# float perturbation cross-checks -------------------------------------------------


def _float_circumradius2(qf: np.ndarray, pts: np.ndarray) -> float:
    p0 = pts[0]
    d = pts[1:] - p0
    A = 2 * d @ qf
    b = np.einsum("ij,jk,ik->i", d, qf, d)
    x = np.linalg.solve(A, b)
    return float(x @ qf @ x)


def _max_sub_radius(qf: np.ndarray, verts: np.ndarray) -> float:
    n = qf.shape[0]
    if len(verts) == n + 1:
        return _float_circumradius2(qf, verts)
    L = np.linalg.cholesky(qf)
    try:
        tri = Delaunay(verts @ L)
    except QhullError:
        tri = Delaunay(verts @ L, qhull_options="QJ")
    # qhull triangulates merged (cospherical) facets and may emit flat simplices;
    # any full simplex of a cospherical set has the same circumsphere, so skip them
    full = [s for s in tri.simplices if np.linalg.cond(verts[s[1:]] - verts[s[0]]) < 1e10]
    return max(_float_circumradius2(qf, verts[s]) for s in full)


def gamma_float(q_float: np.ndarray, cells: Sequence[DeloneCell]) -> float:
    """mu/det^{1/n} for a small perturbation of a form whose deep-hole cells are given.

    The perturbed Delone subdivision refines the old one, and restricted to a
    cell it is the Q'-Delaunay subdivision of the cell's vertices.
    """
    qf = np.asarray(q_float, dtype=float)
    mu = max(_max_sub_radius(qf, np.asarray(c.vertices, dtype=float)) for c in cells)
    n = qf.shape[0]
    return mu / np.linalg.det(qf) ** (1.0 / n)


def random_directions(n: int, count: int, seed: int) -> list[np.ndarray]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        a = rng.standard_normal((n, n))
        s = (a + a.T) / 2
        out.append(s / np.linalg.norm(s))
    return out


def perturbation_deltas(q, cells: Sequence[DeloneCell], count: int = 50, step: float = 1e-3, seed: int = 0) -> list[float]:
    q = _as_qform(q)
    qf = np.array([[float(x) for x in r] for r in q.gram])
    base = gamma_float(qf, cells)
    return [gamma_float(qf + step * e, cells) - base for e in random_directions(q.n, count, seed)]


def increasing_direction(q, cell: DeloneCell) -> list[list[Fraction]]:
    """A quadratic part from lin Delta(cell), Frobenius-orthogonal to Q itself.

    Moving Q along it keeps the cell Delone and, at an eutactic form, leaves
    the first-order change of H at zero while the second-order change is positive.
    """
    q = _as_qform(q)
    n = q.n
    qv = [q.gram[i][j] * (1 if i == j else 2) for i in range(n) for j in range(i, n)]
    qq = sum((a * b for a, b in zip(qv, [q.gram[i][j] for i in range(n) for j in range(i, n)])), Fraction(0))
    for f in lin_delta_span(cell):
        e = _q_part(f)
        coef = sum((a * b for a, b in zip(qv, e)), Fraction(0)) / qq
        e = [a - coef * b for a, b in zip(e, [q.gram[i][j] for i in range(n) for j in range(i, n)])]
        if any(e):
            m = la.zeros(n, n)
            k = 0
            for i in range(n):
                for j in range(i, n):
                    m[i][j] = m[j][i] = e[k]
                    k += 1
            return m
    raise ValueError("the secondary cone span has no direction transverse to Q")


def exact_lower_bound_gain(q, cell: DeloneCell, direction: Sequence[Sequence], t) -> Fraction:
    """H^n(f + t g) - H^n(f) for the quadratic function g of lin Delta(cell) with quadratic part t*direction.

    mu(Q + t E) >= mu(f + t g), so a positive value certifies that H increases.
    """
    q = _as_qform(q)
    n = q.n
    t = la.frac(t)
    verts = cell.vertices
    E = [[la.frac(x) for x in r] for r in direction]
    # f = Q[x - c] - mu ; g = alpha + 2 b.x + E[x] vanishing on the vertices
    rows = [[Fraction(1), *(2 * Fraction(x) for x in v)] for v in verts]
    rhs = [-la.quad(E, v) for v in verts]
    sol = la.solve(rows, rhs)
    if sol is None:
        raise ValueError("direction is not the quadratic part of a function in lin Delta(cell)")
    f = QFunc.from_center(q, cell.center, cell.sq_radius)
    g = QFunc(sol[0], sol[1:], E)
    h = f + g.scale(t)
    _, mu_t = center_and_min(h)
    return mu_t**n / la.det(h.gram) - cell.sq_radius**n / q.det()
