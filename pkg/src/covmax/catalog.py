"""Named lattices: exact Gram matrices, automorphism generators, tabulated invariants.

Root lattices use Cartan-matrix Gram forms in a simple-root basis, so their
automorphism groups are generated by the simple reflections, the diagram
symmetries and -1.  Duals use scaled inverse Grams and the contragredient
generators g^{-T}.
"""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import linalg as la
from .forms import QForm

IntMatrix = list[list[int]]


class UnknownLattice(KeyError):
    pass


@dataclass(frozen=True)
class Expected:
    """Tabulated invariants: orbit count, closest-vector count, design strength."""

    orbits: int
    closest: int
    strength: int
    source: str


@dataclass
class CatalogEntry:
    name: str
    gram: QForm
    aut_generators: list[IntMatrix]
    expected: Expected | None = None
    notes: str = ""

    def __post_init__(self):
        for g in self.aut_generators:
            if self.gram.transformed(g).gram != self.gram.gram:
                raise ValueError(f"{self.name}: generator {g} does not preserve the form")

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "gram": [[la.rat_str(x) for x in r] for r in self.gram.gram],
            "aut_generators": self.aut_generators,
        }
        if self.expected is not None:
            out["expected"] = {
                "orbits": self.expected.orbits,
                "closest": self.expected.closest,
                "strength": self.expected.strength,
                "source": self.expected.source,
            }
        return out


def _identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _minus(n: int) -> IntMatrix:
    return [[-int(i == j) for j in range(n)] for i in range(n)]


def _perm_matrix(p: Sequence[int]) -> IntMatrix:
    """Matrix sending e_i to e_{p[i]}."""
    n = len(p)
    m = [[0] * n for _ in range(n)]
    for i, j in enumerate(p):
        m[j][i] = 1
    return m


def cartan(n: int, edges: Sequence[tuple[int, int]]) -> IntMatrix:
    g = [[2 * int(i == j) for j in range(n)] for i in range(n)]
    for a, b in edges:
        g[a][b] = g[b][a] = -1
    return g


def reflections(gram: Sequence[Sequence[int]]) -> list[IntMatrix]:
    """Simple reflections z -> z - (2 e_i^t Q z / Q_ii) e_i for a root basis."""
    n = len(gram)
    out = []
    for i in range(n):
        m = _identity(n)
        qi = gram[i][i]
        for j in range(n):
            c = Fraction(2 * gram[i][j], qi)
            if c.denominator != 1:
                raise ValueError("basis vector is not a root")
            m[i][j] -= int(c)
        out.append(m)
    return out


def _dual(gram: IntMatrix, gens: list[IntMatrix], scale: int) -> tuple[IntMatrix, list[IntMatrix]]:
    inv = la.inverse(gram)
    g = [[scale * x for x in r] for r in inv]
    if any(x.denominator != 1 for r in g for x in r):
        raise ValueError("scaled inverse is not integral")
    gi = [[int(x) for x in r] for r in g]
    out = []
    for m in gens:
        h = la.transpose(la.inverse(m))
        out.append([[int(x) for x in r] for r in h])
    return gi, out


def _zn(n: int) -> tuple[IntMatrix, list[IntMatrix]]:
    gens = [_perm_matrix([1, 0] + list(range(2, n)))] if n > 1 else []
    if n > 2:
        gens.append(_perm_matrix(list(range(1, n)) + [0]))
    flip = _identity(n)
    flip[0][0] = -1
    gens.append(flip)
    return _identity(n), gens


def _dn(n: int) -> tuple[IntMatrix, list[IntMatrix]]:
    edges = [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)]
    g = cartan(n, edges)
    gens = reflections(g)
    p = list(range(n))
    p[n - 2], p[n - 1] = n - 1, n - 2
    gens.append(_perm_matrix(p))
    if n == 4:
        gens.append(_perm_matrix([2, 1, 3, 0]))  # triality: 0 -> 2 -> 3 -> 0
    return g, gens


def _e(n: int) -> tuple[IntMatrix, list[IntMatrix]]:
    # node 1 hangs off node 3; chain 0-2-3-4-...-(n-1)
    edges = [(0, 2), (1, 3)] + [(i, i + 1) for i in range(2, n - 1)]
    g = cartan(n, edges)
    gens = reflections(g)
    if n == 6:
        gens.append(_perm_matrix([5, 1, 4, 3, 2, 0]))
    return g, gens


def _a2() -> tuple[IntMatrix, list[IntMatrix]]:
    g = [[2, 1], [1, 2]]
    return g, reflections(g) + [_perm_matrix([1, 0])]


def _block(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    n, m = len(a), len(b)
    out = [[0] * (n + m) for _ in range(n + m)]
    for i in range(n):
        out[i][:n] = a[i]
    for i in range(m):
        out[n + i][n:] = b[i]
    return out


def _builtin(name: str) -> CatalogEntry | None:
    m = re.fullmatch(r"Z([1-8])", name)
    if m:
        n = int(m.group(1))
        g, gens = _zn(n)
        return CatalogEntry(name, QForm(g), gens, Expected(1, 2**n, 3, "pessimum-table") if n >= 2 else None)
    m = re.fullmatch(r"D([3-8])", name)
    if m:
        n = int(m.group(1))
        g, gens = _dn(n)
        exp = {3: Expected(2, 6, 3, "pessimum-table"), 4: Expected(1, 8, 3, "pessimum-table")}.get(
            n, Expected(2, 2 ** (n - 1), 3, "pessimum-table")
        )
        return CatalogEntry(name, QForm(g), gens, exp)
    m = re.fullmatch(r"E([678])(\*?)", name)
    if m:
        n = int(m.group(1))
        g, gens = _e(n)
        if m.group(2):
            if n == 8:
                return None
            g, gens = _dual(g, gens, {6: 3, 7: 2}[n])
            exp = {6: Expected(1, 9, 2, "pessimum-table"), 7: Expected(1, 16, 3, "pessimum-table")}[n]
        else:
            exp = {
                6: Expected(1, 27, 4, "extreme-table"),
                7: Expected(2, 56, 5, "extreme-table"),
                8: Expected(2, 16, 3, "pessimum-table"),
            }[n]
        return CatalogEntry(name, QForm(g), gens, exp)
    if name == "A2":
        g, gens = _a2()
        return CatalogEntry(name, QForm(g), gens + [_minus(2)])
    if name == "A3*":
        g, gens = _dn(3)
        g, gens = _dual(g, gens, 4)
        return CatalogEntry(name, QForm(g), gens)
    if name == "D4xZ1":
        g, gens = _dn(4)
        big = [_block(h, [[1]]) for h in gens]
        flip = _identity(5)
        flip[4][4] = -1
        return CatalogEntry(name, QForm(_block(g, [[1]])), big + [flip])
    m = re.fullmatch(r"L([6-9])", name)
    if m:
        from . import series

        inst = series.build(int(m.group(1)))
        return CatalogEntry(name, inst.zform, inst.z_aut_generators(), notes="series form in a lattice basis")
    return None


BUILTIN_NAMES = (
    [f"Z{n}" for n in range(1, 9)]
    + ["A2", "A3*"]
    + [f"D{n}" for n in range(3, 9)]
    + ["E6", "E7", "E8", "E6*", "E7*", "D4xZ1"]
    + [f"L{n}" for n in range(6, 10)]
)

TABLE_ROWS = [f"Z{n}" for n in range(2, 9)] + ["D3", "D4"] + [f"D{n}" for n in range(5, 9)] + [
    "E6*",
    "E7*",
    "E8",
    "E6",
    "E7",
]

DATA_ENV = "COVMAX_CATALOG_DIR"


def _from_json(d: dict) -> CatalogEntry:
    exp = d.get("expected")
    return CatalogEntry(
        d["name"],
        QForm([[la.frac(x) for x in r] for r in d["gram"]]),
        [[[int(x) for x in r] for r in g] for g in d.get("aut_generators", [])],
        Expected(exp["orbits"], exp["closest"], exp["strength"], exp.get("source", "data")) if exp else None,
        d.get("notes", ""),
    )


def _overrides(data_dir: str | os.PathLike | None) -> dict[str, dict]:
    data_dir = data_dir if data_dir is not None else os.environ.get(DATA_ENV)
    if not data_dir:
        return {}
    out = {}
    for p in sorted(Path(data_dir).glob("*.json")):
        d = json.loads(p.read_text())
        for item in d if isinstance(d, list) else [d]:
            out[item["name"]] = item
    return out


def names(data_dir: str | os.PathLike | None = None) -> list[str]:
    extra = [n for n in _overrides(data_dir) if n not in BUILTIN_NAMES]
    return BUILTIN_NAMES + sorted(extra)


def get(name: str, data_dir: str | os.PathLike | None = None) -> CatalogEntry:
    over = _overrides(data_dir)
    if name in over:
        return _from_json(over[name])
    entry = _builtin(name)
    if entry is None:
        raise UnknownLattice(f"unknown lattice {name!r}; available: {', '.join(names(data_dir))}")
    return entry
