"""JSON encoding of forms, subdivisions, certificates and series reports.

Every rational is written as a canonical "p/q" string ("p" for integers) and
keys are sorted on output, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from . import linalg as la
from .certify import Certificate, HoleCertificate
from .delone import DeloneCell, DeloneSubdivision
from .forms import QForm, QFunc
from .series import CellCheck, FacetOrbit, SeriesReport


class FormParseError(ValueError):
    pass


def rat(x) -> str:
    return la.rat_str(Fraction(x))


def rats(xs) -> list[str]:
    return [rat(x) for x in xs]


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def form_to_json(q: QForm) -> dict:
    return {"n": q.n, "gram": [rats(r) for r in q.gram]}


def func_to_json(f: QFunc) -> dict:
    return {"alpha": rat(f.alpha), "b": rats(f.b), "gram": [rats(r) for r in f.gram]}


def form_from_json(d: Any) -> tuple[QForm, list[list[list[int]]] | None]:
    """Parse QForm JSON, with optional integer "aut_generators"."""
    if not isinstance(d, dict) or "gram" not in d:
        raise FormParseError('form JSON needs a "gram" entry')
    try:
        gram = [[la.frac(x) for x in r] for r in d["gram"]]
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise FormParseError(f"bad Gram entry: {e}") from None
    if "n" in d and d["n"] != len(gram):
        raise FormParseError(f'"n" is {d["n"]} but the Gram matrix has {len(gram)} rows')
    try:
        q = QForm(gram)
    except ValueError as e:
        raise FormParseError(str(e)) from None
    gens = d.get("aut_generators")
    if gens is not None:
        try:
            gens = [[[int(x) for x in r] for r in g] for g in gens]
        except (TypeError, ValueError) as e:
            raise FormParseError(f"bad automorphism generator: {e}") from None
    return q, gens


def cell_to_json(cell: DeloneCell, volume: Fraction | None = None, orbit_size: int | None = None) -> dict:
    out = {
        "vertices": [list(v) for v in cell.vertices],
        "center": rats(cell.center),
        "sq_radius": rat(cell.sq_radius),
    }
    if volume is not None:
        out["volume"] = rat(volume)
    if orbit_size is not None:
        out["orbit_size"] = orbit_size
    return out


def subdivision_to_json(sub: DeloneSubdivision) -> dict:
    """Cells in canonical order; volumes are shared along orbits (automorphisms are unimodular)."""
    vol_of_orbit: dict[int, Fraction] = {}
    cells = []
    for i, c in enumerate(sub.cells):
        if sub.orbit_of is None:
            cells.append(cell_to_json(c, c.volume))
            continue
        o = sub.orbit_of[i]
        if o not in vol_of_orbit:
            vol_of_orbit[o] = c.volume
        d = cell_to_json(c, vol_of_orbit[o], sub.orbit_sizes[o])
        d["orbit"] = o
        cells.append(d)
    return {
        "gram": [rats(r) for r in sub.gram],
        "n_classes": len(sub.cells),
        "n_orbits": sub.n_orbits,
        "cells": cells,
    }


def hole_to_json(h: HoleCertificate) -> dict:
    w = h.eutaxy.weights
    return {
        "cell": cell_to_json(h.cell),
        "classes": h.classes,
        "n_closest": len(h.cell.vertices),
        "perfect": h.perfect,
        "rank": h.rank,
        "eutaxy": {
            "tier": h.eutaxy.tier,
            "weights": None if w is None else [[list(v), rat(a)] for v, a in sorted(w.items())],
        },
        "design": {"strength": h.design.strength, "failing_moment": h.design.failing_moment, "cap": h.design.cap},
    }


def certificate_to_json(c: Certificate) -> dict:
    return {
        "name": c.name,
        "form": form_to_json(c.form),
        "mu": rat(c.mu),
        "n_classes": c.n_classes,
        "n_orbits": c.n_orbits,
        "attaining_classes": c.attaining_classes,
        "attaining_orbits": c.attaining_orbits,
        "closest_counts": c.closest_counts,
        "strengths": c.strengths,
        "perfect": c.perfect,
        "eutaxy_tier": c.eutaxy_tier,
        "strongly_perfect": c.strongly_perfect,
        "any_simplex_hole": c.any_simplex_hole,
        "morse_nondegenerate": c.morse_nondegenerate,
        "barnes_dickson": c.barnes_dickson,
        "flags": list(c.flags),
        "verdict": c.verdict,
        "holes": [hole_to_json(h) for h in c.holes],
    }


def _cell_check(c: CellCheck) -> dict:
    return {
        "kind": c.kind,
        "n_vertices": len(c.vertices),
        "center": rats(c.center),
        "sq_radius": rat(c.sq_radius),
        "volume": rat(c.volume),
        "orbit_size": c.orbit_size,
        "claimed_center": rats(c.claimed_center),
        "claimed_sq_radius": rat(c.claimed_sq_radius),
        "claimed_volume": rat(c.claimed_volume),
        "empty_sphere": c.empty_sphere,
    }


def _facet(o: FacetOrbit) -> dict:
    return {
        "kind": o.kind,
        "size": o.size,
        "cone_volume": rat(o.cone_volume),
        "normal": list(o.normal),
        "offset": o.offset,
        "expected_size": o.expected_size,
        "expected_volume": None if o.expected_volume is None else rat(o.expected_volume),
        "hyperplane_as_listed": o.hyperplane_as_listed,
        "n_vertices": o.n_vertices,
    }


def series_report_to_json(r: SeriesReport, form: QForm) -> dict:
    return {
        "n": r.n,
        "form": form_to_json(form),
        "mu": rat(r.mu),
        "V": rat(r.V),
        "identity_residue": rat(r.identity_residue),
        "perfect_rank": r.perfect_rank,
        "target_rank": r.target_rank,
        "eutaxy": {
            "weights": {str(k): rat(v) for k, v in sorted(r.eutaxy.weights.items())},
            "exact": r.eutaxy.exact,
            "residual_zero": r.eutaxy.residual_zero,
        },
        "big_cell": _cell_check(r.big),
        "side_cells": [_cell_check(c) for c in r.sides],
        "facet_census": None if r.census is None else [_facet(o) for o in r.census],
        "failures": list(r.failures),
        "verdict": r.verdict,
    }
