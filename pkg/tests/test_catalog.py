from __future__ import annotations

import json
from fractions import Fraction

import pytest

from covmax import catalog, delone
from covmax import linalg as la
from covmax.forms import QForm


@pytest.mark.parametrize("name", catalog.BUILTIN_NAMES)
def test_entries_build_and_generators_preserve(name):
    e = catalog.get(name)
    assert e.name == name
    for g in e.aut_generators:
        assert abs(la.det(g)) == 1
        assert e.gram.transformed(g).gram == e.gram.gram


@pytest.mark.parametrize(
    "name,det,lam,kiss",
    [
        ("D4", 4, 2, 24),
        ("E6", 3, 2, 72),
        ("E7", 2, 2, 126),
        ("E8", 1, 2, 240),
        ("E6*", 3**5, 4, 54),
        ("E7*", 2**6, 3, 56),
        ("A3*", 16, 3, 8),
        ("Z5", 1, 1, 10),
    ],
)
def test_root_data(name, det, lam, kiss):
    q = catalog.get(name).gram
    assert q.det() == det
    m, vecs = delone.shortest_vectors(q)
    assert (m, len(vecs)) == (lam, kiss)


def test_table_rows_have_expectations():
    for name in catalog.TABLE_ROWS:
        assert catalog.get(name).expected is not None
    assert catalog.get("D3").expected == catalog.Expected(2, 6, 3, "pessimum-table")


def test_unknown_name_lists_choices():
    with pytest.raises(catalog.UnknownLattice, match="available: Z1"):
        catalog.get("K12")


def test_bad_generator_refused():
    with pytest.raises(ValueError):
        catalog.CatalogEntry("bad", QForm([[2, 1], [1, 2]]), [[[1, 1], [0, 1]]])


def test_json_roundtrip_and_override(tmp_path):
    e = catalog.get("A2")
    d = e.to_json()
    d["name"] = "A2-scaled"
    d["gram"] = [["4", "2"], ["2", "4"]]
    (tmp_path / "extra.json").write_text(json.dumps([d]))
    assert "A2-scaled" in catalog.names(tmp_path)
    got = catalog.get("A2-scaled", tmp_path)
    assert got.gram.gram[0][0] == Fraction(4)
    assert got.aut_generators == e.aut_generators


def test_env_override(tmp_path, monkeypatch):
    d = catalog.get("Z2").to_json()
    d["gram"] = [["1", "0"], ["0", "3"]]
    d["aut_generators"] = [[[-1, 0], [0, 1]]]
    d["expected"] = {"orbits": 1, "closest": 4, "strength": 3, "source": "local"}
    (tmp_path / "z2.json").write_text(json.dumps(d))
    monkeypatch.setenv(catalog.DATA_ENV, str(tmp_path))
    e = catalog.get("Z2")
    assert e.gram.gram[1][1] == 3
    assert e.expected.source == "local"
