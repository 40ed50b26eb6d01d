from __future__ import annotations

from fractions import Fraction

import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import given

from covmax import linalg as la

small_ints = st.integers(-6, 6)
fracs = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def matrices(n_rows, n_cols, elems=small_ints):
    return st.lists(st.lists(elems, min_size=n_cols, max_size=n_cols), min_size=n_rows, max_size=n_rows)


square = st.integers(1, 5).flatmap(lambda n: matrices(n, n))
rect = st.tuples(st.integers(1, 5), st.integers(1, 5)).flatmap(lambda s: matrices(*s))


def test_frac_coercion():
    assert la.frac("3/6") == Fraction(1, 2)
    assert la.frac(4) == 4
    with pytest.raises(TypeError):
        la.frac(0.5)
    with pytest.raises(TypeError):
        la.frac(True)


@pytest.mark.parametrize("x,s", [(Fraction(3), "3"), (Fraction(-2, 4), "-1/2"), (Fraction(0), "0")])
def test_rat_str(x, s):
    assert la.rat_str(x) == s


@given(square)
def test_det_matches_numpy(m):
    assert la.det(m) == round(np.linalg.det(np.array(m, dtype=float)))
    assert la.int_det(m) == la.det(m)


@given(rect)
def test_rank_matches_numpy(m):
    assert la.rank(m) == np.linalg.matrix_rank(np.array(m, dtype=float))


@given(st.integers(1, 4).flatmap(lambda n: matrices(n, n, fracs)))
def test_inverse_roundtrip(m):
    if la.det(m) == 0:
        with pytest.raises(ZeroDivisionError):
            la.inverse(m)
        return
    assert la.matmul(m, la.inverse(m)) == la.identity(len(m))


@given(rect)
def test_nullspace_is_kernel(m):
    ns = la.nullspace(m)
    assert len(ns) == len(m[0]) - la.rank(m)
    for v in ns:
        assert all(x == 0 for x in la.matvec(m, v))


@given(rect)
def test_int_kernel_vector(m):
    v = la.int_kernel_vector(m)
    if len(m[0]) - la.rank(m) != 1:
        assert v is None
    else:
        assert v is not None and any(v)
        assert all(isinstance(x, int) for x in v)
        assert all(x == 0 for x in la.matvec(m, v))


@given(rect)
def test_int_echelon_preserves_row_space(m):
    e = la.int_echelon(m)
    assert len(e) == la.rank(m)
    assert la.rank(m + e) == la.rank(m)
    lead = [next(j for j, x in enumerate(r) if x) for r in e]
    assert lead == sorted(set(lead))


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(matrices(n, n, fracs), st.lists(fracs, min_size=n, max_size=n))))
def test_solvers_agree(args):
    a, b = args
    x = la.solve_unique(a, b)
    if la.det(a) == 0:
        assert x is None
        return
    assert la.matvec(a, x) == list(b)
    assert la.solve(a, b) == x


@given(st.integers(1, 4).flatmap(lambda n: matrices(n, n)))
def test_positive_definite_via_gram(a):
    g = la.matmul(la.transpose(a), a)
    assert la.is_positive_definite(g) == (la.det(a) != 0)
    if la.det(a) != 0:
        assert all(p > 0 for p in la.ldl_pivots(g))


def test_leading_minors():
    assert la.leading_minors([[2, -1], [-1, 2]]) == [2, 3]


@given(st.lists(small_ints, min_size=1, max_size=6))
def test_primitive(v):
    p = la.primitive(v)
    if not any(v):
        assert p == [0] * len(v)
        return
    assert np.gcd.reduce([abs(x) for x in p]) == 1
    ratio = {Fraction(a, b) for a, b in zip(v, p) if b}
    assert len(ratio) == 1 and ratio.pop() > 0
