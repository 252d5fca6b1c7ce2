from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from ptolemy_phase import linalg as la

small = st.integers(-4, 4)


def matrices(rows=st.integers(1, 5), cols=st.integers(1, 5)):
    return st.tuples(rows, cols).flatmap(
        lambda rc: st.lists(st.lists(small, min_size=rc[1], max_size=rc[1]), min_size=rc[0], max_size=rc[0])
    )


def test_frac_rejects_floats_and_bools():
    assert la.frac("3/4") == Fraction(3, 4)
    assert la.frac(2) == 2
    with pytest.raises(TypeError):
        la.frac(0.5)
    with pytest.raises(TypeError):
        la.frac(True)


@given(matrices())
def test_rank_matches_sympy(a):
    assert la.rank(a) == sympy.Matrix(a).rank()


@given(matrices())
def test_nullspace_is_kernel_of_full_dimension(a):
    ncols = len(a[0])
    ns = la.nullspace(la.mat(a), ncols)
    assert len(ns) == ncols - sympy.Matrix(a).rank()
    for v in ns:
        assert la.is_zero(la.matvec(la.mat(a), v))


@given(matrices(st.just(3), st.just(3)))
def test_inverse_matches_sympy(a):
    m = sympy.Matrix(a)
    if m.det() == 0:
        with pytest.raises(ZeroDivisionError):
            la.inverse(la.mat(a))
        return
    inv = la.inverse(la.mat(a))
    want = m.inv()
    assert all(inv[i][j] == Fraction(int(want[i, j].p), int(want[i, j].q)) for i in range(3) for j in range(3))


@given(matrices(st.integers(1, 3), st.just(4)), st.lists(small, min_size=3, max_size=3))
def test_solve_in_span_reconstructs(basis, coeffs):
    v = (Fraction(0),) * 4
    for c, b in zip(coeffs, basis):
        v = la.add(v, la.scale(c, la.vec(b)))
    sol = la.solve_in_span(basis, v)
    assert sol is not None
    back = (Fraction(0),) * 4
    for c, b in zip(sol, basis):
        back = la.add(back, la.scale(c, la.vec(b)))
    assert back == v


def test_intersection_dim():
    assert la.intersection_dim([[1, 0, 0], [0, 1, 0]], [[0, 1, 0], [0, 0, 1]]) == 1
    assert la.intersection_dim([[1, 0]], [[0, 1]]) == 0


def test_formatting():
    assert la.fmt(Fraction(-3, 6)) == "-1/2"
    assert la.fmt(Fraction(4)) == "4"
