from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from premon.errors import NonIntegerSpectrum, NonSemisimple, ShapeError, SingularMatrixError
from premon.linalg import (
    GammaValue,
    RationalMatrix,
    TensorOperator,
    charpoly,
    flip_matrix,
    gamma_power,
    integer_spectrum,
    inverse,
    kron,
    linear_combination,
    mat_equal,
    max_abs_difference,
    nullspace,
    rank,
    rational_spectrum,
)

small = st.integers(min_value=-6, max_value=6)


def square(n):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n)


def sympy_of(m):
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m.tolist()])


def test_normalizes_common_denominator():
    m = RationalMatrix([[2, 4], [6, 8]], 4)
    assert m.den == 2
    assert m[0, 1] == 1
    assert m.to_strings() == [["1/2", "1/1"], ["3/2", "2/1"]]


def test_does_not_freeze_caller_array():
    arr = np.array([[1, 2], [3, 4]])
    RationalMatrix(arr)
    arr[0, 0] = 9
    assert arr[0, 0] == 9


def test_from_rows_accepts_strings_and_fractions():
    m = RationalMatrix.from_rows([["1/3", 2], [Fraction(5, 6), "-7"]])
    assert m.tolist() == [[Fraction(1, 3), 2], [Fraction(5, 6), -7]]


def test_big_entries_promote_to_python_ints():
    big = RationalMatrix([[2**40, 0], [0, 2**40]])
    sq = big @ big @ big
    assert sq[0, 0] == 2**120


def test_shape_errors():
    with pytest.raises(ShapeError):
        RationalMatrix.identity(2) @ RationalMatrix.identity(3)
    with pytest.raises(ShapeError):
        RationalMatrix.identity(2) + RationalMatrix.identity(3)
    with pytest.raises(ShapeError):
        TensorOperator((2, 2), RationalMatrix.identity(3))


def test_flip_matrix_swaps_tensor_factors():
    a = RationalMatrix.from_rows([[1, 2], [3, 4]])
    b = RationalMatrix.from_rows([[0, 1, 0], [2, 0, 0], [0, 0, 5]])
    P = flip_matrix(2, 3)
    assert P @ kron(a, b) @ P.T == kron(b, a)


def test_linear_combination_mixes_denominators():
    a = RationalMatrix.identity(2)
    b = RationalMatrix([[0, 1], [1, 0]], 3)
    out = linear_combination([Fraction(1, 2), 3], [a, b])
    assert out.tolist() == [[Fraction(1, 2), 1], [1, Fraction(1, 2)]]


def test_inverse_of_singular_raises():
    with pytest.raises(SingularMatrixError):
        inverse(RationalMatrix.from_rows([[1, 2], [2, 4]]))


def test_nullspace_and_rank():
    m = RationalMatrix.from_rows([[1, 2, 3], [2, 4, 6]])
    assert rank(m) == 1
    basis = nullspace(m)
    assert len(basis) == 2
    for v in basis:
        assert (m @ v).is_zero()


def test_charpoly_matches_sympy_on_fixed_matrix():
    m = RationalMatrix.from_rows([["1/2", 1, 0], [0, 3, "-2/3"], [4, 0, 1]])
    x = sympy.symbols("x")
    ref = sympy_of(m).charpoly(x).all_coeffs()
    assert charpoly(m) == [Fraction(int(c.p), int(c.q)) for c in ref]


@settings(max_examples=40, deadline=None)
@given(square(4))
def test_charpoly_agrees_with_sympy(rows):
    m = RationalMatrix.from_rows(rows)
    ref = sympy_of(m).charpoly(sympy.symbols("x")).all_coeffs()
    assert charpoly(m) == [Fraction(int(c.p), int(c.q)) for c in ref]


@settings(max_examples=40, deadline=None)
@given(square(3))
def test_inverse_round_trip(rows):
    m = RationalMatrix.from_rows(rows)
    if rank(m) < 3:
        with pytest.raises(SingularMatrixError):
            inverse(m)
        return
    assert (inverse(m) @ m).is_identity()
    assert (m @ inverse(m)).is_identity()


@settings(max_examples=30, deadline=None)
@given(square(2), square(2), square(3), square(3))
def test_kron_mixed_product(a, b, c, d):
    A, B, C, D = (RationalMatrix.from_rows(x) for x in (a, b, c, d))
    assert kron(A, C) @ kron(B, D) == kron(A @ B, C @ D)


@settings(max_examples=40, deadline=None)
@given(st.lists(small, min_size=3, max_size=3), square(3))
def test_integer_spectrum_of_similar_diagonal(eigs, p_rows):
    P = RationalMatrix.from_rows(p_rows)
    if rank(P) < 3:
        return
    m = P @ RationalMatrix.diagonal(eigs) @ inverse(P)
    spec = integer_spectrum(m)
    want = {}
    for e in eigs:
        want[e] = want.get(e, 0) + 1
    assert spec.as_dict() == want
    # projectors resolve the identity and reproduce m
    assert linear_combination([1] * len(spec.projectors), list(spec.projectors)).is_identity()
    assert spec.apply(Fraction) == m


def test_non_integer_spectrum_reports_rational_witness():
    m = RationalMatrix.scalar(2, Fraction(3, 8))
    with pytest.raises(NonIntegerSpectrum) as exc:
        integer_spectrum(m)
    assert exc.value.witness == Fraction(3, 8)
    m = RationalMatrix.from_rows([["1/2", 1], [0, 2]])
    with pytest.raises(NonIntegerSpectrum) as exc:
        integer_spectrum(m)
    assert exc.value.witness == Fraction(1, 2)


def test_irrational_spectrum_reports_polynomial():
    with pytest.raises(NonIntegerSpectrum) as exc:
        integer_spectrum(RationalMatrix.from_rows([[0, 1], [1, 1]]))
    assert exc.value.witness == (Fraction(1), Fraction(-1), Fraction(-1))


def test_jordan_block_is_not_semisimple():
    with pytest.raises(NonSemisimple):
        integer_spectrum(RationalMatrix.from_rows([[2, 1], [0, 2]]))


def test_rational_spectrum_keeps_multiplicity():
    m = RationalMatrix.from_rows([[0, 1, 0], [1, 0, 0], [0, 0, -1]])
    assert rational_spectrum(m) == {Fraction(-1): 2, Fraction(1): 1}


def test_gamma_power_on_involution():
    flip = RationalMatrix.from_rows([[0, 1], [1, 0]])  # eigenvalues +-1
    out = gamma_power(flip, 2)
    assert out.tolist() == [[Fraction(5, 4), Fraction(3, 4)], [Fraction(3, 4), Fraction(5, 4)]]
    # (-1)^(+1) = (-1)^(-1) = -1
    assert gamma_power(flip, -1) == RationalMatrix.identity(2).scale(-1)


def test_gamma_parse_and_complex_power():
    assert GammaValue.parse("-1").exact
    assert GammaValue.parse([0, 1]).value == 1j
    g = GammaValue.parse("0+1j")
    m = gamma_power(RationalMatrix.diagonal([1, 2]), g)
    assert mat_equal(m, np.diag([1j, -1]))
    with pytest.raises(ValueError):
        GammaValue.parse("0")


def test_max_abs_difference_locates_entry():
    a = RationalMatrix.identity(3)
    b = RationalMatrix.from_rows([[1, 0, 0], [0, 1, "5/2"], [0, 0, 1]])
    diff, idx = max_abs_difference(a, b)
    assert diff == Fraction(5, 2)
    assert idx == 5
