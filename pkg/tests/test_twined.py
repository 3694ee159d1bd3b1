from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from oracles import cubic_k, kappa_spectrum, phitilde_spectrum, scalar_kappa, scalar_q_exponent

from premon.algebra import build_gl1_module, build_sl2_module, builtin_algebra, tensor_modules
from premon.errors import ShapeError
from premon.linalg import RationalMatrix, integer_spectrum, rational_spectrum
from premon.poly import NCPolynomial, parse_polynomial
from premon.twined import (
    Tensor,
    TwinedData,
    braiding,
    build_kappa,
    build_phitilde,
    build_rtilde,
    compose,
    diagonal_action,
    obj_label,
    q_morphism,
    unit_isos,
    validate_central,
)

GL1 = builtin_algebra("gl1")
SL2 = builtin_algebra("sl2")
CUBIC = parse_polynomial("(N^3 + 5*N)/6", ["N"])
QUARTER_C = parse_polynomial("(e*f + f*e + h^2/2)/4", ["e", "h", "f"])
M = {n: build_gl1_module(n, GL1) for n in range(-4, 5)}
V0, V1 = build_sl2_module(0, SL2), build_sl2_module(2, SL2)

weights = st.integers(min_value=-3, max_value=3)


def scalar(m):
    assert m.shape == (1, 1)
    return m[0, 0]


def test_cubic_k_values():
    assert [cubic_k(n) for n in range(5)] == [0, 1, 3, 7, 14]


@settings(max_examples=60, deadline=None)
@given(weights, weights, weights)
def test_kappa_and_phitilde_match_scalar_formula(a, b, c):
    T = TwinedData(CUBIC, 2, GL1)
    kap = scalar_kappa(cubic_k, a, b, c)
    assert scalar(build_kappa(T, M[a], M[b], M[c]).matrix) == kap
    phi = build_phitilde(T, M[a], M[b], M[c])
    assert scalar(phi.matrix) == Fraction(2) ** int(kap)
    assert scalar(phi.inverse_matrix) == Fraction(2) ** -int(kap)
    assert scalar(build_rtilde(T, M[a], M[b]).matrix) == Fraction(2) ** int(cubic_k(a) * cubic_k(b))


def test_q_on_four_copies_of_m1():
    assert scalar_q_exponent(cubic_k, 1, 1, 1, 1) == 1
    T = TwinedData(CUBIC, -1, GL1)
    for method in ("composition", "xi"):
        assert scalar(q_morphism(T, M[1], M[1], M[1], M[1], method).matrix) == -1
    assert scalar_q_exponent(cubic_k, 1, -1, 1, -1) == 0
    assert scalar(q_morphism(T, M[1], M[-1], M[1], M[-1]).matrix) == 1


@settings(max_examples=60, deadline=None)
@given(weights, weights, weights, weights, st.sampled_from([-1, 2, Fraction(1, 3)]))
def test_q_matches_scalar_formula_for_both_methods(a, b, c, d, gamma):
    T = TwinedData(CUBIC, gamma, GL1)
    want = Fraction(gamma) ** int(scalar_q_exponent(cubic_k, a, b, c, d))
    for method in ("composition", "xi"):
        assert scalar(q_morphism(T, M[a], M[b], M[c], M[d], method).matrix) == want


def test_sl2_kappa_spectrum_matches_clebsch_gordan():
    T = TwinedData(QUARTER_C, -1, SL2)
    kap = build_kappa(T, V1, V1, V1).matrix
    assert kap.shape == (27, 27)
    assert integer_spectrum(kap).as_dict() == kappa_spectrum(2, 2, 2) == {2: 3, 1: 9, -1: 15}


def test_sl2_phitilde_is_involution_with_oracle_spectrum():
    T = TwinedData(QUARTER_C, -1, SL2)
    phi = build_phitilde(T, V1, V1, V1).matrix
    assert (phi @ phi).is_identity()
    assert rational_spectrum(phi) == phitilde_spectrum(2, 2, 2, -1) == {1: 3, -1: 24}


@pytest.mark.parametrize("mods", list(product([V0, V1], repeat=4)), ids=lambda m: "")
def test_sl2_q_methods_agree(mods):
    T = TwinedData(QUARTER_C, -1, SL2)
    assert q_morphism(T, *mods, "composition").equals(q_morphism(T, *mods, "xi"))


def test_sl2_q_on_v1_fourth_power_is_mixed():
    T = TwinedData(QUARTER_C, -1, SL2)
    spec = rational_spectrum(q_morphism(T, V1, V1, V1, V1).matrix)
    assert set(spec) == {-1, 1}
    assert sum(spec.values()) == 81


def test_primitive_k_gives_trivial_associator_and_q():
    N = NCPolynomial.generator("N")
    T = TwinedData(N, 2, GL1)
    assert build_phitilde(T, M[1], M[2], M[3]).matrix.is_identity()
    assert q_morphism(T, M[1], M[2], M[3], M[-1]).matrix.is_identity()


def test_morphism_composition_is_type_checked():
    T = TwinedData(CUBIC, -1, GL1)
    a = build_phitilde(T, M[1], M[1], M[1])  # M1 (x) (M1 (x) M1) -> (M1 (x) M1) (x) M1
    with pytest.raises(ShapeError):
        a @ a
    assert (a.inverse() @ a).matrix.is_identity()
    assert obj_label(a.source) == "M_1⊗(M_1⊗M_1)"


def test_braiding_is_flip_times_rtilde():
    T = TwinedData(QUARTER_C, -1, SL2)
    s = braiding(T, V1, V0)
    assert s.source_label == "V_1⊗V_0"
    assert s.target_label == "V_0⊗V_1"
    both = braiding(T, V0, V1) @ s
    assert both.matrix.is_identity()


def test_unit_isomorphisms_are_identities():
    T = TwinedData(CUBIC, -1, GL1)
    rho, lam = unit_isos(T, Tensor(M[1], M[2]))
    assert rho.matrix.is_identity() and lam.matrix.is_identity()
    assert obj_label(rho.source) == "(M_1⊗M_2)⊗M_0"


def test_diagonal_action_matches_iterated_tensor_module():
    W = tensor_modules(tensor_modules(V1, V0), V1)
    for x in SL2.basis_names:
        assert diagonal_action(x, (V1, V0, V1)) == W.action[x]


def test_validation_accepts_cubic_on_gl1():
    report = validate_central(CUBIC, [M[n] for n in range(-3, 4)], require_S_odd=True)
    assert report.ok
    spectra = {i.objects: i.detail for i in report.items if i.check == "integer_spectrum"}
    assert spectra[("M_3",)] == "spectrum {7: 1}"


def test_validation_reports_half_spin_witness():
    report = validate_central(QUARTER_C, [V0, build_sl2_module(1, SL2), V1])
    bad = report.first_failure("integer_spectrum")
    assert bad.objects == ("V_1/2",)
    assert bad.witness == Fraction(3, 8)


def test_validation_reports_s_parity_witness():
    report = validate_central(QUARTER_C, [V0, V1], require_S_odd=True)
    assert report.first_failure("integer_spectrum") is None
    bad = report.first_failure("S_odd")
    assert bad.witness == "V_1"


def test_validation_rejects_noncentral_and_counit():
    e = NCPolynomial.generator("e")
    report = validate_central(e + 1, [V1])
    assert report.first_failure("counit") is not None
    assert report.first_failure("central").witness in SL2.basis_names


def test_complex_gamma_mode():
    T = TwinedData(CUBIC, "0+1j", GL1)
    q = q_morphism(T, M[1], M[1], M[1], M[1])
    assert abs(complex(q.matrix[0, 0]) - 1j) < 1e-12
    assert q.equals(q_morphism(T, M[1], M[1], M[1], M[1], "xi"))


def test_compose_is_right_to_left():
    T = TwinedData(CUBIC, 2, GL1)
    a = build_phitilde(T, M[1], M[1], M[1])
    out = compose(a, a.inverse())
    assert out.source_label == out.target_label == "(M_1⊗M_1)⊗M_1"
    assert out.matrix == RationalMatrix.identity(1)
