from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from oracles import casimir_coproduct_spectrum, cg_summands

from premon.algebra import (
    LieAlgebraPresentation,
    build_gl1_module,
    build_module,
    build_sl2_module,
    builtin_algebra,
    evaluate,
    evaluate_legs,
    intertwiner_basis,
    load_algebra,
    set_cache_enabled,
    tensor_modules,
    trivial_module,
)
from premon.errors import PresentationError, ShapeError, UnknownSymbol
from premon.linalg import RationalMatrix, rational_spectrum
from premon.poly import NCPolynomial, coproduct, parse_polynomial

SL2 = builtin_algebra("sl2")
C = parse_polynomial("e*f + f*e + h^2/2", ["e", "h", "f"])


def test_builtin_presentations_validate():
    assert builtin_algebra("gl1").basis_names == ("N",)
    assert SL2.bracket("e", "h") == {"e": Fraction(-2)}
    with pytest.raises(PresentationError):
        builtin_algebra("so3")


def test_presentation_file_round_trip():
    text = """
    [algebra]
    name = "sl2"
    basis = ["e", "h", "f"]
    bracket."h,e" = { e = 2 }
    bracket."h,f" = { f = -2 }
    bracket."e,f" = { h = "1" }
    """
    alg = load_algebra(text)
    assert alg.basis_names == ("e", "h", "f")
    assert alg.bracket("f", "e") == {"h": Fraction(-1)}


def test_jacobi_violation_names_a_triple():
    bad = LieAlgebraPresentation(
        "bad", ("x", "y", "z"),
        {("x", "y"): {"z": Fraction(1)}, ("y", "z"): {"x": Fraction(1)}, ("z", "x"): {"x": Fraction(1)}},
    )
    with pytest.raises(PresentationError) as exc:
        bad.validate()
    assert exc.value.triple is not None and len(exc.value.triple) == 3


def test_antisymmetry_violation():
    bad = LieAlgebraPresentation("bad", ("x", "y"), {("x", "y"): {"x": 1}, ("y", "x"): {"x": 1}})
    with pytest.raises(PresentationError):
        bad.validate()


@pytest.mark.parametrize("two_j", range(0, 6))
def test_sl2_modules_satisfy_brackets_and_casimir(two_j):
    V = build_sl2_module(two_j)  # constructor checks the bracket relations
    assert V.dim == two_j + 1
    j = Fraction(two_j, 2)
    assert evaluate(C, V) == RationalMatrix.scalar(V.dim, 2 * j * (j + 1))


def test_module_rejects_wrong_action():
    gl1 = builtin_algebra("gl1")
    with pytest.raises(UnknownSymbol):
        build_module(gl1, {"M": [[1]]}, "bad")
    with pytest.raises(ShapeError):
        build_module(SL2, {"e": [[0]], "h": [[0, 0], [0, 0]], "f": [[0]]}, "bad")
    with pytest.raises(PresentationError):
        build_module(SL2, {"e": [[0, 1], [0, 0]], "h": [[1, 0], [0, 1]], "f": [[0, 0], [1, 0]]}, "bad")


def test_labels():
    assert build_sl2_module(1).label == "V_1/2"
    assert build_sl2_module(2).label == "V_1"
    assert build_gl1_module(-3).label == "M_-3"
    assert trivial_module(SL2).label == "V_0"


@pytest.mark.parametrize("a, b", [(1, 1), (2, 2), (2, 1), (3, 2), (0, 2)])
def test_casimir_coproduct_matches_clebsch_gordan(a, b):
    op = evaluate_legs(coproduct(C), (build_sl2_module(a), build_sl2_module(b))).matrix
    assert rational_spectrum(op) == casimir_coproduct_spectrum(a, b)
    # and it is the Casimir of the tensor-product module
    assert op == evaluate(C, tensor_modules(build_sl2_module(a), build_sl2_module(b)))


def test_intertwiner_dimensions_follow_clebsch_gordan():
    V1 = build_sl2_module(2)
    W = tensor_modules(V1, V1)
    # three distinct summands, each once: End_g(W) has dimension 3
    assert len(cg_summands(2, 2)) == 3
    assert len(intertwiner_basis(W, W)) == 3
    assert intertwiner_basis(V1, build_sl2_module(4)) == []
    for f in intertwiner_basis(W, W):
        for x in SL2.basis_names:
            assert f @ W.action[x] == W.action[x] @ f


def test_rectangular_intertwiner_into_tensor_square():
    V1 = build_sl2_module(2)
    W = tensor_modules(V1, V1)
    maps = intertwiner_basis(V1, W)
    assert len(maps) == 1 and maps[0].shape == (9, 3)


words = st.lists(st.sampled_from("ehf"), max_size=4).map(tuple)
polys = st.dictionaries(words, st.integers(-3, 3), max_size=3).map(NCPolynomial)


@settings(max_examples=40, deadline=None)
@given(polys, polys, st.sampled_from([1, 2, 3]))
def test_evaluation_is_an_algebra_map(p, q, two_j):
    V = build_sl2_module(two_j)
    assert evaluate(p * q, V) == evaluate(p, V) @ evaluate(q, V)
    assert evaluate(p + q, V) == evaluate(p, V) + evaluate(q, V)


@settings(max_examples=25, deadline=None)
@given(polys)
def test_coproduct_acts_as_tensor_module(p):
    U, V = build_sl2_module(1), build_sl2_module(2)
    assert evaluate_legs(coproduct(p), (U, V)).matrix == evaluate(p, tensor_modules(U, V))


def test_cache_switch_gives_same_results():
    V = build_sl2_module(3)
    with_cache = evaluate(C * C, V)
    set_cache_enabled(False)
    try:
        assert evaluate(C * C, build_sl2_module(3)) == with_cache
    finally:
        set_cache_enabled(True)


def test_gl1_weight_modules():
    for n, m in product(range(-2, 3), repeat=2):
        W = tensor_modules(build_gl1_module(n), build_gl1_module(m))
        assert W.action["N"] == RationalMatrix.from_rows([[n + m]])
