"""Closed-form values for gl(1), where every module is one-dimensional.

On ``M_n`` the generator ``N`` acts as ``n``, so a polynomial ``K`` acts as the
number ``k(n)`` and every twined operator is a single power of gamma.  Nothing
here touches matrices; the functions exist to cross-check the operator
pipeline from an independent route.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import NonIntegerSpectrum
from .linalg import GammaValue
from .poly import NCPolynomial


def k_value(K: NCPolynomial, n: int) -> Fraction:
    """Value of K on M_n."""
    total = Fraction(0)
    for word, coeff in K.items():
        if any(sym != "N" for sym in word):
            raise ValueError(f"gl(1) polynomials use only N, got {word}")
        total += coeff * Fraction(n) ** len(word)
    return total


def _integral(x: Fraction, what: str) -> int:
    if x.denominator != 1:
        raise NonIntegerSpectrum(f"{what} = {x} is not an integer", witness=x)
    return x.numerator


def gap(K: NCPolynomial, b: int, c: int) -> Fraction:
    """``k(b) + k(c) - k(b + c)``: how far K is from additive on a pair."""
    return k_value(K, b) + k_value(K, c) - k_value(K, b + c)


def kappa_exponent(K: NCPolynomial, a: int, b: int, c: int) -> Fraction:
    return k_value(K, a) * gap(K, b, c)


def r_exponent(K: NCPolynomial, a: int, b: int) -> Fraction:
    return k_value(K, a) * k_value(K, b)


def q_exponent(K: NCPolynomial, a: int, b: int, c: int, d: int) -> Fraction:
    """Exponent of q on (M_a, M_b, M_c, M_d), read off the five associators."""
    kap = lambda x, y, z: kappa_exponent(K, x, y, z)  # noqa: E731
    return -kap(a + b, c, d) + kap(a, b, c) + kap(a, b + c, d) + kap(b, c, d) - kap(a, b, c + d)


def hexagon_i_exponent(K: NCPolynomial, a: int, b: int, c: int) -> Fraction:
    """Exponent of (top path) / (bottom path) in diagram (i)."""
    kap = lambda x, y, z: kappa_exponent(K, x, y, z)  # noqa: E731
    r = lambda x, y: r_exponent(K, x, y)  # noqa: E731
    top = -kap(b, c, a) + r(a, b + c) - kap(a, b, c)
    bottom = r(a, c) - kap(b, a, c) + r(a, b)
    return top - bottom


def hexagon_ii_exponent(K: NCPolynomial, a: int, b: int, c: int) -> Fraction:
    kap = lambda x, y, z: kappa_exponent(K, x, y, z)  # noqa: E731
    r = lambda x, y: r_exponent(K, x, y)  # noqa: E731
    top = kap(c, a, b) + r(a + b, c) + kap(a, b, c)
    bottom = r(a, c) + kap(a, c, b) + r(b, c)
    return top - bottom


def symmetry_exponent(K: NCPolynomial, a: int, b: int) -> Fraction:
    return 2 * r_exponent(K, a, b)


def u_exponent(K: NCPolynomial, a: int) -> Fraction:
    return -k_value(K, a) ** 2


def power(gamma: GammaValue, exponent: Fraction, what: str):
    return gamma.power(_integral(exponent, what))


@dataclass(frozen=True)
class OracleLine:
    name: str
    weights: tuple[int, ...]
    exponent: Fraction
    value: object


def oracle_table(K: NCPolynomial, weights: Sequence[int], gamma) -> list[OracleLine]:
    """Everything the scalar formulas say about the given weights, in a fixed order.

    ``k`` and ``u`` are reported per distinct weight, ``R~`` for the first two, ``Phi~`` for the
    first three and ``q`` for the first four.
    """
    g = GammaValue.parse(gamma)
    w = tuple(int(x) for x in weights)
    out = []
    distinct = tuple(dict.fromkeys(w))
    for a in distinct:
        out.append(OracleLine("k", (a,), k_value(K, a), k_value(K, a)))
    for a in distinct:
        e = u_exponent(K, a)
        out.append(OracleLine("u", (a,), e, power(g, e, f"u exponent on M_{a}")))
    if len(w) >= 2:
        e = r_exponent(K, *w[:2])
        out.append(OracleLine("R~", w[:2], e, power(g, e, "R~ exponent")))
    if len(w) >= 3:
        e = kappa_exponent(K, *w[:3])
        out.append(OracleLine("kappa", w[:3], e, e))
        out.append(OracleLine("Phi~", w[:3], e, power(g, e, "kappa")))
    if len(w) >= 4:
        e = q_exponent(K, *w[:4])
        out.append(OracleLine("q", w[:4], e, power(g, e, "q exponent")))
    return out
