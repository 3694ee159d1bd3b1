"""Reference values computed without the operator pipeline.

sl(2) values come from Clebsch-Gordan bookkeeping: V_a (x) V_b splits into
spins |a-b|/2 .. (a+b)/2 in steps of one, and a central element acts on each
summand by its Casimir value.  gl(1) values are plain integer arithmetic.
Modules are named by doubled spin (sl(2)) or weight (gl(1)).
"""

from collections import Counter
from fractions import Fraction


# -- sl(2) -----------------------------------------------------------------

def cg_summands(two_a, two_b):
    """Doubled spins of the irreducible summands of V_a (x) V_b."""
    return list(range(abs(two_a - two_b), two_a + two_b + 1, 2))


def quarter_casimir(two_l):
    """C/4 on spin l, with C = ef + fe + h^2/2 acting as 2 l (l + 1)."""
    l = Fraction(two_l, 2)
    return l * (l + 1) / 2


def casimir_coproduct_spectrum(two_a, two_b):
    out = Counter()
    for two_l in cg_summands(two_a, two_b):
        out[4 * quarter_casimir(two_l)] += two_l + 1
    return dict(out)


def kappa_spectrum(two_a, two_b, two_c):
    """kappa = K (x) (K (x) I + I (x) K - Delta K) on V_a (x) V_b (x) V_c."""
    k = quarter_casimir
    out = Counter()
    for two_l in cg_summands(two_b, two_c):
        out[k(two_a) * (k(two_b) + k(two_c) - k(two_l))] += (two_a + 1) * (two_l + 1)
    return dict(out)


def phitilde_spectrum(two_a, two_b, two_c, gamma):
    out = Counter()
    for lam, mult in kappa_spectrum(two_a, two_b, two_c).items():
        assert lam.denominator == 1
        out[Fraction(gamma) ** int(lam)] += mult
    return dict(out)


# -- gl(1) -----------------------------------------------------------------

def cubic_k(n):
    """(n^3 + 5 n) / 6, an integer for every integer n."""
    return Fraction(n**3 + 5 * n, 6)


def scalar_kappa(k, x, y, z):
    return k(x) * (k(y) + k(z) - k(y + z))


def scalar_q_exponent(k, a, b, c, d):
    kap = lambda x, y, z: scalar_kappa(k, x, y, z)
    return -kap(a + b, c, d) + kap(a, b, c) + kap(a, b + c, d) + kap(b, c, d) - kap(a, b, c + d)


def fusion_exponents(k, a, b, c):
    """Exponent of lhs / rhs for the two fusion relations as printed, and the right one's variant.

    With the leg convention used throughout, kappa_{213} on (a, b, c) is
    kappa(b; a, c), kappa_{312} is kappa(c; a, b), kappa_{132} is kappa(a; c, b)
    and kappa_{231} is kappa(b; c, a).
    """
    kap = lambda x, y, z: scalar_kappa(k, x, y, z)
    left_lhs = k(a + b) * k(c)
    left_rhs = kap(c, a, b) + k(a) * k(c) + kap(a, c, b) + k(b) * k(c) - kap(a, b, c)
    right_lhs = k(a) * k(b + c)
    right_rhs = -kap(b, a, c) + k(a) * k(c) - kap(b, a, c) + k(a) * k(b) + kap(a, b, c) - 2 * kap(a, b, c)
    variant_rhs = -kap(b, a, c) + k(a) * k(c) + kap(b, c, a) + k(a) * k(b) + kap(a, b, c) - 2 * kap(a, b, c)
    return left_lhs - left_rhs, right_lhs - right_rhs, right_lhs - variant_rhs
