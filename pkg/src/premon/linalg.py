"""Exact rational matrices and integer-spectrum functional calculus.

A :class:`RationalMatrix` is stored as an integer numerator array together
with one positive common denominator.  Products and Kronecker products run
on ``int64`` whenever an a-priori bound proves that no overflow can occur,
and fall back to numpy object arrays of Python integers otherwise, so every
result is exact.

Characteristic polynomials are computed by Hessenberg reduction over a
sequence of word-sized primes followed by Chinese remaindering against a
Hadamard-type coefficient bound.  No fractions appear anywhere in that
elimination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import NonIntegerSpectrum, NonSemisimple, ShapeError, SingularMatrixError

# int64 arithmetic is used only when every intermediate is provably below this.
_LIMIT = 1 << 62
COMPLEX_TOL = 1e-9


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floating-point entries are not accepted in exact matrices")
    return Fraction(x)


def _maxabs(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        return max(abs(v) for v in arr.flat)
    return int(np.abs(arr).max())


def _compact(arr: np.ndarray, bound: int | None = None) -> np.ndarray:
    """Return ``arr`` as int64 if its entries allow it, else as object."""
    if arr.dtype != object:
        return arr
    if bound is None:
        bound = _maxabs(arr)
    if bound < _LIMIT:
        return arr.astype(np.int64)
    return arr


def _obj(arr: np.ndarray) -> np.ndarray:
    return arr if arr.dtype == object else arr.astype(object)


def _scaled(arr: np.ndarray, factor: int, maxabs: int) -> np.ndarray:
    if factor == 1:
        return arr
    if arr.dtype != object and maxabs * abs(factor) < _LIMIT:
        return arr * factor
    return _obj(arr) * factor


class RationalMatrix:
    """Immutable dense matrix of exact rationals.

    ``num / den`` with ``den > 0`` and ``gcd(num entries, den) == 1``.
    """

    __slots__ = ("_num", "_den", "_maxabs", "_hash")

    def __init__(self, num, den: int = 1):
        num = np.array(num)
        if num.ndim != 2:
            raise ShapeError(f"expected a 2-d array, got shape {num.shape}")
        if num.dtype.kind not in "iuO":
            raise TypeError(f"numerator array must be integral, got {num.dtype}")
        if num.dtype.kind == "u":
            num = num.astype(object)
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        if den < 0:
            num, den = -_obj(num) if num.dtype == object else -num, -den
        g = den
        if num.size and g != 1:
            if num.dtype == object:
                g = math.gcd(den, *num.flat)
            else:
                g = math.gcd(den, int(np.gcd.reduce(num, axis=None)))
        if g > 1:
            num = num // g
            den //= g
        m = _maxabs(num)
        self._num = _compact(num, m)
        self._num.flags.writeable = False
        self._den = den
        self._maxabs = m
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Iterable[Iterable]) -> "RationalMatrix":
        fr = [[_as_fraction(x) for x in row] for row in rows]
        if not fr or not fr[0]:
            raise ShapeError("matrix must have at least one row and column")
        width = len(fr[0])
        if any(len(r) != width for r in fr):
            raise ShapeError("ragged rows")
        den = reduce(math.lcm, (x.denominator for r in fr for x in r), 1)
        num = np.empty((len(fr), width), dtype=object)
        for i, r in enumerate(fr):
            for j, x in enumerate(r):
                num[i, j] = x.numerator * (den // x.denominator)
        return cls(num, den)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls(np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "RationalMatrix":
        return cls(np.zeros((rows, rows if cols is None else cols), dtype=np.int64))

    @classmethod
    def scalar(cls, n: int, value) -> "RationalMatrix":
        v = _as_fraction(value)
        return cls(_diag_obj(n, v.numerator), v.denominator)

    @classmethod
    def diagonal(cls, values: Sequence) -> "RationalMatrix":
        fr = [_as_fraction(v) for v in values]
        den = reduce(math.lcm, (v.denominator for v in fr), 1)
        num = np.zeros((len(fr), len(fr)), dtype=object)
        for i, v in enumerate(fr):
            num[i, i] = v.numerator * (den // v.denominator)
        return cls(num, den)

    # -- basic accessors ----------------------------------------------
    @property
    def num(self) -> np.ndarray:
        return self._num

    @property
    def den(self) -> int:
        return self._den

    @property
    def shape(self) -> tuple[int, int]:
        return self._num.shape

    @property
    def rows(self) -> int:
        return self._num.shape[0]

    @property
    def cols(self) -> int:
        return self._num.shape[1]

    def __getitem__(self, idx) -> Fraction:
        i, j = idx
        return Fraction(int(self._num[i, j]), self._den)

    def tolist(self) -> list[list[Fraction]]:
        d = self._den
        return [[Fraction(int(v), d) for v in row] for row in self._num.tolist()]

    def to_strings(self) -> list[list[str]]:
        return [[f"{x.numerator}/{x.denominator}" for x in row] for row in self.tolist()]

    def to_complex(self) -> np.ndarray:
        if self._maxabs < (1 << 52) and self._den < (1 << 52):
            return self._num.astype(np.complex128) / self._den
        return np.array([[complex(float(x)) for x in row] for row in self.tolist()])

    def __repr__(self):
        if self.rows * self.cols <= 16:
            body = "; ".join(" ".join(str(x) for x in row) for row in self.tolist())
            return f"RationalMatrix([{body}])"
        return f"RationalMatrix(<{self.rows}x{self.cols}>, den={self._den})"

    # -- predicates ---------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return (
            self.shape == other.shape
            and self._den == other._den
            and bool(np.array_equal(_obj(self._num), _obj(other._num)))
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.shape, self._den, tuple(int(v) for v in self._num.flat)))
        return self._hash

    def is_square(self) -> bool:
        return self.rows == self.cols

    def is_zero(self) -> bool:
        return self._maxabs == 0

    def is_identity(self) -> bool:
        return self.is_square() and self == RationalMatrix.identity(self.rows)

    def is_diagonal(self) -> bool:
        if not self.is_square():
            return False
        off = self._num.copy()
        np.fill_diagonal(off, 0)
        return not np.any(off != 0)

    def diagonal_entries(self) -> list[Fraction]:
        return [Fraction(int(self._num[i, i]), self._den) for i in range(min(self.shape))]

    # -- arithmetic ---------------------------------------------------
    def _common(self, other: "RationalMatrix"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")
        den = math.lcm(self._den, other._den)
        a = _scaled(self._num, den // self._den, self._maxabs)
        b = _scaled(other._num, den // other._den, other._maxabs)
        if a.dtype != b.dtype:
            a, b = _obj(a), _obj(b)
        return a, b, den

    def __add__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        a, b, den = self._common(other)
        if a.dtype != object and (_maxabs(a) + _maxabs(b)) >= _LIMIT:
            a, b = _obj(a), _obj(b)
        return RationalMatrix(a + b, den)

    def __sub__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        a, b, den = self._common(other)
        if a.dtype != object and (_maxabs(a) + _maxabs(b)) >= _LIMIT:
            a, b = _obj(a), _obj(b)
        return RationalMatrix(a - b, den)

    def __neg__(self):
        return RationalMatrix(-self._num, self._den)

    def scale(self, c) -> "RationalMatrix":
        c = _as_fraction(c)
        return RationalMatrix(_scaled(self._num, c.numerator, self._maxabs), self._den * c.denominator)

    def __mul__(self, c):
        if isinstance(c, RationalMatrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return matmul(self, other)

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(self._num.T.copy(), self._den)

    def trace(self) -> Fraction:
        return Fraction(int(sum(int(v) for v in np.diagonal(self._num))), self._den)

    def shift(self, c) -> "RationalMatrix":
        """``self + c*I``."""
        return self + RationalMatrix.scalar(self.rows, c)


def _diag_obj(n: int, v: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=object)
    for i in range(n):
        out[i, i] = v
    return out


# ---------------------------------------------------------------------------
# products


def matmul(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    if a.cols != b.rows:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    inner = a.cols
    if a._num.dtype != object and b._num.dtype != object and a._maxabs * b._maxabs * inner < _LIMIT:
        prod = a._num @ b._num
    else:
        prod = _obj(a._num).dot(_obj(b._num))
    return RationalMatrix(prod, a._den * b._den)


def kron(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    if a._num.dtype != object and b._num.dtype != object and a._maxabs * b._maxabs < _LIMIT:
        prod = np.kron(a._num, b._num)
    else:
        prod = np.kron(_obj(a._num), _obj(b._num))
    return RationalMatrix(prod, a._den * b._den)


def kron_all(mats: Sequence[RationalMatrix]) -> RationalMatrix:
    return reduce(kron, mats)


def linear_combination(coeffs: Sequence, mats: Sequence[RationalMatrix]) -> RationalMatrix:
    """``sum(c * M)`` over a single common denominator."""
    if not mats:
        raise ValueError("empty linear combination")
    shape = mats[0].shape
    cs = [_as_fraction(c) for c in coeffs]
    den = 1
    for c, m in zip(cs, mats):
        if m.shape != shape:
            raise ShapeError("shape mismatch in linear combination")
        den = math.lcm(den, c.denominator * m.den)
    parts = []
    bound = 0
    for c, m in zip(cs, mats):
        if c == 0 or m.is_zero():
            continue
        f = c.numerator * (den // (c.denominator * m.den))
        parts.append((f, m))
        bound += abs(f) * m._maxabs
    if bound < _LIMIT and all(m.num.dtype != object for _, m in parts):
        acc = np.zeros(shape, dtype=np.int64)
        for f, m in parts:
            acc += m.num * f
    else:
        acc = np.zeros(shape, dtype=object)
        for f, m in parts:
            acc = acc + _obj(m.num) * f
    return RationalMatrix(acc, den)


def direct_sum(a: RationalMatrix, b: RationalMatrix) -> RationalMatrix:
    den = math.lcm(a.den, b.den)
    out = np.zeros((a.rows + b.rows, a.cols + b.cols), dtype=object)
    out[: a.rows, : a.cols] = _obj(a.num) * (den // a.den)
    out[a.rows :, a.cols :] = _obj(b.num) * (den // b.den)
    return RationalMatrix(out, den)


def permutation_matrix(perm: Sequence[int]) -> RationalMatrix:
    """Matrix sending basis vector ``j`` to basis vector ``perm[j]``."""
    n = len(perm)
    out = np.zeros((n, n), dtype=np.int64)
    out[list(perm), list(range(n))] = 1
    return RationalMatrix(out)


def flip_matrix(d1: int, d2: int) -> RationalMatrix:
    """The swap ``x (x) y -> y (x) x`` from ``C^d1 (x) C^d2`` to ``C^d2 (x) C^d1``."""
    perm = [0] * (d1 * d2)
    for i in range(d1):
        for j in range(d2):
            perm[i * d2 + j] = j * d1 + i
    return permutation_matrix(perm)


# ---------------------------------------------------------------------------
# elimination


def _rref_rows(num: np.ndarray):
    """Fraction-free reduced row echelon form of an integer matrix.

    Returns (rows, pivots) with rows an object array whose pivot entries
    are positive and whose pivot columns are otherwise zero.
    """
    m = _obj(num).copy()
    nrows, ncols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = [i for i in range(r, nrows) if m[i, c] != 0]
        if not nz:
            continue
        i = min(nz, key=lambda k: abs(m[k, c]))
        if i != r:
            m[[r, i]] = m[[i, r]]
        p = m[r, c]
        others = [i for i in range(nrows) if i != r and m[i, c] != 0]
        if others:
            col = m[others, c].copy()
            m[others] = m[others] * p - np.outer(col, m[r])
            for i in others:
                g = math.gcd(*m[i])
                if g > 1:
                    m[i] = m[i] // g
        g = math.gcd(*m[r])
        if m[r, c] < 0:
            g = -g
        m[r] = m[r] // g
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(a: RationalMatrix) -> int:
    return len(_rref_rows(a.num)[1])


def nullspace(a: RationalMatrix) -> list[RationalMatrix]:
    """Basis of ``{x : a x = 0}`` as column vectors in reduced form."""
    rows, pivots = _rref_rows(a.num)
    n = a.cols
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for fcol in free:
        vec = [Fraction(0)] * n
        vec[fcol] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = Fraction(-int(rows[r, fcol]), int(rows[r, pc]))
        basis.append(RationalMatrix.from_rows([[v] for v in vec]))
    return basis


def inverse(a: RationalMatrix) -> RationalMatrix:
    if not a.is_square():
        raise ShapeError(f"inverse of non-square {a.shape}")
    n = a.rows
    aug = np.concatenate([_obj(a.num), _diag_obj(n, a.den)], axis=1)
    rows, pivots = _rref_rows(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise SingularMatrixError("matrix is singular")
    diag = [int(rows[i, i]) for i in range(n)]
    den = reduce(math.lcm, diag, 1)
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        out[i] = rows[i, n:] * (den // diag[i])
    return RationalMatrix(out, den)


# ---------------------------------------------------------------------------
# characteristic polynomial


def _primes_below(limit: int):
    """Yield primes in decreasing order below ``limit`` (deterministic)."""
    small = [p for p in range(2, math.isqrt(limit) + 2) if all(p % q for q in range(2, math.isqrt(p) + 1))]
    n = limit - 1
    while n > 2:
        if all(n % p for p in small if p * p <= n):
            yield n
        n -= 1


_PRIME_CACHE: list[int] = []
_PRIME_GEN = _primes_below(1 << 25)


def _prime(i: int) -> int:
    while len(_PRIME_CACHE) <= i:
        _PRIME_CACHE.append(next(_PRIME_GEN))
    return _PRIME_CACHE[i]


def _charpoly_mod(a: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial mod ``p``; coefficients highest degree first."""
    h = (a % p).astype(np.int64)
    n = h.shape[0]
    for j in range(n - 2):
        col = h[j + 1 :, j]
        nz = np.flatnonzero(col)
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            h[[i, j + 1], :] = h[[j + 1, i], :]
            h[:, [i, j + 1]] = h[:, [j + 1, i]]
        inv = pow(int(h[j + 1, j]), p - 2, p)
        f = (h[j + 2 :, j] * inv) % p
        if not f.any():
            continue
        h[j + 2 :, :] = (h[j + 2 :, :] - (np.outer(f, h[j + 1, :]) % p)) % p
        h[:, j + 1] = (h[:, j + 1] + (h[:, j + 2 :] @ f) % p) % p
    # p_k for leading k x k blocks, ascending coefficient arrays
    polys = [np.zeros(n + 1, dtype=np.int64)]
    polys[0][0] = 1
    for k in range(1, n + 1):
        prev = polys[k - 1]
        acc = np.zeros(n + 1, dtype=np.int64)
        acc[1:] = prev[:-1]
        acc = (acc - int(h[k - 1, k - 1]) * prev) % p
        prod = 1
        for i in range(k - 1, 0, -1):
            prod = prod * int(h[i, i - 1]) % p
            if prod == 0:
                break
            c = int(h[i - 1, k - 1]) * prod % p
            if c:
                acc = (acc - c * polys[i - 1]) % p
        polys.append(acc)
    return [int(x) for x in polys[n][::-1]]


def _charpoly_int(a: np.ndarray) -> list[int]:
    """Exact characteristic polynomial of an integer matrix (monic, highest first)."""
    n = a.shape[0]
    if n == 1:
        return [1, -int(a[0, 0])]
    ao = _obj(a)
    bound = 1
    for j in range(n):
        sq = sum(int(v) * int(v) for v in ao[:, j])
        bound *= 1 + math.isqrt(sq) + 1
    target = 2 * bound + 1
    residues = None
    modulus = 1
    i = 0
    while modulus < target:
        p = _prime(i)
        i += 1
        r = _charpoly_mod((a % p if a.dtype != object else ao % p).astype(np.int64), p)
        if residues is None:
            residues = r
        else:
            inv = pow(modulus % p, p - 2, p)
            residues = [x + modulus * (((ri - x) * inv) % p) for x, ri in zip(residues, r)]
        modulus *= p
    half = modulus // 2
    return [x - modulus if x > half else x for x in residues]


def charpoly(m: RationalMatrix) -> list[Fraction]:
    """Coefficients of ``det(x I - m)``, highest degree first."""
    if not m.is_square():
        raise ShapeError(f"characteristic polynomial of non-square {m.shape}")
    coeffs = _charpoly_int(m.num)
    d = m.den
    return [Fraction(c, d**k) for k, c in enumerate(coeffs)]


def _horner(coeffs: Sequence[int], x: int) -> int:
    acc = 0
    for c in coeffs:
        acc = acc * x + c
    return acc


def _deflate(coeffs: Sequence[int], root: int) -> list[int]:
    out = []
    acc = 0
    for c in coeffs[:-1]:
        acc = acc * root + c
        out.append(acc)
    return out


def _rational_roots(coeffs: Sequence[Fraction]) -> dict[Fraction, int]:
    """Rational roots with multiplicity, via sympy's ground-domain root finder."""
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], x, domain="QQ")
    return {Fraction(int(r.p), int(r.q)): int(mult) for r, mult in poly.ground_roots().items()}


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class Spectrum:
    """Distinct integer eigenvalues with their spectral projectors."""

    eigenvalues: tuple[int, ...]
    projectors: tuple[RationalMatrix, ...]

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(int(p.trace()) for p in self.projectors)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.eigenvalues, self.multiplicities))

    def apply(self, f) -> RationalMatrix:
        """``sum f(lambda) P_lambda`` for an exact scalar function ``f``."""
        return linear_combination([f(lam) for lam in self.eigenvalues], list(self.projectors))


def _eigen_bound(m: RationalMatrix) -> int:
    ao = np.abs(_obj(m.num))
    rows = max(int(v) for v in ao.sum(axis=1))
    cols = max(int(v) for v in ao.sum(axis=0))
    return -(-min(rows, cols) // m.den)


def _lagrange_projectors(m: RationalMatrix, eigs: Sequence[int]) -> list[RationalMatrix]:
    n = m.rows
    shifted = {mu: m.shift(-mu) for mu in eigs}
    projs = []
    for lam in eigs:
        acc = RationalMatrix.identity(n)
        denom = Fraction(1)
        for mu in eigs:
            if mu == lam:
                continue
            acc = acc @ shifted[mu]
            denom *= lam - mu
        projs.append(acc.scale(1 / denom))
    return projs


def integer_spectrum(m: RationalMatrix) -> Spectrum:
    """Integer eigenvalues and projectors of a semisimple matrix.

    Raises :class:`NonIntegerSpectrum` (with a rational root or the residual
    polynomial as witness) or :class:`NonSemisimple`.
    """
    if not m.is_square():
        raise ShapeError(f"spectrum of non-square {m.shape}")
    n = m.rows
    if m.is_diagonal():
        diag = m.diagonal_entries()
        bad = [x for x in diag if x.denominator != 1]
        if bad:
            raise NonIntegerSpectrum(f"eigenvalue {bad[0]} is not an integer", witness=bad[0])
        eigs = sorted({int(x) for x in diag})
        projs = []
        for lam in eigs:
            projs.append(RationalMatrix.diagonal([1 if x == lam else 0 for x in diag]))
        return Spectrum(tuple(eigs), tuple(projs))

    cp = _charpoly_int(m.num)  # of the integer matrix d*m
    d = m.den
    bound = _eigen_bound(m)
    found: dict[int, int] = {}
    rest = cp
    cand = 0
    while len(rest) > 1 and cand <= bound:
        for lam in ((cand,) if cand == 0 else (cand, -cand)):
            while len(rest) > 1 and _horner(rest, lam * d) == 0:
                rest = _deflate(rest, lam * d)
                found[lam] = found.get(lam, 0) + 1
        cand += 1
    if len(rest) > 1:
        # rest is the charpoly of d*m with integer roots removed
        scaled = [Fraction(c, d**k) for k, c in enumerate(rest)]
        try:
            roots = _rational_roots(scaled)
        except Exception:  # pragma: no cover - sympy failure is not expected
            roots = {}
        witness = min(roots, key=lambda r: (r.denominator, abs(r))) if roots else tuple(scaled)
        raise NonIntegerSpectrum(
            f"characteristic polynomial has non-integer roots (witness {_fmt(witness)})",
            witness=witness,
        )
    eigs = sorted(found)
    check = RationalMatrix.identity(n)
    for lam in eigs:
        check = check @ m.shift(-lam)
    if not check.is_zero():
        raise NonSemisimple(f"minimal polynomial has repeated roots among {eigs}")
    return Spectrum(tuple(eigs), tuple(_lagrange_projectors(m, eigs)))


def rational_spectrum(m: RationalMatrix) -> dict[Fraction, int]:
    """Rational eigenvalues with algebraic multiplicity (irrational ones omitted)."""
    if m.is_diagonal():
        out: dict[Fraction, int] = {}
        for x in m.diagonal_entries():
            out[x] = out.get(x, 0) + 1
        return dict(sorted(out.items()))
    return dict(sorted(_rational_roots(charpoly(m)).items()))


def _fmt(w) -> str:
    if isinstance(w, Fraction):
        return str(w)
    return "poly" + str([str(c) for c in w])


# ---------------------------------------------------------------------------
# gamma powers


@dataclass(frozen=True)
class GammaValue:
    """Nonzero twining parameter: exact rational or complex double."""

    value: Fraction | complex

    def __post_init__(self):
        if isinstance(self.value, (int, str)):
            object.__setattr__(self, "value", Fraction(self.value))
        if self.value == 0:
            raise ValueError("gamma must be nonzero")

    @classmethod
    def parse(cls, text) -> "GammaValue":
        if isinstance(text, GammaValue):
            return text
        if isinstance(text, (list, tuple)):
            re_, im = text
            return cls(complex(float(re_), float(im)))
        if isinstance(text, complex):
            return cls(text)
        if isinstance(text, int):
            return cls(Fraction(text))
        s = str(text).strip()
        if "j" in s or "i" in s:
            return cls(complex(s.replace("i", "j")))
        return cls(Fraction(s))

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def power(self, n: int):
        v = self.value
        if self.exact:
            return v**n
        return complex(v) ** n

    def inverse(self) -> "GammaValue":
        return GammaValue(1 / self.value)

    def __str__(self):
        if self.exact:
            return str(self.value)
        return f"({self.value.real:.12g},{self.value.imag:.12g})"


def gamma_power(m, gamma: GammaValue | Fraction | int | str):
    """``gamma ** m`` for a matrix (or precomputed :class:`Spectrum`) with integer spectrum.

    Returns a :class:`RationalMatrix` for rational ``gamma`` and a complex
    ``numpy`` array otherwise.
    """
    gamma = GammaValue.parse(gamma)
    spec = m if isinstance(m, Spectrum) else integer_spectrum(m)
    if gamma.exact:
        return spec.apply(gamma.power)
    out = None
    for lam, proj in zip(spec.eigenvalues, spec.projectors):
        term = gamma.power(lam) * proj.to_complex()
        out = term if out is None else out + term
    return out


# ---------------------------------------------------------------------------
# mixed exact / complex helpers


def to_complex(m) -> np.ndarray:
    return m.to_complex() if isinstance(m, RationalMatrix) else np.asarray(m, dtype=np.complex128)


def mat_mul(a, b):
    if isinstance(a, RationalMatrix) and isinstance(b, RationalMatrix):
        return matmul(a, b)
    return to_complex(a) @ to_complex(b)


def mat_kron(a, b):
    if isinstance(a, RationalMatrix) and isinstance(b, RationalMatrix):
        return kron(a, b)
    return np.kron(to_complex(a), to_complex(b))


def mat_sub(a, b):
    if isinstance(a, RationalMatrix) and isinstance(b, RationalMatrix):
        return a - b
    return to_complex(a) - to_complex(b)


def mat_equal(a, b) -> bool:
    if isinstance(a, RationalMatrix) and isinstance(b, RationalMatrix):
        return a == b
    ca, cb = to_complex(a), to_complex(b)
    return ca.shape == cb.shape and bool(np.all(np.abs(ca - cb) <= COMPLEX_TOL))


def mat_shape(a) -> tuple[int, int]:
    return a.shape if isinstance(a, RationalMatrix) else tuple(np.shape(a))


def max_abs_difference(a, b):
    """Largest entry of ``|a - b|`` and the flat index where it occurs."""
    if isinstance(a, RationalMatrix) and isinstance(b, RationalMatrix):
        diff = a - b
        vals = np.abs(_obj(diff.num)).ravel()
        idx = int(max(range(vals.size), key=lambda i: vals[i]))
        return Fraction(int(vals[idx]), diff.den), idx
    d = np.abs(to_complex(a) - to_complex(b)).ravel()
    idx = int(np.argmax(d))
    return float(d[idx]), idx


@dataclass(frozen=True)
class TensorOperator:
    """A matrix acting on ``C^d1 (x) ... (x) C^dn``, tagged with the ``d_i``."""

    leg_dims: tuple[int, ...]
    matrix: object  # RationalMatrix, or complex ndarray in complex-gamma mode

    def __post_init__(self):
        object.__setattr__(self, "leg_dims", tuple(int(d) for d in self.leg_dims))
        size = math.prod(self.leg_dims)
        if mat_shape(self.matrix) != (size, size):
            raise ShapeError(f"operator of shape {mat_shape(self.matrix)} on legs {self.leg_dims}")

    @property
    def exact(self) -> bool:
        return isinstance(self.matrix, RationalMatrix)

    @property
    def size(self) -> int:
        return math.prod(self.leg_dims)

    def __matmul__(self, other: "TensorOperator") -> "TensorOperator":
        if self.size != other.size:
            raise ShapeError(f"cannot compose operators on {self.leg_dims} and {other.leg_dims}")
        return TensorOperator(self.leg_dims, mat_mul(self.matrix, other.matrix))

    def tensor(self, other: "TensorOperator") -> "TensorOperator":
        return TensorOperator(self.leg_dims + other.leg_dims, mat_kron(self.matrix, other.matrix))

    def equals(self, other: "TensorOperator") -> bool:
        return self.size == other.size and mat_equal(self.matrix, other.matrix)

    def is_identity(self) -> bool:
        if self.exact:
            return self.matrix.is_identity()
        return mat_equal(self.matrix, np.eye(self.size))

    @classmethod
    def identity(cls, leg_dims: Sequence[int]) -> "TensorOperator":
        return cls(tuple(leg_dims), RationalMatrix.identity(math.prod(leg_dims)))
