"""Noncommutative polynomials standing in for elements of U(g) and its tensor powers.

Elements are kept as plain noncommutative polynomials in the chosen basis of
g, without PBW normal ordering; two elements are only ever compared after
they have been evaluated on modules.  The Hopf maps act on words:

* ``coproduct`` is the algebra map with every generator primitive,
* ``antipode`` reverses a word and negates every letter,
* ``counit`` keeps the coefficient of the empty word.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ParseError, UnknownGenerator

Word = tuple  # tuple[str, ...]; the empty tuple is the unit I


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        raise TypeError("floating-point coefficients are not allowed")
    return Fraction(c)


class NCPolynomial:
    """Finite linear combination of words with rational coefficients."""

    __slots__ = ("_terms", "_key")

    def __init__(self, terms: Mapping[Word, object] | Iterable[tuple[Word, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Word, Fraction] = {}
        for word, c in items:
            word = tuple(word)
            acc[word] = acc.get(word, Fraction(0)) + _frac(c)
        self._terms = {w: c for w, c in acc.items() if c != 0}
        self._key = tuple(sorted(self._terms.items(), key=lambda wc: (len(wc[0]), wc[0])))

    @classmethod
    def one(cls) -> "NCPolynomial":
        return cls({(): 1})

    @classmethod
    def constant(cls, c) -> "NCPolynomial":
        return cls({(): c})

    @classmethod
    def generator(cls, name: str) -> "NCPolynomial":
        return cls({(name,): 1})

    @property
    def terms(self) -> dict[Word, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._key

    def is_zero(self) -> bool:
        return not self._terms

    def symbols(self) -> set[str]:
        return {x for w in self._terms for x in w}

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=-1)

    def __eq__(self, other):
        if isinstance(other, NCPolynomial):
            return self._key == other._key
        if isinstance(other, (int, Fraction)):
            return self == NCPolynomial.constant(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._key)

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return NCPolynomial(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return NCPolynomial({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NCPolynomial({w: c * other for w, c in self._terms.items()})
        if not isinstance(other, NCPolynomial):
            return NotImplemented
        acc: dict[Word, Fraction] = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                acc[w] = acc.get(w, Fraction(0)) + c1 * c2
        return NCPolynomial(acc)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / other)
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers exist in U(g)")
        out = NCPolynomial.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __repr__(self):
        return f"NCPolynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for w, c in self._key:
            mono = "*".join(_compress(w)) if w else ""
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}" if c.denominator == 1 else f"({c})*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def _compress(word: Word) -> list[str]:
    out: list[str] = []
    i = 0
    while i < len(word):
        j = i
        while j < len(word) and word[j] == word[i]:
            j += 1
        out.append(word[i] if j - i == 1 else f"{word[i]}^{j - i}")
        i = j
    return out


def _coerce(x) -> NCPolynomial | None:
    if isinstance(x, NCPolynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return NCPolynomial.constant(x)
    return None


def univariate(coeffs: Sequence, p: NCPolynomial) -> NCPolynomial:
    """``sum coeffs[i] * p**i`` (ascending coefficients), by Horner's rule."""
    out = NCPolynomial()
    for c in reversed(list(coeffs)):
        out = out * p + NCPolynomial.constant(c)
    return out


# ---------------------------------------------------------------------------
# Hopf maps on U(g)


def _split_word(word: Word):
    """All (subsequence, complementary subsequence) pairs of ``word``."""
    n = len(word)
    for mask in range(1 << n):
        left = tuple(word[i] for i in range(n) if mask >> i & 1)
        right = tuple(word[i] for i in range(n) if not mask >> i & 1)
        yield left, right


def coproduct(p: NCPolynomial) -> "TensorElement":
    acc: dict[tuple[Word, ...], Fraction] = {}
    for w, c in p.items():
        for left, right in _split_word(w):
            key = (left, right)
            acc[key] = acc.get(key, Fraction(0)) + c
    return TensorElement.from_words(2, acc)


def antipode(p: NCPolynomial) -> NCPolynomial:
    return NCPolynomial({tuple(reversed(w)): (-c if len(w) % 2 else c) for w, c in p.items()})


def counit(p: NCPolynomial) -> Fraction:
    return p.terms.get((), Fraction(0))


# ---------------------------------------------------------------------------
# tensor powers


class TensorElement:
    """Element of U(g)^(x)n, stored as expanded pure tensors of words."""

    __slots__ = ("legs", "_words", "_key", "_hash")

    def __init__(self, legs: int, terms: Iterable[tuple[object, Sequence[NCPolynomial]]] = ()):
        if legs < 1:
            raise ValueError("a tensor element needs at least one leg")
        acc: dict[tuple[Word, ...], Fraction] = {}
        for coeff, comps in terms:
            comps = tuple(comps)
            if len(comps) != legs:
                raise ValueError(f"term has {len(comps)} components, expected {legs}")
            coeff = _frac(coeff)
            for combo in product(*(c.items() for c in comps)):
                key = tuple(w for w, _ in combo)
                val = coeff
                for _, c in combo:
                    val *= c
                acc[key] = acc.get(key, Fraction(0)) + val
        self._set(legs, acc)

    def _set(self, legs, acc):
        self.legs = legs
        self._words = {k: v for k, v in acc.items() if v != 0}
        self._key = tuple(sorted(self._words.items()))
        self._hash = None

    @classmethod
    def from_words(cls, legs: int, words: Mapping[tuple[Word, ...], object]) -> "TensorElement":
        obj = cls.__new__(cls)
        acc: dict[tuple[Word, ...], Fraction] = {}
        for k, v in words.items():
            if len(k) != legs:
                raise ValueError(f"word tuple {k} does not have {legs} legs")
            k = tuple(tuple(w) for w in k)
            acc[k] = acc.get(k, Fraction(0)) + _frac(v)
        obj._set(legs, acc)
        return obj

    @classmethod
    def pure(cls, *comps: NCPolynomial, coeff=1) -> "TensorElement":
        return cls(len(comps), [(coeff, comps)])

    @classmethod
    def unit(cls, legs: int) -> "TensorElement":
        return cls.from_words(legs, {((),) * legs: 1})

    @property
    def terms(self) -> list[tuple[Fraction, tuple[NCPolynomial, ...]]]:
        return [(c, tuple(NCPolynomial({w: 1}) for w in k)) for k, c in self._key]

    def word_items(self):
        return self._key

    def __len__(self):
        return len(self._words)

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return self.legs == other.legs and self._key == other._key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.legs, self._key))
        return self._hash

    def __repr__(self):
        body = " + ".join(
            f"{c}*" + "(x)".join("*".join(w) if w else "I" for w in k) for k, c in self._key[:6]
        )
        more = "" if len(self._key) <= 6 else f" + ... ({len(self._key)} terms)"
        return f"TensorElement[{self.legs}]({body or '0'}{more})"

    def _check(self, other):
        if not isinstance(other, TensorElement) or other.legs != self.legs:
            raise ValueError("tensor elements must have the same number of legs")

    def __add__(self, other):
        self._check(other)
        acc = dict(self._words)
        for k, v in other._words.items():
            acc[k] = acc.get(k, Fraction(0)) + v
        return TensorElement.from_words(self.legs, acc)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TensorElement":
        c = _frac(c)
        return TensorElement.from_words(self.legs, {k: v * c for k, v in self._words.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        acc: dict[tuple[Word, ...], Fraction] = {}
        for k1, v1 in self._words.items():
            for k2, v2 in other._words.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                acc[k] = acc.get(k, Fraction(0)) + v1 * v2
        return TensorElement.from_words(self.legs, acc)

    __rmul__ = scale

    def tensor(self, other: "TensorElement") -> "TensorElement":
        acc = {k1 + k2: v1 * v2 for k1, v1 in self._words.items() for k2, v2 in other._words.items()}
        return TensorElement.from_words(self.legs + other.legs, acc)

    def permute(self, slots: Sequence[int]) -> "TensorElement":
        """Send component ``i`` to leg ``slots[i]`` (1-based), e.g. ``(3, 1, 2)``.

        With Phi = sum X (x) Y (x) Z, ``permute((3, 1, 2))`` is
        sum Y (x) Z (x) X: X sits on leg 3, Y on leg 1, Z on leg 2.
        """
        slots = tuple(slots)
        if sorted(slots) != list(range(1, self.legs + 1)):
            raise ValueError(f"{slots} is not a permutation of 1..{self.legs}")
        acc = {}
        for k, v in self._words.items():
            new = [()] * self.legs
            for i, w in enumerate(k):
                new[slots[i] - 1] = w
            acc[tuple(new)] = v
        return TensorElement.from_words(self.legs, acc)

    def flip(self) -> "TensorElement":
        if self.legs != 2:
            raise ValueError("flip is defined on two legs")
        return self.permute((2, 1))

    def coproduct_at(self, leg: int) -> "TensorElement":
        """Apply the coproduct to leg ``leg`` (0-based); legs grows by one."""
        if not 0 <= leg < self.legs:
            raise IndexError(leg)
        acc: dict[tuple[Word, ...], Fraction] = {}
        for k, v in self._words.items():
            for left, right in _split_word(k[leg]):
                nk = k[:leg] + (left, right) + k[leg + 1 :]
                acc[nk] = acc.get(nk, Fraction(0)) + v
        return TensorElement.from_words(self.legs + 1, acc)

    def map_legs(self, f: Callable[[NCPolynomial], NCPolynomial]) -> "TensorElement":
        """Apply a linear map to every leg (e.g. ``antipode`` for S (x) S)."""
        out = []
        for k, v in self._words.items():
            out.append((v, tuple(f(NCPolynomial({w: 1})) for w in k)))
        return TensorElement(self.legs, out)

    def counit_at(self, leg: int) -> "TensorElement":
        acc: dict[tuple[Word, ...], Fraction] = {}
        for k, v in self._words.items():
            if k[leg] == ():
                nk = k[:leg] + k[leg + 1 :]
                acc[nk] = acc.get(nk, Fraction(0)) + v
        return TensorElement.from_words(self.legs - 1, acc)


# ---------------------------------------------------------------------------
# expression parser

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()·−]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            j = pos
            while text[j].isspace():
                j += 1
            raise ParseError(f"unexpected character {text[j]!r}", line=1, column=j + 1)
        start = m.start(m.lastgroup) + 1
        kind = m.lastgroup
        val = m.group(kind)
        if val == "·":
            val = "*"
        elif val == "−":
            val = "-"
        out.append((kind, val, start))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, generators: Sequence[str] | None):
        self.toks = _tokenize(text)
        self.i = 0
        self.generators = None if generators is None else set(generators)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None, cls=ParseError):
        tok = tok or self.peek()
        raise cls(msg, line=1, column=tok[2])

    def expect(self, val):
        tok = self.take()
        if tok[1] != val:
            self.fail(f"expected {val!r}, found {tok[1] or 'end of input'!r}", tok)

    def parse(self) -> NCPolynomial:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        p = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self):
        p = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            if op == "*":
                p = p * self.unary()
            else:
                tok = self.take()
                if tok[0] != "num":
                    self.fail("division is only allowed by integer literals", tok)
                d = int(tok[1])
                if d == 0:
                    self.fail("division by zero", tok)
                p = p / d
        return p

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            p = self.unary()
            return -p if op == "-" else p
        return self.power()

    def power(self):
        p = self.atom()
        if self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                self.fail("exponent must be a nonnegative integer literal", tok)
            p = p ** int(tok[1])
        return p

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            return NCPolynomial.constant(int(val))
        if kind == "name":
            if self.generators is not None and val not in self.generators:
                if val == "I":
                    return NCPolynomial.one()
                self.fail(f"unknown generator {val!r}", tok, UnknownGenerator)
            return NCPolynomial.generator(val)
        if val == "(":
            p = self.expr()
            self.expect(")")
            return p
        self.fail(f"unexpected token {val or 'end of input'!r}", tok)


def parse_polynomial(text: str, generators: Sequence[str] | None = None) -> NCPolynomial:
    """Parse e.g. ``(N^3 + 5*N)/6`` or ``(e*f + f*e + h^2/2)/4``.

    ``I`` denotes the unit unless it is itself a generator name.
    """
    return _Parser(text, generators).parse()
