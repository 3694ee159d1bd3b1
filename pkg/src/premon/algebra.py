"""Lie algebra presentations, finite-dimensional modules and evaluation of U(g) elements."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .errors import ParseError, PresentationError, ShapeError, UnknownSymbol
from .linalg import (
    RationalMatrix,
    TensorOperator,
    kron,
    linear_combination,
    nullspace,
)
from .poly import NCPolynomial, TensorElement, Word

try:  # pragma: no cover - depends on interpreter version
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

_CACHE_ENABLED = True


def set_cache_enabled(flag: bool) -> None:
    """Globally switch evaluation memoization on or off (results are identical)."""
    global _CACHE_ENABLED
    _CACHE_ENABLED = bool(flag)


def cache_enabled() -> bool:
    return _CACHE_ENABLED


def _rat(x) -> Fraction:
    if isinstance(x, float):
        raise PresentationError(f"floating-point value {x!r}; write rationals as 'p/q'")
    try:
        return Fraction(x.strip()) if isinstance(x, str) else Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise PresentationError(f"bad rational {x!r}") from exc


# ---------------------------------------------------------------------------
# presentations


@dataclass(frozen=True)
class LieAlgebraPresentation:
    """Basis names and structure constants ``[x_i, x_j] = sum_k c(i,j,k) x_k``.

    Only nonzero brackets are stored; ``bracket`` fills in antisymmetry.
    """

    name: str
    basis_names: tuple[str, ...]
    structure_constants: Mapping[tuple[str, str], Mapping[str, Fraction]] = field(default_factory=dict)

    def bracket(self, x: str, y: str) -> dict[str, Fraction]:
        sc = self.structure_constants
        if (x, y) in sc:
            return dict(sc[(x, y)])
        if (y, x) in sc:
            return {k: -v for k, v in sc[(y, x)].items()}
        return {}

    def bracket_vec(self, u: Mapping[str, Fraction], v: Mapping[str, Fraction]) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for a, ca in u.items():
            for b, cb in v.items():
                for k, c in self.bracket(a, b).items():
                    out[k] = out.get(k, Fraction(0)) + ca * cb * c
        return {k: c for k, c in out.items() if c != 0}

    def validate(self) -> "LieAlgebraPresentation":
        names = self.basis_names
        if len(set(names)) != len(names):
            raise PresentationError(f"basis names are not unique: {list(names)}")
        for (x, y), vec in self.structure_constants.items():
            if x not in names or y not in names:
                raise PresentationError(f"bracket [{x},{y}] uses an unknown basis element")
            for k in vec:
                if k not in names:
                    raise PresentationError(f"bracket [{x},{y}] has unknown component {k!r}")
            if x == y and any(vec.values()):
                raise PresentationError(f"antisymmetry fails: [{x},{x}] != 0", triple=(x, x))
            if (y, x) in self.structure_constants and x != y:
                other = self.structure_constants[(y, x)]
                keys = set(vec) | set(other)
                if any(vec.get(k, 0) + other.get(k, 0) != 0 for k in keys):
                    raise PresentationError(f"antisymmetry fails for the pair ({x}, {y})", triple=(x, y))
        for x, y, z in product(names, repeat=3):
            bx = {x: Fraction(1)}
            by = {y: Fraction(1)}
            bz = {z: Fraction(1)}
            total: dict[str, Fraction] = {}
            for u, v, w in ((bx, by, bz), (by, bz, bx), (bz, bx, by)):
                for k, c in self.bracket_vec(u, self.bracket_vec(v, w)).items():
                    total[k] = total.get(k, Fraction(0)) + c
            if any(total.values()):
                raise PresentationError(f"Jacobi identity fails for ({x}, {y}, {z})", triple=(x, y, z))
        return self


def _gl1() -> LieAlgebraPresentation:
    return LieAlgebraPresentation("gl1", ("N",), {})


def _sl2() -> LieAlgebraPresentation:
    sc = {
        ("h", "e"): {"e": Fraction(2)},
        ("h", "f"): {"f": Fraction(-2)},
        ("e", "f"): {"h": Fraction(1)},
    }
    return LieAlgebraPresentation("sl2", ("e", "h", "f"), sc)


BUILTIN_ALGEBRAS = {"gl1": _gl1, "sl2": _sl2}


def builtin_algebra(name: str) -> LieAlgebraPresentation:
    try:
        return BUILTIN_ALGEBRAS[name]().validate()
    except KeyError:
        raise PresentationError(f"unknown built-in algebra {name!r}") from None


def load_algebra(text: str, name: str | None = None) -> LieAlgebraPresentation:
    """Parse a presentation from its TOML text form (or a built-in name).

    ::

        [algebra]
        name = "sl2"
        basis = ["e", "h", "f"]
        bracket."h,e" = { e = 2 }
        bracket."e,f" = { h = "1" }
    """
    if text.strip() in BUILTIN_ALGEBRAS:
        return builtin_algebra(text.strip())
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"algebra presentation: {exc}") from None
    sec = doc.get("algebra")
    if not isinstance(sec, dict):
        raise ParseError("missing [algebra] section")
    basis = sec.get("basis")
    if not isinstance(basis, list) or not basis or not all(isinstance(b, str) for b in basis):
        raise ParseError("[algebra] needs a nonempty 'basis' list of names")
    sc: dict[tuple[str, str], dict[str, Fraction]] = {}
    for key, vec in (sec.get("bracket") or {}).items():
        parts = [p.strip() for p in key.split(",")]
        if len(parts) != 2:
            raise ParseError(f"bracket key {key!r} must look like \"x,y\"")
        if not isinstance(vec, dict):
            raise ParseError(f"bracket {key!r} must be a table of coefficients")
        sc[(parts[0], parts[1])] = {k: _rat(v) for k, v in vec.items() if _rat(v) != 0}
    return LieAlgebraPresentation(name or sec.get("name", "custom"), tuple(basis), sc).validate()


# ---------------------------------------------------------------------------
# modules


class ModuleRep:
    """Finite-dimensional module: one exact matrix per basis element of g."""

    def __init__(
        self,
        algebra: LieAlgebraPresentation,
        action: Mapping[str, RationalMatrix],
        label: str,
        *,
        check: bool = True,
    ):
        names = algebra.basis_names
        missing = [x for x in names if x not in action]
        if missing:
            raise UnknownSymbol(f"module {label!r} has no action for {missing}")
        extra = [x for x in action if x not in names]
        if extra:
            raise UnknownSymbol(f"module {label!r} acts by unknown generators {extra}")
        dims = {m.shape for m in action.values()}
        if len(dims) != 1 or next(iter(dims))[0] != next(iter(dims))[1]:
            raise ShapeError(f"module {label!r}: action matrices must be square of one size")
        dim = next(iter(dims))[0]
        if dim < 1:
            raise ShapeError("zero-dimensional modules are not allowed")
        self.algebra = algebra
        self.action = {x: action[x] for x in names}
        self.label = label
        self.dim = dim
        self._lock = threading.Lock()
        self._words: dict[Word, RationalMatrix] = {}
        self._polys: dict[NCPolynomial, RationalMatrix] = {}
        self._tensors: dict[int, ModuleRep] = {}
        self._right: ModuleRep | None = None
        if check:
            self.check_bracket()

    def __repr__(self):
        return f"ModuleRep({self.label}, dim={self.dim}, algebra={self.algebra.name})"

    def check_bracket(self) -> None:
        names = self.algebra.basis_names
        zero = RationalMatrix.zeros(self.dim)
        for i, x in enumerate(names):
            for y in names[i + 1 :]:
                ax, ay = self.action[x], self.action[y]
                lhs = ax @ ay - ay @ ax
                vec = self.algebra.bracket(x, y)
                rhs = linear_combination(list(vec.values()), [self.action[k] for k in vec]) if vec else zero
                if lhs != rhs:
                    raise PresentationError(
                        f"module {self.label!r} violates the bracket relation for [{x},{y}]",
                        triple=(x, y),
                    )

    # evaluation helpers (memoized per module)
    def word_matrix(self, word: Word) -> RationalMatrix:
        if not word:
            return RationalMatrix.identity(self.dim)
        if _CACHE_ENABLED:
            with self._lock:
                hit = self._words.get(word)
            if hit is not None:
                return hit
        for x in word:
            if x not in self.action:
                raise UnknownSymbol(f"symbol {x!r} is not a generator of {self.algebra.name}")
        if len(word) == 1:
            out = self.action[word[0]]
        else:
            out = self.word_matrix(word[:-1]) @ self.action[word[-1]]
        if _CACHE_ENABLED:
            with self._lock:
                self._words[word] = out
        return out


def build_module(algebra: LieAlgebraPresentation, action: Mapping[str, object], label: str) -> ModuleRep:
    mats = {k: v if isinstance(v, RationalMatrix) else RationalMatrix.from_rows(v) for k, v in action.items()}
    return ModuleRep(algebra, mats, label)


def build_gl1_module(n: int, algebra: LieAlgebraPresentation | None = None) -> ModuleRep:
    """One-dimensional weight module ``M_n`` of gl(1): ``N`` acts as ``n``."""
    algebra = algebra or builtin_algebra("gl1")
    return ModuleRep(algebra, {"N": RationalMatrix.from_rows([[n]])}, f"M_{n}")


def sl2_label(two_j: int) -> str:
    return f"V_{Fraction(two_j, 2)}"


def build_sl2_module(two_j: int, algebra: LieAlgebraPresentation | None = None) -> ModuleRep:
    """Irreducible module of highest weight ``two_j`` (spin ``two_j/2``).

    Basis ``v_0, ..., v_{2j}`` with the highest weight vector first:
    ``h v_k = (2j - 2k) v_k``, ``f v_k = (k + 1) v_{k+1}``,
    ``e v_k = (2j - k + 1) v_{k-1}``.
    """
    if two_j < 0:
        raise ValueError("two_j must be nonnegative")
    algebra = algebra or builtin_algebra("sl2")
    n = two_j + 1
    e = [[0] * n for _ in range(n)]
    f = [[0] * n for _ in range(n)]
    h = [[0] * n for _ in range(n)]
    for k in range(n):
        h[k][k] = two_j - 2 * k
        if k + 1 < n:
            f[k + 1][k] = k + 1
        if k > 0:
            e[k - 1][k] = two_j - k + 1
    mats = {"e": RationalMatrix.from_rows(e), "h": RationalMatrix.from_rows(h), "f": RationalMatrix.from_rows(f)}
    return ModuleRep(algebra, mats, sl2_label(two_j))


def trivial_module(algebra: LieAlgebraPresentation) -> ModuleRep:
    zero = RationalMatrix.zeros(1)
    label = "M_0" if algebra.name == "gl1" else ("V_0" if algebra.name == "sl2" else "1")
    return ModuleRep(algebra, {x: zero for x in algebra.basis_names}, label)


def tensor_modules(u: ModuleRep, v: ModuleRep) -> ModuleRep:
    """``U (x) V`` with ``x`` acting as ``x (x) I + I (x) x``."""
    if u.algebra is not v.algebra and u.algebra != v.algebra:
        raise ShapeError("tensor product of modules over different algebras")
    if _CACHE_ENABLED:
        with u._lock:
            hit = u._tensors.get(id(v))
        if hit is not None and hit._right is v:
            return hit
    iu = RationalMatrix.identity(u.dim)
    iv = RationalMatrix.identity(v.dim)
    action = {x: kron(u.action[x], iv) + kron(iu, v.action[x]) for x in u.algebra.basis_names}
    out = ModuleRep(u.algebra, action, f"({u.label}⊗{v.label})", check=False)
    out._right = v
    if _CACHE_ENABLED:
        with u._lock:
            u._tensors[id(v)] = out
    return out


# ---------------------------------------------------------------------------
# evaluation


def evaluate(p: NCPolynomial, module: ModuleRep) -> RationalMatrix:
    """Image of ``p`` under the representation (words become matrix products)."""
    if _CACHE_ENABLED:
        with module._lock:
            hit = module._polys.get(p)
        if hit is not None:
            return hit
    items = p.items()
    if not items:
        out = RationalMatrix.zeros(module.dim)
    else:
        out = linear_combination([c for _, c in items], [module.word_matrix(w) for w, _ in items])
    if _CACHE_ENABLED:
        with module._lock:
            module._polys[p] = out
    return out


def _eval_words(terms, modules: Sequence[ModuleRep]) -> RationalMatrix:
    """Sum of Kronecker products, grouping on the first leg to share work."""
    if all(m.dim == 1 for m in modules):
        total = Fraction(0)
        for k, c in terms:
            val = Fraction(c)
            for m, w in zip(modules, k):
                val *= m.word_matrix(w)[0, 0]
            total += val
        return RationalMatrix.from_rows([[total]])
    if len(modules) == 1:
        m = modules[0]
        return linear_combination([c for _, c in terms], [m.word_matrix(k[0]) for k, _ in terms])
    groups: dict[Word, list] = {}
    for k, c in terms:
        groups.setdefault(k[0], []).append((k[1:], c))
    first = modules[0]
    parts = [kron(first.word_matrix(w), _eval_words(rest, modules[1:])) for w, rest in groups.items()]
    return linear_combination([1] * len(parts), parts)


def evaluate_legs(t: TensorElement, modules: Sequence[ModuleRep]) -> TensorOperator:
    """``sum coeff * pi_1(leg_1) (x) ... (x) pi_n(leg_n)``."""
    modules = tuple(modules)
    if len(modules) != t.legs:
        raise ShapeError(f"tensor element has {t.legs} legs but {len(modules)} modules were given")
    dims = tuple(m.dim for m in modules)
    items = t.word_items()
    if not items:
        size = 1
        for d in dims:
            size *= d
        return TensorOperator(dims, RationalMatrix.zeros(size))
    return TensorOperator(dims, _eval_words(items, modules))


def intertwiner_basis(u: ModuleRep, v: ModuleRep) -> list[RationalMatrix]:
    """Basis of the module maps ``f: U -> V`` (``f A_U(x) = A_V(x) f``)."""
    if u.algebra != v.algebra:
        raise ShapeError("intertwiners between modules of different algebras")
    iu = RationalMatrix.identity(u.dim)
    iv = RationalMatrix.identity(v.dim)
    blocks = [kron(iv, u.action[x].T) - kron(v.action[x], iu) for x in u.algebra.basis_names]
    if not blocks:
        blocks = [RationalMatrix.zeros(1, u.dim * v.dim)]
    den = 1
    for b in blocks:
        den = math.lcm(den, b.den)
    stacked = np.concatenate([b.num.astype(object) * (den // b.den) for b in blocks], axis=0)
    basis = []
    for vec in nullspace(RationalMatrix(stacked, 1)):
        entries = [vec[i, 0] for i in range(vec.rows)]
        rows = [entries[i * u.dim : (i + 1) * u.dim] for i in range(v.dim)]
        basis.append(RationalMatrix.from_rows(rows))
    return basis
