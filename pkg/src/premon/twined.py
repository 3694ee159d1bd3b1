"""Twined data on concrete modules: the associator, braiding, q and unit maps.

Given a central element ``K`` with ``eps(K) = 0`` and a nonzero ``gamma``,
the twined R-matrix is ``gamma^(K (x) K)`` and the twined coassociator is
``gamma^kappa`` with ``kappa = K (x) (I (x) K + K (x) I - Delta(K))``.  Both are
realized on a tuple of modules by evaluating the exponent and pushing it
through the integer-spectrum functional calculus.

Objects of the category are bracketed tensor words over modules, modelled by
:class:`Tensor` nodes.  Matrices always act on the flat Kronecker product of
the leaves in left-to-right order; the bracketing is carried only so that
composition of morphisms can be type checked.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence, Union

from .algebra import (
    ModuleRep,
    evaluate,
    evaluate_legs,
    tensor_modules,
    trivial_module,
)
from .errors import NonIntegerSpectrum, NonSemisimple, PremonError, ShapeError
from .linalg import (
    GammaValue,
    RationalMatrix,
    Spectrum,
    TensorOperator,
    flip_matrix,
    gamma_power,
    integer_spectrum,
    mat_equal,
    mat_kron,
    mat_mul,
    mat_shape,
)
from .poly import NCPolynomial, TensorElement, antipode, coproduct, counit


# ---------------------------------------------------------------------------
# objects


@dataclass(frozen=True, eq=False)
class Tensor:
    left: "Obj"
    right: "Obj"


Obj = Union[ModuleRep, Tensor]


def obj_key(obj: Obj):
    """Hashable structural identity of a bracketed object."""
    if isinstance(obj, Tensor):
        return (obj_key(obj.left), obj_key(obj.right))
    return obj


def obj_label(obj: Obj, top: bool = True) -> str:
    if isinstance(obj, Tensor):
        inner = f"{obj_label(obj.left, False)}⊗{obj_label(obj.right, False)}"
        return inner if top else f"({inner})"
    return obj.label


def obj_leaves(obj: Obj) -> tuple[ModuleRep, ...]:
    if isinstance(obj, Tensor):
        return obj_leaves(obj.left) + obj_leaves(obj.right)
    return (obj,)


def obj_dim(obj: Obj) -> int:
    return math.prod(m.dim for m in obj_leaves(obj))


def obj_module(obj: Obj) -> ModuleRep:
    if isinstance(obj, Tensor):
        return tensor_modules(obj_module(obj.left), obj_module(obj.right))
    return obj


def tensor(*objs: Obj) -> Obj:
    """Right-nested product ``a (x) (b (x) (...))``; use :class:`Tensor` for other bracketings."""
    if len(objs) == 1:
        return objs[0]
    return Tensor(objs[0], tensor(*objs[1:]))


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True, eq=False)
class Morphism:
    """A map ``source -> target`` realized on the flat tensor spaces.

    ``inverse_matrix`` is carried along when the map is built from gamma
    powers, so inverses of composites never require elimination.
    """

    source: Obj
    target: Obj
    matrix: object
    inverse_matrix: object = None

    def __post_init__(self):
        want = (obj_dim(self.target), obj_dim(self.source))
        if mat_shape(self.matrix) != want:
            raise ShapeError(
                f"morphism {obj_label(self.source)} -> {obj_label(self.target)} "
                f"needs shape {want}, got {mat_shape(self.matrix)}"
            )

    @property
    def source_label(self) -> str:
        return obj_label(self.source)

    @property
    def target_label(self) -> str:
        return obj_label(self.target)

    @property
    def op(self) -> TensorOperator:
        if obj_dim(self.source) != obj_dim(self.target):
            raise ShapeError("only endomorphism-sized maps have a TensorOperator form")
        return TensorOperator(tuple(m.dim for m in obj_leaves(self.source)), self.matrix)

    @classmethod
    def identity(cls, obj: Obj) -> "Morphism":
        eye = RationalMatrix.identity(obj_dim(obj))
        return cls(obj, obj, eye, eye)

    def __matmul__(self, other: "Morphism") -> "Morphism":
        """``self o other``."""
        if other.target_label != self.source_label:
            raise ShapeError(f"cannot compose: {other.target_label} is not {self.source_label}")
        inv = None
        if self.inverse_matrix is not None and other.inverse_matrix is not None:
            inv = mat_mul(other.inverse_matrix, self.inverse_matrix)
        return Morphism(other.source, self.target, mat_mul(self.matrix, other.matrix), inv)

    def tensor(self, other: "Morphism") -> "Morphism":
        inv = None
        if self.inverse_matrix is not None and other.inverse_matrix is not None:
            inv = mat_kron(self.inverse_matrix, other.inverse_matrix)
        return Morphism(
            Tensor(self.source, other.source),
            Tensor(self.target, other.target),
            mat_kron(self.matrix, other.matrix),
            inv,
        )

    def inverse(self) -> "Morphism":
        if self.inverse_matrix is None:
            raise PremonError("inverse not available for this morphism")
        return Morphism(self.target, self.source, self.inverse_matrix, self.matrix)

    def equals(self, other: "Morphism") -> bool:
        return (
            self.source_label == other.source_label
            and self.target_label == other.target_label
            and mat_equal(self.matrix, other.matrix)
        )


def compose(*maps: Morphism) -> Morphism:
    """``compose(f, g, h) = f o g o h``."""
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = m @ out
    return out


# ---------------------------------------------------------------------------
# central element


@dataclass(frozen=True)
class CentralElement:
    poly: NCPolynomial
    declared_S_parity: str = "unchecked"  # "odd", "even" or "unchecked"


@dataclass
class ValidationItem:
    check: str
    passed: bool
    objects: tuple[str, ...] = ()
    witness: object = None
    detail: str = ""


@dataclass
class ValidationReport:
    items: list[ValidationItem] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(i.passed for i in self.items)

    def failures(self) -> list[ValidationItem]:
        return [i for i in self.items if not i.passed]

    def first_failure(self, check: str) -> ValidationItem | None:
        return next((i for i in self.items if i.check == check and not i.passed), None)


def validate_central(
    K: CentralElement | NCPolynomial,
    modules: Sequence[ModuleRep],
    require_S_odd: bool = False,
) -> ValidationReport:
    """Check centrality, counit, integer spectra and (optionally) ``S(K) = -K``."""
    poly = K.poly if isinstance(K, CentralElement) else K
    report = ValidationReport()
    add = report.items.append

    eps = counit(poly)
    add(ValidationItem("counit", eps == 0, (), eps if eps != 0 else None, f"eps(K) = {eps}"))

    pairs = list(combinations_with_replacement(modules, 2))
    targets = list(modules) + [tensor_modules(u, v) for u, v in pairs]
    for m in targets:
        km = evaluate(poly, m)
        bad = [x for x, a in m.action.items() if km @ a != a @ km]
        add(ValidationItem("central", not bad, (m.label,), bad[0] if bad else None,
                           f"K fails to commute with {bad[0]}" if bad else ""))

    for m in modules:
        add(_spectrum_item(evaluate(poly, m), (m.label,), "integer_spectrum"))
    dk = coproduct(poly)
    for u, v in pairs:
        op = evaluate_legs(dk, (u, v)).matrix
        add(_spectrum_item(op, (u.label, v.label), "integer_spectrum_coproduct"))

    if require_S_odd:
        sk = antipode(poly)
        for m in modules:
            ok = evaluate(sk, m) == -evaluate(poly, m)
            add(ValidationItem("S_odd", ok, (m.label,), None if ok else m.label,
                               "" if ok else f"S(K) != -K on {m.label}"))
    return report


def _spectrum_item(mat: RationalMatrix, labels, check: str) -> ValidationItem:
    try:
        spec = integer_spectrum(mat)
    except NonIntegerSpectrum as exc:
        return ValidationItem(check, False, labels, exc.witness, f"NonIntegerSpectrum: {exc}")
    except NonSemisimple as exc:
        return ValidationItem(check, False, labels, None, f"NonSemisimple: {exc}")
    return ValidationItem(check, True, labels, None, f"spectrum {spec.as_dict()}")


# ---------------------------------------------------------------------------
# twined data


def kappa_element(K: NCPolynomial) -> TensorElement:
    """``K (x) (I (x) K + K (x) I - Delta(K))`` as a three-leg element."""
    one = NCPolynomial.one()
    inner = TensorElement.pure(one, K) + TensorElement.pure(K, one) - coproduct(K)
    return TensorElement.pure(K).tensor(inner)


def r_element(K: NCPolynomial) -> TensorElement:
    return TensorElement.pure(K, K)


class TwinedData:
    """Central element, gamma, and caches of every operator built from them."""

    def __init__(self, K: CentralElement | NCPolynomial, gamma, algebra=None):
        self.K = K if isinstance(K, CentralElement) else CentralElement(K)
        self.gamma = GammaValue.parse(gamma)
        self.kappa = kappa_element(self.K.poly)
        self.r = r_element(self.K.poly)
        self._algebra = algebra
        self._unit = None
        self._lock = threading.Lock()
        self._ops: dict = {}
        self._spectra: dict = {}
        self._powers: dict = {}
        self._morphisms: dict = {}

    @property
    def poly(self) -> NCPolynomial:
        return self.K.poly

    def unit(self, algebra=None) -> ModuleRep:
        with self._lock:
            if self._unit is None:
                alg = algebra or self._algebra
                if alg is None:
                    raise PremonError("no algebra known for the unit object")
                self._unit = trivial_module(alg)
            return self._unit

    def _cached(self, store: dict, key, build):
        with self._lock:
            hit = store.get(key)
        if hit is not None:
            return hit
        val = build()
        with self._lock:
            return store.setdefault(key, val)

    def memo(self, key, build):
        """Cache an arbitrary derived operator under ``key``."""
        return self._cached(self._morphisms, key, build)

    def exponent(self, element: TensorElement, modules: Sequence[ModuleRep]) -> TensorOperator:
        modules = tuple(modules)
        return self._cached(self._ops, (element, modules), lambda: evaluate_legs(element, modules))

    def spectrum(self, element: TensorElement, modules: Sequence[ModuleRep]) -> Spectrum:
        modules = tuple(modules)
        return self._cached(
            self._spectra,
            (element, modules),
            lambda: integer_spectrum(self.exponent(element, modules).matrix),
        )

    def power(self, element: TensorElement, modules: Sequence[ModuleRep], scale: int = 1):
        """Matrix of ``gamma^(scale * element)`` on the given modules."""
        modules = tuple(modules)

        def build():
            g = GammaValue(self.gamma.power(scale)) if scale != 1 else self.gamma
            return gamma_power(self.spectrum(element, modules), g)

        return self._cached(self._powers, (element, modules, scale), build)


# ---------------------------------------------------------------------------
# builders


def build_kappa(T: TwinedData, U: Obj, V: Obj, W: Obj) -> TensorOperator:
    mods = (obj_module(U), obj_module(V), obj_module(W))
    op = T.exponent(T.kappa, mods)
    return TensorOperator(_flat_dims(U, V, W), op.matrix)


def _flat_dims(*objs: Obj) -> tuple[int, ...]:
    return tuple(m.dim for o in objs for m in obj_leaves(o))


def build_phitilde(T: TwinedData, U: Obj, V: Obj, W: Obj, inverse: bool = False) -> Morphism:
    """The associator ``a_{U,V,W}: U (x) (V (x) W) -> (U (x) V) (x) W``."""
    mods = (obj_module(U), obj_module(V), obj_module(W))
    a = Morphism(
        Tensor(U, Tensor(V, W)),
        Tensor(Tensor(U, V), W),
        T.power(T.kappa, mods, 1),
        T.power(T.kappa, mods, -1),
    )
    return a.inverse() if inverse else a


def build_rtilde(T: TwinedData, U: Obj, V: Obj, scale: int = 1) -> TensorOperator:
    mods = (obj_module(U), obj_module(V))
    return TensorOperator(_flat_dims(U, V), T.power(T.r, mods, scale))


def braiding(T: TwinedData, U: Obj, V: Obj) -> Morphism:
    """``sigma_{U,V} = flip o (pi_U (x) pi_V)(R~)``."""
    du, dv = obj_dim(U), obj_dim(V)
    flip = flip_matrix(du, dv)
    r = build_rtilde(T, U, V).matrix
    r_inv = build_rtilde(T, U, V, -1).matrix
    return Morphism(Tensor(U, V), Tensor(V, U), mat_mul(flip, r), mat_mul(r_inv, flip.T))


def xi_factors(T: TwinedData) -> list[tuple[TensorElement, int]]:
    """The five exponents of xi, left to right, with their signs."""
    return T.memo("xi_factors", lambda: _xi_factors(T.kappa))


def _xi_factors(k: TensorElement) -> list[tuple[TensorElement, int]]:
    one = TensorElement.unit(1)
    return [
        (k.coproduct_at(0), -1),
        (k.tensor(one), 1),
        (k.coproduct_at(1), 1),
        (one.tensor(k), 1),
        (k.coproduct_at(2), -1),
    ]


def build_xi(T: TwinedData, U: Obj, V: Obj, W: Obj, Z: Obj, inverse: bool = False) -> TensorOperator:
    """xi on four legs, each factor obtained by inserting the coproduct into kappa."""
    mods = tuple(obj_module(o) for o in (U, V, W, Z))
    factors = xi_factors(T)
    if inverse:
        mats = [T.power(el, mods, -s) for el, s in reversed(factors)]
    else:
        mats = [T.power(el, mods, s) for el, s in factors]
    out = mats[0]
    for m in mats[1:]:
        out = mat_mul(out, m)
    return TensorOperator(_flat_dims(U, V, W, Z), out)


def q_morphism(T: TwinedData, U: Obj, V: Obj, W: Obj, Z: Obj, method: str = "composition") -> Morphism:
    """Endomorphism q_{U,V,W,Z} of ``(U (x) V) (x) (W (x) Z)``.

    ``composition`` multiplies the five associators around the box;
    ``xi`` evaluates the coproduct-inserted element on four legs.
    """
    if method not in ("composition", "xi"):
        raise ValueError(f"unknown method {method!r}")
    return T.memo(("q", method) + tuple(obj_key(o) for o in (U, V, W, Z)), lambda: _build_q(T, U, V, W, Z, method))


def _build_q(T: TwinedData, U: Obj, V: Obj, W: Obj, Z: Obj, method: str) -> Morphism:
    src = Tensor(Tensor(U, V), Tensor(W, Z))
    if method == "xi":
        return Morphism(src, src, build_xi(T, U, V, W, Z).matrix, build_xi(T, U, V, W, Z, inverse=True).matrix)
    idU = Morphism.identity(U)
    idZ = Morphism.identity(Z)
    return compose(
        build_phitilde(T, Tensor(U, V), W, Z, inverse=True),
        build_phitilde(T, U, V, W).tensor(idZ),
        build_phitilde(T, U, Tensor(V, W), Z),
        idU.tensor(build_phitilde(T, V, W, Z)),
        build_phitilde(T, U, V, Tensor(W, Z), inverse=True),
    )


def unit_isos(T: TwinedData, U: Obj) -> tuple[Morphism, Morphism]:
    """``rho_U: U (x) 1 -> U`` and ``lambda_U: 1 (x) U -> U``."""
    one = T.unit(obj_leaves(U)[0].algebra)
    eye = RationalMatrix.identity(obj_dim(U))
    return Morphism(Tensor(U, one), U, eye, eye), Morphism(Tensor(one, U), U, eye, eye)


def permuted_power(T: TwinedData, element: TensorElement, slots, modules, scale: int = 1):
    """``gamma^(scale * element)`` with component ``i`` placed on leg ``slots[i]``."""
    return T.power(element.permute(slots), tuple(obj_module(m) for m in modules), scale)


def diagonal_action(x: str, modules: Sequence[ModuleRep]) -> RationalMatrix:
    """Action of a generator on the flat tensor product via the iterated coproduct."""
    el = TensorElement.pure(NCPolynomial.generator(x))
    for i in range(len(modules) - 1):
        el = el.coproduct_at(i)
    return evaluate_legs(el, modules).matrix


def u_closed_form(T: TwinedData, V: ModuleRep, scale: int = 1):
    """``gamma^(-K^2)`` on V (``scale=-1`` gives the inverse)."""
    sq = TensorElement.pure(-(T.poly * T.poly))
    return T.power(sq, (V,), scale)


__all__ = [
    "CentralElement",
    "Morphism",
    "Obj",
    "Tensor",
    "TwinedData",
    "ValidationReport",
    "braiding",
    "build_kappa",
    "build_phitilde",
    "build_rtilde",
    "build_xi",
    "compose",
    "diagonal_action",
    "kappa_element",
    "obj_dim",
    "obj_key",
    "obj_label",
    "obj_leaves",
    "obj_module",
    "permuted_power",
    "q_morphism",
    "tensor",
    "unit_isos",
    "validate_central",
]
