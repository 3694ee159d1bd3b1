"""Run configuration files.

A configuration is a small TOML document::

    [algebra]
    name = "gl1"                 # or: file = "my_algebra.toml"

    [modules]
    gl1_weights = [-1, 0, 1]     # or: sl2_two_j = [0, 2]; or: file = "modules.toml"

    [twining]
    K = "(N^3 + 5*N)/6"
    gamma = "-1"                 # rational string, or [re, im] for complex
    require_S_odd = false

    [checks]
    run = ["pentagon", "hexagons"]
    max_tuple_rank = 4
    max_dimension = 256
    fusion_variant = false

A module file holds ``[[module]]`` tables with a ``label`` and one matrix per
generator under ``action``; entries are integers or ``"p/q"`` strings.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .algebra import (
    BUILTIN_ALGEBRAS,
    LieAlgebraPresentation,
    ModuleRep,
    build_gl1_module,
    build_module,
    build_sl2_module,
    builtin_algebra,
    load_algebra,
)
from .errors import ParseError, UnknownGenerator
from .linalg import GammaValue
from .poly import NCPolynomial, parse_polynomial

CHECKS = ("pentagon", "hexagons", "symmetry", "q_square", "quasi", "naturality", "ribbon", "twist")
MODULE_KINDS = ("gl1_weights", "sl2_two_j", "file")

_SECTIONS = {
    "algebra": {"name", "file"},
    "modules": set(MODULE_KINDS),
    "twining": {"K", "gamma", "require_S_odd"},
    "checks": {"run", "max_tuple_rank", "max_dimension", "fusion_variant"},
}


@dataclass(frozen=True)
class ModuleSpec:
    kind: str
    values: tuple  # weights, doubled spins, or a one-element tuple holding a path


@dataclass(frozen=True)
class RunConfig:
    algebra: str
    modules: ModuleSpec
    K: str
    gamma: str
    checks: tuple[str, ...]
    require_S_odd: bool = False
    max_tuple_rank: int = 4
    max_dimension: int = 256
    fusion_variant: bool = False
    algebra_is_file: bool = False
    K_poly: NCPolynomial | None = field(default=None, compare=False)
    base_dir: str = field(default=".", compare=False)

    def resolve(self, path: str) -> str:
        return path if os.path.isabs(path) else os.path.join(self.base_dir, path)


# ---------------------------------------------------------------------------
# locating keys in the source, for error positions


def _locate(text: str, section: str, key: str) -> tuple[int, int]:
    """1-based (line, column) of the value of ``key`` under ``[section]``."""
    current = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        head = re.match(r"\[\s*([A-Za-z0-9_]+)\s*\]", stripped)
        if head:
            current = head.group(1)
            continue
        if current != section:
            continue
        m = re.match(r"(\s*)" + re.escape(key) + r"\s*=\s*", line)
        if m:
            col = m.end() + 1
            if line[m.end() : m.end() + 1] in "\"'":
                col += 1
            return lineno, col
    return 1, 1


def _fail(text, section, key, message, cls=ParseError):
    line, col = _locate(text, section, key)
    raise cls(f"[{section}] {key}: {message}", line=line, column=col)


# ---------------------------------------------------------------------------
# parsing


def parse_config(text: str, base_dir: str = ".") -> RunConfig:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        msg = getattr(exc, "msg", str(exc))
        raise ParseError(f"invalid configuration: {msg}", line=getattr(exc, "lineno", None),
                         column=getattr(exc, "colno", None)) from None

    for section, body in doc.items():
        if section not in _SECTIONS:
            raise ParseError(f"unknown section [{section}]", line=_find_header(text, section), column=1)
        if not isinstance(body, dict):
            raise ParseError(f"[{section}] must be a table", line=_find_header(text, section), column=1)
        for key in body:
            if key not in _SECTIONS[section]:
                _fail(text, section, key, "unknown key")
    for section in ("algebra", "modules", "twining", "checks"):
        if section not in doc:
            raise ParseError(f"missing section [{section}]", line=1, column=1)

    alg = doc["algebra"]
    if ("name" in alg) == ("file" in alg):
        raise ParseError("[algebra] needs exactly one of 'name' or 'file'", line=_find_header(text, "algebra"), column=1)
    if "name" in alg:
        algebra, is_file = str(alg["name"]), False
        if algebra not in BUILTIN_ALGEBRAS:
            _fail(text, "algebra", "name", f"unknown built-in algebra {algebra!r}")
    else:
        algebra, is_file = str(alg["file"]), True

    mods = doc["modules"]
    kinds = [k for k in MODULE_KINDS if k in mods]
    if len(kinds) != 1:
        raise ParseError("[modules] needs exactly one of " + ", ".join(MODULE_KINDS),
                         line=_find_header(text, "modules"), column=1)
    kind = kinds[0]
    raw = mods[kind]
    if kind == "file":
        values = (str(raw),)
    else:
        if not isinstance(raw, list) or not raw or not all(isinstance(v, int) and not isinstance(v, bool) for v in raw):
            _fail(text, "modules", kind, "expected a nonempty list of integers")
        if kind == "sl2_two_j" and any(v < 0 for v in raw):
            _fail(text, "modules", kind, "doubled spins must be nonnegative")
        values = tuple(raw)

    tw = doc["twining"]
    if "K" not in tw or not isinstance(tw["K"], str):
        raise ParseError("[twining] needs a string 'K'", line=_find_header(text, "twining"), column=1)
    gamma_raw = tw.get("gamma", "-1")
    try:
        gamma = str(GammaValue.parse(gamma_raw)) if isinstance(gamma_raw, list) else str(gamma_raw).strip()
        GammaValue.parse(gamma)
    except (ValueError, ZeroDivisionError) as exc:
        _fail(text, "twining", "gamma", f"bad gamma {gamma_raw!r}: {exc}")
    require = tw.get("require_S_odd", False)
    if not isinstance(require, bool):
        _fail(text, "twining", "require_S_odd", "expected true or false")

    ch = doc["checks"]
    run = ch.get("run")
    if not isinstance(run, list) or not run:
        raise ParseError("[checks] needs a nonempty 'run' list", line=_find_header(text, "checks"), column=1)
    for name in run:
        if name not in CHECKS:
            _fail(text, "checks", "run", f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
    rank = ch.get("max_tuple_rank", 4)
    if not isinstance(rank, int) or not 2 <= rank <= 4:
        _fail(text, "checks", "max_tuple_rank", "must be an integer between 2 and 4")
    cap = ch.get("max_dimension", 256)
    if not isinstance(cap, int) or cap < 1:
        _fail(text, "checks", "max_dimension", "must be a positive integer")
    variant = ch.get("fusion_variant", False)
    if not isinstance(variant, bool):
        _fail(text, "checks", "fusion_variant", "expected true or false")

    cfg = RunConfig(
        algebra=algebra,
        modules=ModuleSpec(kind, values),
        K=tw["K"],
        gamma=gamma,
        checks=tuple(dict.fromkeys(run)),
        require_S_odd=require,
        max_tuple_rank=rank,
        max_dimension=cap,
        fusion_variant=variant,
        algebra_is_file=is_file,
        base_dir=base_dir,
    )
    generators = load_config_algebra(cfg).basis_names
    try:
        poly = parse_polynomial(tw["K"], generators)
    except ParseError as exc:
        line, col = _locate(text, "twining", "K")
        cls = UnknownGenerator if isinstance(exc, UnknownGenerator) else ParseError
        raise cls(f"[twining] K: {exc.reason}", line=line, column=col + (exc.column or 1) - 1) from None
    return _with_poly(cfg, poly)


def _with_poly(cfg: RunConfig, poly: NCPolynomial) -> RunConfig:
    object.__setattr__(cfg, "K_poly", poly)
    return cfg


def _find_header(text: str, section: str) -> int:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if re.match(r"\s*\[\s*" + re.escape(section) + r"\s*\]", line):
            return lineno
    return 1


def load_config(path: str) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text, base_dir=os.path.dirname(os.path.abspath(path)))


# ---------------------------------------------------------------------------
# materializing


def load_config_algebra(cfg: RunConfig) -> LieAlgebraPresentation:
    if not cfg.algebra_is_file:
        return builtin_algebra(cfg.algebra)
    with open(cfg.resolve(cfg.algebra), encoding="utf-8") as fh:
        return load_algebra(fh.read())


def load_config_modules(cfg: RunConfig, algebra: LieAlgebraPresentation) -> list[ModuleRep]:
    kind, values = cfg.modules.kind, cfg.modules.values
    if kind == "gl1_weights":
        if set(algebra.basis_names) != {"N"}:
            raise ParseError("gl1_weights needs the gl1 algebra")
        return [build_gl1_module(n, algebra) for n in values]
    if kind == "sl2_two_j":
        if tuple(algebra.basis_names) != ("e", "h", "f"):
            raise ParseError("sl2_two_j needs the sl2 algebra")
        return [build_sl2_module(n, algebra) for n in values]
    with open(cfg.resolve(values[0]), encoding="utf-8") as fh:
        return parse_module_file(fh.read(), algebra)


def parse_module_file(text: str, algebra: LieAlgebraPresentation) -> list[ModuleRep]:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"module file: {getattr(exc, 'msg', exc)}", line=getattr(exc, "lineno", None),
                         column=getattr(exc, "colno", None)) from None
    entries = doc.get("module")
    if not isinstance(entries, list) or not entries:
        raise ParseError("module file needs at least one [[module]] table")
    out = []
    for i, entry in enumerate(entries):
        label = entry.get("label", f"W_{i}")
        action = entry.get("action")
        if not isinstance(action, dict):
            raise ParseError(f"module {label!r} needs an 'action' table")
        out.append(build_module(algebra, action, str(label)))
    return out


# ---------------------------------------------------------------------------
# emitting


def _toml_str(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _toml_list(items: Sequence) -> str:
    return "[" + ", ".join(_toml_str(x) if isinstance(x, str) else str(x) for x in items) + "]"


def emit_config(cfg: RunConfig) -> str:
    lines = ["[algebra]"]
    lines.append(f"{'file' if cfg.algebra_is_file else 'name'} = {_toml_str(cfg.algebra)}")
    lines += ["", "[modules]"]
    if cfg.modules.kind == "file":
        lines.append(f"file = {_toml_str(cfg.modules.values[0])}")
    else:
        lines.append(f"{cfg.modules.kind} = {_toml_list(cfg.modules.values)}")
    lines += [
        "",
        "[twining]",
        f"K = {_toml_str(cfg.K)}",
        f"gamma = {_toml_str(cfg.gamma)}",
        f"require_S_odd = {str(cfg.require_S_odd).lower()}",
        "",
        "[checks]",
        f"run = {_toml_list(cfg.checks)}",
        f"max_tuple_rank = {cfg.max_tuple_rank}",
        f"max_dimension = {cfg.max_dimension}",
        f"fusion_variant = {str(cfg.fusion_variant).lower()}",
    ]
    return "\n".join(lines) + "\n"
