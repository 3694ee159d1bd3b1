"""Orchestration: validate the twining data, run the selected suites, serialize."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

from .algebra import ModuleRep, intertwiner_basis, tensor_modules
from .config import RunConfig, emit_config, load_config_algebra, load_config_modules
from .errors import PremonError
from .twined import Morphism, TwinedData, ValidationItem, validate_central
from .verify import (
    ERROR,
    FAIL,
    PASS,
    CheckResult,
    check_drinfeld_twist_trivial,
    check_hexagon_i,
    check_hexagon_ii,
    check_naturality,
    check_pentagon,
    check_q_methods,
    check_q_sigma_square,
    check_quasi_bialgebra,
    check_ribbon,
    check_symmetry,
)

# tuple rank each suite needs
SUITE_RANK = {
    "pentagon": 4,
    "q_square": 4,
    "hexagons": 3,
    "quasi": 3,
    "naturality": 3,
    "symmetry": 2,
    "ribbon": 2,
    "twist": 2,
}


class RunRejected(PremonError):
    code = "run_rejected"


@dataclass
class RunReport:
    config: RunConfig
    validation: list[ValidationItem] = field(default_factory=list)
    results: list[CheckResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    halted: bool = False
    message: str = ""
    wall_ms: float = 0.0

    @property
    def summary(self) -> dict[str, int]:
        counts = {PASS: 0, FAIL: 0, ERROR: 0}
        for r in self.results:
            counts[r.status] += 1
        counts["total"] = len(self.results)
        return counts

    def exit_code(self, expect_all_pass: bool = False) -> int:
        s = self.summary
        if self.halted or s[ERROR]:
            return 2
        if expect_all_pass and s[FAIL]:
            return 1
        return 0


# ---------------------------------------------------------------------------
# planning


Task = Callable[[], list[CheckResult]]


def _naturality_tasks(T: TwinedData, modules: list[ModuleRep], cap: int) -> list[Task]:
    """Intertwiners between configured modules and endomorphisms of their tensor squares."""
    sources: list[tuple[ModuleRep, ModuleRep]] = [(x, y) for x, y in product(modules, repeat=2)]
    sources += [(sq, sq) for sq in (tensor_modules(m, m) for m in modules)]
    tasks: list[Task] = []
    for X, Y in sources:
        for i, mat in enumerate(intertwiner_basis(X, Y)):
            f = Morphism(X, Y, mat)
            name = f"f{i}"
            for others in product(modules, repeat=2):
                if max(X.dim, Y.dim) * others[0].dim * others[1].dim > cap:
                    continue
                for p in range(3):
                    tasks.append(lambda f=f, p=p, o=others, n=name: [check_naturality(T, "associator", f, p, o, n)])
            for other in modules:
                if max(X.dim, Y.dim) * other.dim > cap:
                    continue
                for p in range(2):
                    tasks.append(lambda f=f, p=p, o=other, n=name: [check_naturality(T, "braiding", f, p, [o], n)])
    return tasks


def plan(cfg: RunConfig, T: TwinedData, modules: list[ModuleRep], variant: bool) -> tuple[list[Task], list[str]]:
    tasks: list[Task] = []
    notes: list[str] = []
    rank = cfg.max_tuple_rank
    top = max(m.dim for m in modules)
    for suite in cfg.checks:
        need = SUITE_RANK[suite]
        if need > rank:
            notes.append(f"{suite} skipped: needs tuples of rank {need}, max_tuple_rank is {rank}")
            continue
        if top**need > cfg.max_dimension:
            raise RunRejected(
                f"{suite} would build {top}^{need} = {top**need}-dimensional operators, "
                f"above max_dimension = {cfg.max_dimension}; shrink the module list or raise the cap"
            )
        tup = lambda n: list(product(modules, repeat=n))  # noqa: E731
        if suite == "pentagon":
            tasks += [lambda q=q: [check_pentagon(T, *q), check_q_methods(T, *q)] for q in tup(4)]
        elif suite == "q_square":
            tasks += [lambda q=q: [check_q_sigma_square(T, *q)] for q in tup(4)]
        elif suite == "hexagons":
            tasks += [lambda t=t: [check_hexagon_i(T, *t), check_hexagon_ii(T, *t)] for t in tup(3)]
        elif suite == "symmetry":
            tasks += [lambda p=p: [check_symmetry(T, *p)] for p in tup(2)]
        elif suite == "quasi":
            tasks += [lambda t=t: check_quasi_bialgebra(T, [], [t], variant) for t in tup(3)]
            tasks += [lambda p=p: check_quasi_bialgebra(T, [p], [], variant) for p in tup(2)]
        elif suite == "twist":
            tasks += [lambda p=p: check_drinfeld_twist_trivial(T, [p]) for p in tup(2)]
        elif suite == "ribbon":
            tasks.append(lambda: check_ribbon(T, modules))
        elif suite == "naturality":
            tasks += _naturality_tasks(T, modules, cfg.max_dimension)
    return tasks, notes


# ---------------------------------------------------------------------------
# running


def prepare(cfg: RunConfig):
    algebra = load_config_algebra(cfg)
    modules = load_config_modules(cfg, algebra)
    T = TwinedData(cfg.K_poly, cfg.gamma, algebra)
    return algebra, modules, T


def validate(cfg: RunConfig) -> RunReport:
    report = RunReport(cfg)
    start = time.perf_counter()
    try:
        _, modules, _ = prepare(cfg)
        v = validate_central(cfg.K_poly, modules, require_S_odd=cfg.require_S_odd)
        report.validation = v.items
        if not v.ok:
            bad = v.failures()[0]
            report.halted = True
            report.message = f"validation failed: {bad.check} on {','.join(bad.objects) or '-'}: {bad.detail}"
    except PremonError as exc:
        report.halted = True
        report.message = f"{exc.code}: {exc}"
    report.wall_ms = (time.perf_counter() - start) * 1000.0
    return report


def run(cfg: RunConfig, jobs: int = 1, variant: bool | None = None) -> RunReport:
    """Validate, then run every selected suite. Fail verdicts never stop the run."""
    start = time.perf_counter()
    report = validate(cfg)
    if report.halted:
        return report
    try:
        _, modules, T = prepare(cfg)
        tasks, report.notes = plan(cfg, T, modules, cfg.fusion_variant if variant is None else variant)
    except PremonError as exc:
        report.halted = True
        report.message = f"{exc.code}: {exc}"
        return report
    results: list[CheckResult] = []
    if jobs <= 1:
        for t in tasks:
            results.extend(t())
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(lambda t: t(), tasks):
                results.extend(chunk)
    results.sort(key=lambda r: r.sort_key)
    report.results = results
    report.wall_ms = (time.perf_counter() - start) * 1000.0
    return report


# ---------------------------------------------------------------------------
# serialization


def _num(x) -> object:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, complex):
        return [f"{x.real:.12g}", f"{x.imag:.12g}"]
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _witness(w):
    if w is None or isinstance(w, int):
        return w
    return _num(w) if isinstance(w, (Fraction, complex, float)) else str(w)


def result_record(r: CheckResult, timing: bool = True) -> dict:
    rec: dict = {
        "record": "result",
        "check_id": r.check_id,
        "objects": list(r.objects),
        "bracketing": r.bracketing,
        "gamma": r.gamma,
        "status": r.status,
    }
    if r.defect is not None:
        rec["defect_kind"] = r.defect_kind
        rec["defect"] = [[_num(v) for v, _ in r.defect]]
        if any(m is not None for _, m in r.defect):
            rec["multiplicities"] = [m for _, m in r.defect]
    if r.witness is not None:
        rec["witness"] = _witness(r.witness)
    if r.detail:
        rec["detail"] = r.detail
    if r.error_code:
        rec["error_code"] = r.error_code
    rec["duration_ms"] = round(r.duration_ms, 3) if timing else 0
    return rec


def _config_record(cfg: RunConfig) -> dict:
    return {
        "record": "config",
        "algebra": cfg.algebra,
        "modules": {cfg.modules.kind: list(cfg.modules.values)},
        "K": cfg.K,
        "gamma": cfg.gamma,
        "checks": list(cfg.checks),
        "require_S_odd": cfg.require_S_odd,
        "max_tuple_rank": cfg.max_tuple_rank,
        "max_dimension": cfg.max_dimension,
        "fusion_variant": cfg.fusion_variant,
    }


def _validation_record(v: ValidationItem) -> dict:
    rec = {"record": "validation", "check": v.check, "objects": list(v.objects), "passed": v.passed}
    if v.witness is not None:
        rec["witness"] = _witness(v.witness)
    if v.detail:
        rec["detail"] = v.detail
    return rec


def _fmt_defect(r: CheckResult) -> str:
    if r.defect is None:
        return ""
    parts = []
    for v, m in r.defect:
        val = _num(v)
        val = f"({val[0]},{val[1]})" if isinstance(val, list) else val
        parts.append(val if m is None else f"{val}:{m}")
    kind = "spec" if r.defect_kind in ("q_spectrum", "ratio_spectrum") else "maxdiff"
    return f"{kind} {{{', '.join(parts)}}}"


def emit_report(report: RunReport, fmt: str = "text", timing: bool = True) -> bytes:
    if fmt == "jsonlike":
        lines = [_config_record(report.config)]
        lines += [_validation_record(v) for v in report.validation]
        if report.halted:
            lines.append({"record": "halted", "message": report.message})
        lines += [{"record": "note", "message": n} for n in report.notes]
        lines += [result_record(r, timing) for r in report.results]
        lines.append({"record": "summary", **report.summary})
        text = "\n".join(json.dumps(rec, ensure_ascii=False) for rec in lines) + "\n"
        return text.encode("utf-8")
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")

    cfg = report.config
    out = [f"K = {cfg.K}   gamma = {cfg.gamma}   modules = {cfg.modules.kind} {list(cfg.modules.values)}"]
    failed = [v for v in report.validation if not v.passed]
    out.append(f"validation: {'FAILED' if failed else 'ok'} ({len(report.validation)} items)")
    for v in failed:
        w = f"  witness {_witness(v.witness)}" if v.witness is not None else ""
        out.append(f"  {v.check} [{','.join(v.objects)}] {v.detail}{w}")
    if report.halted:
        out.append(f"halted: {report.message}")
    for n in report.notes:
        out.append(f"note: {n}")
    if report.results:
        rows = [("check", "objects", "status", "defect")]
        rows += [(r.check_id, ",".join(r.objects), r.status, _fmt_defect(r) or r.detail) for r in report.results]
        widths = [max(len(row[i]) for row in rows) for i in range(3)]
        for row in rows:
            out.append("  ".join(c.ljust(w) for c, w in zip(row[:3], widths)) + "  " + row[3])
    s = report.summary
    line = f"summary: total {s['total']}  pass {s[PASS]}  fail {s[FAIL]}  error {s[ERROR]}"
    if timing:
        line += f"  wall {report.wall_ms / 1000.0:.2f}s"
    out.append(line)
    return ("\n".join(r.rstrip() for r in out) + "\n").encode("utf-8")


__all__ = ["RunReport", "RunRejected", "emit_config", "emit_report", "plan", "result_record", "run", "validate"]
