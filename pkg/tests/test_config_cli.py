import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from premon.cli import main
from premon.config import CHECKS, ModuleSpec, RunConfig, emit_config, load_config, parse_config
from premon.errors import ParseError, UnknownGenerator
from premon.runner import RunReport, emit_report, run

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"
GOLDEN = Path(__file__).resolve().parent / "golden"

BASE = """\
[algebra]
name = "{alg}"

[modules]
{mods}

[twining]
K = "{K}"
gamma = "-1"

[checks]
run = [{checks}]
max_tuple_rank = {rank}
"""


def cfg_text(K="N", alg="gl1", mods="gl1_weights = [1]", checks='"symmetry"', rank=2):
    return BASE.format(K=K, alg=alg, mods=mods, checks=checks, rank=rank)


def records(data: bytes):
    return [json.loads(line) for line in data.decode("utf-8").splitlines()]


# -- parsing -------------------------------------------------------------------

def test_primitive_config():
    cfg = parse_config(cfg_text())
    assert cfg.K_poly.terms == {("N",): 1}
    assert cfg.modules == ModuleSpec("gl1_weights", (1,))


def test_cubic_config_has_two_terms():
    cfg = parse_config(cfg_text(K="(N^3 + 5*N)/6"))
    assert cfg.K_poly.terms == {("N", "N", "N"): Fraction(1, 6), ("N",): Fraction(5, 6)}


def test_casimir_config_is_noncommutative():
    cfg = parse_config(cfg_text(K="(e*f + f*e + h^2/2)/4", alg="sl2", mods="sl2_two_j = [2]"))
    assert len(cfg.K_poly.terms) == 3
    assert ("e", "f") in cfg.K_poly.terms and ("f", "e") in cfg.K_poly.terms


def test_expression_error_points_into_the_file():
    with pytest.raises(ParseError) as exc:
        parse_config(cfg_text(K="N + $"))
    # K sits on line 8; the value starts at column 6 and '$' is its fifth character
    assert (exc.value.line, exc.value.column) == (8, 10)


def test_unknown_generator_in_k():
    with pytest.raises(UnknownGenerator) as exc:
        parse_config(cfg_text(K="N + e"))
    assert exc.value.line == 8


def test_toml_syntax_error_has_location():
    with pytest.raises(ParseError) as exc:
        parse_config("[algebra]\nname = gl1\n")
    assert exc.value.line == 2


@pytest.mark.parametrize(
    "text, key",
    [
        (cfg_text(checks='"pentagonn"'), "run"),
        (cfg_text(rank=5), "max_tuple_rank"),
        (cfg_text(mods="gl1_weights = []"), "gl1_weights"),
        (cfg_text().replace('name = "gl1"', 'name = "so3"'), "name"),
        (cfg_text() + "extra = 1\n", "extra"),
    ],
)
def test_invalid_fields_are_rejected(text, key):
    with pytest.raises(ParseError) as exc:
        parse_config(text)
    assert key in str(exc.value)
    assert exc.value.line is not None


def test_missing_section():
    with pytest.raises(ParseError):
        parse_config(cfg_text().replace("[checks]", "[checkz]"))


configs = st.builds(
    RunConfig,
    algebra=st.just("gl1"),
    modules=st.lists(st.integers(-5, 5), min_size=1, max_size=4).map(lambda w: ModuleSpec("gl1_weights", tuple(w))),
    K=st.sampled_from(["N", "(N^3 + 5*N)/6", "N^3 - 2*N", "N/2"]),
    gamma=st.sampled_from(["-1", "2", "1/3"]),
    checks=st.lists(st.sampled_from(CHECKS), min_size=1, max_size=4, unique=True).map(tuple),
    require_S_odd=st.booleans(),
    max_tuple_rank=st.integers(2, 4),
    max_dimension=st.integers(1, 512),
    fusion_variant=st.booleans(),
)


@settings(max_examples=50, deadline=None)
@given(configs)
def test_emit_parse_round_trip(cfg):
    again = parse_config(emit_config(cfg))
    assert again == cfg
    assert emit_config(again) == emit_config(cfg)


def test_module_file(tmp_path):
    (tmp_path / "mods.toml").write_text(
        '[[module]]\nlabel = "W"\naction.N = [["2", 0], [0, "2"]]\n', encoding="utf-8"
    )
    text = cfg_text(mods='file = "mods.toml"')
    (tmp_path / "run.cfg").write_text(text, encoding="utf-8")
    report = run(load_config(str(tmp_path / "run.cfg")))
    assert not report.halted
    assert [r.objects for r in report.results] == [("W", "W")]


# -- running -------------------------------------------------------------------

def test_empty_report_is_valid():
    report = RunReport(parse_config(cfg_text()))
    text = emit_report(report, "text", timing=False).decode()
    assert "summary: total 0  pass 0  fail 0  error 0" in text
    recs = records(emit_report(report, "jsonlike"))
    assert recs[-1] == {"record": "summary", "pass": 0, "fail": 0, "error": 0, "total": 0}


def test_single_pass_record_has_no_defect():
    report = run(parse_config(cfg_text()))
    (rec,) = [r for r in records(emit_report(report, "jsonlike")) if r["record"] == "result"]
    assert rec["status"] == "pass"
    assert "defect" not in rec
    assert list(rec) == ["record", "check_id", "objects", "bracketing", "gamma", "status", "duration_ms"]


def test_pentagon_fail_record():
    text = cfg_text(K="(N^3 + 5*N)/6", checks='"pentagon"', rank=4)
    report = run(parse_config(text))
    recs = [r for r in records(emit_report(report, "jsonlike")) if r.get("check_id") == "pentagon"]
    assert recs[0]["objects"] == ["M_1", "M_1", "M_1", "M_1"]
    assert recs[0]["status"] == "fail"
    assert recs[0]["defect"] == [["-1/1"]]


def test_rank_cap_skips_suite_with_note():
    report = run(parse_config(cfg_text(checks='"pentagon", "symmetry"', rank=3)))
    assert report.notes and "pentagon" in report.notes[0]
    assert {r.check_id for r in report.results} == {"symmetry"}


def test_dimension_cap_rejects_run():
    text = cfg_text(K="(e*f + f*e + h^2/2)/4", alg="sl2", mods="sl2_two_j = [4]", checks='"pentagon"', rank=4)
    report = run(parse_config(text))
    assert report.halted
    assert "max_dimension" in report.message
    assert report.exit_code() == 2


def test_validation_failure_halts_with_witness():
    text = cfg_text(K="(e*f + f*e + h^2/2)/4", alg="sl2", mods="sl2_two_j = [0, 1, 2]")
    report = run(parse_config(text))
    assert report.halted and report.results == []
    bad = [v for v in report.validation if not v.passed][0]
    assert bad.witness == Fraction(3, 8)
    recs = records(emit_report(report, "jsonlike"))
    assert any(r.get("witness") == "3/8" for r in recs)


def test_jobs_do_not_change_output():
    cfg = load_config(str(CONFIGS / "sl2_v1.cfg"))
    one = emit_report(run(cfg, jobs=1), "jsonlike", timing=False)
    four = emit_report(run(cfg, jobs=4), "jsonlike", timing=False)
    assert one == four


@pytest.mark.parametrize("name", ["sl2_q_square_quasi", "gl1_quasi_gamma2"])
def test_golden_reports(name):
    report = run(load_config(str(GOLDEN / f"{name}.cfg")))
    assert emit_report(report, "jsonlike", timing=False) == (GOLDEN / f"{name}.jsonl").read_bytes()


# -- command line --------------------------------------------------------------

def test_cli_check_exit_codes(tmp_path, capsys):
    cfg = str(CONFIGS / "gl1_ribbon.cfg")
    assert main(["check", cfg, "--no-timing"]) == 0
    out = capsys.readouterr().out
    assert "error 0" in out and "fail 0" in out

    text = cfg_text(K="(N^3 + 5*N)/6", checks='"pentagon"', rank=4)
    path = tmp_path / "p.cfg"
    path.write_text(text, encoding="utf-8")
    assert main(["check", str(path), "--out", str(tmp_path / "r.txt")]) == 0
    assert main(["check", str(path), "--expect-all-pass", "--out", str(tmp_path / "r.txt")]) == 1


def test_cli_validate_exit_two(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text(cfg_text(K="(e*f + f*e + h^2/2)/4", alg="sl2", mods="sl2_two_j = [1]"), encoding="utf-8")
    assert main(["validate", str(path)]) == 2
    out = capsys.readouterr().out
    assert "witness 3/8" in out


def test_cli_parse_error_exit_two(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text(cfg_text(K="N +"), encoding="utf-8")
    assert main(["check", str(path)]) == 2
    assert "line 8" in capsys.readouterr().err


def test_cli_oracle(capsys):
    assert main(["oracle-gl1", "(N^3+5*N)/6", "1", "1", "1", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "q(M_1,M_1,M_1,M_1) = gamma^(1) = -1" in out
    assert "Phi~(M_1,M_1,M_1) = gamma^(-1) = -1" in out
    assert "k(M_1) = 1" in out


def test_console_script_runs():
    res = subprocess.run(
        [sys.executable, "-m", "premon.cli", "oracle-gl1", "N^3", "2", "--gamma", "-1"],
        capture_output=True, text=True, check=True,
    )
    assert "u(M_2) = gamma^(-64) = 1" in res.stdout


def test_variant_flag_adds_results(tmp_path):
    path = tmp_path / "q.cfg"
    path.write_text(cfg_text(K="(N^3 + 5*N)/6", checks='"quasi"', rank=3), encoding="utf-8")
    out = tmp_path / "r.jsonl"
    assert main(["check", str(path), "--format", "jsonlike", "--variant-eq5", "--out", str(out)]) == 0
    ids = {r.get("check_id") for r in records(out.read_bytes())}
    assert "fusion_right_variant" in ids
