"""Command line entry point: ``premon check | validate | oracle-gl1``."""

from __future__ import annotations

import argparse
import sys

from .config import load_config
from .errors import PremonError
from .linalg import GammaValue
from .oracle import oracle_table
from .poly import parse_polynomial
from .runner import emit_report, run, validate


def _write(data: bytes, out: str | None) -> None:
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def cmd_check(args) -> int:
    cfg = load_config(args.config)
    report = run(cfg, jobs=args.jobs, variant=True if args.variant_eq5 else None)
    _write(emit_report(report, args.format, timing=not args.no_timing), args.out)
    if report.halted:
        print(f"premon: {report.message}", file=sys.stderr)
    return report.exit_code(args.expect_all_pass)


def cmd_validate(args) -> int:
    report = validate(load_config(args.config))
    _write(emit_report(report, "text", timing=False), None)
    return 2 if report.halted else 0


def cmd_oracle(args) -> int:
    K = parse_polynomial(args.K, ["N"])
    gamma = GammaValue.parse(args.gamma)
    for line in oracle_table(K, args.weights, gamma):
        objs = ",".join(f"M_{w}" for w in line.weights)
        if line.name in ("k", "kappa"):
            print(f"{line.name}({objs}) = {line.exponent}")
        else:
            print(f"{line.name}({objs}) = gamma^({line.exponent}) = {line.value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="premon", description="Exact checks of twined pre-monoidal structures.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="validate K, then run the configured check suites")
    c.add_argument("config")
    c.add_argument("--format", choices=("text", "jsonlike"), default="text")
    c.add_argument("--out", help="write the report here instead of stdout")
    c.add_argument("--jobs", type=int, default=1, help="worker threads")
    c.add_argument("--expect-all-pass", action="store_true", help="exit 1 if any check fails")
    c.add_argument("--variant-eq5", action="store_true",
                   help="also run the right fusion relation with a positive second coassociator factor")
    c.add_argument("--no-timing", action="store_true", help="zero every duration so reports compare byte for byte")
    c.set_defaults(func=cmd_check)

    v = sub.add_parser("validate", help="check the preconditions on K only")
    v.add_argument("config")
    v.set_defaults(func=cmd_validate)

    o = sub.add_parser("oracle-gl1", help="closed-form values on one-dimensional gl(1) modules")
    o.add_argument("K", help='polynomial in N, e.g. "(N^3+5*N)/6"')
    o.add_argument("weights", nargs="+", type=int)
    o.add_argument("--gamma", default="-1")
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PremonError, OSError) as exc:
        print(f"premon: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
