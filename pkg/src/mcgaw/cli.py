"""Command-line front end.

Exit status: 0 success, 1 invalid input or flags, 2 runtime failure,
3 when ``check`` ran but the pass criterion was not met.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import McgError, SchemaError, ValidationError, canonical_json
from .generate import CONSTRAINTS, OBJECTIVES, SIGNS, generate_instance
from .instance import load_instance, serialize_instance
from .solver import MODES, SolverConfig, SolverTrace, solve, solve_report
from .verify import brute_force_opt, check_guarantee

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2
EXIT_CHECK_FAILED = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _config(args) -> SolverConfig:
    return SolverConfig(eps=args.eps, delta=args.delta, d=args.d, mode=args.mode, seed=args.seed)


def cmd_gen(args) -> int:
    spec = generate_instance(args.n, args.objective, args.constraint, seed=args.seed, signs=args.signs)
    _write(args.out, serialize_instance(spec))
    return EXIT_OK


def cmd_solve(args) -> int:
    config = _config(args)
    instance = load_instance(args.instance)
    result = solve(instance, config)
    report = solve_report(instance, result)
    if args.report:
        _write(args.report, canonical_json(report))
    if args.trace:
        _write(args.trace, result.trace.to_csv())
    summary = {k: report[k] for k in ("F_estimate", "L_value", "value", "steps", "sample_count", "x_final")}
    sys.stdout.write(canonical_json(summary))
    return EXIT_OK


def cmd_exact(args) -> int:
    instance = load_instance(args.instance)
    cert = brute_force_opt(instance)
    sys.stdout.write(canonical_json(cert.to_dict()))
    return EXIT_OK


def cmd_check(args) -> int:
    config = _config(args)
    instance = load_instance(args.instance)
    report = check_guarantee(instance, config, trials=args.trials)
    text = canonical_json(report.to_dict())
    _write(args.report, text)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_trace(args) -> int:
    with open(args.report, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"report: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "trace" not in doc:
        raise SchemaError("report: no 'trace' key; expected a report written by 'solve --report'")
    _write(args.out, SolverTrace.from_dict(doc["trace"]).to_csv())
    return EXIT_OK


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eps", type=float, default=0.3, help="accuracy parameter in (0, 1]")
    p.add_argument("--mode", choices=MODES, default="sampled", help="gradient estimator")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=int, default=None, help="override the per-round sample count")
    p.add_argument("--delta", type=float, default=None, help="override the step size (1/delta must be an integer)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mcgaw", description="Measured continuous greedy with adaptive weights.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a random instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--objective", choices=OBJECTIVES, default="cut")
    p.add_argument("--constraint", choices=CONSTRAINTS, default="cardinality")
    p.add_argument("--signs", choices=SIGNS, default="mixed", help="sign pattern of the modular weights")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run the solver on an instance")
    p.add_argument("instance")
    _solver_flags(p)
    p.add_argument("--trace", default=None, help="write the per-round trace as CSV")
    p.add_argument("--report", default=None, help="write the full JSON report")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("exact", help="print the brute-force optimum certificate")
    p.add_argument("instance")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("check", help="check the approximation guarantee over several seeds")
    p.add_argument("instance")
    _solver_flags(p)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--report", default=None, help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("trace", help="re-emit a stored solve report's trajectory as CSV")
    p.add_argument("report")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_trace)
    return parser


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "trials", 1) < 1:
            raise ValidationError("--trials must be >= 1")
        return args.func(args)
    except (SchemaError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID if isinstance(exc, FileNotFoundError) else EXIT_RUNTIME
    except (McgError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
