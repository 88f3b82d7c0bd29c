"""Command line entry point: ``rolloutmix {validate,predict,simulate,enumerate,payoff}``."""
from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from .errors import ResourceGuardError, RolloutMixError, ValidationError
from .experiment import MODES, ExperimentConfig, render_report, run_experiment
from .problem_io import load_problem, load_schemata, parse_schema, read_document, check_schema


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rolloutmix", description=__doc__)
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        p = sub.add_parser(mode)
        p.add_argument("--input", required=True, type=Path, help="problem JSON document")
        p.add_argument("--schema-file", type=Path,
                       help="JSON list of schemata (or a document with a 'schemata' field)")
        p.add_argument("--schema", action="append", default=[],
                       help="schema such as 'beta,4,7,5,f2' or '#'; repeatable")
        p.add_argument("--steps", type=int, default=10_000, help="chain length t")
        p.add_argument("--inflation", type=_int_list, default=[1],
                       help="inflation factors, e.g. 1,2,4,8")
        p.add_argument("--replicas", type=int, default=1)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--p-identity", default="1/2", help="identity probability as p/q")
        p.add_argument("--height-cap", type=int, default=None)
        p.add_argument("--class-bound", type=int, default=10**6)
        p.add_argument("--burn-in", type=int, default=0)
        p.add_argument("--batches", type=int, default=0,
                       help="batches per run for batch-means standard errors")
        p.add_argument("--samples", type=int, default=100_000, help="payoff Monte Carlo draws")
        p.add_argument("--workers", type=int, default=1, help="processes for replicas")
        p.add_argument("--output", type=Path, help="report path (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        problem = load_problem(args.input)
        if args.schema_file is not None:
            schemata = load_schemata(args.schema_file, problem)
        elif args.schema:
            schemata = [check_schema(parse_schema(s, f"--schema {s}"), problem)
                        for s in args.schema]
        else:
            schemata = load_schemata(read_document(args.input), problem)
        config = ExperimentConfig(
            mode=args.mode, inflation_levels=args.inflation, steps=args.steps,
            replicas=args.replicas, seed=args.seed, height_cap=args.height_cap,
            class_size_bound=args.class_bound, p_identity=args.p_identity,
            burn_in=args.burn_in, batches=args.batches, samples=args.samples,
            workers=args.workers,
        )
        report = run_experiment(problem, config, schemata)
        report.meta["input_sha256"] = hashlib.sha256(args.input.read_bytes()).hexdigest()
        text = render_report(report, args.format)
        if args.output is None:
            sys.stdout.write(text)
        else:
            args.output.write_bytes(text.encode())
    except ResourceGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RolloutMixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
