"""Command-line interface for dataset generation, experiments, and reports.

Exit codes: 0 success, 2 bad arguments, 3 malformed input file, 4 refused
by the enumeration size guard.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..baselines import SizeGuardError, brute_force_pareto
from ..kdma import KdmaParams
from .generator import (
    GeneratorConfig,
    config_from_json,
    generate_instances,
    generate_small_suite,
)
from .instance_io import ParseError, read_instance
from .report import emit_report
from .runner import (
    ALGORITHM_CONFIGS,
    run_ablation,
    run_experiment,
    taguchi_calibrate,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_GUARD = 4


class UsageError(ValueError):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greenflowshop",
        description="Energy-aware distributed flow-shop scheduling benchmarks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate an instance dataset")
    gen.add_argument("--config", type=Path, help="JSON file of generator overrides")
    gen.add_argument("--out", type=Path, required=True)
    gen.add_argument("--seed", type=int, required=True, help="master seed")
    gen.add_argument(
        "--suite",
        choices=("full", "small"),
        default="full",
        help="full grid (450 files) or the 10-instance small suite",
    )

    run = sub.add_parser("run", help="run algorithms over a dataset")
    run.add_argument("--instances", type=Path, required=True)
    run.add_argument(
        "--algo",
        required=True,
        help="one of %s, or a comma-separated list" % ",".join(sorted(ALGORITHM_CONFIGS)),
    )
    run.add_argument("--seeds", type=int, required=True, help="replicates per instance")
    run.add_argument("--evals", type=int, required=True, help="evaluation budget per run")
    run.add_argument("--out", type=Path, required=True)
    run.add_argument("--seed", type=int, default=0, help="master seed for run streams")
    run.add_argument("--workers", type=int, default=1)
    _add_param_options(run)

    abl = sub.add_parser("ablate", help="run the knowledge-strategy ablations")
    abl.add_argument("--instances", type=Path, required=True)
    abl.add_argument("--out", type=Path, required=True)
    abl.add_argument("--seeds", type=int, default=10)
    abl.add_argument("--evals", type=int, default=10_000)
    abl.add_argument("--seed", type=int, default=0)
    abl.add_argument("--workers", type=int, default=1)
    _add_param_options(abl)

    tune = sub.add_parser("tune", help="L16 orthogonal-array parameter calibration")
    tune.add_argument("--instances", type=Path, required=True)
    tune.add_argument("--out", type=Path, required=True)
    tune.add_argument("--replicates", type=int, default=10)
    tune.add_argument("--evals", type=int, default=25_000)
    tune.add_argument("--seed", type=int, default=0)
    tune.add_argument("--workers", type=int, default=1)

    rep = sub.add_parser("report", help="emit tables and plots from records")
    rep.add_argument("--records", type=Path, required=True)
    rep.add_argument("--out", type=Path, required=True)
    rep.add_argument("--gantt", help="draw a Gantt chart for <instance>:<seed>")
    rep.add_argument("--instances", type=Path, help="dataset directory (for --gantt)")

    oracle = sub.add_parser("oracle", help="exact Pareto front of a small instance")
    oracle.add_argument("--instance", type=Path, required=True)
    oracle.add_argument("--reduction", action="store_true", help="enable machine shutdown")
    return parser


def _add_param_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pop", type=int, default=100, help="population size")
    parser.add_argument("--pc", type=float, default=0.9, help="crossover probability")
    parser.add_argument("--pm", type=float, default=0.2, help="mutation probability")
    parser.add_argument("--tournament", type=int, default=2)
    parser.add_argument("--ls-frac", type=float, default=0.1)


def _params(args: argparse.Namespace, evals: int) -> KdmaParams:
    return KdmaParams(
        population_size=args.pop,
        crossover_prob=args.pc,
        mutation_prob=args.pm,
        tournament_size=args.tournament,
        local_search_fraction=args.ls_frac,
        max_evaluations=evals,
    )


def _instance_paths(directory: Path) -> list[Path]:
    if not directory.is_dir():
        raise UsageError(f"not a directory: {directory}")
    paths = sorted(directory.glob("*.dat"))
    if not paths:
        raise UsageError(f"no instance files (*.dat) in {directory}")
    return paths


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "generate":
        config = config_from_json(args.config) if args.config else GeneratorConfig()
        if args.suite == "small":
            paths = generate_small_suite(args.out, args.seed, config)
        else:
            paths = generate_instances(config, args.out, args.seed)
        print(f"wrote {len(paths)} instance files to {args.out}")
        return EXIT_OK

    if args.command == "run":
        algorithms = [a.strip() for a in args.algo.split(",") if a.strip()]
        for algorithm in algorithms:
            if algorithm not in ALGORITHM_CONFIGS:
                raise UsageError(f"unknown algorithm {algorithm!r}")
        if args.seeds < 1 or args.evals < 1:
            raise UsageError("--seeds and --evals must be >= 1")
        records = run_experiment(
            _instance_paths(args.instances),
            algorithms,
            args.seeds,
            _params(args, args.evals),
            args.out,
            master_seed=args.seed,
            workers=args.workers,
        )
        print(f"wrote {len(records)} run records to {args.out}")
        return EXIT_OK

    if args.command == "ablate":
        records = run_ablation(
            _instance_paths(args.instances),
            args.seeds,
            _params(args, args.evals),
            args.out,
            master_seed=args.seed,
            workers=args.workers,
        )
        print(f"wrote {len(records)} run records to {args.out}")
        return EXIT_OK

    if args.command == "tune":
        taguchi_calibrate(
            _instance_paths(args.instances),
            args.out,
            master_seed=args.seed,
            replicates=args.replicates,
            max_evaluations=args.evals,
            workers=args.workers,
        )
        print(f"wrote calibration tables to {args.out}")
        return EXIT_OK

    if args.command == "report":
        written = emit_report(args.records, args.out, gantt=args.gantt, instances_dir=args.instances)
        print(f"wrote {len(written)} report files to {args.out}")
        return EXIT_OK

    if args.command == "oracle":
        instance = read_instance(args.instance)
        front = brute_force_pareto(instance, reduction_enabled=args.reduction)
        print("makespan,ce_total")
        for ms, ce in front.objectives():
            print(f"{ms},{ce:.6f}")
        return EXIT_OK

    raise UsageError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
