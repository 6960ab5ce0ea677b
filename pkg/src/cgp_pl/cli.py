"""Command line entry point: run, sweep, dynamic, analyze, stats, dataset."""

from __future__ import annotations

import argparse
import csv
import logging
import random
import sys
from pathlib import Path

from .analysis import robustness_probe, size_report, variability_walk
from .errors import ConfigurationError, InputError
from .genome import load_chromosomes
from .harness.config import ExperimentConfig, replication_seed
from .harness.export import format_cell, read_rows
from .harness.runner import run_replications, sweep_grid
from .harness.stats import mann_whitney_u
from .problems import BooleanProblem, load_regression_csv, pagie_dataset

EXIT_CONFIG = 2
EXIT_IO = 3

# CLI flag -> config field
OVERRIDES = {
    "problem": "problem",
    "bits": "bits",
    "pagie_mode": "pagie_mode",
    "nodes": "num_nodes",
    "seed": "base_seed",
    "reps": "replications",
    "budget": "budget",
    "lam": "lam",
    "mut_rate": "mutation_rate",
    "pl": "prefer_larger",
    "quasi_band": "quasi_band",
    "am": "adaptive_mutation",
    "workers": "workers",
    "out": "output_dir",
    "trace_every": "trace_every",
    "epochs": "epochs",
    "epoch_length": "epoch_length",
    "k_flips": "k_flips",
}


def _experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="flat 'section.key = value' config file")
    p.add_argument("--algorithm", help="preset such as ES, ES-PL, ES-PLQS-AM")
    p.add_argument("--problem", choices=["parity", "dynamic", "pagie"])
    p.add_argument("--bits", type=int, help="parity size / dynamic input count")
    p.add_argument("--pagie-mode", choices=["random", "grid"])
    p.add_argument("--nodes", type=int)
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--reps", type=int)
    p.add_argument("--budget", type=int)
    p.add_argument("--lambda", dest="lam", type=int)
    p.add_argument("--mut-rate", type=float)
    p.add_argument("--pl", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--quasi-band", type=float)
    p.add_argument("--am", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--trace-every", type=int, help="write a trace row every N generations")


def build_config(args: argparse.Namespace, **forced) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.algorithm:
        config = config.with_algorithm(args.algorithm)
    changes = {}
    for flag, name in OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    changes.update(forced)
    return config.replace(**changes)


def _print_summary(summary) -> None:
    agg = summary.aggregates
    print(f"{summary.config.algorithm}: {format_cell(agg['success_fraction'], agg['evaluations_solved']['mean'])}"
          f" solved {agg['solved']}/{agg['replications']}, mean final fitness {agg['final_fitness']['mean']!r},"
          f" median functional size {agg['functional_size']['median']}")
    if "recovery_generations" in agg:
        rec = agg["recovery_generations"]
        print(f"recovery generations: mean {rec['mean']!r} median {rec['median']!r}"
              f" (failures {agg['recovery_failures']})")
    print(f"results written to {summary.config.output_dir}")


def cmd_run(args) -> int:
    _print_summary(run_replications(build_config(args)))
    return 0


def cmd_dynamic(args) -> int:
    forced = {"problem": "dynamic"}
    if args.bits is None and not args.config:
        forced["bits"] = 5
    config = build_config(args, **forced)
    _print_summary(run_replications(config))
    return 0


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def cmd_sweep(args) -> int:
    config = build_config(args)
    result = sweep_grid(config, args.lambdas, args.rates)
    print((Path(config.output_dir) / "sweep_table.txt").read_text(), end="")
    rate, lam = result.best_cell()
    print(f"best cell: lambda={lam} rate={rate:g}")
    return 0


def _analysis_problem(args, spec):
    if spec.function_set_id == "boolean":
        return BooleanProblem.parity(spec.num_inputs)
    if args.dataset:
        return load_regression_csv(args.dataset)
    return pagie_dataset(random.Random(args.dataset_seed), args.pagie_mode)


def cmd_analyze(args) -> int:
    fields = ["file", "index", "seed", "functional_size", "active_links", "samples",
              "fitness_preserved_fraction", "functional_change_fraction", "preserved_given_functional_change",
              "behavioral_change_fraction", "preserved_given_behavioral_change",
              "walk_steps", "unique_behaviors", "accepted_steps"]
    rows = []
    for path in args.chromosomes:
        for i, chrom in enumerate(load_chromosomes(path)):
            problem = _analysis_problem(args, chrom.spec)
            seed = replication_seed(args.seed, i)
            rng = random.Random(seed)
            size, links = size_report(chrom)
            rob = robustness_probe(chrom, problem, args.rate, args.samples, rng)
            walk = variability_walk(chrom, problem, args.steps, rng) if args.steps else None
            rows.append([str(path), i, seed, size, links, rob.samples, rob.fitness_preserved_fraction,
                         rob.functional_change_fraction, rob.preserved_given_functional_change,
                         rob.behavioral_change_fraction, rob.preserved_given_behavioral_change,
                         walk.steps if walk else "", walk.unique_behaviors if walk else "",
                         walk.accepted_steps if walk else ""])
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(fields)
        w.writerows([["" if v is None else v for v in r] for r in rows])
    finally:
        if args.out:
            out.close()
    return 0


def cmd_stats(args) -> int:
    samples = []
    for path in (args.a, args.b):
        rows = read_rows(path)
        if args.solved_only:
            rows = [r for r in rows if r["solved"]]
        samples.append([r[args.column] for r in rows])
    res = mann_whitney_u(samples[0], samples[1])
    print(f"column={args.column} n_a={len(samples[0])} n_b={len(samples[1])} U={res.u:g} p={res.p:.6g} ({res.method})")
    return 0


def cmd_dataset(args) -> int:
    problem = pagie_dataset(random.Random(args.seed), args.mode)
    problem.export_csv(args.out)
    print(f"wrote {problem.num_rows} samples to {args.out}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cgp-pl", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment")
    _experiment_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="grid over lambda and mutation rate")
    _experiment_args(p)
    p.add_argument("--lambdas", type=_int_list, default=[1, 4, 7, 9, 19, 49])
    p.add_argument("--rates", type=_float_list, default=[0.01, 0.02, 0.04])
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("dynamic", help="dynamic classification schedule")
    _experiment_args(p)
    p.add_argument("--epochs", type=int)
    p.add_argument("--epoch-length", type=int, help="generations per epoch")
    p.add_argument("--k-flips", type=int, help="targets flipped per epoch")
    p.set_defaults(func=cmd_dynamic)

    p = sub.add_parser("analyze", help="robustness and variability of saved chromosomes")
    p.add_argument("chromosomes", nargs="+", type=Path)
    p.add_argument("--rate", type=float, default=0.02)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--steps", type=int, default=2000, help="random-walk steps (0 disables)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dataset", type=Path, help="regression dataset CSV for real-valued genomes")
    p.add_argument("--dataset-seed", type=int, default=0)
    p.add_argument("--pagie-mode", choices=["random", "grid"], default="random")
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("stats", help="Mann-Whitney U test on two replications.csv files")
    p.add_argument("a", type=Path)
    p.add_argument("b", type=Path)
    p.add_argument("--column", default="evaluations",
                   choices=["evaluations", "generations", "final_fitness", "functional_size", "active_links"])
    p.add_argument("--solved-only", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("dataset", help="write a Pagie dataset as CSV")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["random", "grid"], default="random")
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=cmd_dataset)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
