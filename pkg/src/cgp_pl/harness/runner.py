"""Replication driver, aggregation and parameter sweeps."""

from __future__ import annotations

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..problems import BooleanProblem, pagie_dataset
from ..selection import GenerationInfo, RunRecord, evolve, evolve_dynamic
from .config import ExperimentConfig
from .export import export_results, export_sweep
from .summary import ExperimentSummary, summarize

log = logging.getLogger(__name__)


def make_problem(config: ExperimentConfig, rng: random.Random):
    """Problem instance for one replication; random parts draw from ``rng``."""
    if config.problem == "parity":
        return BooleanProblem.parity(config.bits)
    if config.problem == "dynamic":
        return BooleanProblem.dynamic(config.bits, rng)
    return pagie_dataset(rng, config.pagie_mode)


def run_replication(config: ExperimentConfig, replication: int) -> RunRecord:
    seed = config.seed(replication)
    rng = random.Random(seed)
    problem = make_problem(config, rng)
    rows: list = []
    observer = None
    if config.trace_every:
        every = config.trace_every

        def observer(info: GenerationInfo):
            if info.generation % every == 0:
                s = info.survivor
                rows.append((info.generation, info.values[s], info.sizes[s], info.rate))

    if config.problem == "dynamic":
        rec = evolve_dynamic(problem, config.genome_spec(), config.policy(), config.epochs,
                             config.epoch_length, config.k_flips, rng, observer, seed=seed)
    else:
        rec = evolve(problem, config.genome_spec(), config.policy(), config.budget, rng, observer, seed=seed)
    rec.generation_trace = rows
    log.info("%s rep %d: solved=%s evals=%d fitness=%r size=%d", rec.policy, replication,
             rec.solved, rec.evaluations_used, rec.best_fitness.value, rec.functional_size)
    return rec


def run_replications(config: ExperimentConfig, write: bool = True) -> ExperimentSummary:
    if write:
        # fail on an unusable output directory before spending any compute
        Path(config.output_dir).mkdir(parents=True, exist_ok=True)
    reps = range(config.replications)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(run_replication, [config] * len(reps), reps))
    else:
        records = [run_replication(config, i) for i in reps]
    summary = summarize(config, records)
    if write:
        export_results(summary, config.output_dir)
    return summary


@dataclass
class SweepResult:
    lambdas: list[int]
    rates: list[float]
    cells: dict  # (rate, lam) -> ExperimentSummary

    def best_cell(self) -> tuple[float, int]:
        """Highest success share; ties broken by fewer mean evaluations."""
        def key(cell):
            s = self.cells[cell]
            return (-s.success_fraction, s.mean_evaluations if s.mean_evaluations is not None else float("inf"))

        return min(self.cells, key=key)


def cell_dir(rate: float, lam: int) -> str:
    return f"rate_{rate:g}_lambda_{lam}"


def sweep_grid(base: ExperimentConfig, lambdas: list[int], rates: list[float], write: bool = True) -> SweepResult:
    if not lambdas or not rates:
        raise ValueError("lambdas and rates must be non-empty")
    cells = {}
    for rate in rates:
        for lam in lambdas:
            cfg = base.replace(lam=lam, mutation_rate=rate,
                               output_dir=str(Path(base.output_dir) / cell_dir(rate, lam)))
            cells[(rate, lam)] = run_replications(cfg, write=write)
    result = SweepResult(list(lambdas), list(rates), cells)
    if write:
        export_sweep(result, base.output_dir)
    return result
