"""Per-replication rows and the aggregates reported for an experiment."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..selection import RunRecord
from .config import ExperimentConfig
from .stats import describe


def record_row(replication: int, rec: RunRecord) -> dict:
    return {
        "replication": replication,
        "seed": rec.seed,
        "solved": rec.solved,
        "evaluations": rec.evaluations_used,
        "generations": rec.generations_used,
        "final_fitness": rec.best_fitness.value,
        "functional_size": rec.functional_size,
        "active_links": rec.active_links,
    }


def recovery_rows(replication: int, rec: RunRecord) -> list[dict]:
    return [
        {"replication": replication, "epoch": e, "generations": g}
        for e, g in enumerate(rec.recovery_times or ())
    ]


def aggregate(rows: list[dict], recovery: list[dict] | None = None, epoch_length: int | None = None) -> dict:
    """Table-style aggregates: success share, then evaluation stats over successes only."""
    solved = [r for r in rows if r["solved"]]
    agg = {
        "replications": len(rows),
        "solved": len(solved),
        "success_fraction": len(solved) / len(rows) if rows else 0.0,
        "evaluations_solved": describe([r["evaluations"] for r in solved]),
        "generations_solved": describe([r["generations"] for r in solved]),
        "final_fitness": describe([r["final_fitness"] for r in rows]),
        "functional_size": describe([r["functional_size"] for r in rows]),
        "active_links": describe([r["active_links"] for r in rows]),
        "functional_size_solved": describe([r["functional_size"] for r in solved]),
    }
    if recovery:
        # epoch 0 is the initial solve; later epochs follow a perturbation
        times = [r["generations"] for r in recovery if r["epoch"] > 0]
        agg["recovery_generations"] = describe([epoch_length if t is None else t for t in times])
        agg["recovery_failures"] = sum(t is None for t in times)
    return agg


@dataclass
class ExperimentSummary:
    config: ExperimentConfig
    records: list[RunRecord]
    aggregates: dict = field(default_factory=dict)

    @property
    def success_fraction(self) -> float:
        return self.aggregates["success_fraction"]

    @property
    def mean_evaluations(self) -> float | None:
        return self.aggregates["evaluations_solved"]["mean"]

    @property
    def median_evaluations(self) -> float | None:
        return self.aggregates["evaluations_solved"]["median"]

    @property
    def mean_final_fitness(self) -> float | None:
        return self.aggregates["final_fitness"]["mean"]

    def rows(self) -> list[dict]:
        return [record_row(i, r) for i, r in enumerate(self.records)]

    def recovery(self) -> list[dict]:
        return [row for i, r in enumerate(self.records) for row in recovery_rows(i, r)]


def summarize(config: ExperimentConfig, records: list[RunRecord]) -> ExperimentSummary:
    summary = ExperimentSummary(config, list(records))
    summary.aggregates = aggregate(summary.rows(), summary.recovery(), config.epoch_length)
    return summary
