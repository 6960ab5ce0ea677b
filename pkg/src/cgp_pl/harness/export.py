"""Result files: summary.json, replications.csv, chromosomes.txt and optional traces."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from ..genome import to_record
from .summary import ExperimentSummary, aggregate

ROW_FIELDS = ["replication", "seed", "solved", "evaluations", "generations",
              "final_fitness", "functional_size", "active_links"]
RECOVERY_FIELDS = ["replication", "epoch", "generations"]
TRACE_FIELDS = ["generation", "fitness", "functional_size", "mutation_rate"]


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def summary_document(summary: ExperimentSummary) -> dict:
    reps = []
    for row, rec in zip(summary.rows(), summary.records):
        reps.append({
            **row,
            "chromosome": to_record(rec.final_chromosome),
            "recovery_times": list(rec.recovery_times) if rec.recovery_times is not None else None,
        })
    return {
        "algorithm": summary.config.algorithm,
        "config": summary.config.to_dict(),
        "aggregates": summary.aggregates,
        "replications": reps,
    }


def export_results(summary: ExperimentSummary, directory: str | Path) -> list[Path]:
    out = Path(directory)
    written = [
        _write(out / "config.txt", summary.config.to_text()),
        _write(out / "summary.json", json.dumps(summary_document(summary), indent=2, sort_keys=True) + "\n"),
        _write(out / "replications.csv",
               _csv_text(ROW_FIELDS, [[_fmt(r[k]) for k in ROW_FIELDS] for r in summary.rows()])),
        _write(out / "chromosomes.txt", "".join(to_record(r.final_chromosome) + "\n" for r in summary.records)),
    ]
    recovery = summary.recovery()
    if recovery:
        written.append(_write(out / "recovery.csv",
                              _csv_text(RECOVERY_FIELDS, [[_fmt(r[k]) for k in RECOVERY_FIELDS] for r in recovery])))
    for i, rec in enumerate(summary.records):
        if rec.generation_trace:
            written.append(_write(out / "traces" / f"rep_{i:03d}.csv",
                                  _csv_text(TRACE_FIELDS, [[_fmt(v) for v in row] for row in rec.generation_trace])))
    return written


def _parse_value(key: str, raw: str):
    if key == "solved":
        return raw == "1"
    if key == "final_fitness":
        return float(raw)
    if raw == "":
        return None
    return int(raw)


def read_rows(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: _parse_value(k, v) for k, v in row.items()} for row in csv.DictReader(fh)]


def read_recovery(path: str | Path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: _parse_value(k, v) for k, v in row.items()} for row in csv.DictReader(fh)]


def aggregates_from_export(directory: str | Path) -> dict:
    """Recompute aggregates purely from the exported files."""
    out = Path(directory)
    doc = json.loads((out / "summary.json").read_text())
    rows = read_rows(out / "replications.csv")
    recovery = read_recovery(out / "recovery.csv") if (out / "recovery.csv").exists() else None
    return aggregate(rows, recovery, doc["config"]["dynamic.epoch_length"])


def format_cell(success_fraction: float, mean_evaluations: float | None) -> str:
    pct = f"{round(100 * success_fraction)}%"
    if mean_evaluations is None:
        return f"{pct} (-)"
    return f"{pct} ({round(mean_evaluations):,})".replace(",", "'")


def export_sweep(result, directory: str | Path) -> list[Path]:
    """Matrix files with rates as rows and lambdas as columns."""
    out = Path(directory)
    rows = []
    for rate in result.rates:
        for lam in result.lambdas:
            s = result.cells[(rate, lam)]
            rows.append([_fmt(rate), lam, _fmt(s.success_fraction), _fmt(s.mean_evaluations),
                         _fmt(s.median_evaluations)])
    table = ["MutRate\t" + "\t".join(f"lambda={lam}" for lam in result.lambdas)]
    for rate in result.rates:
        cells = [format_cell(result.cells[(rate, lam)].success_fraction, result.cells[(rate, lam)].mean_evaluations)
                 for lam in result.lambdas]
        table.append(f"{rate:.0%}\t" + "\t".join(cells))
    return [
        _write(out / "sweep.csv", _csv_text(["rate", "lambda", "success_fraction", "mean_evaluations",
                                             "median_evaluations"], rows)),
        _write(out / "sweep_table.txt", "\n".join(table) + "\n"),
    ]
