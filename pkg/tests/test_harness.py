import json
import random

import pytest

from cgp_pl.errors import ConfigurationError
from cgp_pl.harness.config import ExperimentConfig, replication_seed, splitmix64
from cgp_pl.harness.export import aggregates_from_export, export_results, format_cell, read_rows
from cgp_pl.harness.runner import run_replication, run_replications, sweep_grid


def small(tmp_path, **kw):
    base = dict(problem="parity", bits=3, num_nodes=20, replications=4, budget=2001, output_dir=str(tmp_path / "out"))
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_text_round_trip():
    cfg = ExperimentConfig(problem="pagie", mutation_rate=0.03, quasi_band=0.1, prefer_larger=True,
                           adaptive_mutation=True, base_seed=12345678901234)
    assert ExperimentConfig.from_text(cfg.to_text()) == cfg
    assert "selection.lambda = 4" in cfg.to_text()


def test_config_defaults_match_reference_setup():
    cfg = ExperimentConfig()
    assert (cfg.num_nodes, cfg.lam, cfg.mutation_rate, cfg.replications, cfg.budget) == (100, 4, 0.02, 30, 1_000_000)
    assert (cfg.epochs, cfg.epoch_length) == (10, 100_000)


def test_config_errors():
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_text("selection.lambda = four")
    with pytest.raises(ConfigurationError):
        ExperimentConfig.from_text("nonsense.key = 1")
    with pytest.raises(ConfigurationError):
        ExperimentConfig(problem="tsp")
    with pytest.raises(ConfigurationError):
        ExperimentConfig(quasi_band=0.1)


def test_config_comments_and_underscores():
    cfg = ExperimentConfig.from_text("# header\nrun.budget = 1_000_000  # full scale\nselection.pl = 1\n".replace(
        "selection.pl", "selection.prefer_larger"))
    assert cfg.budget == 1_000_000 and cfg.prefer_larger


def test_with_algorithm():
    cfg = ExperimentConfig(mutation_rate=0.03).with_algorithm("ES-PLQS-AM")
    assert cfg.algorithm == "ES-PLQS-AM" and cfg.mutation_rate == 0.03


def test_seed_derivation():
    assert splitmix64(0) == 0xE220A8397B1DCDAF  # published splitmix64 first output for state 0
    seeds = {replication_seed(7, i) for i in range(1000)}
    assert len(seeds) == 1000
    assert replication_seed(7, 3) == replication_seed(7, 3) != replication_seed(8, 3)


def test_run_replications_deterministic(tmp_path):
    a = run_replications(small(tmp_path / "a"))
    b = run_replications(small(tmp_path / "b"))
    assert a.aggregates == b.aggregates
    assert (tmp_path / "a/out/replications.csv").read_bytes() == (tmp_path / "b/out/replications.csv").read_bytes()


def test_base_seed_changes_runs_not_echo(tmp_path):
    a = run_replications(small(tmp_path, base_seed=1), write=False)
    b = run_replications(small(tmp_path, base_seed=2), write=False)
    assert [r.seed for r in a.records] != [r.seed for r in b.records]
    echo_a = {k: v for k, v in a.config.to_dict().items() if k != "run.base_seed"}
    echo_b = {k: v for k, v in b.config.to_dict().items() if k != "run.base_seed"}
    assert echo_a == echo_b


def test_parallel_matches_serial(tmp_path):
    serial = run_replications(small(tmp_path, replications=3), write=False)
    parallel = run_replications(small(tmp_path, replications=3, workers=2), write=False)
    assert serial.aggregates == parallel.aggregates


def test_export_round_trip(tmp_path):
    cfg = small(tmp_path, replications=30, budget=401, trace_every=10)
    summary = run_replications(cfg)
    out = tmp_path / "out"
    rows = read_rows(out / "replications.csv")
    assert len(rows) == 30
    assert (out / "replications.csv").read_text().count("\n") == 31
    assert aggregates_from_export(out) == summary.aggregates
    doc = json.loads((out / "summary.json").read_text())
    assert doc["config"]["run.replications"] == 30 and len(doc["replications"]) == 30
    assert len(list((out / "traces").glob("rep_*.csv"))) == 30
    before = {p.name: p.read_bytes() for p in out.rglob("*") if p.is_file()}
    export_results(summary, out)
    after = {p.name: p.read_bytes() for p in out.rglob("*") if p.is_file()}
    assert before == after


def test_dynamic_export(tmp_path):
    cfg = small(tmp_path, problem="dynamic", bits=3, replications=2, epochs=3, epoch_length=200, k_flips=2)
    summary = run_replications(cfg)
    assert (tmp_path / "out/recovery.csv").read_text().count("\n") == 1 + 2 * 3
    assert aggregates_from_export(tmp_path / "out") == summary.aggregates
    assert "recovery_generations" in summary.aggregates


def test_aggregate_over_successes_only(tmp_path):
    summary = run_replications(small(tmp_path, replications=6, budget=801), write=False)
    solved = [r for r in summary.records if r.solved]
    assert summary.success_fraction == len(solved) / 6
    if solved:
        assert summary.mean_evaluations == pytest.approx(sum(r.evaluations_used for r in solved) / len(solved))


def test_budget_of_one_generation_rarely_solves(tmp_path):
    summary = run_replications(small(tmp_path, bits=8, num_nodes=100, replications=5, budget=4), write=False)
    assert summary.success_fraction == 0.0
    assert all(r.generations_used == 0 for r in summary.records)


def test_sweep_grid(tmp_path):
    cfg = small(tmp_path, replications=2, budget=401)
    res = sweep_grid(cfg, [1, 4], [0.02, 0.04])
    assert len(res.cells) == 4
    lines = (tmp_path / "out/sweep.csv").read_text().splitlines()
    assert [l.split(",")[:2] for l in lines[1:]] == [["0.02", "1"], ["0.02", "4"], ["0.04", "1"], ["0.04", "4"]]
    assert res.best_cell() in res.cells


def test_single_cell_sweep_equals_run(tmp_path):
    cfg = small(tmp_path, replications=2, budget=401)
    res = sweep_grid(cfg, [4], [0.02], write=False)
    assert res.cells[(0.02, 4)].aggregates == run_replications(cfg, write=False).aggregates


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError):
        run_replications(small(tmp_path, output_dir=str(blocker / "sub")))


def test_format_cell():
    assert format_cell(0.8, 274560.0) == "80% (274'560)"
    assert format_cell(0.0, None) == "0% (-)"


def test_pagie_replication_runs(tmp_path):
    rec = run_replication(small(tmp_path, problem="pagie", budget=201, mutation_rate=0.03), 0)
    assert rec.best_fitness.direction == "minimize" and rec.evaluations_used == 201
