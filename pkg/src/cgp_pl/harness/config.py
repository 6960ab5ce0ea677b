"""Experiment configuration and its flat ``section.key = value`` text format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

from ..errors import ConfigurationError
from ..genome import GenomeSpec
from ..selection import SelectionPolicy

MASK64 = (1 << 64) - 1

PROBLEMS = ("parity", "dynamic", "pagie")


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str = "parity"
    bits: int = 6
    pagie_mode: str = "random"
    num_nodes: int = 100
    lam: int = 4
    prefer_larger: bool = False
    quasi_band: float = 0.0
    adaptive_mutation: bool = False
    mutation_rate: float = 0.02
    rate_min: float = 0.0005
    rate_max: float = 0.25
    replications: int = 30
    budget: int = 1_000_000
    base_seed: int = 0
    workers: int = 1
    output_dir: str = "results"
    trace_every: int = 0
    epochs: int = 10
    epoch_length: int = 100_000
    k_flips: int = 4

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ConfigurationError(f"problem must be one of {PROBLEMS}, got {self.problem!r}")
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        if self.trace_every < 0:
            raise ConfigurationError("trace_every must be >= 0")
        # validate eagerly so bad configs fail before any run starts
        self.genome_spec()
        self.policy()

    @property
    def num_inputs(self) -> int:
        return 2 if self.problem == "pagie" else self.bits

    def genome_spec(self) -> GenomeSpec:
        fs = "real" if self.problem == "pagie" else "boolean"
        return GenomeSpec(self.num_inputs, self.num_nodes, 1, fs)

    def policy(self) -> SelectionPolicy:
        return SelectionPolicy(
            lam=self.lam,
            prefer_larger=self.prefer_larger,
            quasi_band=self.quasi_band,
            adaptive_mutation=self.adaptive_mutation,
            initial_mutation_rate=self.mutation_rate,
            rate_bounds=(self.rate_min, self.rate_max),
        )

    @property
    def algorithm(self) -> str:
        return self.policy().name

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def with_algorithm(self, name: str) -> "ExperimentConfig":
        p = SelectionPolicy.from_name(name, initial_mutation_rate=self.mutation_rate,
                                      rate_bounds=(self.rate_min, self.rate_max), lam=self.lam)
        return self.replace(prefer_larger=p.prefer_larger, quasi_band=p.quasi_band,
                            adaptive_mutation=p.adaptive_mutation)

    def seed(self, replication: int) -> int:
        return replication_seed(self.base_seed, replication)

    def to_dict(self) -> dict:
        return {KEYS[f.name]: getattr(self, f.name) for f in fields(self)}

    def to_text(self) -> str:
        return "".join(f"{k} = {_format(v)}\n" for k, v in self.to_dict().items())

    @classmethod
    def from_text(cls, text: str, base: "ExperimentConfig | None" = None) -> "ExperimentConfig":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            if key not in FIELDS:
                raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
            values[FIELDS[key]] = value
        return (base or cls()).with_strings(values)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from None
        return cls.from_text(text)

    def with_strings(self, values: dict[str, str]) -> "ExperimentConfig":
        """Override fields from raw strings, coercing to each field's type."""
        types = {f.name: type(getattr(self, f.name)) for f in fields(self)}
        changes = {}
        for name, raw in values.items():
            changes[name] = _coerce(name, raw, types[name])
        return self.replace(**changes)


# field name -> dotted key in config files
KEYS = {
    "problem": "problem.kind",
    "bits": "problem.bits",
    "pagie_mode": "problem.pagie_mode",
    "num_nodes": "genome.nodes",
    "lam": "selection.lambda",
    "prefer_larger": "selection.prefer_larger",
    "quasi_band": "selection.quasi_band",
    "adaptive_mutation": "selection.adaptive_mutation",
    "mutation_rate": "selection.mutation_rate",
    "rate_min": "selection.rate_min",
    "rate_max": "selection.rate_max",
    "replications": "run.replications",
    "budget": "run.budget",
    "base_seed": "run.base_seed",
    "workers": "run.workers",
    "output_dir": "run.output_dir",
    "trace_every": "run.trace_every",
    "epochs": "dynamic.epochs",
    "epoch_length": "dynamic.epoch_length",
    "k_flips": "dynamic.k_flips",
}
FIELDS = {v: k for k, v in KEYS.items()}


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _coerce(name: str, raw, typ):
    if not isinstance(raw, str):
        return typ(raw)
    try:
        if typ is bool:
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if typ is int:
            return int(raw.replace("_", "").replace("'", ""))
        return typ(raw)
    except ValueError:
        raise ConfigurationError(f"bad value for {KEYS[name]}: {raw!r}") from None


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def replication_seed(base_seed: int, replication: int) -> int:
    return splitmix64(splitmix64(base_seed & MASK64) ^ replication)
