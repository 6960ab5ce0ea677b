"""Benchmark problems: even parity, dynamic binary classification, Pagie regression."""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigurationError
from .execute import BooleanPatterns, OutputTable, RealSamples, run_boolean_packed, run_real

MAXIMIZE = "maximize"
MINIMIZE = "minimize"

PAGIE_SAMPLES = 676
PAGIE_RANGE = 5.0
PAGIE_MIN_ABS = 1e-6
REGRESSION_TOLERANCE = 1e-4


@dataclass(frozen=True, order=False)
class Fitness:
    value: float
    direction: str = MAXIMIZE

    def better_than(self, other: "Fitness") -> bool:
        if self.direction == MAXIMIZE:
            return self.value > other.value
        return self.value < other.value

    def at_least(self, other: "Fitness") -> bool:
        """True when ``self`` is equal to or better than ``other``."""
        if self.direction == MAXIMIZE:
            return self.value >= other.value
        return self.value <= other.value


def pack_bits(bits: Sequence[int]) -> int:
    v = 0
    for j, b in enumerate(bits):
        if b:
            v |= 1 << j
    return v


def unpack_bits(v: int, n: int) -> tuple[int, ...]:
    return tuple((v >> j) & 1 for j in range(n))


def parity_targets(n: int) -> tuple[int, ...]:
    """Even-parity truth table: bit ``j`` is 1 iff ``popcount(j)`` is even."""
    if not 2 <= n <= 16:
        raise ConfigurationError(f"parity size must be in [2, 16], got {n}")
    return tuple(1 - (j.bit_count() & 1) for j in range(1 << n))


def dynamic_targets(num_inputs: int, rng: random.Random) -> tuple[int, ...]:
    if num_inputs < 1:
        raise ConfigurationError("dynamic problem needs at least one input")
    return unpack_bits(rng.getrandbits(1 << num_inputs), 1 << num_inputs)


def perturb_targets(targets: Sequence[int], k: int, rng: random.Random) -> tuple[int, ...]:
    """Flip exactly ``k`` distinct, uniformly chosen target bits."""
    if not 1 <= k <= len(targets):
        raise ConfigurationError(f"flip count must be in [1, {len(targets)}], got {k}")
    out = list(targets)
    for p in rng.sample(range(len(out)), k):
        out[p] ^= 1
    return tuple(out)


def fitness_boolean(outputs: OutputTable | Sequence[int], targets: Sequence[int]) -> Fitness:
    """F = 1 - (1/2^n) * sum_j |O_j - E_j| for a single-output table."""
    if isinstance(outputs, OutputTable):
        if len(outputs.columns) != 1:
            raise ValueError("boolean fitness expects a single-output table")
        bits = unpack_bits(outputs.columns[0], outputs.num_rows)
    else:
        bits = tuple(outputs)
    if len(bits) != len(targets):
        raise ValueError(f"length mismatch: {len(bits)} outputs vs {len(targets)} targets")
    wrong = sum(abs(o - e) for o, e in zip(bits, targets))
    return Fitness(1.0 - wrong / len(targets), MAXIMIZE)


class BooleanProblem:
    """Single-output boolean classification over all input patterns."""

    direction = MAXIMIZE
    function_set_id = "boolean"
    num_outputs = 1

    def __init__(self, num_inputs: int, targets: Sequence[int], kind: str = "parity"):
        if len(targets) != 1 << num_inputs:
            raise ConfigurationError(f"need {1 << num_inputs} targets, got {len(targets)}")
        self.num_inputs = num_inputs
        self.kind = kind
        self.targets = tuple(int(t) for t in targets)
        self.source = BooleanPatterns(num_inputs)
        self.packed_targets = pack_bits(self.targets)
        self.num_rows = self.source.num_rows

    @classmethod
    def parity(cls, n: int) -> "BooleanProblem":
        return cls(n, parity_targets(n), "parity")

    @classmethod
    def dynamic(cls, num_inputs: int, rng: random.Random) -> "BooleanProblem":
        return cls(num_inputs, dynamic_targets(num_inputs, rng), "dynamic")

    def with_targets(self, targets: Sequence[int]) -> "BooleanProblem":
        return BooleanProblem(self.num_inputs, targets, self.kind)

    def error_count(self, genes, active, num_nodes: int) -> int:
        src = self.source
        out = run_boolean_packed(genes, active, self.num_inputs, num_nodes, src.masks, src.full)[0]
        return (out ^ self.packed_targets).bit_count()

    def fitness_value(self, genes, active, num_nodes: int) -> float:
        return 1.0 - self.error_count(genes, active, num_nodes) / self.num_rows

    def fitness_of_table(self, table: OutputTable) -> Fitness:
        return fitness_boolean(table, self.targets)

    def is_optimal(self, value: float) -> bool:
        return value == 1.0

    def worst(self) -> float:
        return 0.0


def pagie_value(x1: float, x2: float) -> float:
    if x1 == 0 or x2 == 0:
        raise ZeroDivisionError("Pagie function is singular at a zero coordinate")
    return 1.0 / (1.0 + x1**-4) + 1.0 / (1.0 + x2**-4)


def _draw_coordinate(rng: random.Random) -> float:
    while True:
        x = rng.uniform(-PAGIE_RANGE, PAGIE_RANGE)
        if abs(x) >= PAGIE_MIN_ABS:
            return x


class RegressionProblem:
    """Symbolic regression scored by the sum of absolute errors."""

    direction = MINIMIZE
    function_set_id = "real"
    num_outputs = 1
    kind = "pagie"

    def __init__(self, samples, targets):
        self.samples = np.asarray(samples, dtype=np.float64)
        self.targets = np.asarray(targets, dtype=np.float64)
        if self.samples.shape[0] != self.targets.shape[0]:
            raise ConfigurationError("samples and targets differ in length")
        self.source = RealSamples(self.samples)
        self.num_inputs = self.source.num_inputs
        self.num_rows = self.source.num_rows

    def fitness_value(self, genes, active, num_nodes: int) -> float:
        out = run_real(genes, active, self.num_inputs, num_nodes, self.source.columns)[0]
        return _abs_error(out, self.targets)

    def fitness_of_table(self, table: OutputTable) -> Fitness:
        return regression_error(table, self)

    def is_optimal(self, value: float) -> bool:
        return value < REGRESSION_TOLERANCE

    def worst(self) -> float:
        return math.inf

    def export_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{k + 1}" for k in range(self.num_inputs)] + ["target"])
            for row, t in zip(self.samples.tolist(), self.targets.tolist()):
                w.writerow([repr(v) for v in row] + [repr(t)])


def _abs_error(out, targets: np.ndarray) -> float:
    with np.errstate(all="ignore"):
        diff = np.abs(np.asarray(out, dtype=np.float64) - targets)
        total = float(diff.sum()) if diff.ndim else float(diff) * targets.shape[0]
    return total if math.isfinite(total) else math.inf


def regression_error(outputs: OutputTable | Sequence[float], problem: RegressionProblem) -> Fitness:
    """Sum of absolute errors; any non-finite output scores +inf."""
    if isinstance(outputs, OutputTable):
        out = outputs.columns[0]
    else:
        out = np.asarray(outputs, dtype=np.float64)
    if np.shape(out) != problem.targets.shape:
        raise ValueError(f"expected {problem.targets.shape[0]} outputs")
    return Fitness(_abs_error(out, problem.targets), MINIMIZE)


def pagie_dataset(rng: random.Random, mode: str = "random", n: int = PAGIE_SAMPLES) -> RegressionProblem:
    """Pagie samples over [-5, 5]^2, uniform random (default) or a 26x26 grid."""
    if mode == "random":
        xs = [(_draw_coordinate(rng), _draw_coordinate(rng)) for _ in range(n)]
    elif mode == "grid":
        side = math.isqrt(n)
        if side * side != n:
            raise ConfigurationError("grid mode needs a square sample count")
        axis = np.linspace(-PAGIE_RANGE, PAGIE_RANGE, side).tolist()
        xs = [(a, b) for a in axis for b in axis]
    else:
        raise ConfigurationError(f"unknown Pagie dataset mode {mode!r}")
    return RegressionProblem(xs, [pagie_value(a, b) for a, b in xs])


def load_regression_csv(path: str | Path) -> RegressionProblem:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return RegressionProblem(data[:, :-1], data[:, -1])
