"""Program interpreter for decoded CGP chromosomes.

Boolean programs run bit-parallel: the value of a node over all ``2**n`` input
patterns is one Python int whose bit ``j`` is the value on pattern ``j``.
Real programs run vectorised over dataset samples with numpy.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .functions import DIV_EPSILON, get_function_set
from .genome import Chromosome, Phenotype, decode


@lru_cache(maxsize=32)
def input_masks(num_inputs: int) -> tuple[int, ...]:
    """Packed truth-table columns of the inputs.

    Pattern ``j`` assigns input ``k`` the bit ``(j >> (num_inputs-1-k)) & 1``,
    i.e. input 0 is the most significant digit of the pattern index.
    """
    n_rows = 1 << num_inputs
    masks = []
    for k in range(num_inputs):
        shift = num_inputs - 1 - k
        m = 0
        for j in range(n_rows):
            if (j >> shift) & 1:
                m |= 1 << j
        masks.append(m)
    return tuple(masks)


def pattern(num_inputs: int, j: int) -> tuple[int, ...]:
    return tuple((j >> (num_inputs - 1 - k)) & 1 for k in range(num_inputs))


def run_boolean_packed(
    genes: Sequence[int],
    active: Sequence[int],
    num_inputs: int,
    num_nodes: int,
    masks: Sequence[int],
    full: int,
) -> list[int]:
    """Evaluate the active nodes; returns one packed column per output."""
    values = list(masks)
    values.extend([0] * num_nodes)
    for i in active:
        g = 3 * i
        f = genes[g]
        a = values[genes[g + 1]]
        b = values[genes[g + 2]]
        if f == 0:
            v = a & b
        elif f == 1:
            v = (a & b) ^ full
        elif f == 2:
            v = a | b
        else:
            v = (a | b) ^ full
        values[num_inputs + i] = v
    return [values[o] for o in genes[3 * num_nodes :]]


def run_real(
    genes: Sequence[int], active: Sequence[int], num_inputs: int, num_nodes: int, X: np.ndarray
) -> list[np.ndarray]:
    """Evaluate active nodes over sample columns ``X`` (shape ``(num_inputs, m)``)."""
    values: list = [X[k] for k in range(num_inputs)]
    values.extend([None] * num_nodes)
    with np.errstate(all="ignore"):
        for i in active:
            g = 3 * i
            f = genes[g]
            a = values[genes[g + 1]]
            b = values[genes[g + 2]]
            if f == 0:
                v = a + b
            elif f == 1:
                v = a - b
            elif f == 2:
                v = a * b
            else:
                v = np.where(np.abs(b) < DIV_EPSILON, 1.0, a / np.where(b == 0.0, 1.0, b))
            values[num_inputs + i] = v
    return [values[o] for o in genes[3 * num_nodes :]]


@dataclass(frozen=True, eq=False)
class OutputTable:
    """Program outputs over a pattern source.

    ``columns`` holds one entry per program output: a packed int for boolean
    tables, a float64 array for real ones.
    """

    domain: str
    num_rows: int
    columns: tuple

    @cached_property
    def rows(self) -> tuple[tuple, ...]:
        if self.domain == "boolean":
            return tuple(
                tuple((c >> j) & 1 for c in self.columns) for j in range(self.num_rows)
            )
        return tuple(zip(*(c.tolist() for c in self.columns)))

    @cached_property
    def fingerprint(self) -> bytes:
        h = hashlib.blake2b(digest_size=16)
        h.update(f"{self.domain}:{self.num_rows}:{len(self.columns)}|".encode())
        nbytes = (self.num_rows + 7) // 8
        for c in self.columns:
            if self.domain == "boolean":
                h.update(c.to_bytes(nbytes, "little"))
            else:
                h.update(np.ascontiguousarray(c, dtype=np.float64).tobytes())
        return h.digest()

    def __eq__(self, other):
        if not isinstance(other, OutputTable):
            return NotImplemented
        return self.domain == other.domain and self.rows == other.rows

    def __hash__(self):
        return hash(self.fingerprint)


class BooleanPatterns:
    """All ``2**num_inputs`` input patterns in ascending order."""

    domain = "boolean"

    def __init__(self, num_inputs: int):
        self.num_inputs = num_inputs
        self.num_rows = 1 << num_inputs
        self.masks = input_masks(num_inputs)
        self.full = (1 << self.num_rows) - 1

    def __iter__(self):
        for j in range(self.num_rows):
            yield pattern(self.num_inputs, j)


class RealSamples:
    """Dataset samples, shape ``(m, num_inputs)``."""

    domain = "real"

    def __init__(self, samples):
        X = np.asarray(samples, dtype=np.float64)
        if X.ndim != 2:
            raise ValueError("samples must be a 2-d array")
        self.samples = X
        self.columns = np.ascontiguousarray(X.T)
        self.num_inputs = X.shape[1]
        self.num_rows = X.shape[0]

    def __iter__(self):
        return iter(map(tuple, self.samples.tolist()))


def evaluate_single(chrom: Chromosome, phenotype: Phenotype | None, inputs: Sequence) -> tuple:
    """Scalar evaluation of one input tuple, visiting active nodes only."""
    spec = chrom.spec
    if len(inputs) != spec.num_inputs:
        raise ValueError(f"expected {spec.num_inputs} inputs, got {len(inputs)}")
    phenotype = phenotype or decode(chrom)
    funcs = get_function_set(spec.function_set_id).functions
    genes = chrom.genes
    values: dict[int, object] = dict(enumerate(inputs))
    for i in phenotype.active_node_indices:
        g = 3 * i
        values[spec.num_inputs + i] = funcs[genes[g]](values[genes[g + 1]], values[genes[g + 2]])
    return tuple(values[o] for o in chrom.output_genes)


def evaluate_all(chrom: Chromosome, source, phenotype: Phenotype | None = None) -> OutputTable:
    spec = chrom.spec
    if source.num_inputs != spec.num_inputs:
        raise ValueError(f"pattern source has {source.num_inputs} inputs, chromosome expects {spec.num_inputs}")
    phenotype = phenotype or decode(chrom)
    active = phenotype.active_node_indices
    if source.domain == "boolean":
        cols = run_boolean_packed(chrom.genes, active, spec.num_inputs, spec.num_nodes, source.masks, source.full)
    else:
        cols = run_real(chrom.genes, active, spec.num_inputs, spec.num_nodes, source.columns)
        cols = [np.broadcast_to(np.asarray(c, dtype=np.float64), (source.num_rows,)) for c in cols]
    return OutputTable(source.domain, source.num_rows, tuple(cols))


def evaluate_scalar_table(chrom: Chromosome, source) -> OutputTable:
    """Row-by-row evaluation; reference path for the packed/vectorised one."""
    phenotype = decode(chrom)
    rows = [evaluate_single(chrom, phenotype, p) for p in source]
    if source.domain == "boolean":
        cols = []
        for o in range(chrom.spec.num_outputs):
            c = 0
            for j, r in enumerate(rows):
                if r[o]:
                    c |= 1 << j
            cols.append(c)
    else:
        cols = [np.array([r[o] for r in rows], dtype=np.float64) for o in range(chrom.spec.num_outputs)]
    return OutputTable(source.domain, source.num_rows, tuple(cols))
