"""CGP chromosome encoding, random initialisation, mutation and decoding.

Addresses form one space: inputs occupy ``0 .. num_inputs-1`` and node ``i``
occupies ``num_inputs + i``. A node may read any input or any earlier node, so
ascending address order is always a valid evaluation order.

Genes are stored flat: node ``i`` owns positions ``3i`` (function), ``3i+1`` and
``3i+2`` (inputs); the output genes follow the node block.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from itertools import compress
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ConfigurationError
from .functions import get_function_set

NODE_ARITY = 2


@dataclass(frozen=True)
class GenomeSpec:
    num_inputs: int
    num_nodes: int
    num_outputs: int
    function_set_id: str
    node_arity: int = NODE_ARITY

    def __post_init__(self):
        if self.num_inputs < 1 or self.num_nodes < 1 or self.num_outputs < 1:
            raise ConfigurationError(
                f"genome counts must be >= 1, got inputs={self.num_inputs} "
                f"nodes={self.num_nodes} outputs={self.num_outputs}"
            )
        if self.node_arity != NODE_ARITY:
            raise ConfigurationError(f"node arity is fixed at {NODE_ARITY}")
        get_function_set(self.function_set_id)

    @property
    def num_functions(self) -> int:
        return len(get_function_set(self.function_set_id))

    @property
    def gene_count(self) -> int:
        return self.num_nodes * (1 + self.node_arity) + self.num_outputs

    @property
    def output_offset(self) -> int:
        return self.num_nodes * (1 + self.node_arity)

    @cached_property
    def gene_bounds(self) -> tuple[int, ...]:
        """Exclusive upper bound of the legal range of every gene position."""
        bounds = []
        nf = self.num_functions
        for i in range(self.num_nodes):
            bounds.append(nf)
            bounds.extend([self.num_inputs + i] * self.node_arity)
        bounds.extend([self.num_inputs + self.num_nodes] * self.num_outputs)
        return tuple(bounds)


@dataclass(frozen=True)
class Chromosome:
    spec: GenomeSpec
    genes: tuple[int, ...]

    def __post_init__(self):
        if len(self.genes) != self.spec.gene_count:
            raise ConfigurationError(
                f"expected {self.spec.gene_count} genes, got {len(self.genes)}"
            )

    @property
    def node_genes(self) -> list[tuple[int, ...]]:
        step = 1 + self.spec.node_arity
        return [tuple(self.genes[i : i + step]) for i in range(0, self.spec.output_offset, step)]

    @property
    def output_genes(self) -> tuple[int, ...]:
        return self.genes[self.spec.output_offset :]

    def is_valid(self) -> bool:
        return all(0 <= g < b for g, b in zip(self.genes, self.spec.gene_bounds))


@dataclass(frozen=True)
class Phenotype:
    active_node_indices: tuple[int, ...]
    active_links: int
    functional_size: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "functional_size", len(self.active_node_indices))


def random_chromosome(spec: GenomeSpec, rng: random.Random) -> Chromosome:
    randrange = rng.randrange
    return Chromosome(spec, tuple(randrange(b) for b in spec.gene_bounds))


def mutation_count(rate: float, gene_count: int) -> int:
    """Number of distinct positions redrawn per mutation: max(1, round(rate*genes))."""
    return max(1, math.floor(rate * gene_count + 0.5))


def mutate_genes(
    genes: Sequence[int], bounds: Sequence[int], k: int, rng: random.Random
) -> tuple[list[int], list[int]]:
    """Redraw ``k`` distinct positions of ``genes``; returns (new genes, positions).

    Indices are drawn as ``int(random() * n)``: the bias against uniform is
    below 2**-45 for any genome this package builds, and it is several times
    cheaper than ``randrange`` in the evolutionary hot loop.
    """
    child = list(genes)
    n = len(child)
    rnd = rng.random
    if k == 1:
        positions = [int(rnd() * n)]
    else:
        if k > n:
            raise ConfigurationError(f"cannot mutate {k} of {n} genes")
        positions = []
        seen = set()
        while len(positions) < k:
            p = int(rnd() * n)
            if p not in seen:
                seen.add(p)
                positions.append(p)
    for p in positions:
        child[p] = int(rnd() * bounds[p])
    return child, positions


def mutate(parent: Chromosome, rate: float, rng: random.Random) -> Chromosome:
    if not 0.0 < rate <= 1.0:
        raise ConfigurationError(f"mutation rate must be in (0, 1], got {rate}")
    spec = parent.spec
    child, _ = mutate_genes(parent.genes, spec.gene_bounds, mutation_count(rate, spec.gene_count), rng)
    return Chromosome(spec, tuple(child))


def active_nodes(genes: Sequence[int], num_inputs: int, num_nodes: int) -> list[int]:
    """Indices of nodes reachable backward from the output genes, ascending."""
    active = [False] * num_nodes
    top = -1
    for o in genes[3 * num_nodes :]:
        if o >= num_inputs:
            active[o - num_inputs] = True
            if o - num_inputs > top:
                top = o - num_inputs
    for i in range(top, -1, -1):
        if active[i]:
            a = genes[3 * i + 1] - num_inputs
            b = genes[3 * i + 2] - num_inputs
            if a >= 0:
                active[a] = True
            if b >= 0:
                active[b] = True
    return list(compress(range(num_nodes), active))


def decode(chrom: Chromosome) -> Phenotype:
    spec = chrom.spec
    nodes = tuple(active_nodes(chrom.genes, spec.num_inputs, spec.num_nodes))
    return Phenotype(nodes, spec.node_arity * len(nodes))


def active_gene_positions(chrom: Chromosome, phenotype: Phenotype | None = None) -> frozenset[int]:
    """Positions whose value can influence the program's outputs."""
    phenotype = phenotype or decode(chrom)
    step = 1 + chrom.spec.node_arity
    positions = set(range(chrom.spec.output_offset, chrom.spec.gene_count))
    for i in phenotype.active_node_indices:
        positions.update(range(step * i, step * i + step))
    return frozenset(positions)


# -- serialisation ---------------------------------------------------------
#
# One chromosome per line:
#   num_inputs num_nodes num_outputs function_set_id node_arity gene0 gene1 ...


def to_record(chrom: Chromosome) -> str:
    s = chrom.spec
    head = [str(s.num_inputs), str(s.num_nodes), str(s.num_outputs), s.function_set_id, str(s.node_arity)]
    return " ".join(head + [str(g) for g in chrom.genes])


def from_record(line: str) -> Chromosome:
    fields = line.split()
    if len(fields) < 5:
        raise ConfigurationError(f"malformed chromosome record: {line[:60]!r}")
    try:
        spec = GenomeSpec(int(fields[0]), int(fields[1]), int(fields[2]), fields[3], int(fields[4]))
        genes = tuple(int(g) for g in fields[5:])
    except ValueError as exc:
        raise ConfigurationError(f"malformed chromosome record: {exc}") from None
    chrom = Chromosome(spec, genes)
    if not chrom.is_valid():
        raise ConfigurationError("chromosome record contains out-of-range genes")
    return chrom


def dump_chromosomes(chroms: Iterable[Chromosome], path: str | Path) -> None:
    Path(path).write_text("".join(to_record(c) + "\n" for c in chroms))


def load_chromosomes(path: str | Path) -> list[Chromosome]:
    text = Path(path).read_text()
    return [from_record(line) for line in text.splitlines() if line.strip() and not line.startswith("#")]
