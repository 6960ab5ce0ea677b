"""Mutational robustness and phenotypic variability instruments."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import InputError
from .execute import evaluate_all
from .genome import Chromosome, Phenotype, active_gene_positions, active_nodes, decode, mutate_genes, mutation_count


@dataclass(frozen=True)
class RobustnessReport:
    samples: int
    fitness_preserved_fraction: float
    functional_change_fraction: float
    # None when no sampled mutant changed its active subgraph
    preserved_given_functional_change: float | None
    behavioral_change_fraction: float
    preserved_given_behavioral_change: float | None


@dataclass(frozen=True)
class VariabilityReport:
    steps: int
    unique_behaviors: int
    accepted_steps: int


def _structure(genes, active, nn: int) -> tuple:
    """Active node indices, their genes, and the output genes."""
    return (tuple(active), tuple(genes[3 * i + j] for i in active for j in range(3)), tuple(genes[3 * nn :]))


def _behavior(problem, genes, active, spec) -> bytes:
    phenotype = Phenotype(tuple(active), spec.node_arity * len(active))
    return evaluate_all(Chromosome(spec, tuple(genes)), problem.source, phenotype).fingerprint


def robustness_probe(chrom: Chromosome, problem, rate: float, samples: int, rng: random.Random) -> RobustnessReport:
    """Sample mutants with the evolutionary mutation operator and tally neutrality.

    A mutant has a *functional change* when its active subgraph differs
    structurally from the parent's (different active nodes, or any gene of an
    active node or output differs). A *behavioral change* means its output table
    over the problem's patterns differs.
    """
    if samples < 1:
        raise InputError(f"samples must be >= 1, got {samples}")
    spec = chrom.spec
    nn = spec.num_nodes
    parent_active = active_nodes(chrom.genes, spec.num_inputs, nn)
    parent_value = problem.fitness_value(chrom.genes, parent_active, nn)
    parent_struct = _structure(chrom.genes, parent_active, nn)
    parent_behavior = _behavior(problem, chrom.genes, parent_active, spec)
    touchable = active_gene_positions(chrom)
    k = mutation_count(rate, spec.gene_count)

    preserved = functional = preserved_functional = behavioral = preserved_behavioral = 0
    for _ in range(samples):
        genes, positions = mutate_genes(chrom.genes, spec.gene_bounds, k, rng)
        if touchable.isdisjoint(positions):
            preserved += 1
            continue
        active = active_nodes(genes, spec.num_inputs, nn)
        same = problem.fitness_value(genes, active, nn) == parent_value
        preserved += same
        if _structure(genes, active, nn) != parent_struct:
            functional += 1
            preserved_functional += same
        if _behavior(problem, genes, active, spec) != parent_behavior:
            behavioral += 1
            preserved_behavioral += same
    return RobustnessReport(
        samples=samples,
        fitness_preserved_fraction=preserved / samples,
        functional_change_fraction=functional / samples,
        preserved_given_functional_change=preserved_functional / functional if functional else None,
        behavioral_change_fraction=behavioral / samples,
        preserved_given_behavioral_change=preserved_behavioral / behavioral if behavioral else None,
    )


def variability_walk(chrom: Chromosome, problem, steps: int, rng: random.Random) -> VariabilityReport:
    """Function-preserving random walk counting distinct behaviors met on the way.

    Every step redraws one uniformly chosen gene. A mutant whose output table has
    not been seen before (the start's table counts as seen) increments the
    counter whether or not it is kept; it is kept iff its fitness equals the
    walk's fitness exactly.
    """
    if steps < 1:
        raise InputError(f"steps must be >= 1, got {steps}")
    spec = chrom.spec
    nn = spec.num_nodes
    genes = list(chrom.genes)
    active = active_nodes(genes, spec.num_inputs, nn)
    walk_value = problem.fitness_value(genes, active, nn)
    seen = {_behavior(problem, genes, active, spec)}
    unique = accepted = 0
    for _ in range(steps):
        mutant, _ = mutate_genes(genes, spec.gene_bounds, 1, rng)
        m_active = active_nodes(mutant, spec.num_inputs, nn)
        behavior = _behavior(problem, mutant, m_active, spec)
        if behavior not in seen:
            seen.add(behavior)
            unique += 1
        if problem.fitness_value(mutant, m_active, nn) == walk_value:
            genes = mutant
            accepted += 1
            assert problem.fitness_value(genes, m_active, nn) == walk_value
    return VariabilityReport(steps, unique, accepted)


def size_report(chrom: Chromosome) -> tuple[int, int]:
    """(active node count, links among active nodes)."""
    ph = decode(chrom)
    return ph.functional_size, ph.active_links
