import random

import pytest

from cgp_pl.analysis import robustness_probe, size_report, variability_walk
from cgp_pl.errors import InputError
from cgp_pl.genome import Chromosome, GenomeSpec, active_gene_positions, decode, random_chromosome
from cgp_pl.problems import BooleanProblem
from oracles import binomial_sigma, naive_parity_fitness, single_gene_neutrality
from test_genome import xor_chromosome


class ScriptedRandom:
    """Stand-in stream whose random() cycles through fixed values."""

    def __init__(self, values):
        self.values = values
        self.i = 0

    def random(self):
        v = self.values[self.i % len(self.values)]
        self.i += 1
        return v


def small_case(seed, nn=10):
    spec = GenomeSpec(3, nn, 1, "boolean")
    return random_chromosome(spec, random.Random(seed)), BooleanProblem.parity(3)


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_probe_matches_exhaustive_enumeration(seed):
    chrom, problem = small_case(seed)
    exact = single_gene_neutrality(chrom.genes, chrom.spec.gene_bounds, lambda g: naive_parity_fitness(g, 3, 10))
    n = 20_000
    rep = robustness_probe(chrom, problem, 0.001, n, random.Random(seed))
    assert abs(rep.fitness_preserved_fraction - exact) <= 3 * binomial_sigma(n, exact) / n


def test_probe_zero_active_nodes():
    spec = GenomeSpec(3, 5, 1, "boolean")
    chrom = Chromosome(spec, (0, 0, 1) * 5 + (2,))  # output wired to input 2
    problem = BooleanProblem.parity(3)
    exact = single_gene_neutrality(chrom.genes, spec.gene_bounds, lambda g: naive_parity_fitness(g, 3, 5))
    rep = robustness_probe(chrom, problem, 0.001, 30_000, random.Random(0))
    assert abs(rep.fitness_preserved_fraction - exact) <= 3 * binomial_sigma(30_000, exact) / 30_000


def test_inactive_mutations_always_neutral():
    rng = random.Random(4)
    problem = BooleanProblem.parity(6)
    spec = GenomeSpec(6, 100, 1, "boolean")
    for _ in range(50):
        chrom = random_chromosome(spec, rng)
        inactive = [p for p in range(spec.gene_count) if p not in active_gene_positions(chrom)]
        genes = list(chrom.genes)
        for p in rng.sample(inactive, min(10, len(inactive))):
            genes[p] = rng.randrange(spec.gene_bounds[p])
        a = decode(chrom).active_node_indices
        b = decode(Chromosome(spec, tuple(genes))).active_node_indices
        assert a == b
        assert problem.fitness_value(chrom.genes, a, 100) == problem.fitness_value(genes, b, 100)


def test_probe_report_fields():
    chrom, problem = small_case(5)
    rep = robustness_probe(chrom, problem, 0.2, 2000, random.Random(1))
    for f in (rep.fitness_preserved_fraction, rep.functional_change_fraction, rep.behavioral_change_fraction):
        assert 0.0 <= f <= 1.0
    assert rep.functional_change_fraction >= rep.behavioral_change_fraction
    assert rep.preserved_given_behavioral_change == 0.0 or rep.preserved_given_behavioral_change is not None


def test_probe_rejects_zero_samples():
    chrom, problem = small_case(1)
    with pytest.raises(InputError):
        robustness_probe(chrom, problem, 0.02, 0, random.Random(0))


def test_walk_on_inactive_genes_only():
    spec = GenomeSpec(2, 3, 1, "boolean")
    chrom = Chromosome(spec, (2, 0, 1, 1, 0, 1, 0, 0, 1, 3))  # only node 1 is active
    # position draws land on node 2's genes (6, 7, 8 of 10), value draws anywhere
    rng = ScriptedRandom([0.65, 0.3, 0.75, 0.9, 0.85, 0.1])
    rep = variability_walk(chrom, BooleanProblem.parity(2), 300, rng)
    assert rep.unique_behaviors == 0 and rep.accepted_steps == 300


def test_walk_two_input_bound_and_invariance():
    for seed in range(5):
        spec = GenomeSpec(2, 10, 1, "boolean")
        chrom = random_chromosome(spec, random.Random(seed))
        rep = variability_walk(chrom, BooleanProblem.parity(2), 2000, random.Random(seed))
        assert rep.unique_behaviors <= 15  # 16 tables, the start's is already seen
        assert rep.accepted_steps <= rep.steps == 2000


def test_walk_monotone_in_steps():
    chrom = random_chromosome(GenomeSpec(4, 30, 1, "boolean"), random.Random(8))
    problem = BooleanProblem.parity(4)
    counts = [variability_walk(chrom, problem, s, random.Random(3)).unique_behaviors for s in (10, 100, 500, 1000)]
    assert counts == sorted(counts)


def test_walk_rejects_zero_steps():
    chrom, problem = small_case(1)
    with pytest.raises(InputError):
        variability_walk(chrom, problem, 0, random.Random(0))


def test_size_report():
    spec = GenomeSpec(2, 3, 1, "boolean")
    assert size_report(Chromosome(spec, (0, 0, 1) * 3 + (0,))) == (0, 0)
    assert size_report(xor_chromosome()) == (3, 6)
    chain_spec = GenomeSpec(1, 100, 1, "boolean")
    genes = [0, 0, 0]
    for i in range(1, 100):
        genes += [2, i, i]  # node i reads node i-1 (address i)
    assert size_report(Chromosome(chain_spec, tuple(genes) + (100,))) == (100, 200)
