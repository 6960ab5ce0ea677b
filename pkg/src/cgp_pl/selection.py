"""(1+lambda) evolution strategies with optional preference for larger programs.

Candidates are ranked by a tuple key; the smallest key survives.

* ES:    (fitness better-first, offspring before parent)
* PL:    (fitness better-first, functional size desc, offspring before parent)
* PLQS:  (inside the quasi-neutral band of the best candidate first,
          functional size desc, fitness better-first, offspring before parent)

Offspring carry their creation index as origin rank; the parent ranks after
every offspring.
"""

from __future__ import annotations

import math
import random
import sys
from array import array
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from .errors import ConfigurationError
from .genome import Chromosome, GenomeSpec, Phenotype, active_nodes, decode, mutate_genes, mutation_count, random_chromosome
from .problems import MAXIMIZE, BooleanProblem, Fitness, perturb_targets

AM_FACTOR = 1.4
DEFAULT_RATE_BOUNDS = (0.0005, 0.25)
PARENT = "parent"
PARENT_RANK = sys.maxsize


@dataclass(frozen=True)
class SelectionPolicy:
    lam: int = 4
    prefer_larger: bool = False
    quasi_band: float = 0.0
    adaptive_mutation: bool = False
    initial_mutation_rate: float = 0.02
    rate_bounds: tuple[float, float] = DEFAULT_RATE_BOUNDS

    def __post_init__(self):
        if self.lam < 1:
            raise ConfigurationError(f"lambda must be >= 1, got {self.lam}")
        if not 0.0 <= self.quasi_band < 1.0:
            raise ConfigurationError(f"quasi band must be in [0, 1), got {self.quasi_band}")
        if self.quasi_band > 0 and not self.prefer_larger:
            raise ConfigurationError("a quasi-neutral band requires prefer_larger")
        lo, hi = self.rate_bounds
        if not 0.0 < lo <= self.initial_mutation_rate <= hi <= 1.0:
            raise ConfigurationError(
                f"need 0 < min <= initial <= max <= 1, got bounds {self.rate_bounds} "
                f"and initial rate {self.initial_mutation_rate}"
            )

    @property
    def name(self) -> str:
        base = "ES"
        if self.prefer_larger:
            base += "-PLQS" if self.quasi_band > 0 else "-PL"
        return base + ("-AM" if self.adaptive_mutation else "")

    @classmethod
    def from_name(cls, name: str, **kw) -> "SelectionPolicy":
        """Build a policy from a label such as ``ES``, ``ES-PL`` or ``ES-PLQS-AM``."""
        parts = name.upper().replace("(1+4)", "").strip().split("-")
        if not parts or parts[0] != "ES" or any(p not in {"PL", "PLQS", "AM"} for p in parts[1:]):
            raise ConfigurationError(f"unknown algorithm name {name!r}")
        flags = set(parts[1:])
        kw.setdefault("prefer_larger", bool(flags & {"PL", "PLQS"}))
        kw.setdefault("quasi_band", 0.10 if "PLQS" in flags else 0.0)
        kw.setdefault("adaptive_mutation", "AM" in flags)
        return cls(**kw)


@dataclass(frozen=True)
class Candidate:
    chromosome: Chromosome
    phenotype: Phenotype
    fitness: Fitness
    origin: object = PARENT  # PARENT or the offspring's creation index

    @property
    def origin_rank(self) -> int:
        return PARENT_RANK if self.origin == PARENT else int(self.origin)


def in_band(value: float, best: float, band: float) -> bool:
    if value == best:
        return True
    if band <= 0.0 or best == 0.0:
        return False
    return abs(value - best) <= band * abs(best)


def order_key(value: float, size: int, rank: int, maximize: bool, policy: SelectionPolicy, best: float) -> tuple:
    bad = -value if maximize else value
    if not policy.prefer_larger:
        return (bad, rank)
    if policy.quasi_band > 0.0:
        return (0 if in_band(value, best, policy.quasi_band) else 1, -size, bad, rank)
    return (bad, -size, rank)


def candidate_key(c: Candidate, policy: SelectionPolicy, best_fitness: Fitness) -> tuple:
    return order_key(
        c.fitness.value,
        c.phenotype.functional_size,
        c.origin_rank,
        c.fitness.direction == MAXIMIZE,
        policy,
        best_fitness.value,
    )


def candidate_order(a: Candidate, b: Candidate, policy: SelectionPolicy, best_fitness: Fitness) -> int:
    """-1 if ``a`` ranks before ``b``, 1 if after, 0 if indistinguishable."""
    if a.fitness.direction != b.fitness.direction:
        raise ValueError("candidates disagree on fitness direction")
    ka = candidate_key(a, policy, best_fitness)
    kb = candidate_key(b, policy, best_fitness)
    return (ka > kb) - (ka < kb)


def best_fitness_of(cands: Sequence[Candidate]) -> Fitness:
    best = cands[0].fitness
    for c in cands[1:]:
        if c.fitness.better_than(best):
            best = c.fitness
    return best


def select_survivor(parent: Candidate, offspring: Sequence[Candidate], policy: SelectionPolicy) -> Candidate:
    if len(offspring) != policy.lam:
        raise ValueError(f"expected {policy.lam} offspring, got {len(offspring)}")
    pool = [parent, *offspring]
    best = best_fitness_of(pool)
    return min(pool, key=lambda c: candidate_key(c, policy, best))


def update_mutation_rate(
    rate: float, offspring_fitness: Fitness, parent_fitness: Fitness, bounds: tuple[float, float] = DEFAULT_RATE_BOUNDS
) -> float:
    """One-fifth success rule: x1.4 when the offspring is at least as good, else x1.4^(-1/4)."""
    if offspring_fitness.at_least(parent_fitness):
        rate *= AM_FACTOR
    else:
        rate *= AM_FACTOR ** -0.25
    return min(max(rate, bounds[0]), bounds[1])


class OneFifthRule:
    """Stateful one-fifth rule.

    The rate is kept as ``anchor * 1.4 ** (quarters / 4)`` so a success
    followed by four failures lands back on the starting rate bit-for-bit.
    Clamping re-anchors at the violated bound.
    """

    def __init__(self, rate: float, bounds: tuple[float, float] = DEFAULT_RATE_BOUNDS):
        self.anchor = rate
        self.quarters = 0
        self.bounds = bounds
        self.rate = rate

    def record(self, success: bool) -> float:
        self.quarters += 4 if success else -1
        r = self.anchor * AM_FACTOR ** (self.quarters / 4)
        lo, hi = self.bounds
        if r > hi or r < lo:
            r = hi if r > hi else lo
            self.anchor, self.quarters = r, 0
        self.rate = r
        return r


class GenerationInfo(NamedTuple):
    generation: int
    values: list  # parent first, then offspring in creation order
    sizes: list
    survivor: int  # index into values
    rate: float


@dataclass
class RunRecord:
    policy: str
    evaluations_used: int
    generations_used: int
    best_fitness: Fitness
    solved: bool
    final_chromosome: Chromosome
    functional_size: int
    active_links: int
    mutation_rate_trace: array = field(default_factory=lambda: array("d"))
    recovery_times: tuple | None = None
    seed: int | None = None
    # (generation, survivor fitness, survivor functional size, mutation rate)
    generation_trace: list = field(default_factory=list)


Observer = Callable[[GenerationInfo], None]


class _Search:
    """Mutable state of one (1+lambda) run; one instance per replication."""

    def __init__(self, problem, spec: GenomeSpec, policy: SelectionPolicy, rng: random.Random):
        if problem.function_set_id != spec.function_set_id:
            raise ConfigurationError(
                f"problem needs function set {problem.function_set_id!r}, genome uses {spec.function_set_id!r}"
            )
        if problem.num_inputs != spec.num_inputs or spec.num_outputs != problem.num_outputs:
            raise ConfigurationError("genome input/output counts do not match the problem")
        self.problem = problem
        self.spec = spec
        self.policy = policy
        self.rng = rng
        self.maximize = problem.direction == MAXIMIZE
        self.bounds = spec.gene_bounds
        self.gene_count = spec.gene_count
        self.ni = spec.num_inputs
        self.nn = spec.num_nodes
        self.am = OneFifthRule(policy.initial_mutation_rate, policy.rate_bounds) if policy.adaptive_mutation else None
        self.rate = policy.initial_mutation_rate
        self.evaluations = 0
        self.generations = 0

        genes = list(random_chromosome(spec, rng).genes)
        self._set_parent(genes, *self._evaluate(genes))
        self.best = (self.parent_value, self.parent_genes, self.parent_active)

    def _evaluate(self, genes):
        active = active_nodes(genes, self.ni, self.nn)
        self.evaluations += 1
        return self.problem.fitness_value(genes, active, self.nn), active

    def _set_parent(self, genes, value, active, positions=None):
        self.parent_genes = genes
        self.parent_value = value
        self.parent_active = active
        if positions is None:
            positions = set(range(3 * self.nn, self.gene_count))
            for i in active:
                positions.update((3 * i, 3 * i + 1, 3 * i + 2))
        self.parent_positions = positions

    def reevaluate_parent(self, problem) -> None:
        self.problem = problem
        self.parent_value, _ = self._evaluate(self.parent_genes)
        self.best = (self.parent_value, self.parent_genes, self.parent_active)

    def at_least(self, a: float, b: float) -> bool:
        return a >= b if self.maximize else a <= b

    def step(self, observer: Observer | None = None) -> bool:
        """Run one generation; returns True if any offspring is optimal."""
        policy = self.policy
        rng = self.rng
        pv = self.parent_value
        pgenes = self.parent_genes
        ppos = self.parent_positions
        offspring = []
        start_rate = self.rate
        for i in range(policy.lam):
            k = mutation_count(self.rate, self.gene_count)
            child, positions = mutate_genes(pgenes, self.bounds, k, rng)
            if ppos.isdisjoint(positions):
                # only inactive genes touched: phenotype and fitness are the parent's
                self.evaluations += 1
                value, active, cpos = pv, self.parent_active, ppos
            else:
                value, active = self._evaluate(child)
                cpos = None
            offspring.append((child, value, active, cpos))
            if self.am is not None:
                self.rate = self.am.record(self.at_least(value, pv))
        self.generations += 1

        values = [pv] + [o[1] for o in offspring]
        sizes = [len(self.parent_active)] + [len(o[2]) for o in offspring]
        ranks = [PARENT_RANK] + list(range(policy.lam))
        best = max(values) if self.maximize else min(values)
        keys = [order_key(values[j], sizes[j], ranks[j], self.maximize, policy, best) for j in range(len(values))]
        s = min(range(len(values)), key=keys.__getitem__)
        if s:
            child, value, active, cpos = offspring[s - 1]
            self._set_parent(child, value, active, cpos)

        if values[s] == best:
            gen_best = (self.parent_value, self.parent_genes, self.parent_active)
        else:
            j = values.index(best)
            gen_best = (best, offspring[j - 1][0], offspring[j - 1][2])
        if self.at_least(best, self.best[0]):
            self.best = gen_best

        if observer is not None:
            observer(GenerationInfo(self.generations, values, sizes, s, start_rate))
        return self.problem.is_optimal(best)

    def record(self, solved: bool, trace, recovery=None, seed=None) -> RunRecord:
        value, genes, active = self.best
        return RunRecord(
            policy=self.policy.name,
            evaluations_used=self.evaluations,
            generations_used=self.generations,
            best_fitness=Fitness(value, self.problem.direction),
            solved=solved,
            final_chromosome=Chromosome(self.spec, tuple(genes)),
            functional_size=len(active),
            active_links=self.spec.node_arity * len(active),
            mutation_rate_trace=trace,
            recovery_times=recovery,
            seed=seed,
        )


def evolve(
    problem,
    spec: GenomeSpec,
    policy: SelectionPolicy,
    budget: int,
    rng: random.Random,
    observer: Observer | None = None,
    seed: int | None = None,
) -> RunRecord:
    """Evolve until an optimal candidate appears or the evaluation budget runs out.

    The initial parent costs one evaluation; each generation costs ``lam``.
    A generation is only started if it fits in the remaining budget.
    """
    if budget < policy.lam:
        raise ConfigurationError(f"budget {budget} is smaller than lambda={policy.lam}")
    search = _Search(problem, spec, policy, rng)
    trace = array("d")
    solved = problem.is_optimal(search.parent_value)
    while not solved and search.evaluations + policy.lam <= budget:
        if search.am is not None:
            trace.append(search.rate)
        solved = search.step(observer)
    return search.record(solved, trace, seed=seed)


def evolve_dynamic(
    problem: BooleanProblem,
    spec: GenomeSpec,
    policy: SelectionPolicy,
    epochs: int,
    epoch_length: int,
    k_flips: int,
    rng: random.Random,
    observer: Observer | None = None,
    seed: int | None = None,
) -> RunRecord:
    """Evolve continuously on a problem whose targets change every epoch.

    At the start of every epoch after the first, ``k_flips`` targets are
    flipped and the current parent is re-evaluated (one extra evaluation).
    ``recovery_times[e]`` is the number of generations into epoch ``e`` at
    which an optimal candidate was first seen (0 if the parent was already
    optimal), or None if it never happened within the epoch.
    """
    if epoch_length < 1 or epochs < 1:
        raise ConfigurationError("epochs and epoch_length must be >= 1")
    if k_flips < 0:
        raise ConfigurationError("k_flips must be >= 0")
    search = _Search(problem, spec, policy, rng)
    trace = array("d")
    recovery: list[int | None] = []
    ever_solved = False
    for epoch in range(epochs):
        if epoch > 0 and k_flips > 0:
            problem = problem.with_targets(perturb_targets(problem.targets, k_flips, rng))
            search.reevaluate_parent(problem)
        found = 0 if problem.is_optimal(search.parent_value) else None
        for g in range(1, epoch_length + 1):
            if search.am is not None:
                trace.append(search.rate)
            if search.step(observer) and found is None:
                found = g
        recovery.append(found)
        ever_solved = ever_solved or found is not None
    return search.record(ever_solved, trace, recovery=tuple(recovery), seed=seed)
