"""Reference implementations kept independent of the package's fast paths."""

from __future__ import annotations

import itertools
import math

TRUTH = {
    0: {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 1},  # AND
    1: {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): 0},  # NAND
    2: {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 1},  # OR
    3: {(0, 0): 1, (0, 1): 0, (1, 0): 0, (1, 1): 0},  # NOR
}


def naive_eval(genes, num_inputs, num_nodes, inputs):
    """Evaluate every node, active or not, in gene order."""
    vals = list(inputs)
    for i in range(num_nodes):
        f, a, b = genes[3 * i : 3 * i + 3]
        vals.append(TRUTH[f][(vals[a], vals[b])])
    return tuple(vals[o] for o in genes[3 * num_nodes :])


def naive_table(genes, num_inputs, num_nodes):
    return [
        naive_eval(genes, num_inputs, num_nodes, bits)
        for bits in itertools.product((0, 1), repeat=num_inputs)
    ]


def naive_active(genes, num_inputs, num_nodes):
    """Fixpoint closure of the nodes needed by the outputs."""
    needed = {o - num_inputs for o in genes[3 * num_nodes :] if o >= num_inputs}
    changed = True
    while changed:
        changed = False
        for i in list(needed):
            for src in genes[3 * i + 1 : 3 * i + 3]:
                if src >= num_inputs and src - num_inputs not in needed:
                    needed.add(src - num_inputs)
                    changed = True
    return sorted(needed)


def naive_parity_fitness(genes, num_inputs, num_nodes):
    table = naive_table(genes, num_inputs, num_nodes)
    targets = [1 - sum(bits) % 2 for bits in itertools.product((0, 1), repeat=num_inputs)]
    wrong = sum(abs(row[0] - t) for row, t in zip(table, targets))
    return 1 - wrong / len(targets)


def single_gene_neutrality(genes, bounds, fitness):
    """Exact P(fitness unchanged) for one uniformly chosen gene redrawn uniformly."""
    base = fitness(genes)
    total = 0.0
    for pos, bound in enumerate(bounds):
        same = 0
        for v in range(bound):
            g = list(genes)
            g[pos] = v
            same += fitness(g) == base
        total += same / bound
    return total / len(bounds)


def exact_mwu_p(a, b):
    """Two-sided permutation p of U by enumerating every split of the pooled data."""
    pooled = list(a) + list(b)
    na = len(a)

    def u_of(idx):
        xs = [pooled[i] for i in idx]
        ys = [pooled[i] for i in range(len(pooled)) if i not in idx]
        return sum((x > y) + 0.5 * (x == y) for x in xs for y in ys)

    u_obs = u_of(set(range(na)))
    mean = na * (len(pooled) - na) / 2
    splits = list(itertools.combinations(range(len(pooled)), na))
    hits = sum(abs(u_of(set(s)) - mean) >= abs(u_obs - mean) - 1e-9 for s in splits)
    return u_obs, hits / len(splits)


def binomial_sigma(n, p):
    return math.sqrt(n * p * (1 - p))
