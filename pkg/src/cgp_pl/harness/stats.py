"""Mann-Whitney U test and summary statistics."""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from ..errors import InputError

EXACT_MAX_SIDE = 8
# DP cells (items x chosen x doubled rank sum) above which "exact" is refused
EXACT_WORK_LIMIT = 50_000_000


class MannWhitneyResult(NamedTuple):
    u: float
    p: float
    method: str


def midranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of the ranks they span."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        r = (i + j) / 2 + 1
        for t in range(i, j + 1):
            ranks[order[t]] = r
        i = j + 1
    return ranks


def _tie_sizes(values: Sequence[float]) -> list[int]:
    _, counts = np.unique(np.asarray(values, dtype=float), return_counts=True)
    return counts.tolist()


def _exact_p(u: float, ranks: Sequence[float], na: int) -> float:
    """Permutation p-value of U given the pooled midranks.

    Counts subsets of size ``na`` by doubled rank sum (midranks are multiples
    of 1/2), then sums the probability of every U at least as far from the
    null mean as the observed one.
    """
    n = len(ranks)
    nb = n - na
    doubled = [int(round(2 * r)) for r in ranks]
    total = sum(doubled)
    ways = np.zeros((na + 1, total + 1), dtype=np.float64)
    ways[0, 0] = 1.0
    for d in doubled:
        for c in range(na, 0, -1):
            ways[c, d:] += ways[c - 1, : total + 1 - d]
    counts = ways[na]
    sums = np.nonzero(counts)[0]
    us = sums / 2.0 - na * (na + 1) / 2.0
    mean = na * nb / 2.0
    far = np.abs(us - mean) >= abs(u - mean) - 1e-9
    return float(min(1.0, counts[sums][far].sum() / counts.sum()))


def _normal_p(u: float, values: Sequence[float], na: int, nb: int) -> float:
    n = na + nb
    mean = na * nb / 2.0
    ties = sum(t**3 - t for t in _tie_sizes(values))
    var = na * nb / 12.0 * ((n + 1) - ties / (n * (n - 1)))
    if var <= 0:
        return 1.0
    dev = max(abs(u - mean) - 0.5, 0.0)
    z = dev / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2.0)))


def mann_whitney_u(a: Sequence[float], b: Sequence[float], method: str = "auto") -> MannWhitneyResult:
    """Two-sided Mann-Whitney U test.

    ``u`` is the statistic of ``a``: the number of pairs with a > b, ties
    counting one half. ``method="auto"`` uses exact enumeration unless both
    samples have more than 8 values, in which case it uses the normal
    approximation with tie and continuity corrections.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    if not a or not b:
        raise InputError("both samples must be non-empty")
    na, nb = len(a), len(b)
    pooled = a + b
    ranks = midranks(pooled)
    u = sum(ranks[:na]) - na * (na + 1) / 2.0
    if method == "auto":
        method = "normal" if min(na, nb) > EXACT_MAX_SIDE else "exact"
    if method == "exact":
        work = len(pooled) * min(na, nb) * 2 * sum(ranks)
        if work > EXACT_WORK_LIMIT:
            method = "normal"
    if method == "exact":
        if na <= nb:
            p = _exact_p(u, ranks, na)
        else:
            p = _exact_p(na * nb - u, ranks[na:] + ranks[:na], nb)
    elif method == "normal":
        p = _normal_p(u, pooled, na, nb)
    else:
        raise InputError(f"unknown method {method!r}")
    return MannWhitneyResult(u, p, method)


def describe(values: Sequence[float]) -> dict:
    """mean, median and quartiles; all None for an empty sample."""
    if not len(values):
        return {"n": 0, "mean": None, "median": None, "q1": None, "q3": None}
    arr = np.asarray(values, dtype=float)
    with np.errstate(all="ignore"):
        q1, med, q3 = np.percentile(arr, [25, 50, 75]).tolist()
        mean = float(arr.mean())
    return {"n": len(values), "mean": mean, "median": med, "q1": q1, "q3": q3}
