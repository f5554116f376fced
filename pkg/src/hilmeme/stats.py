"""Rank and product-moment correlation used to compare score lists.

Kept dependency-free on purpose: sample sizes here are campaign-sized, so the
O(n^2) pair walk in Kendall's tau is never a concern.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Sequence


class StatsError(ValueError):
    pass


def _paired(x: Sequence[float], y: Sequence[float]) -> tuple[list[float], list[float]]:
    xs = [float(v) for v in x]
    ys = [float(v) for v in y]
    if len(xs) != len(ys):
        raise StatsError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise StatsError("need at least 2 paired values")
    return xs, ys


def _clamp(r: float) -> float:
    return max(-1.0, min(1.0, r))


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample product-moment correlation; undefined for constant input."""
    xs, ys = _paired(x, y)
    n = len(xs)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    cov = math.fsum((a - mx) * (b - my) for a, b in zip(xs, ys))
    var_x = math.fsum((a - mx) ** 2 for a in xs)
    var_y = math.fsum((b - my) ** 2 for b in ys)
    if var_x == 0.0 or var_y == 0.0:
        raise StatsError("correlation undefined for a constant vector")
    return _clamp(cov / math.sqrt(var_x * var_y))


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of average (fractional) ranks."""
    xs, ys = _paired(x, y)
    return pearson(average_ranks(xs), average_ranks(ys))


def kendall(x: Sequence[float], y: Sequence[float]) -> float:
    """Kendall's tau-b; reduces to (concordant - discordant) / (n(n-1)/2) without ties."""
    xs, ys = _paired(x, y)
    n = len(xs)
    concordant = discordant = 0
    for i in range(n):
        for j in range(i + 1, n):
            prod = (xs[i] - xs[j]) * (ys[i] - ys[j])
            if prod > 0:
                concordant += 1
            elif prod < 0:
                discordant += 1

    n0 = n * (n - 1) // 2
    tie_x = sum(c * (c - 1) // 2 for c in Counter(xs).values())
    tie_y = sum(c * (c - 1) // 2 for c in Counter(ys).values())
    if n0 == tie_x or n0 == tie_y:
        raise StatsError("tau undefined for an all-tied vector")
    return _clamp((concordant - discordant) / math.sqrt((n0 - tie_x) * (n0 - tie_y)))


CORRELATION_METHODS = {
    "pearson": pearson,
    "spearman": spearman,
    "kendall": kendall,
}
