"""Statistical audit kernels: MAE, Spearman, distinguishability, cross-pairing.

Means are computed with ``statistics.mean`` (exact rational internally,
correctly rounded once) so the small worked examples in the tests come
out exact rather than accumulating float round-off.
"""

from __future__ import annotations

import random
import statistics
from dataclasses import dataclass

import numpy as np
from scipy.special import stdtr

from semdiff.errors import (
    DegenerateInput,
    EmptySeries,
    NotEnoughTasks,
    ZeroDenominator,
)
from semdiff.model import CodePairRecord


@dataclass(frozen=True)
class ScoreSeries:
    """Paired metric scores and ground-truth df scores for one metric."""

    metric: str
    metric_scores: list[float]
    truth_scores: list[float]

    def __post_init__(self):
        if len(self.metric_scores) != len(self.truth_scores):
            raise ValueError("metric and truth lists must have equal length")
        values = self.metric_scores + self.truth_scores
        if any(not np.isfinite(v) for v in values):
            raise ValueError("scores must be finite")


def mae(series: ScoreSeries) -> float:
    """Mean absolute error of the metric against the ground truth."""
    if not series.metric_scores:
        raise EmptySeries("mae needs a non-empty series")
    return statistics.mean(
        abs(m - y) for m, y in zip(series.metric_scores, series.truth_scores)
    )


def rank_with_ties(xs: list[float]) -> list[float]:
    """1-based ranks with ties assigned the average of their positions."""
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(x: list[float], y: list[float]) -> tuple[float, float]:
    """Spearman rho with average-rank ties and a two-sided t-approximate p.

    |rho| = 1 returns p = 0 exactly.
    """
    n = len(x)
    if n != len(y) or n < 3:
        raise DegenerateInput("spearman needs equal-length lists with n >= 3")
    if min(x) == max(x) or min(y) == max(y):
        raise DegenerateInput("spearman is undefined for constant lists")
    rx = rank_with_ties(x)
    ry = rank_with_ties(y)
    mx = sum(rx) / n
    my = sum(ry) / n
    dx = [r - mx for r in rx]
    dy = [r - my for r in ry]
    num = sum(a * b for a, b in zip(dx, dy))
    den = (sum(a * a for a in dx) * sum(b * b for b in dy)) ** 0.5
    rho = num / den
    if abs(rho) >= 1.0:
        return (1.0 if rho > 0 else -1.0), 0.0
    t = rho * ((n - 2) / (1.0 - rho * rho)) ** 0.5
    p = 2.0 * float(stdtr(n - 2, -abs(t)))
    return rho, p


def distinguishability(intra: list[float], inter: list[float]) -> float:
    """mean(intra scores) / mean(inter scores); > 1 means equivalent pairs
    score higher."""
    if not intra or not inter:
        raise EmptySeries("distinguishability needs non-empty intra and inter")
    denominator = statistics.mean(inter)
    if denominator == 0:
        raise ZeroDenominator("mean inter score is zero")
    return statistics.mean(intra) / denominator


def mean_std(xs: list[float]) -> tuple[float, float]:
    """(mean, sample std with n-1 denominator); std is 0 for a singleton."""
    if not xs:
        raise EmptySeries("mean_std needs a non-empty list")
    if len(xs) == 1:
        return xs[0], 0.0
    return statistics.mean(xs), statistics.stdev(xs)


def cross_pair(
    tasks: list[tuple[str, str]],
    count: int,
    seed: int,
    level: str = "function",
    ids: list[str] | None = None,
) -> list[CodePairRecord]:
    """Pair the slow solution of task i with the fast solution of task j != i.

    Samples ``count`` of the n*(n-1) ordered combinations without
    replacement, seeded, and returns them in canonical (i, j) order.
    """
    n = len(tasks)
    if n < 2:
        raise NotEnoughTasks("cross_pair needs at least 2 tasks")
    total = n * (n - 1)
    if count > total:
        raise NotEnoughTasks(f"requested {count} pairs but only {total} exist")
    all_pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    rng = random.Random(seed)
    chosen = sorted(rng.sample(range(total), count))
    if ids is None:
        ids = [str(i) for i in range(n)]
    records = []
    for index in chosen:
        i, j = all_pairs[index]
        records.append(
            CodePairRecord(
                pair_id=f"cross-{ids[i]}-{ids[j]}",
                task_id=f"cross:{ids[i]}:{ids[j]}",
                code_ori=tasks[i][0],
                code_var=tasks[j][1],
                level=level,
            )
        )
    return records
