"""SFD/DFS/Control region classification and threshold selection.

The threshold search scans every grid tuple (x1, x2, y1, y2) with
x1 < x2, y1 < y2 and maximizes the mean per-metric gap between corner
and control prediction error. Region error sums are aggregated in exact
rational arithmetic (floats embed exactly into Fraction), so the
accelerated prefix-sum scan returns bit-identical objectives and the
same argmax tuple as a naive quadruple loop regardless of summation
order. Ties go to the lexicographically smallest tuple.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from semdiff.errors import MissingScores, NoControlPoints, NoFeasibleCandidate
from semdiff.model import CodePairRecord, Dataset, RegionThresholds

SFD = "SFD"
DFS = "DFS"
CONTROL = "Control"

DEFAULT_DELTA = 0.05
ERROR_FLAVORS = ("absolute", "squared")


def classify(x: float, y: float, th: RegionThresholds) -> str:
    """Total, mutually exclusive region label for a point (boundaries
    inclusive)."""
    if x >= th.x_hi and y <= th.y_lo:
        return SFD
    if x <= th.x_lo and y >= th.y_hi:
        return DFS
    return CONTROL


def threshold_grid(delta: float) -> list[float]:
    """Grid {0, delta, 2*delta, ...} with both endpoints 0 and 1 included."""
    if not 0 < delta <= 0.5:
        raise ValueError("delta must be in (0, 0.5]")
    grid = []
    i = 0
    while True:
        g = i * delta
        if g >= 1.0:
            break
        grid.append(g)
        i += 1
    grid.append(1.0)
    return grid


@dataclass(frozen=True)
class _Points:
    x: list[float]
    y: list[float]
    errors: dict[str, list[Fraction]]  # per metric, per record


def _extract_points(ds: Dataset, metrics: list[str], error_flavor: str) -> _Points:
    if error_flavor not in ERROR_FLAVORS:
        raise ValueError(f"error_flavor must be one of {ERROR_FLAVORS}")
    xs, ys = [], []
    errors: dict[str, list[Fraction]] = {m: [] for m in metrics}
    for metric in metrics:
        missing = [r.pair_id for r in ds.records if metric not in r.metric_scores]
        if missing:
            raise MissingScores(metric, missing)
    for r in ds.records:
        if r.surface_sim is None or r.df_score is None or not 0 <= r.df_score <= 1:
            raise ValueError(
                f"pair {r.pair_id!r}: threshold selection needs surface_sim and "
                "df_score in [0,1] (exclude -1 sentinels upstream)"
            )
        xs.append(r.surface_sim)
        ys.append(r.df_score)
        for metric in metrics:
            residual = Fraction(r.df_score) - Fraction(r.metric_scores[metric])
            errors[metric].append(abs(residual) if error_flavor == "absolute" else residual ** 2)
    return _Points(xs, ys, errors)


def _index_points(points: _Points, grid: list[float]):
    """Per record: smallest grid index whose value >= coordinate (le) and
    largest grid index whose value <= coordinate (ge)."""
    garr = np.asarray(grid)
    x = np.asarray(points.x)
    y = np.asarray(points.y)
    le_x = np.searchsorted(garr, x, side="left")
    ge_x = np.searchsorted(garr, x, side="right") - 1
    le_y = np.searchsorted(garr, y, side="left")
    ge_y = np.searchsorted(garr, y, side="right") - 1
    return le_x, ge_x, le_y, ge_y


def _corner_tables(values, row_idx, col_idx, g: int, ge_rows: bool, ge_cols: bool):
    """Cumulative rectangle sums over the index grid.

    Returns T with T[a][b] = sum of values over records whose row index
    satisfies (>= a if ge_rows else <= a) and likewise for columns.
    """
    table = [[Fraction(0)] * g for _ in range(g)]
    for value, a, b in zip(values, row_idx, col_idx):
        table[a][b] += value
    # accumulate rows: <= means ascending prefix, >= means descending suffix
    rows = range(1, g) if not ge_rows else range(g - 2, -1, -1)
    step = -1 if not ge_rows else 1
    for a in rows:
        for b in range(g):
            table[a][b] += table[a + step][b]
    cols = range(1, g) if not ge_cols else range(g - 2, -1, -1)
    step = -1 if not ge_cols else 1
    for b in cols:
        for a in range(g):
            table[a][b] += table[a][b + step]
    return table


def _scan(points: _Points, grid: list[float], metrics: list[str]):
    """Prefix-sum scan over all feasible candidates; exact arithmetic.

    Returns (a1, a2, b1, b2, objective) or None when no candidate keeps
    all three regions non-empty.
    """
    g = len(grid)
    n = len(points.x)
    le_x, ge_x, le_y, ge_y = _index_points(points, grid)
    ones = [Fraction(1)] * n
    # DFS(x1=a, y2=b): le_x <= a and ge_y >= b; SFD(x2=a, y1=b): ge_x >= a and le_y <= b
    dfs_cnt = _corner_tables(ones, le_x, ge_y, g, ge_rows=False, ge_cols=True)
    sfd_cnt = _corner_tables(ones, ge_x, le_y, g, ge_rows=True, ge_cols=False)
    dfs_err = {}
    sfd_err = {}
    totals = {}
    for metric in metrics:
        errs = points.errors[metric]
        dfs_err[metric] = _corner_tables(errs, le_x, ge_y, g, ge_rows=False, ge_cols=True)
        sfd_err[metric] = _corner_tables(errs, ge_x, le_y, g, ge_rows=True, ge_cols=False)
        totals[metric] = sum(errs, Fraction(0))
    best = None
    best_obj = None
    k = Fraction(len(metrics))
    for a1 in range(g):
        for a2 in range(a1 + 1, g):
            for b1 in range(g):
                for b2 in range(b1 + 1, g):
                    nd = dfs_cnt[a1][b2]
                    ns = sfd_cnt[a2][b1]
                    nc = n - nd - ns
                    if nd == 0 or ns == 0 or nc == 0:
                        continue
                    acc = Fraction(0)
                    for metric in metrics:
                        ed = dfs_err[metric][a1][b2] / nd
                        es = sfd_err[metric][a2][b1] / ns
                        ec = (totals[metric] - dfs_err[metric][a1][b2] - sfd_err[metric][a2][b1]) / nc
                        acc += (ed - ec + es - ec) / 2
                    obj = acc / k
                    if best_obj is None or obj > best_obj:
                        best_obj = obj
                        best = (a1, a2, b1, b2)
    if best is None:
        return None
    return (*best, best_obj)


def select_thresholds(
    ds: Dataset,
    delta: float = DEFAULT_DELTA,
    metrics: list[str] | None = None,
    error_flavor: str = "absolute",
) -> RegionThresholds:
    """Grid-search thresholds maximizing the corner-vs-control error gap."""
    if metrics is None:
        names: set[str] = set()
        for r in ds.records:
            names.update(r.metric_scores)
        metrics = sorted(names)
    if not metrics:
        error = MissingScores("<any>", [r.pair_id for r in ds.records])
        error.args = (
            "threshold selection needs at least one metric score set; "
            "none found on the dataset (pass --scores or attach metric_scores)",
        )
        raise error
    grid = threshold_grid(delta)
    points = _extract_points(ds, metrics, error_flavor)
    result = _scan(points, grid, metrics)
    if result is None:
        raise NoFeasibleCandidate(
            "no threshold tuple keeps SFD, DFS and Control non-empty; "
            "try a finer delta or a dataset with corner coverage"
        )
    a1, a2, b1, b2, _ = result
    return RegionThresholds(grid[a1], grid[a2], grid[b1], grid[b2])


def region_coverage(ds: Dataset, th: RegionThresholds) -> dict:
    """Counts and fractions per region; fractions are 0 on an empty dataset."""
    counts = {SFD: 0, DFS: 0, CONTROL: 0}
    for r in ds.records:
        if r.surface_sim is None or r.df_score is None:
            raise ValueError(f"pair {r.pair_id!r} lacks surface_sim/df_score")
        counts[classify(r.surface_sim, r.df_score, th)] += 1
    total = len(ds.records)
    fractions = {k: (v / total if total else 0.0) for k, v in counts.items()}
    return {"counts": counts, "fractions": fractions, "total": total}


def boundary_distance(x: float, y: float, th: RegionThresholds) -> float:
    """Euclidean distance from a point to the nearer closed corner
    rectangle (SFD: [x_hi,1]x[0,y_lo]; DFS: [0,x_lo]x[y_hi,1])."""
    d_sfd = math.hypot(max(0.0, th.x_hi - x), max(0.0, y - th.y_lo))
    d_dfs = math.hypot(max(0.0, x - th.x_lo), max(0.0, th.y_hi - y))
    return min(d_sfd, d_dfs)


def mean_boundary_distance(ds: Dataset, th: RegionThresholds) -> float:
    """Mean distance from control-region points to the nearest corner."""
    distances = [
        boundary_distance(r.surface_sim, r.df_score, th)
        for r in ds.records
        if classify(r.surface_sim, r.df_score, th) == CONTROL
    ]
    if not distances:
        raise NoControlPoints("dataset has no control-region points")
    return statistics.mean(distances)
