import math
import random

import pytest

from oracles import naive_select_thresholds
from semdiff.errors import MissingScores, NoControlPoints, NoFeasibleCandidate
from semdiff.model import CodePairRecord, Dataset, RegionThresholds
from semdiff.regions import (
    _extract_points,
    _scan,
    boundary_distance,
    classify,
    mean_boundary_distance,
    region_coverage,
    select_thresholds,
    threshold_grid,
)

PAPER_THRESHOLDS = RegionThresholds(0.65, 0.90, 0.10, 0.90)


def point(pair_id, x, y, metrics=None):
    return CodePairRecord(
        pair_id=pair_id,
        task_id="t",
        code_ori="",
        code_var="",
        level="function",
        surface_sim=x,
        df_score=y,
        metric_scores=metrics or {},
    )


def test_classify_paper_examples():
    assert classify(0.95, 0.05, PAPER_THRESHOLDS) == "SFD"
    assert classify(0.50, 0.95, PAPER_THRESHOLDS) == "DFS"
    assert classify(0.70, 0.50, PAPER_THRESHOLDS) == "Control"


def test_classify_boundaries_inclusive_and_total():
    assert classify(0.90, 0.10, PAPER_THRESHOLDS) == "SFD"
    assert classify(0.65, 0.90, PAPER_THRESHOLDS) == "DFS"
    rng = random.Random(1)
    for _ in range(500):
        label = classify(rng.random(), rng.random(), PAPER_THRESHOLDS)
        assert label in ("SFD", "DFS", "Control")


def test_threshold_grid():
    assert threshold_grid(0.25) == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert threshold_grid(0.5) == [0.0, 0.5, 1.0]
    with pytest.raises(ValueError):
        threshold_grid(0.6)


def synth_dataset(rng, n, metrics):
    records, points = [], []
    for i in range(n):
        x, y = rng.random(), rng.random()
        scores = {m: rng.random() for m in metrics}
        records.append(point(f"p{i}", x, y, scores))
        points.append((x, y, scores))
    return Dataset(records=records), points


def test_select_thresholds_matches_naive_oracle():
    rng = random.Random(1717)
    metrics = ["m1", "m2"]
    grid = threshold_grid(0.25)
    for _ in range(10):
        ds, points = synth_dataset(rng, 50, metrics)
        want = naive_select_thresholds(points, grid, metrics)
        got = _scan(_extract_points(ds, metrics, "absolute"), grid, metrics)
        assert want is not None and got is not None
        assert got[:4] == want[0]
        assert got[4] == want[1]


def test_select_thresholds_squared_flavor_matches_oracle():
    rng = random.Random(4242)
    metrics = ["m1"]
    grid = threshold_grid(0.25)
    ds, points = synth_dataset(rng, 40, metrics)
    want = naive_select_thresholds(points, grid, metrics, flavor="squared")
    got = _scan(_extract_points(ds, metrics, "squared"), grid, metrics)
    assert got[:4] == want[0] and got[4] == want[1]


def test_select_thresholds_degenerate_dataset():
    records = [point(f"p{i}", 0.5, 0.5, {"m": 0.5}) for i in range(10)]
    with pytest.raises(NoFeasibleCandidate):
        select_thresholds(Dataset(records=records), 0.25, ["m"])


def test_select_thresholds_missing_scores():
    records = [point("p0", 0.5, 0.5, {"m": 0.5}), point("p1", 0.9, 0.1, {})]
    with pytest.raises(MissingScores):
        select_thresholds(Dataset(records=records), 0.25, ["m"])


def test_select_thresholds_order_invariant():
    rng = random.Random(88)
    ds, _ = synth_dataset(rng, 60, ["m"])
    th1 = select_thresholds(ds, 0.25, ["m"])
    shuffled = list(ds.records)
    rng.shuffle(shuffled)
    th2 = select_thresholds(Dataset(records=shuffled), 0.25, ["m"])
    assert th1 == th2


def test_region_coverage_constructed():
    ds = Dataset(
        records=[
            point("sfd", 0.95, 0.05),
            point("dfs", 0.30, 0.95),
            point("c1", 0.70, 0.50),
            point("c2", 0.50, 0.50),
        ]
    )
    coverage = region_coverage(ds, PAPER_THRESHOLDS)
    assert coverage["counts"] == {"SFD": 1, "DFS": 1, "Control": 2}
    assert abs(sum(coverage["fractions"].values()) - 1.0) <= 1e-12


def test_region_coverage_empty_and_permutation():
    empty = region_coverage(Dataset(), PAPER_THRESHOLDS)
    assert empty["counts"] == {"SFD": 0, "DFS": 0, "Control": 0}
    assert all(v == 0.0 for v in empty["fractions"].values())

    rng = random.Random(3)
    ds, _ = synth_dataset(rng, 40, [])
    shuffled = list(ds.records)
    rng.shuffle(shuffled)
    assert (
        region_coverage(ds, PAPER_THRESHOLDS)["counts"]
        == region_coverage(Dataset(records=shuffled), PAPER_THRESHOLDS)["counts"]
    )


def test_boundary_distance_examples():
    assert boundary_distance(0.90, 0.10, PAPER_THRESHOLDS) == 0.0
    want = min(math.hypot(0.20, 0.40), math.hypot(0.05, 0.40))
    assert boundary_distance(0.70, 0.50, PAPER_THRESHOLDS) == want
    assert abs(want - 0.4031) < 1e-3


def test_mean_boundary_distance():
    # two control points engineered to sit at distances 0.1 and 0.3
    ds = Dataset(
        records=[
            point("a", 0.80, 0.10),  # 0.1 left of the SFD corner
            point("b", 0.60, 0.10),  # 0.3 left of the SFD corner
        ]
    )
    assert mean_boundary_distance(ds, PAPER_THRESHOLDS) == pytest.approx(0.2, abs=1e-12)
    with pytest.raises(NoControlPoints):
        mean_boundary_distance(Dataset(records=[point("s", 0.95, 0.05)]), PAPER_THRESHOLDS)
