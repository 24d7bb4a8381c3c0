import sys

import pytest

from semdiff.errors import ConfigError, RunnerCrashed
from semdiff.fuzzing import FuzzPlan
from semdiff.harness import (
    HarnessConfig,
    Outcome,
    PairScore,
    RunnerClient,
    canonical_equal,
    init_message,
    score_pair_with_command,
)
from semdiff.model import CodePairRecord, TaskSpec

PLAN = FuzzPlan(seed=11, min_len=4, max_len=16)


def toy_task():
    return TaskSpec(
        task_id="toy",
        source_benchmark="toy",
        reference_code="x",
        level="function",
        binding_program="unused",
        entry_point="f",
    )


def pair(a, b):
    return CodePairRecord(
        pair_id="p", task_id="toy", code_ori=a, code_var=b, level="function"
    )


def score(toy_runner_cmd, a, b, cfg=None, plan=PLAN):
    cfg = cfg or HarnessConfig(n_inputs=60, repetitions=3)
    return score_pair_with_command(pair(a, b), toy_task(), cfg, plan, toy_runner_cmd)


def test_identity_pair_scores_one(toy_runner_cmd):
    result = score(toy_runner_cmd, "x % 97", "x % 97")
    assert result.df_score == 1.0
    assert result.rep_scores == [1.0, 1.0, 1.0]
    assert all(r.executed > 0 and r.excluded == 0 for r in result.reps)


def test_disjoint_pair_scores_zero(toy_runner_cmd):
    result = score(toy_runner_cmd, "x % 97", "x % 97 + 1")
    assert result.df_score == 0.0


def test_all_timeout_sentinel(toy_runner_cmd):
    cfg = HarnessConfig(
        n_inputs=2,
        repetitions=2,
        per_input_timeout_seconds=0.25,
        repetition_budget_seconds=10.0,
    )
    result = score(toy_runner_cmd, "time.sleep(5) or x", "time.sleep(5) or x", cfg)
    assert result.df_score == -1.0
    assert result.rep_scores == []
    assert all(r.executed == 0 for r in result.reps)


def test_partial_divergence_ratio(toy_runner_cmd):
    # variant differs exactly on multiples of 3
    result = score(toy_runner_cmd, "x % 3", "0 if x % 3 == 0 else x % 3")
    assert result.df_score == 1.0  # identical outputs everywhere
    result = score(toy_runner_cmd, "x % 2", "0")
    for reps, stat in zip(result.rep_scores, result.reps):
        assert reps == stat.matched / stat.executed
        assert 0.0 < reps < 1.0


def test_identical_error_tokens_match(toy_runner_cmd):
    result = score(toy_runner_cmd, "x // 0", "x // 0")
    assert result.df_score == 1.0
    cfg = HarnessConfig(n_inputs=60, repetitions=3, errors_match=False)
    result = score(toy_runner_cmd, "x // 0", "x // 0", cfg)
    assert result.df_score == 0.0


def test_errors_match_flag_monotone(toy_runner_cmd):
    # half the inputs raise on both sides, half agree as outputs
    a = "x if x % 2 else x // 0"
    strict = score(
        toy_runner_cmd, a, a, HarnessConfig(n_inputs=80, repetitions=2, errors_match=False)
    )
    lenient = score(
        toy_runner_cmd, a, a, HarnessConfig(n_inputs=80, repetitions=2, errors_match=True)
    )
    assert lenient.df_score >= strict.df_score


def test_symmetry_and_determinism(toy_runner_cmd):
    ab = score(toy_runner_cmd, "x % 5", "x % 7")
    ba = score(toy_runner_cmd, "x % 7", "x % 5")
    assert ab.rep_scores == ba.rep_scores
    again = score(toy_runner_cmd, "x % 5", "x % 7")
    assert again == ab


def test_canonical_equal_rules():
    out = lambda t: Outcome("output", t)  # noqa: E731
    err = lambda t: Outcome("error", t)  # noqa: E731
    assert canonical_equal(out("3"), out("3"))
    assert not canonical_equal(out("3.0"), out("3"))
    assert not canonical_equal(out("3"), err("ValueError"))
    assert canonical_equal(err("ValueError"), err("ValueError"), errors_match=True)
    assert not canonical_equal(err("ValueError"), err("ValueError"), errors_match=False)
    assert not canonical_equal(err("ValueError"), err("KeyError"))


def test_config_invariants():
    with pytest.raises(ConfigError):
        HarnessConfig(repetitions=0)
    with pytest.raises(ConfigError):
        HarnessConfig(per_input_timeout_seconds=5.0, repetition_budget_seconds=1.0)
    assert HarnessConfig().resolved_n("function") == 2000
    assert HarnessConfig().resolved_n("program") == 1000
    assert HarnessConfig(n_inputs=7).resolved_n("program") == 7


def test_pair_score_sentinel_contract():
    empty = PairScore.from_reps([], [])
    assert empty.df_score == -1.0
    filled = PairScore.from_reps([0.25, 0.75], [])
    assert filled.df_score == 0.5


def test_runner_crash_on_garbage(tmp_path):
    bad = tmp_path / "bad_runner.py"
    bad.write_text("print('this is not json')\nimport time\ntime.sleep(10)\n")
    client = RunnerClient(
        [sys.executable, str(bad)], {"op": "init"}, init_timeout=2.0
    )
    with pytest.raises(RunnerCrashed):
        client.start()
    client.kill()


def test_runner_rejecting_init(tmp_path):
    bad = tmp_path / "reject_runner.py"
    bad.write_text(
        "import json,sys\n"
        "sys.stdin.readline()\n"
        "print(json.dumps({'ok': False, 'err': 'compile:b:boom'}), flush=True)\n"
    )
    client = RunnerClient([sys.executable, str(bad)], {"op": "init"}, init_timeout=5.0)
    with pytest.raises(RunnerCrashed) as err:
        client.start()
    assert "compile:b:boom" in str(err.value)


def test_init_message_shape():
    msg = init_message(pair("a", "b"), toy_task())
    assert msg == {
        "op": "init",
        "mode": "function",
        "code_a": "a",
        "code_b": "b",
        "binding": "unused",
        "entry": "f",
    }
