"""Differential scoring of a code pair over fuzzed inputs.

The runner is a separate process speaking line-delimited JSON on
stdin/stdout (protocol: init / exec / shutdown). The harness enforces
the per-input timeout by killing the runner's process group and
restarting it; a killed exec counts as Timeout on both sides and the
input is excluded from both numerator and denominator. A repetition
whose wall clock exceeds the budget is discarded; if no repetition
survives, the score is the -1 sentinel.
"""

from __future__ import annotations

import base64
import json
import os
import queue
import signal
import statistics
import subprocess
import threading
import time
from dataclasses import dataclass, field, replace

from semdiff.errors import ConfigError, RunnerCrashed
from semdiff.fuzzing import (
    N_INPUTS_FUNCTION,
    N_INPUTS_PROGRAM,
    FuzzPlan,
    derive_seed,
    generate_buffers,
)
from semdiff.model import CodePairRecord, TaskSpec

OUTPUT = "output"
ERROR = "error"
TIMEOUT = "timeout"
BINDERR = "binderr"


@dataclass(frozen=True)
class Outcome:
    kind: str
    text: str = ""


@dataclass(frozen=True)
class HarnessConfig:
    n_inputs: int | None = None  # None: per-level default (2000/1000)
    repetitions: int = 5
    repetition_budget_seconds: float = 60.0
    per_input_timeout_seconds: float = 1.0
    errors_match: bool = True
    init_timeout_seconds: float = 30.0

    def __post_init__(self):
        if self.n_inputs is not None and self.n_inputs < 1:
            raise ConfigError("n_inputs must be >= 1")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.repetition_budget_seconds <= 0:
            raise ConfigError("repetition_budget_seconds must be > 0")
        if self.per_input_timeout_seconds <= 0:
            raise ConfigError("per_input_timeout_seconds must be > 0")
        if self.per_input_timeout_seconds > self.repetition_budget_seconds:
            raise ConfigError("per-input timeout cannot exceed the repetition budget")

    def resolved_n(self, level: str) -> int:
        if self.n_inputs is not None:
            return self.n_inputs
        return N_INPUTS_FUNCTION if level == "function" else N_INPUTS_PROGRAM


@dataclass(frozen=True)
class RepStats:
    matched: int
    executed: int
    excluded: int
    budget_exhausted: bool


@dataclass(frozen=True)
class PairScore:
    rep_scores: list[float]
    df_score: float
    reps: list[RepStats] = field(default_factory=list)

    @classmethod
    def from_reps(cls, rep_scores: list[float], reps: list[RepStats]) -> "PairScore":
        df = statistics.mean(rep_scores) if rep_scores else -1.0
        return cls(rep_scores=rep_scores, df_score=df, reps=reps)


def canonical_equal(a: Outcome, b: Outcome, errors_match: bool = True) -> bool:
    """Alg-style output agreement; timeouts must be excluded upstream."""
    if a.kind == OUTPUT and b.kind == OUTPUT:
        return a.text == b.text
    if a.kind == ERROR and b.kind == ERROR:
        return errors_match and a.text == b.text
    return False


def _parse_outcome(raw: str) -> Outcome:
    if raw.startswith("OUT:"):
        return Outcome(OUTPUT, raw[4:])
    if raw.startswith("ERROR:"):
        return Outcome(ERROR, raw[6:])
    if raw.startswith("BINDERR:"):
        return Outcome(BINDERR, raw[8:])
    raise RunnerCrashed(f"unrecognized outcome encoding: {raw[:40]!r}")


class RunnerClient:
    """Owns one runner process; restarts it after timeout kills."""

    def __init__(self, command: list[str], init_msg: dict, init_timeout: float = 30.0):
        self.command = command
        self.init_msg = init_msg
        self.init_timeout = init_timeout
        self.proc: subprocess.Popen | None = None
        self.lines: queue.Queue = queue.Queue()

    def start(self) -> None:
        self.lines = queue.Queue()
        try:
            self.proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                encoding="utf-8",
                start_new_session=True,
            )
        except OSError as e:
            raise RunnerCrashed(f"cannot start runner {self.command!r}: {e}") from e
        thread = threading.Thread(
            target=self._reader, args=(self.proc.stdout, self.lines), daemon=True
        )
        thread.start()
        self._send(self.init_msg)
        reply = self._recv(self.init_timeout)
        if reply is None:
            self.kill()
            raise RunnerCrashed("runner did not acknowledge init in time")
        if not reply.get("ok"):
            self.kill()
            raise RunnerCrashed(f"runner rejected init: {reply.get('err')}")

    @staticmethod
    def _reader(stream, sink: queue.Queue) -> None:
        for line in stream:
            sink.put(line)
        sink.put(None)

    def _send(self, obj: dict) -> None:
        if self.proc is None or self.proc.stdin is None:
            raise RunnerCrashed("runner process is not running")
        try:
            self.proc.stdin.write(json.dumps(obj, separators=(",", ":")) + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise RunnerCrashed(f"runner pipe closed: {e}") from e

    def _recv(self, timeout: float) -> dict | None:
        """One protocol reply, or None on timeout/EOF."""
        deadline = time.monotonic() + timeout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None
            try:
                line = self.lines.get(timeout=remaining)
            except queue.Empty:
                return None
            if line is None:
                return None
            line = line.strip()
            if not line:
                continue
            try:
                return json.loads(line)
            except json.JSONDecodeError as e:
                raise RunnerCrashed(f"runner sent non-JSON line: {line[:80]!r}") from e

    def kill(self) -> None:
        if self.proc is None:
            return
        try:
            os.killpg(os.getpgid(self.proc.pid), signal.SIGKILL)
        except (ProcessLookupError, PermissionError, OSError):
            pass
        self.proc.wait()
        self.proc = None

    def restart(self) -> None:
        self.kill()
        self.start()

    def execute(self, buf: bytes, timeout: float) -> tuple[Outcome, Outcome]:
        """Run one input; timeout or runner death yields Timeout on both
        sides (the runner is restarted for the next input)."""
        try:
            self._send({"op": "exec", "buf": base64.b64encode(buf).decode("ascii")})
        except RunnerCrashed:
            self.restart()
            return Outcome(TIMEOUT), Outcome(TIMEOUT)
        reply = self._recv(timeout)
        if reply is None:
            self.restart()
            return Outcome(TIMEOUT), Outcome(TIMEOUT)
        if not reply.get("ok") or "out_a" not in reply or "out_b" not in reply:
            raise RunnerCrashed(f"malformed exec reply: {reply!r}")
        return _parse_outcome(reply["out_a"]), _parse_outcome(reply["out_b"])

    def shutdown(self) -> None:
        if self.proc is None:
            return
        try:
            self._send({"op": "shutdown"})
            self.proc.wait(timeout=5)
            self.proc = None
        except (RunnerCrashed, subprocess.TimeoutExpired):
            self.kill()

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, *exc):
        self.shutdown()


def init_message(pair: CodePairRecord, task: TaskSpec) -> dict:
    msg = {
        "op": "init",
        "mode": task.level,
        "code_a": pair.code_ori,
        "code_b": pair.code_var,
        "binding": task.binding_program,
    }
    if task.entry_point is not None:
        msg["entry"] = task.entry_point
    return msg


def score_pair(
    pair: CodePairRecord,
    task: TaskSpec,
    cfg: HarnessConfig,
    plan: FuzzPlan,
    runner: RunnerClient,
) -> PairScore:
    """Differential-fuzz a pair over R repetitions of N fresh inputs each."""
    n = cfg.resolved_n(task.level)
    rep_scores: list[float] = []
    reps: list[RepStats] = []
    for r in range(1, cfg.repetitions + 1):
        rep_plan = replace(plan, seed=derive_seed(plan.seed, r), n_inputs=n)
        buffers = generate_buffers(rep_plan)
        t0 = time.monotonic()
        matched = 0
        excluded = 0
        executed_inputs = 0
        budget_exhausted = False
        for buf in buffers:
            if time.monotonic() - t0 > cfg.repetition_budget_seconds:
                budget_exhausted = True
                break
            out_a, out_b = runner.execute(buf, cfg.per_input_timeout_seconds)
            if TIMEOUT in (out_a.kind, out_b.kind) or BINDERR in (out_a.kind, out_b.kind):
                excluded += 1
                continue
            executed_inputs += 1
            if canonical_equal(out_a, out_b, cfg.errors_match):
                matched += 1
        reps.append(RepStats(matched, executed_inputs, excluded, budget_exhausted))
        if budget_exhausted or executed_inputs == 0:
            continue
        rep_scores.append(matched / executed_inputs)
    return PairScore.from_reps(rep_scores, reps)


def score_pair_with_command(
    pair: CodePairRecord,
    task: TaskSpec,
    cfg: HarnessConfig,
    plan: FuzzPlan,
    command: list[str],
) -> PairScore:
    """Convenience wrapper: spawn, init, score, shut down."""
    client = RunnerClient(command, init_message(pair, task), cfg.init_timeout_seconds)
    with client:
        return score_pair(pair, task, cfg, plan, client)
