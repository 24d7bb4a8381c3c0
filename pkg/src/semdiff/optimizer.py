"""Optimized-variant acquisition from a chat-completion endpoint or a
deterministic offline stub.

The provider must answer with a JSON object {"strategies": [...],
"code": "..."} naming one or more of the five optimization strategies,
or {"strategies": ["None"]} with no code when the reference cannot be
optimized. Replies that fail to parse as Python are rejected and
retried; live replies are cached so reruns are replayable offline.
"""

from __future__ import annotations

import ast
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import requests

from semdiff.errors import MalformedResponse, SchemaError, TransportError
from semdiff.model import TaskSpec

STRATEGIES = ("Algorithmic", "DataStructures", "ColdPath", "HotPath", "Memoization")
NONE_STRATEGY = "None"

DEFAULT_ENV_VAR = "SEMDIFF_LLM_KEY"

PROMPT_TEMPLATE = """\
Optimize the reference implementation below for performance using one or
more of these five strategies: Algorithmic, DataStructures, ColdPath,
HotPath, Memoization. Preserve the exact observable behavior.

Reply with a single JSON object: {{"strategies": ["..."], "code": "..."}}.
If the code cannot be meaningfully optimized, reply with
{{"strategies": ["None"]}} and no code.

Task description:
{description}

Reference implementation:
```python
{code}
```
"""


@dataclass(frozen=True)
class OptimizedVariant:
    code: str
    strategies: list[str]


class NotOptimizable:
    """Marker result: the model declined with the None strategy."""

    def __repr__(self):
        return "NotOptimizable()"


@dataclass(frozen=True)
class ProviderConfig:
    endpoint: str
    model: str
    env_var: str = DEFAULT_ENV_VAR
    timeout_seconds: float = 60.0
    max_retries: int = 2
    max_in_flight: int = 4
    cache_path: str | None = None

    def __post_init__(self):
        if self.timeout_seconds <= 0:
            raise ValueError("timeout_seconds must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")


def _validate_reply(obj: dict) -> OptimizedVariant | NotOptimizable:
    strategies = obj.get("strategies")
    if not isinstance(strategies, list) or not strategies:
        raise MalformedResponse("reply lacks a non-empty 'strategies' list")
    if NONE_STRATEGY in strategies:
        if len(strategies) != 1 or obj.get("code"):
            raise SchemaError("'None' strategy is exclusive and carries no code")
        return NotOptimizable()
    unknown = [s for s in strategies if s not in STRATEGIES]
    if unknown:
        raise MalformedResponse(f"unknown strategies: {unknown}")
    code = obj.get("code")
    if not isinstance(code, str) or not code.strip():
        raise MalformedResponse("reply lacks 'code'")
    try:
        ast.parse(code)
    except SyntaxError as e:
        raise MalformedResponse(f"returned code does not parse: {e}") from e
    return OptimizedVariant(code=code, strategies=list(strategies))


class StubProvider:
    """Answers from a JSONL fixture mapping task_id -> {code, strategies}."""

    def __init__(self, fixture: str | Path):
        self.answers: dict[str, dict] = {}
        for i, line in enumerate(
            Path(fixture).read_text(encoding="utf-8").splitlines(), 1
        ):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise SchemaError(f"invalid JSON: {e}", i) from e
            task_id = obj.get("task_id")
            if not isinstance(task_id, str):
                raise SchemaError("fixture entry lacks task_id", i)
            strategies = obj.get("strategies")
            if not isinstance(strategies, list) or not strategies:
                raise SchemaError("fixture entry lacks strategies", i)
            if NONE_STRATEGY in strategies and (len(strategies) != 1 or obj.get("code")):
                raise SchemaError("'None' strategy is exclusive and carries no code", i)
            self.answers[task_id] = obj

    def request(self, task: TaskSpec) -> OptimizedVariant | NotOptimizable:
        entry = self.answers.get(task.task_id)
        if entry is None:
            raise MalformedResponse(f"stub fixture has no entry for {task.task_id!r}")
        return _validate_reply(entry)


@dataclass
class LiveProvider:
    """Talks to an HTTP chat-completion endpoint; caches replies."""

    cfg: ProviderConfig
    _session: requests.Session = field(default_factory=requests.Session)

    def _headers(self) -> dict:
        key = os.environ.get(self.cfg.env_var, "")
        headers = {"Content-Type": "application/json"}
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _cache(self, task_id: str, obj: dict) -> None:
        if not self.cfg.cache_path:
            return
        entry = dict(obj)
        entry["task_id"] = task_id
        with open(self.cfg.cache_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, separators=(",", ":")) + "\n")

    def request(self, task: TaskSpec) -> OptimizedVariant | NotOptimizable:
        prompt = PROMPT_TEMPLATE.format(
            description=task.nl_description or "(no description provided)",
            code=task.reference_code,
        )
        body = {
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
        }
        last_error: Exception | None = None
        for _ in range(self.cfg.max_retries + 1):
            try:
                response = self._session.post(
                    self.cfg.endpoint,
                    json=body,
                    headers=self._headers(),
                    timeout=self.cfg.timeout_seconds,
                )
            except requests.RequestException as e:
                raise TransportError(str(e)) from e
            if response.status_code >= 400:
                raise TransportError(
                    f"provider returned HTTP {response.status_code}"
                )
            try:
                content = response.json()["choices"][0]["message"]["content"]
                obj = _extract_json(content)
                result = _validate_reply(obj)
            except (MalformedResponse, KeyError, IndexError, TypeError, ValueError) as e:
                last_error = e
                continue
            if isinstance(result, OptimizedVariant):
                self._cache(task.task_id, {"strategies": result.strategies, "code": result.code})
            else:
                self._cache(task.task_id, {"strategies": [NONE_STRATEGY]})
            return result
        raise MalformedResponse(
            f"no valid reply for {task.task_id!r} after "
            f"{self.cfg.max_retries + 1} attempts: {last_error}"
        )


def _extract_json(content: str) -> dict:
    try:
        return json.loads(content)
    except json.JSONDecodeError:
        pass
    start = content.find("{")
    end = content.rfind("}")
    if start == -1 or end <= start:
        raise MalformedResponse("reply contains no JSON object")
    return json.loads(content[start : end + 1])


def stub_provider(fixture: str | Path) -> StubProvider:
    return StubProvider(fixture)


def request_optimized_variant(
    task: TaskSpec, cfg: ProviderConfig | StubProvider
) -> OptimizedVariant | NotOptimizable:
    """One optimized variant (or NotOptimizable) for a task."""
    provider = cfg if isinstance(cfg, StubProvider) else LiveProvider(cfg)
    return provider.request(task)


def request_many(
    tasks: list[TaskSpec], provider, max_in_flight: int = 4
) -> list[OptimizedVariant | NotOptimizable | Exception]:
    """Bounded-concurrency batch; results align with tasks, failures are
    returned in place so one task cannot abort a corpus run."""
    results: list = [None] * len(tasks)

    def one(index: int):
        try:
            results[index] = provider.request(tasks[index])
        except Exception as e:  # noqa: BLE001 - per-task isolation
            results[index] = e

    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        list(pool.map(one, range(len(tasks))))
    return results
