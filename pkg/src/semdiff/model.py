"""Canonical data types and JSONL persistence.

Datasets are stored as line-delimited JSON: a single header object
``{"schema": "semdiff/1", "tool_version": ..., "config_digest": ...}``
followed by one record per line. Field order is fixed and floats use
Python's shortest round-trip repr, so save -> load -> save is
byte-stable. Records with optional fields absent omit the keys.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from semdiff.errors import SchemaError

SCHEMA_TAG = "semdiff/1"
DF_SENTINEL = -1.0  # all repetitions timed out
MEAN_TOLERANCE = 1e-12

LEVELS = ("function", "program")
VARIANT_KINDS = ("optimized", "mutated")


@dataclass(frozen=True)
class TaskSpec:
    """One benchmark problem: reference code plus its input binding."""

    task_id: str
    source_benchmark: str
    reference_code: str
    level: str
    binding_program: str
    nl_description: str | None = None
    entry_point: str | None = None
    example_input: str | None = None

    def violations(self) -> list[str]:
        out = []
        if not self.task_id:
            out.append("task_id: must be non-empty")
        if self.level not in LEVELS:
            out.append(f"level: must be one of {LEVELS}")
        if self.level == "function" and not self.entry_point:
            out.append("entry_point: required when level=function")
        if self.level == "program" and self.entry_point:
            out.append("entry_point: must be absent when level=program")
        if not self.binding_program.strip():
            out.append("binding_program: must be non-empty")
        return out


@dataclass(frozen=True)
class VariantRecord:
    """A generated variant of a reference solution, with provenance."""

    variant_id: str
    task_id: str
    variant_code: str
    variant_kind: str
    provenance: dict
    parses_ok: bool

    def violations(self, reference_code: str | None = None) -> list[str]:
        out = []
        if self.variant_kind not in VARIANT_KINDS:
            out.append(f"variant_kind: must be one of {VARIANT_KINDS}")
        if not self.parses_ok:
            out.append("parses_ok: admitted variants must parse")
        if reference_code is not None and self.variant_code == reference_code:
            out.append("variant_code: must differ from reference_code")
        return out


@dataclass(frozen=True)
class CodePairRecord:
    """A (code_ori, code_var) pair plus its similarity annotations."""

    pair_id: str
    task_id: str
    code_ori: str
    code_var: str
    level: str
    surface_sim: float | None = None
    df_score: float | None = None
    rep_scores: list[float] | None = None
    metric_scores: dict[str, float] = field(default_factory=dict)
    note: str | None = None


@dataclass(frozen=True)
class RegionThresholds:
    """Axis-aligned corner boundaries in the SurfaceSim x df_score square."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        for name in ("x_lo", "x_hi", "y_lo", "y_hi"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0,1], got {v}")
        if not self.x_lo < self.x_hi:
            raise ValueError("x_lo must be < x_hi")
        if not self.y_lo < self.y_hi:
            raise ValueError("y_lo must be < y_hi")


@dataclass(frozen=True)
class DatasetHeader:
    tool_version: str = "0.1.0"
    config_digest: str = ""

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": SCHEMA_TAG,
                "tool_version": self.tool_version,
                "config_digest": self.config_digest,
            },
            separators=(",", ":"),
            ensure_ascii=False,
        )


@dataclass
class Dataset:
    header: DatasetHeader = field(default_factory=DatasetHeader)
    records: list[CodePairRecord] = field(default_factory=list)


def validate_record(r: CodePairRecord) -> list[str]:
    """Return invariant violations as "field: rule" strings; [] when valid."""
    out = []
    if not r.pair_id:
        out.append("pair_id: must be non-empty")
    if r.level not in LEVELS:
        out.append(f"level: must be one of {LEVELS}")
    if r.surface_sim is not None and not 0.0 <= r.surface_sim <= 1.0:
        out.append("surface_sim: must be in [0,1]")
    if r.df_score is not None:
        if not (0.0 <= r.df_score <= 1.0 or r.df_score == DF_SENTINEL):
            out.append("df_score: must be in [0,1] or the -1 sentinel")
    if r.rep_scores is not None:
        if any(not 0.0 <= s <= 1.0 for s in r.rep_scores):
            out.append("rep_scores: every entry must be in [0,1]")
        if r.rep_scores:
            if r.df_score is None:
                out.append("df_score: required when rep_scores present")
            else:
                mean = statistics.mean(r.rep_scores)
                if abs(r.df_score - mean) > MEAN_TOLERANCE:
                    out.append(
                        f"df_score: must equal mean(rep_scores)={mean!r} "
                        f"within {MEAN_TOLERANCE}"
                    )
    for name, score in r.metric_scores.items():
        if not isinstance(score, (int, float)) or score < 0:
            out.append(f"metric_scores[{name}]: must be a real >= 0")
    return out


# --- serialization -------------------------------------------------------

_PAIR_FIELDS = (
    "pair_id",
    "task_id",
    "code_ori",
    "code_var",
    "level",
    "surface_sim",
    "df_score",
    "rep_scores",
    "metric_scores",
    "note",
)

_OPTIONAL_PAIR_FIELDS = {"surface_sim", "df_score", "rep_scores", "note"}


def record_to_json(r: CodePairRecord) -> str:
    obj = {}
    for name in _PAIR_FIELDS:
        value = getattr(r, name)
        if name in _OPTIONAL_PAIR_FIELDS and value is None:
            continue
        obj[name] = value
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _require(obj: dict, key: str, types, line: int):
    if key not in obj:
        raise SchemaError(f"missing field {key!r}", line)
    value = obj[key]
    if not isinstance(value, types):
        raise SchemaError(f"field {key!r} has wrong type {type(value).__name__}", line)
    return value


def record_from_json(text: str, line: int) -> CodePairRecord:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}", line) from e
    if not isinstance(obj, dict):
        raise SchemaError("record must be a JSON object", line)
    rep_scores = obj.get("rep_scores")
    if rep_scores is not None:
        if not isinstance(rep_scores, list) or not all(
            isinstance(s, (int, float)) for s in rep_scores
        ):
            raise SchemaError("field 'rep_scores' must be a list of reals", line)
        rep_scores = [float(s) for s in rep_scores]
    metric_scores = obj.get("metric_scores", {})
    if not isinstance(metric_scores, dict):
        raise SchemaError("field 'metric_scores' must be an object", line)
    surface_sim = obj.get("surface_sim")
    df_score = obj.get("df_score")
    record = CodePairRecord(
        pair_id=_require(obj, "pair_id", str, line),
        task_id=_require(obj, "task_id", str, line),
        code_ori=_require(obj, "code_ori", str, line),
        code_var=_require(obj, "code_var", str, line),
        level=_require(obj, "level", str, line),
        surface_sim=None if surface_sim is None else float(surface_sim),
        df_score=None if df_score is None else float(df_score),
        rep_scores=rep_scores,
        metric_scores={k: float(v) for k, v in metric_scores.items()},
        note=obj.get("note"),
    )
    problems = validate_record(record)
    if problems:
        raise SchemaError("; ".join(problems), line)
    return record


def _header_from_json(text: str) -> DatasetHeader:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON header: {e}", 1) from e
    if not isinstance(obj, dict) or obj.get("schema") != SCHEMA_TAG:
        raise SchemaError(f"first line must be a {SCHEMA_TAG} header", 1)
    return DatasetHeader(
        tool_version=str(obj.get("tool_version", "")),
        config_digest=str(obj.get("config_digest", "")),
    )


def load_dataset(path: str | Path) -> Dataset:
    """Load and validate a JSONL dataset; SchemaError carries line numbers."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        return Dataset()
    header = _header_from_json(lines[0])
    records = []
    seen: set[str] = set()
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        record = record_from_json(line, i)
        if record.pair_id in seen:
            raise SchemaError(f"duplicate pair_id {record.pair_id!r}", i)
        seen.add(record.pair_id)
        records.append(record)
    return Dataset(header=header, records=records)


def save_dataset(ds: Dataset, path: str | Path) -> None:
    """Write a dataset; load(save(ds)) is structurally equal to ds."""
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(ds.header.to_json() + "\n")
        for record in ds.records:
            fh.write(record_to_json(record) + "\n")


def append_records(path: str | Path, records: Iterable[CodePairRecord]) -> None:
    """Append records to an existing dataset file (single-writer)."""
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(record_to_json(record) + "\n")


# --- task corpus and variant files ---------------------------------------

_TASK_FIELDS = (
    "task_id",
    "source_benchmark",
    "nl_description",
    "reference_code",
    "level",
    "entry_point",
    "binding_program",
    "example_input",
)


def task_to_json(t: TaskSpec) -> str:
    obj = {}
    for name in _TASK_FIELDS:
        value = getattr(t, name)
        if value is None:
            continue
        obj[name] = value
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def load_tasks(path: str | Path) -> list[TaskSpec]:
    """Load a task corpus (plain JSONL, no header); validates invariants."""
    tasks = []
    seen: set[str] = set()
    for i, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e}", i) from e
        task = TaskSpec(
            task_id=_require(obj, "task_id", str, i),
            source_benchmark=str(obj.get("source_benchmark", "")),
            reference_code=_require(obj, "reference_code", str, i),
            level=_require(obj, "level", str, i),
            binding_program=_require(obj, "binding_program", str, i),
            nl_description=obj.get("nl_description"),
            entry_point=obj.get("entry_point"),
            example_input=obj.get("example_input"),
        )
        problems = task.violations()
        if problems:
            raise SchemaError("; ".join(problems), i)
        if task.task_id in seen:
            raise SchemaError(f"duplicate task_id {task.task_id!r}", i)
        seen.add(task.task_id)
        tasks.append(task)
    return tasks


def save_tasks(tasks: Iterable[TaskSpec], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for task in tasks:
            fh.write(task_to_json(task) + "\n")


def variant_to_json(v: VariantRecord) -> str:
    obj = {
        "variant_id": v.variant_id,
        "task_id": v.task_id,
        "variant_code": v.variant_code,
        "variant_kind": v.variant_kind,
        "provenance": v.provenance,
        "parses_ok": v.parses_ok,
    }
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def load_variants(path: str | Path) -> tuple[DatasetHeader, list[VariantRecord]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        return DatasetHeader(), []
    header = _header_from_json(lines[0])
    variants = []
    seen: set[str] = set()
    for i, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e}", i) from e
        variant = VariantRecord(
            variant_id=_require(obj, "variant_id", str, i),
            task_id=_require(obj, "task_id", str, i),
            variant_code=_require(obj, "variant_code", str, i),
            variant_kind=_require(obj, "variant_kind", str, i),
            provenance=_require(obj, "provenance", dict, i),
            parses_ok=_require(obj, "parses_ok", bool, i),
        )
        problems = variant.violations()
        if problems:
            raise SchemaError("; ".join(problems), i)
        if variant.variant_id in seen:
            raise SchemaError(f"duplicate variant_id {variant.variant_id!r}", i)
        seen.add(variant.variant_id)
        variants.append(variant)
    return header, variants


def save_variants(
    header: DatasetHeader, variants: Iterable[VariantRecord], path: str | Path
) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header.to_json() + "\n")
        for variant in variants:
            fh.write(variant_to_json(variant) + "\n")
