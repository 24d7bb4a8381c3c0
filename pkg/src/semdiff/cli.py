"""Command-line pipeline: variants -> surface -> score -> audit/regions.

All subcommands honor --config (TOML), --seed and --jobs; flag values
override config values. The resolved config digest is stamped into
every dataset header, and scoring checkpoints per pair so interrupted
runs resume without rescoring.

Exit codes: 0 success (possibly with warnings), 1 usage error, 2 data
error, 3 runner or transport failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import shlex
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from semdiff import __version__, model, optimizer, regions, stats, surface
from semdiff.errors import (
    MissingScores,
    NoFeasibleCandidate,
    RunnerCrashed,
    RunnerNotFound,
    SchemaError,
    SemdiffError,
    TransportError,
)
from semdiff.fuzzing import FuzzPlan, derive_seed
from semdiff.harness import HarnessConfig, score_pair_with_command
from semdiff.model import CodePairRecord, Dataset, DatasetHeader
from semdiff.mutation import OPERATORS, generate_mutants

USAGE_ERROR = 1
DATA_ERROR = 2
RUNNER_ERROR = 3


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def config_digest(resolved: dict) -> str:
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def _cfg_get(cfg: dict, section: str, key: str, default):
    return cfg.get(section, {}).get(key, default)


def _header(resolved: dict) -> DatasetHeader:
    return DatasetHeader(tool_version=__version__, config_digest=config_digest(resolved))


def _resolve_common(args, cfg: dict) -> dict:
    seed = args.seed if args.seed is not None else cfg.get("seed", 0)
    jobs = args.jobs if args.jobs is not None else cfg.get("jobs", 1)
    return {"seed": int(seed), "jobs": max(1, int(jobs))}


def _harness_config(args, cfg: dict) -> HarnessConfig:
    section = cfg.get("harness", {})
    n_inputs = getattr(args, "n_inputs", None)
    if n_inputs is None:
        n_inputs = section.get("n_inputs")
    return HarnessConfig(
        n_inputs=n_inputs,
        repetitions=int(section.get("repetitions", 5)),
        repetition_budget_seconds=float(section.get("repetition_budget_seconds", 60.0)),
        per_input_timeout_seconds=float(section.get("per_input_timeout_seconds", 1.0)),
        errors_match=bool(section.get("errors_match", True)),
    )


def _fuzz_plan(cfg: dict, seed: int) -> FuzzPlan:
    section = cfg.get("fuzz", {})
    return FuzzPlan(
        seed=seed,
        min_len=int(section.get("min_len", 16)),
        max_len=int(section.get("max_len", 4096)),
        corpus_fraction=float(section.get("corpus_fraction", 0.5)),
    )


# --- variants --------------------------------------------------------------

def cmd_variants(args) -> int:
    cfg = load_config(args.config)
    common = _resolve_common(args, cfg)
    operators = (
        set(args.operators.split(","))
        if args.operators
        else set(_cfg_get(cfg, "mutation", "operators", list(OPERATORS)))
    )
    max_mutants = args.max_mutants or int(_cfg_get(cfg, "mutation", "max_mutants", 20))
    stub_path = args.stub_fixture or _cfg_get(cfg, "optimizer", "stub_fixture", None)
    endpoint = _cfg_get(cfg, "optimizer", "endpoint", None)

    tasks = model.load_tasks(args.tasks)
    provider = None
    if stub_path:
        provider = optimizer.stub_provider(stub_path)
    elif endpoint:
        provider = optimizer.LiveProvider(
            optimizer.ProviderConfig(
                endpoint=endpoint,
                model=_cfg_get(cfg, "optimizer", "model", ""),
                env_var=_cfg_get(cfg, "optimizer", "env_var", optimizer.DEFAULT_ENV_VAR),
                cache_path=_cfg_get(cfg, "optimizer", "cache_path", None),
            )
        )

    resolved = {
        "command": "variants",
        "seed": common["seed"],
        "operators": sorted(operators),
        "max_mutants": max_mutants,
        "stub_fixture": str(stub_path) if stub_path else None,
    }
    header = _header(resolved)

    variants: list[model.VariantRecord] = []
    pairs: list[CodePairRecord] = []
    warnings = 0
    for task in tasks:
        try:
            mutants = generate_mutants(
                task.reference_code, max_mutants, operators, task_id=task.task_id
            )
        except SemdiffError as e:
            print(f"warning: task {task.task_id}: {e}", file=sys.stderr)
            warnings += 1
            continue
        task_variants = list(mutants)
        if provider is not None:
            try:
                answer = provider.request(task)
            except (SemdiffError, TransportError) as e:
                print(f"warning: task {task.task_id}: optimizer: {e}", file=sys.stderr)
                warnings += 1
                answer = None
            if isinstance(answer, optimizer.OptimizedVariant):
                if answer.code != task.reference_code:
                    task_variants.append(
                        model.VariantRecord(
                            variant_id=f"{task.task_id}-opt-0000",
                            task_id=task.task_id,
                            variant_code=answer.code,
                            variant_kind="optimized",
                            provenance={"strategies": answer.strategies},
                            parses_ok=True,
                        )
                    )
        variants.extend(task_variants)
        for v in task_variants:
            pairs.append(
                CodePairRecord(
                    pair_id=v.variant_id,
                    task_id=task.task_id,
                    code_ori=task.reference_code,
                    code_var=v.variant_code,
                    level=task.level,
                )
            )

    model.save_variants(header, variants, args.out_variants)
    model.save_dataset(Dataset(header=header, records=pairs), args.out_pairs)
    print(
        f"wrote {len(variants)} variants ({warnings} warnings) to "
        f"{args.out_variants} and {args.out_pairs}"
    )
    return 0


# --- surface ---------------------------------------------------------------

def cmd_surface(args) -> int:
    cfg = load_config(args.config)
    common = _resolve_common(args, cfg)
    ds = model.load_dataset(args.dataset)

    def fill(record: CodePairRecord) -> CodePairRecord:
        if record.surface_sim is not None:
            return record
        value = surface.surface_sim(record.code_ori, record.code_var)
        return dataclasses.replace(record, surface_sim=value)

    with ThreadPoolExecutor(max_workers=common["jobs"]) as pool:
        records = list(pool.map(fill, ds.records))
    out = args.out or args.dataset
    model.save_dataset(Dataset(header=ds.header, records=records), out)
    print(f"surface similarity filled for {len(records)} pairs -> {out}")
    return 0


# --- score -----------------------------------------------------------------

def cmd_score(args) -> int:
    cfg = load_config(args.config)
    common = _resolve_common(args, cfg)
    runner_spec = args.runner or _cfg_get(cfg, "score", "runner", None)
    if not runner_spec:
        raise RunnerNotFound("no runner command given (--runner or [score].runner)")
    command = shlex.split(runner_spec)
    harness_cfg = _harness_config(args, cfg)
    ds = model.load_dataset(args.dataset)
    tasks = {t.task_id: t for t in model.load_tasks(args.tasks)}
    dataset_path = Path(args.dataset)
    out = Path(args.out) if args.out else dataset_path.with_suffix(".scored.jsonl")
    if out == dataset_path:
        raise SchemaError("--out must differ from --dataset (scoring appends)")

    resolved = {
        "command": "score",
        "seed": common["seed"],
        "runner": command,
        "n_inputs": harness_cfg.n_inputs,
        "repetitions": harness_cfg.repetitions,
        "budget": harness_cfg.repetition_budget_seconds,
        "per_input_timeout": harness_cfg.per_input_timeout_seconds,
        "errors_match": harness_cfg.errors_match,
    }
    header = _header(resolved)

    done: dict[str, CodePairRecord] = {}
    if out.exists():
        existing = model.load_dataset(out)
        if existing.header.config_digest != header.config_digest:
            raise SchemaError(
                f"checkpoint {out} was written with config digest "
                f"{existing.header.config_digest!r}, current is "
                f"{header.config_digest!r}; remove it or restore the config"
            )
        done = {r.pair_id: r for r in existing.records}
    else:
        model.save_dataset(Dataset(header=header, records=[]), out)

    pending = [(i, r) for i, r in enumerate(ds.records) if r.pair_id not in done]

    def score_one(record: CodePairRecord) -> CodePairRecord:
        task = tasks.get(record.task_id)
        if task is None:
            return dataclasses.replace(record, note=f"no task {record.task_id!r} in corpus")
        plan = _fuzz_plan(cfg, derive_seed(common["seed"], record.pair_id))
        try:
            score = score_pair_with_command(record, task, harness_cfg, plan, command)
        except RunnerCrashed as e:
            return dataclasses.replace(record, note=f"runner crashed: {e}")
        return dataclasses.replace(
            record,
            df_score=score.df_score,
            rep_scores=score.rep_scores if score.rep_scores else None,
        )

    scored = 0
    with ThreadPoolExecutor(max_workers=common["jobs"]) as pool:
        for record in pool.map(score_one, [r for _, r in pending]):
            model.append_records(out, [record])
            scored += 1
    print(f"scored {scored} pairs ({len(done)} already done) -> {out}")
    return 0


# --- audit -----------------------------------------------------------------

def load_metric_scores(path: str | Path) -> dict[str, dict[str, float]]:
    """Side files keyed by pair_id; CSV header row or JSONL objects.

    Returns {metric: {pair_id: score}}.
    """
    path = Path(path)
    out: dict[str, dict[str, float]] = {}
    if path.suffix.lower() == ".csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if not reader.fieldnames or reader.fieldnames[0] != "pair_id":
                raise SchemaError(f"{path}: first CSV column must be pair_id")
            for row in reader:
                pid = row["pair_id"]
                for metric, raw in row.items():
                    if metric == "pair_id" or raw in (None, ""):
                        continue
                    out.setdefault(metric, {})[pid] = float(raw)
        return out
    for i, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise SchemaError(f"invalid JSON: {e}", i) from e
        pid = obj.get("pair_id")
        if not isinstance(pid, str):
            raise SchemaError("score line lacks pair_id", i)
        for metric, raw in obj.items():
            if metric == "pair_id":
                continue
            out.setdefault(metric, {})[pid] = float(raw)
    return out


def attach_metric_scores(ds: Dataset, scores: dict[str, dict[str, float]]) -> Dataset:
    for metric, by_pair in scores.items():
        missing = [r.pair_id for r in ds.records if r.pair_id not in by_pair]
        if missing:
            raise MissingScores(metric, missing)
    records = []
    for r in ds.records:
        merged = dict(r.metric_scores)
        for metric, by_pair in scores.items():
            merged[metric] = by_pair[r.pair_id]
        records.append(dataclasses.replace(r, metric_scores=merged))
    return Dataset(header=ds.header, records=records)


def cmd_audit(args) -> int:
    ds = model.load_dataset(args.dataset)
    scores: dict[str, dict[str, float]] = {}
    for score_file in args.scores or []:
        scores.update(load_metric_scores(score_file))
    if scores:
        ds = attach_metric_scores(ds, scores)
    metrics = sorted({m for r in ds.records for m in r.metric_scores})
    if not metrics:
        raise MissingScores("<any>", [r.pair_id for r in ds.records])

    labeled = [r for r in ds.records if r.df_score is not None and r.df_score >= 0]
    eq_subset = [r for r in labeled if r.df_score >= args.eq_min]

    split = None
    if args.split:
        split = json.loads(Path(args.split).read_text(encoding="utf-8"))
        by_id = {r.pair_id: r for r in ds.records}
        for key in ("intra", "inter"):
            unknown = [p for p in split.get(key, []) if p not in by_id]
            if unknown:
                raise MissingScores(key, unknown)

    rows = []
    for metric in metrics:
        series = stats.ScoreSeries(
            metric,
            [r.metric_scores[metric] for r in labeled],
            [r.df_score for r in labeled],
        )
        row = {"metric": metric, "n": len(labeled), "mae": stats.mae(series)}
        if len(eq_subset) >= 3:
            try:
                rho, p = stats.spearman(
                    [r.metric_scores[metric] for r in eq_subset],
                    [r.surface_sim for r in eq_subset],
                )
                row["spearman_rho"] = rho
                row["spearman_p"] = p
                row["spearman_n"] = len(eq_subset)
            except SemdiffError as e:
                row["spearman_note"] = str(e)
        if split is not None:
            by_id = {r.pair_id: r for r in ds.records}
            row["distinguishability"] = stats.distinguishability(
                [by_id[p].metric_scores[metric] for p in split["intra"]],
                [by_id[p].metric_scores[metric] for p in split["inter"]],
            )
        rows.append(row)

    keys = ["metric", "n", "mae", "spearman_rho", "spearman_p", "spearman_n",
            "distinguishability"]
    if args.out_csv:
        with open(args.out_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=keys, extrasaction="ignore")
            writer.writeheader()
            writer.writerows(rows)
    for row in rows:
        parts = [f"{row['metric']:<16} mae={row['mae']:.4f}"]
        if "spearman_rho" in row:
            parts.append(
                f"rho={row['spearman_rho']:+.4f} p={row['spearman_p']:.3g} "
                f"(n={row['spearman_n']})"
            )
        if "distinguishability" in row:
            parts.append(f"d={row['distinguishability']:.4f}")
        print("  ".join(parts))
    return 0


# --- regions ---------------------------------------------------------------

def cmd_regions(args) -> int:
    cfg = load_config(args.config)
    ds = model.load_dataset(args.dataset)
    scores: dict[str, dict[str, float]] = {}
    for score_file in args.scores or []:
        scores.update(load_metric_scores(score_file))
    if scores:
        ds = attach_metric_scores(ds, scores)
    usable = Dataset(
        header=ds.header,
        records=[
            r
            for r in ds.records
            if r.surface_sim is not None
            and r.df_score is not None
            and 0 <= r.df_score <= 1
        ],
    )
    delta = args.delta or float(_cfg_get(cfg, "regions", "delta", regions.DEFAULT_DELTA))
    flavor = args.error_flavor or _cfg_get(cfg, "regions", "error_flavor", "absolute")
    metric_names = args.metrics.split(",") if args.metrics else None
    th = regions.select_thresholds(usable, delta, metric_names, flavor)
    coverage = regions.region_coverage(usable, th)
    try:
        distance = regions.mean_boundary_distance(usable, th)
    except SemdiffError:
        distance = None

    if args.scatter:
        with open(args.scatter, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["surface_sim", "df_score", "region"])
            for r in usable.records:
                writer.writerow(
                    [r.surface_sim, r.df_score, regions.classify(r.surface_sim, r.df_score, th)]
                )

    print(f"thresholds: x_lo={th.x_lo} x_hi={th.x_hi} y_lo={th.y_lo} y_hi={th.y_hi}")
    for name in (regions.SFD, regions.DFS, regions.CONTROL):
        count = coverage["counts"][name]
        frac = coverage["fractions"][name]
        print(f"  {name:<8} {count:>6}  ({frac:.1%})")
    if distance is not None:
        print(f"mean control-to-corner distance: {distance:.4f}")
    return 0


# --- report ----------------------------------------------------------------

def cmd_report(args) -> int:
    ds = model.load_dataset(args.dataset)
    n = len(ds.records)
    scored = [r for r in ds.records if r.df_score is not None]
    timed_out = [r for r in scored if r.df_score == -1]
    valid = [r for r in scored if 0 <= r.df_score <= 1]
    with_surface = [r for r in ds.records if r.surface_sim is not None]
    print(f"dataset: {args.dataset}")
    print(f"  records: {n}")
    print(f"  scored: {len(scored)} (timeout sentinel: {len(timed_out)})")
    if valid:
        mean_df, std_df = stats.mean_std([r.df_score for r in valid])
        print(f"  df_score mean: {mean_df:.4f} (+/- {std_df:.4f})")
    if with_surface:
        mean_ss, std_ss = stats.mean_std([r.surface_sim for r in with_surface])
        print(f"  surface_sim mean: {mean_ss:.4f} (+/- {std_ss:.4f})")
    notes = [r for r in ds.records if r.note]
    if notes:
        print(f"  records with error notes: {len(notes)}")
    return 0


# --- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semdiff",
        description="differential-fuzzing ground truth and surface-bias audits",
    )
    parser.add_argument("--version", action="version", version=f"semdiff {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=None)

    p = sub.add_parser("variants", help="generate mutated and optimized variants")
    common(p)
    p.add_argument("--tasks", required=True)
    p.add_argument("--out-variants", default="variants.jsonl")
    p.add_argument("--out-pairs", default="pairs.jsonl")
    p.add_argument("--operators", help="comma-separated operator subset")
    p.add_argument("--max-mutants", type=int, default=None)
    p.add_argument("--stub-fixture", help="offline optimizer fixture (JSONL)")
    p.set_defaults(func=cmd_variants)

    p = sub.add_parser("surface", help="fill surface similarity")
    common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("score", help="differential-fuzz pairs to df_score")
    common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--tasks", required=True)
    p.add_argument("--runner", help="runner command, e.g. 'python -m subject_runner'")
    p.add_argument("--out")
    p.add_argument("--n-inputs", dest="n_inputs", type=int, default=None)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("audit", help="MAE / Spearman / distinguishability")
    common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--scores", action="append", help="metric score file (CSV or JSONL)")
    p.add_argument("--split", help="JSON file with intra/inter pair id lists")
    p.add_argument("--eq-min", type=float, default=1.0)
    p.add_argument("--out-csv")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("regions", help="select thresholds and report coverage")
    common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--scores", action="append")
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--error-flavor", choices=regions.ERROR_FLAVORS, default=None)
    p.add_argument("--metrics", help="comma-separated metric subset")
    p.add_argument("--scatter", help="write (x, y, label) CSV for plotting")
    p.set_defaults(func=cmd_regions)

    p = sub.add_parser("report", help="summarize a dataset")
    common(p)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return USAGE_ERROR if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except (RunnerCrashed, RunnerNotFound, TransportError) as e:
        print(f"error: {e}", file=sys.stderr)
        return RUNNER_ERROR
    except (SchemaError, MissingScores, NoFeasibleCandidate, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return DATA_ERROR
    except SemdiffError as e:
        print(f"error: {e}", file=sys.stderr)
        return DATA_ERROR
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
