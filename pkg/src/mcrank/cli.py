"""Command line: build pools and datasets, run strategies, score and report."""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import tomli

from . import benchgen as bg
from .backend.client import BackendConfig, RetryPolicy, make_backend
from .benchgen import Sample
from .conditions import Category
from .engine import Level
from .errors import AuthError, GoldMismatch, MCRankError
from .metrics import SampleScore, aggregate, emit_report, score_sample
from .pipelines import RankingRun, Strategy, run_strategy

log = logging.getLogger("mcrank")

DEFAULT_PER_CATEGORY = 10


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

_ENV_REF = re.compile(r"\$\{([A-Za-z_][A-Za-z0-9_]*)\}")


def _interpolate(value):
    if isinstance(value, str):
        return _ENV_REF.sub(lambda m: os.environ.get(m.group(1), ""), value)
    if isinstance(value, dict):
        return {k: _interpolate(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_interpolate(v) for v in value]
    return value


def load_config(path: Optional[str]) -> dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        return _interpolate(tomli.load(fh))


@dataclass
class ScenarioFilter:
    level: Optional[Level] = None
    n_conditions: Optional[int] = None
    n_items: Optional[int] = None
    category: Optional[Category] = None

    @classmethod
    def parse(cls, text: Optional[str]) -> "ScenarioFilter":
        f = cls()
        if not text:
            return f
        for part in text.split(","):
            if not part.strip():
                continue
            if "=" not in part:
                raise UsageError(f"bad filter term {part!r}; expected key=value")
            key, value = (s.strip() for s in part.split("=", 1))
            try:
                if key == "level":
                    f.level = Level(value)
                elif key in ("conds", "n_conditions"):
                    f.n_conditions = int(value)
                elif key in ("items", "n_items"):
                    f.n_items = int(value)
                elif key == "category":
                    f.category = Category(value)
                else:
                    raise UsageError(f"unknown filter key {key!r}")
            except ValueError:
                raise UsageError(f"bad filter value {part!r}") from None
        return f

    def scenarios(self) -> list[bg.Scenario]:
        return bg.select_scenarios(self.level, self.n_conditions, self.n_items)

    def accepts(self, sample: Sample) -> bool:
        return sample.scenario in self.scenarios() and (self.category is None or sample.category is self.category)


@dataclass
class RunConfig:
    dataset_path: str
    strategy: Strategy
    backend: BackendConfig
    output_dir: str
    scenario_filter: ScenarioFilter = field(default_factory=ScenarioFilter)
    sample_limit: Optional[int] = None
    seed: int = 0
    trace_path: Optional[str] = None

    @property
    def trace(self) -> Path:
        if self.trace_path:
            return Path(self.trace_path)
        return Path(self.output_dir) / f"trace-{self.strategy.value}.jsonl"


def subsample(samples: Sequence[Sample], limit: Optional[int], seed: int) -> list[Sample]:
    """At most ``limit`` samples per scenario, chosen by a seeded draw, in dataset order."""
    if limit is None:
        return list(samples)
    keep: set[str] = set()
    for scenario, group in bg.iter_scenario_sections(samples):
        if len(group) <= limit:
            keep.update(s.id for s in group)
        else:
            rng = bg.rng_for(seed, "limit", scenario.key)
            keep.update(s.id for s in rng.sample(group, limit))
    return [s for s in samples if s.id in keep]


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_pool(out_path: str, size: int, seed: int, collision_rate: float = 0.0) -> int:
    pools = [bg.synth_pool(level, size, seed, collision_rate) for level in bg.LEVELS]
    bg.write_pool(pools, out_path)
    print(f"wrote {sum(len(p.entries) for p in pools)} pool entries to {out_path}")
    return 0


def cmd_gen(
    pool_path: str,
    out_path: str,
    per_category: int = DEFAULT_PER_CATEGORY,
    seed: int = 0,
    scenario_filter: Optional[ScenarioFilter] = None,
) -> int:
    scenario_filter = scenario_filter or ScenarioFilter()
    scenarios = scenario_filter.scenarios()
    pools = {}
    for level in {s.level for s in scenarios}:
        pools[level] = bg.load_pool(pool_path, level)
    samples = bg.generate_dataset(pools, scenarios, per_category, seed)
    if scenario_filter.category is not None:
        samples = [s for s in samples if s.category is scenario_filter.category]
    bg.write_dataset(samples, out_path)
    sections = sum(1 for _ in bg.iter_scenario_sections(samples))
    print(f"wrote {len(samples)} samples in {sections} scenarios to {out_path}")
    print(bg.format_stats(bg.dataset_stats(samples)), end="")
    return 0


def read_trace(path: Path) -> list[RankingRun]:
    if not path.exists():
        return []
    with open(path, encoding="utf-8") as fh:
        return [RankingRun.from_json(json.loads(line)) for line in fh if line.strip()]


def cmd_run(config: RunConfig) -> int:
    samples = [s for s in bg.read_dataset(config.dataset_path) if config.scenario_filter.accepts(s)]
    samples = subsample(samples, config.sample_limit, config.seed)
    trace = config.trace
    trace.parent.mkdir(parents=True, exist_ok=True)
    done = {r.sample_id for r in read_trace(trace)}
    todo = [s for s in samples if s.id not in done]

    backend = make_backend(config.backend, (it for s in samples for it in s.items))
    started = time.monotonic()
    totals: dict[str, float] = {}
    invalid = 0
    try:
        with ThreadPoolExecutor(max_workers=config.backend.concurrency_limit) as pool, open(
            trace, "a", encoding="utf-8"
        ) as out:
            runs = pool.map(lambda s: run_strategy(config.strategy, s, backend), todo)
            for k, run in enumerate(runs, start=1):
                out.write(json.dumps(run.to_json(), ensure_ascii=False, sort_keys=True) + "\n")
                invalid += not run.valid
                for key, v in run.usage_totals.items():
                    totals[key] = totals.get(key, 0) + v
                if k % 100 == 0 or k == len(todo):
                    print(f"[{config.strategy.value}] {k}/{len(todo)} samples", file=sys.stderr)
    finally:
        backend.close()
    elapsed = time.monotonic() - started
    print(
        f"{config.strategy.value}: {len(todo)} new runs ({len(done)} resumed, {invalid} invalid) "
        f"in {elapsed:.1f}s; backend calls {backend.calls}; usage {json.dumps(totals, sort_keys=True)}"
    )
    print(f"trace: {trace}")
    return 0


def score_traces(trace_paths: Sequence[str], samples: dict[str, Sample]) -> list[SampleScore]:
    scores = []
    for path in trace_paths:
        for run in read_trace(Path(path)):
            sample = samples.get(run.sample_id)
            if sample is None:
                log.warning("run %s has no sample in the dataset; skipped", run.sample_id)
                continue
            try:
                scores.append(score_sample(run, sample))
            except GoldMismatch as exc:
                log.warning("skipping %s: %s", run.sample_id, exc)
    return scores


def write_reports(scores: list[SampleScore], samples: dict[str, Sample], out_dir: Path, group_by) -> list[Path]:
    tables = {
        "report": tuple(group_by),
        "decomposition": ("strategy", "level", "n_conditions"),
        "high_priority": ("strategy", "level", "n_items"),
    }
    written = []
    for name, keys in tables.items():
        chosen = scores
        if name == "decomposition":
            chosen = [s for s in scores if s.strategy == Strategy.EXSIR.value and samples[s.sample_id].scenario.n_conditions >= 2]
        if name == "high_priority":
            chosen = [s for s in scores if samples[s.sample_id].scenario.n_conditions >= 2]
        report = aggregate(chosen, samples, keys)
        for fmt, ext in (("csv", "csv"), ("md", "md")):
            path = out_dir / f"{name}.{ext}"
            path.write_bytes(emit_report(report, fmt))
            written.append(path)
    return written


def cmd_eval(trace_paths: Sequence[str], dataset_path: str, out_dir: str, group_by=None) -> int:
    samples = {s.id: s for s in bg.read_dataset(dataset_path)}
    scores = score_traces(trace_paths, samples)
    if not scores:
        print("error: no runs could be joined to the dataset", file=sys.stderr)
        return 1
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "scores.jsonl", "w", encoding="utf-8") as fh:
        for sc in scores:
            fh.write(json.dumps(sc.to_json(), sort_keys=True) + "\n")
    written = write_reports(scores, samples, out, group_by or ("strategy", "level", "n_conditions", "n_items", "category"))
    print(f"scored {len(scores)} runs; wrote {out / 'scores.jsonl'} and {len(written)} report files to {out}")
    return 0


def cmd_report(scores_path: str, dataset_path: str, fmt: str, group_by) -> int:
    samples = {s.id: s for s in bg.read_dataset(dataset_path)}
    with open(scores_path, encoding="utf-8") as fh:
        scores = [SampleScore.from_json(json.loads(line)) for line in fh if line.strip()]
    scores = [s for s in scores if s.sample_id in samples]
    sys.stdout.write(emit_report(aggregate(scores, samples, group_by), fmt).decode("utf-8"))
    return 0


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mcrank", description="Multi-conditional ranking benchmark toolkit")
    p.add_argument("--config", help="TOML config; ${VAR} expands from the environment")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("pool", help="write a synthetic item pool")
    sp.add_argument("--out", required=True)
    sp.add_argument("--size", type=int, default=200)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--collision-rate", type=float, default=0.0)

    sg = sub.add_parser("gen", help="generate a benchmark dataset from a pool")
    sg.add_argument("--pool")
    sg.add_argument("--out")
    sg.add_argument("--per-category", type=int)
    sg.add_argument("--seed", type=int)
    sg.add_argument("--filter")

    sr = sub.add_parser("run", help="run a ranking strategy over a dataset")
    sr.add_argument("--dataset")
    sr.add_argument("--strategy", choices=[s.value for s in Strategy])
    sr.add_argument("--backend", choices=["http", "oracle"])
    sr.add_argument("--model")
    sr.add_argument("--base-url")
    sr.add_argument("--api-key-env")
    sr.add_argument("--epsilon", type=float)
    sr.add_argument("--seed", type=int)
    sr.add_argument("--limit", type=int)
    sr.add_argument("--filter")
    sr.add_argument("--concurrency", type=int)
    sr.add_argument("--cache-dir")
    sr.add_argument("--out")
    sr.add_argument("--trace")

    se = sub.add_parser("eval", help="score traces and write report tables")
    se.add_argument("--trace", action="append")
    se.add_argument("--dataset")
    se.add_argument("--out")
    se.add_argument("--group-by")

    sp2 = sub.add_parser("report", help="print a report from a scores file")
    sp2.add_argument("--scores", required=True)
    sp2.add_argument("--dataset", required=True)
    sp2.add_argument("--format", choices=["csv", "md"], default="md")
    sp2.add_argument("--group-by")
    return p


def _pick(arg, section: dict, key: str, default=None):
    if arg is not None:
        return arg
    return section.get(key, default)


def _require(value, flag: str):
    if value is None:
        raise UsageError(f"missing {flag}")
    return value


def _group_by(text: Optional[str]):
    if not text:
        return None
    return tuple(s.strip() for s in text.split(",") if s.strip())


def run_config_from_args(args, cfg: dict) -> RunConfig:
    run_cfg = cfg.get("run", {})
    be = cfg.get("backend", {})
    retry = be.get("retry", {})
    kind = _pick(args.backend, be, "kind", "oracle")
    backend = BackendConfig(
        kind=kind,
        model_name=_pick(args.model, be, "model", "oracle" if kind == "oracle" else None) or "gpt-4",
        base_url=_pick(args.base_url, be, "base_url"),
        api_key_env_name=_pick(args.api_key_env, be, "api_key_env", "MCRANK_API_KEY"),
        concurrency_limit=int(_pick(args.concurrency, be, "concurrency_limit", 4)),
        retry=RetryPolicy(int(retry.get("max_attempts", 4)), float(retry.get("backoff_base_ms", 500))),
        cache_dir=_pick(args.cache_dir, be, "cache_dir"),
        oracle_noise_epsilon=float(_pick(args.epsilon, be, "epsilon", 0.0)),
        rng_seed=int(_pick(args.seed, be, "rng_seed", _pick(None, run_cfg, "seed", 0))),
        temperature=float(be.get("temperature", 0.0)),
        invalid_retries=int(be.get("invalid_retries", 1)),
    )
    try:
        backend.validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    limit = _pick(args.limit, run_cfg, "limit")
    return RunConfig(
        dataset_path=_require(_pick(args.dataset, run_cfg, "dataset"), "--dataset"),
        strategy=Strategy(_pick(args.strategy, run_cfg, "strategy", "exsir")),
        backend=backend,
        output_dir=_pick(args.out, run_cfg, "out", "runs"),
        scenario_filter=ScenarioFilter.parse(_pick(args.filter, run_cfg, "filter")),
        sample_limit=int(limit) if limit is not None else None,
        seed=int(_pick(args.seed, run_cfg, "seed", 0)),
        trace_path=args.trace,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.command == "pool":
            return cmd_pool(args.out, args.size, _pick(args.seed, cfg.get("gen", {}), "seed", 0), args.collision_rate)
        if args.command == "gen":
            g = cfg.get("gen", {})
            return cmd_gen(
                _require(_pick(args.pool, g, "pool"), "--pool"),
                _require(_pick(args.out, g, "out"), "--out"),
                int(_pick(args.per_category, g, "per_category", DEFAULT_PER_CATEGORY)),
                int(_pick(args.seed, g, "seed", 0)),
                ScenarioFilter.parse(_pick(args.filter, g, "filter")),
            )
        if args.command == "run":
            return cmd_run(run_config_from_args(args, cfg))
        if args.command == "eval":
            e = cfg.get("eval", {})
            traces = args.trace or e.get("traces")
            return cmd_eval(
                _require(traces, "--trace"),
                _require(_pick(args.dataset, e, "dataset"), "--dataset"),
                _require(_pick(args.out, e, "out"), "--out"),
                _group_by(_pick(args.group_by, e, "group_by")),
            )
        if args.command == "report":
            return cmd_report(
                args.scores,
                args.dataset,
                args.format,
                _group_by(args.group_by) or ("strategy", "level", "n_conditions", "n_items", "category"),
            )
    except AuthError as exc:
        print(f"error: authentication: {exc}", file=sys.stderr)
        return 3
    except (UsageError, MCRankError, OSError, ValueError, KeyError, json.JSONDecodeError, tomli.TOMLDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
