"""Ranking strategies: one-shot, zero-shot chain of thought, and EXSIR.

EXSIR extracts the conditions, sorts them from lowest to highest priority,
then applies them one at a time, feeding each ranked list into the next call.
All calls of a run go to the same backend.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence, Union

from .backend.client import Backend, ModelRequest
from .backend.parsers import (
    final_block,
    labels_to_ordering,
    parse_condition_list,
    parse_paragraph_ranking,
    parse_token_ranking,
)
from .backend.prompts import PromptKind, render_prompt
from .benchgen import Sample
from .engine import Item, Level, Ordering
from .errors import BackendError, EmptyOutput, NotAPermutation


class Strategy(str, enum.Enum):
    BASE = "base"
    COT = "cot"
    EXSIR = "exsir"


@dataclass
class Step:
    prompt_kind: PromptKind
    rendered_prompt: str
    raw_response: Optional[str] = None
    parsed: Optional[Union[list[str], list[list[str]]]] = None
    error: Optional[str] = None
    attempts: int = 0

    def to_json(self) -> dict:
        d = asdict(self)
        d["prompt_kind"] = self.prompt_kind.value
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Step":
        return cls(**{**d, "prompt_kind": PromptKind(d["prompt_kind"])})


@dataclass
class RankingRun:
    sample_id: str
    strategy: Strategy
    predicted: Optional[Ordering] = None  # None means Invalid
    steps: list[Step] = field(default_factory=list)
    decomposition: Optional[dict] = None
    usage_totals: dict = field(default_factory=lambda: {"prompt_tokens": 0, "completion_tokens": 0, "calls": 0})
    error: Optional[str] = None

    @property
    def valid(self) -> bool:
        return self.predicted is not None

    def to_json(self) -> dict:
        return {
            "sample_id": self.sample_id,
            "strategy": self.strategy.value,
            "predicted": list(self.predicted) if self.predicted is not None else None,
            "steps": [s.to_json() for s in self.steps],
            "decomposition": self.decomposition,
            "usage_totals": self.usage_totals,
            "error": self.error,
        }

    @classmethod
    def from_json(cls, d: dict) -> "RankingRun":
        return cls(
            sample_id=d["sample_id"],
            strategy=Strategy(d["strategy"]),
            predicted=tuple(d["predicted"]) if d.get("predicted") is not None else None,
            steps=[Step.from_json(s) for s in d.get("steps", [])],
            decomposition=d.get("decomposition"),
            usage_totals=d.get("usage_totals", {}),
            error=d.get("error"),
        )


class _StepFailed(Exception):
    pass


def _call(
    backend: Backend,
    run: RankingRun,
    kind: PromptKind,
    prompt: str,
    parse: Callable[[str], object],
    stream_key: str,
) -> object:
    """One pipeline step: ask, parse, re-ask on unparseable output."""
    step = Step(kind, prompt)
    run.steps.append(step)
    cfg = backend.cfg
    for attempt in range(cfg.invalid_retries + 1):
        step.attempts = attempt + 1
        req = ModelRequest(
            prompt_kind=kind,
            rendered_prompt=prompt,
            model_name=cfg.model_name,
            temperature=cfg.temperature,
            stream_key=stream_key if attempt == 0 else f"{stream_key}/retry{attempt}",
            use_cache=attempt == 0,
        )
        try:
            resp = backend.complete(req)
        except BackendError as exc:
            step.error = f"{type(exc).__name__}: {exc}"
            raise _StepFailed(step.error) from None
        run.usage_totals["calls"] = run.usage_totals.get("calls", 0) + 1
        for k, v in (resp.usage or {}).items():
            if isinstance(v, (int, float)):
                run.usage_totals[k] = run.usage_totals.get(k, 0) + v
        step.raw_response = resp.text
        try:
            result = parse(resp.text)
        except (NotAPermutation, EmptyOutput) as exc:
            step.error = f"{type(exc).__name__}: {exc}"
            continue
        step.error = None
        step.parsed = list(result) if isinstance(result, (list, tuple)) else result
        return result
    raise _StepFailed(step.error)


def _ranking_parser(level: Level, listed: Sequence[Item], lenient: bool = False) -> Callable[[str], Ordering]:
    ids = [it.id for it in listed]

    def strict(text: str) -> Ordering:
        if level is Level.TOKEN:
            return parse_token_ranking(text, listed)
        return labels_to_ordering(parse_paragraph_ranking(text, len(listed)), ids)

    if not lenient:
        return strict

    def tolerant(text: str) -> Ordering:
        try:
            return strict(text)
        except NotAPermutation:
            # reasoning-style answers: take the shortest parseable tail
            for tail in reversed(final_block(text)):
                try:
                    return strict(tail)
                except NotAPermutation:
                    continue
            raise

    return tolerant


def _rank_kind(level: Level, cot: bool) -> PromptKind:
    if level is Level.TOKEN:
        return PromptKind.RANK_TOKEN_COT if cot else PromptKind.RANK_TOKEN
    return PromptKind.RANK_PARAGRAPH_COT if cot else PromptKind.RANK_PARAGRAPH


def _single_prompt(sample: Sample, backend: Backend, strategy: Strategy) -> RankingRun:
    run = RankingRun(sample.id, strategy)
    cot = strategy is Strategy.COT
    kind = _rank_kind(sample.scenario.level, cot)
    prompt = render_prompt(kind, sample.condition_string, sample.items)
    parser = _ranking_parser(sample.scenario.level, sample.items, lenient=cot)
    try:
        run.predicted = _call(backend, run, kind, prompt, parser, f"{sample.id}/0")
    except _StepFailed as exc:
        run.error = str(exc)
    return run


def run_base(sample: Sample, backend: Backend) -> RankingRun:
    return _single_prompt(sample, backend, Strategy.BASE)


def run_cot(sample: Sample, backend: Backend) -> RankingRun:
    return _single_prompt(sample, backend, Strategy.COT)


def run_exsir(sample: Sample, backend: Backend) -> RankingRun:
    run = RankingRun(sample.id, Strategy.EXSIR)
    level = sample.scenario.level
    try:
        prompt = render_prompt(PromptKind.EXTRACT_CONDITIONS, sample.condition_string)
        extracted = _call(backend, run, PromptKind.EXTRACT_CONDITIONS, prompt, parse_condition_list, f"{sample.id}/0")
        run.decomposition = {"extracted": list(extracted), "sorted": None}

        prompt = render_prompt(PromptKind.SORT_CONDITIONS, extracted)
        ordered = _call(backend, run, PromptKind.SORT_CONDITIONS, prompt, parse_condition_list, f"{sample.id}/1")
        run.decomposition["sorted"] = list(ordered)
        if len(ordered) != len(extracted):
            run.decomposition["length_mismatch"] = [len(extracted), len(ordered)]

        by_id = sample.item_index
        current: Ordering = sample.presented
        kind = _rank_kind(level, cot=False)
        for k, cond in enumerate(ordered):
            listed = [by_id[i] for i in current]
            prompt = render_prompt(kind, cond, listed)
            current = _call(backend, run, kind, prompt, _ranking_parser(level, listed), f"{sample.id}/{k + 2}")
        run.predicted = current
    except _StepFailed as exc:
        run.error = str(exc)
    return run


STRATEGIES: dict[Strategy, Callable[[Sample, Backend], RankingRun]] = {
    Strategy.BASE: run_base,
    Strategy.COT: run_cot,
    Strategy.EXSIR: run_exsir,
}


def run_strategy(strategy: Strategy, sample: Sample, backend: Backend) -> RankingRun:
    return STRATEGIES[Strategy(strategy)](sample, backend)


def decomposition_of(run: RankingRun) -> Optional[dict]:
    if run.strategy is not Strategy.EXSIR:
        return None
    return run.decomposition
