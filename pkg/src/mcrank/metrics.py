"""Scoring ranking runs against gold and aggregating into report tables."""

from __future__ import annotations

import csv
import io
import re
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

from .backend.parsers import parse_condition_list
from .benchgen import Sample
from .conditions import SAMPLE_CATEGORIES, sort_by_priority, strip_priority_tag
from .engine import highest_priority_reference, satisfies
from .errors import GoldMismatch, MCRankError
from .pipelines import RankingRun, Strategy, decomposition_of

GROUP_FIELDS = ("strategy", "level", "n_conditions", "n_items", "category")
DEFAULT_GROUP_BY = GROUP_FIELDS
ALL = "All"


@dataclass
class SampleScore:
    sample_id: str
    strategy: str
    exact: int
    averaged: float
    high_priority_satisfied: Optional[bool] = None
    decomposition_correct: Optional[bool] = None

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "SampleScore":
        return cls(**d)


def exact_match(predicted: Optional[Sequence[str]], gold: Sequence[str]) -> int:
    return int(predicted is not None and tuple(predicted) == tuple(gold))


def averaged_accuracy(predicted: Optional[Sequence[str]], gold: Sequence[str]) -> float:
    """Fraction of positions holding the gold item; 0 for an invalid prediction."""
    if predicted is None:
        return 0.0
    return sum(p == g for p, g in zip(predicted, gold)) / len(gold)


_WS = re.compile(r"\s+")


def normalize_condition(surface: str) -> str:
    text = parse_condition_list(surface)[0] if surface.strip() else ""
    text = strip_priority_tag(text)
    return _WS.sub(" ", text).strip().rstrip(".")


def decomposition_correct(sorted_surfaces: Optional[Sequence[str]], sample: Sample) -> bool:
    if not sorted_surfaces:
        return False
    expected = [normalize_condition(c.surface) for c in sort_by_priority(sample.conditions)]
    return [normalize_condition(s) for s in sorted_surfaces] == expected


def score_sample(run: RankingRun, sample: Sample) -> SampleScore:
    if run.sample_id != sample.id:
        raise GoldMismatch(f"run for {run.sample_id!r} scored against sample {sample.id!r}")
    predicted = run.predicted
    if predicted is not None and sorted(predicted) != sorted(sample.gold):
        raise GoldMismatch(f"run {run.sample_id!r} ranks items that differ from the sample's")

    high: Optional[bool] = False
    if predicted is not None:
        try:
            cond, reference = highest_priority_reference(sample.item_index, sample.presented, sample.conditions)
            high = satisfies(predicted, sample.item_index, cond, reference=reference)
        except MCRankError:
            high = False

    decomposition = None
    if run.strategy is Strategy.EXSIR:
        record = decomposition_of(run) or {}
        decomposition = decomposition_correct(record.get("sorted"), sample)

    return SampleScore(
        sample_id=sample.id,
        strategy=run.strategy.value,
        exact=exact_match(predicted, sample.gold),
        averaged=averaged_accuracy(predicted, sample.gold),
        high_priority_satisfied=high,
        decomposition_correct=decomposition,
    )


# --------------------------------------------------------------------------
# aggregation
# --------------------------------------------------------------------------

@dataclass
class ReportRow:
    key: dict
    n: int
    accuracy_pct: float
    avg_accuracy_pct: float
    high_priority_pct: Optional[float]
    decomposition_pct: Optional[float]


@dataclass
class MetricsReport:
    group_by: tuple[str, ...]
    rows: list[ReportRow] = field(default_factory=list)

    def row(self, **key) -> ReportRow:
        for r in self.rows:
            if all(str(r.key.get(k)) == str(v) for k, v in key.items()):
                return r
        raise KeyError(key)


def _field(score: SampleScore, sample: Sample, name: str):
    if name == "strategy":
        return score.strategy
    if name == "level":
        return sample.scenario.level.value
    if name == "n_conditions":
        return sample.scenario.n_conditions
    if name == "n_items":
        return sample.scenario.n_items
    if name == "category":
        return sample.category.value
    raise ValueError(f"cannot group by {name!r}")


_ORDER = {
    "strategy": [s.value for s in Strategy],
    "level": ["token", "paragraph"],
    "category": [c.value for c in SAMPLE_CATEGORIES] + [ALL],
}


def _sort_value(name: str, value):
    order = _ORDER.get(name)
    if order is not None:
        return (order.index(value) if value in order else len(order), str(value))
    return (0, value)


def _mean_pct(values: list) -> Optional[float]:
    present = [float(v) for v in values if v is not None]
    if not present:
        return None
    return 100.0 * sum(present) / len(present)


def aggregate(
    scores: Iterable[SampleScore],
    samples: Iterable[Sample] | dict[str, Sample],
    group_by: Sequence[str] = DEFAULT_GROUP_BY,
) -> MetricsReport:
    group_by = tuple(group_by)
    by_id = samples if isinstance(samples, dict) else {s.id: s for s in samples}
    groups: dict[tuple, list[tuple[SampleScore, Sample]]] = defaultdict(list)
    for sc in scores:
        sample = by_id[sc.sample_id]
        key = tuple(_field(sc, sample, f) for f in group_by)
        groups[key].append((sc, sample))
        if "category" in group_by:
            all_key = tuple(ALL if f == "category" else v for f, v in zip(group_by, key))
            groups[all_key].append((sc, sample))

    rows = []
    for key, members in groups.items():
        decomposable = [sc.decomposition_correct for sc, s in members if s.scenario.n_conditions in (2, 3)]
        rows.append(
            ReportRow(
                key=dict(zip(group_by, key)),
                n=len(members),
                accuracy_pct=_mean_pct([sc.exact for sc, _ in members]),
                avg_accuracy_pct=_mean_pct([sc.averaged for sc, _ in members]),
                high_priority_pct=_mean_pct([sc.high_priority_satisfied for sc, _ in members]),
                decomposition_pct=_mean_pct(decomposable),
            )
        )
    rows.sort(key=lambda r: tuple(_sort_value(f, r.key[f]) for f in group_by))
    return MetricsReport(group_by, rows)


# --------------------------------------------------------------------------
# rendering
# --------------------------------------------------------------------------

METRIC_COLUMNS = ("n", "accuracy_pct", "avg_accuracy_pct", "high_priority_pct", "decomposition_pct")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.1f}"
    return str(value)


def _csv(report: MetricsReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(report.group_by) + list(METRIC_COLUMNS))
    for r in report.rows:
        writer.writerow([r.key[f] for f in report.group_by] + [_fmt(getattr(r, c)) for c in METRIC_COLUMNS])
    return buf.getvalue()


def _md_generic(report: MetricsReport) -> str:
    cols = list(report.group_by) + list(METRIC_COLUMNS)
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    for r in report.rows:
        cells = [str(r.key[f]) for f in report.group_by] + [_fmt(getattr(r, c)) or "-" for c in METRIC_COLUMNS]
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def _md_breakdown(report: MetricsReport) -> str:
    """Rows are categories plus All; column pairs are ACC / Avg ACC per item count."""
    outer = [f for f in report.group_by if f not in ("category", "n_items")]
    sections: dict[tuple, dict[tuple, ReportRow]] = defaultdict(dict)
    item_counts: set[int] = set()
    for r in report.rows:
        sections[tuple(r.key[f] for f in outer)][(r.key["category"], r.key["n_items"])] = r
        item_counts.add(r.key["n_items"])
    counts = sorted(item_counts)
    out = []
    for sec_key in sorted(sections, key=lambda k: tuple(_sort_value(f, v) for f, v in zip(outer, k))):
        cells = sections[sec_key]
        title = ", ".join(f"{f}={v}" for f, v in zip(outer, sec_key)) or "all runs"
        out.append(f"### {title}\n")
        out.append("| Category | " + " | ".join(f"{n} items ACC | {n} items Avg ACC" for n in counts) + " |")
        out.append("|---|" + "---:|---:|" * len(counts))
        cats = sorted({c for c, _ in cells}, key=lambda c: _sort_value("category", c))
        for cat in cats:
            row = [cat]
            for n in counts:
                r = cells.get((cat, n))
                row += [_fmt(r.accuracy_pct), _fmt(r.avg_accuracy_pct)] if r else ["-", "-"]
            out.append("| " + " | ".join(row) + " |")
        out.append("")
    return "\n".join(out)


def emit_report(report: MetricsReport, fmt: str = "csv") -> bytes:
    fmt = fmt.lower()
    if fmt == "csv":
        return _csv(report).encode("utf-8")
    if fmt in ("md", "markdown"):
        if report.rows and {"category", "n_items"} <= set(report.group_by):
            return _md_breakdown(report).encode("utf-8")
        return _md_generic(report).encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report_csv(data: bytes) -> list[dict]:
    rows = []
    for raw in csv.DictReader(io.StringIO(data.decode("utf-8"))):
        row = {}
        for k, v in raw.items():
            if k in METRIC_COLUMNS:
                row[k] = None if v == "" else (int(v) if k == "n" else float(v))
            else:
                row[k] = v
        rows.append(row)
    return rows
