"""Parsers for model outputs. Each returns a full result or raises."""

from __future__ import annotations

import re
from typing import Sequence

from ..engine import Item, Ordering
from ..errors import EmptyOutput, NotAPermutation

_ENUM_MARKER = re.compile(r"^\s*(?:\d+\s*[.)]|[-*•])\s*")
_ITEM_LABEL = re.compile(r"item\s*-\s*(\d+)", re.IGNORECASE)
_SPLIT = re.compile(r"[\n,]+")
_QUOTES = "\"'`“”‘’"


def _normalize(fragment: str) -> str:
    text = _ENUM_MARKER.sub("", fragment).strip()
    prev = None
    while text != prev:
        prev = text
        text = text.strip().strip(_QUOTES).strip().rstrip(".").strip()
    return " ".join(text.split()).casefold()


def parse_token_ranking(text: str, items: Sequence[Item]) -> Ordering:
    names = {it.id: " ".join(it.text.split()).casefold() for it in items}
    fragments = [f for f in (_normalize(p) for p in _SPLIT.split(text)) if f]
    out: list[str] = []
    for frag in fragments:
        exact = [i for i, n in names.items() if n == frag]
        if len(exact) == 1:
            out.append(exact[0])
            continue
        partial = [i for i, n in names.items() if frag in n or n in frag]
        if len(partial) != 1:
            raise NotAPermutation(f"fragment {frag!r} matches {len(partial)} items")
        out.append(partial[0])
    if sorted(out) != sorted(names):
        raise NotAPermutation(f"output {out} is not a permutation of {sorted(names)}")
    return tuple(out)


def parse_paragraph_ranking(text: str, n_items: int) -> tuple[int, ...]:
    """1-based ``Item-K`` labels in reading order."""
    labels = tuple(int(m.group(1)) for m in _ITEM_LABEL.finditer(text))
    if sorted(labels) != list(range(1, n_items + 1)):
        raise NotAPermutation(f"labels {list(labels)} are not a permutation of Item-1..Item-{n_items}")
    return labels


def labels_to_ordering(labels: Sequence[int], listed: Sequence[str]) -> Ordering:
    return tuple(listed[k - 1] for k in labels)


def parse_condition_list(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = _ENUM_MARKER.sub("", line, count=1).strip()
        if line:
            out.append(line)
    if not out:
        raise EmptyOutput("model returned no conditions")
    return out


def final_block(text: str) -> list[str]:
    """Candidate tails of a reasoning-style answer, longest first."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    return ["\n".join(lines[k:]) for k in range(1, len(lines))]
