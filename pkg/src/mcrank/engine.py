"""Deterministic application of conditions to item orderings.

Conditions compose by stable, sequential application in ascending priority:
the highest-priority condition is applied last and therefore dominates.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

from .conditions import (
    Condition,
    KeyKind,
    Op,
    PartitionMove,
    Placement,
    PositionalMove,
    Predicate,
    Selector,
    SortByKey,
    SortOrder,
    normalize_date,
    parse_number,
    sort_by_priority,
)
from .errors import MissingAttribute, MissingReference, TooManyItems, TypeMismatch, UnknownItem

Ordering = tuple[str, ...]
Scalar = Union[str, int, float]

BRUTE_FORCE_LIMIT = 8


class Level(str, enum.Enum):
    TOKEN = "token"
    PARAGRAPH = "paragraph"


@dataclass(frozen=True)
class Item:
    id: str
    text: str
    level: Level = Level.TOKEN
    attributes: Mapping[str, Scalar] = field(default_factory=dict)
    positional_ok: bool = False

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError(f"item {self.id!r} has empty text")

    @property
    def char_count(self) -> int:
        return char_count(self.text)


def char_count(text: str) -> int:
    # code points after trimming; interior spaces and punctuation count
    return len(text.strip())


ItemsLike = Union[Sequence[Item], Mapping[str, Item]]


def _index(items: ItemsLike) -> Mapping[str, Item]:
    if isinstance(items, Mapping):
        return items
    return {it.id: it for it in items}


def _check_permutation(order: Sequence[str], index: Mapping[str, Item]) -> None:
    if len(order) != len(index) or set(order) != set(index):
        raise ValueError(f"ordering {list(order)} is not a permutation of the item ids")


def coerce(value: object, kind: KeyKind) -> object:
    try:
        if kind is KeyKind.NUMBER:
            return parse_number(value)
        if kind is KeyKind.DATE:
            return normalize_date(value)
    except ValueError as exc:
        raise TypeMismatch(str(exc)) from None
    return str(value)


def sort_key(item: Item, attribute: str, kind: KeyKind) -> object:
    if kind is KeyKind.TEXT_LENGTH:
        return item.char_count
    if attribute not in item.attributes:
        raise MissingAttribute(f"item {item.id!r} has no attribute {attribute!r}")
    return coerce(item.attributes[attribute], kind)


def _matches(pred: Predicate, ids: Sequence[str], index: Mapping[str, Item]) -> dict[str, bool]:
    if pred.op is Op.EQ:
        for i in ids:
            if pred.attribute not in index[i].attributes:
                raise MissingAttribute(f"item {i!r} has no attribute {pred.attribute!r}")
        return {i: str(index[i].attributes[pred.attribute]) == pred.value for i in ids}

    keys = {i: sort_key(index[i], pred.attribute, pred.kind) for i in ids}
    if pred.op in (Op.IS_MAX, Op.IS_MIN):
        target = max(keys.values()) if pred.op is Op.IS_MAX else min(keys.values())
        return {i: k == target for i, k in keys.items()}
    bound = coerce(pred.value, pred.kind)
    if pred.op is Op.LT:
        return {i: k < bound for i, k in keys.items()}
    return {i: k > bound for i, k in keys.items()}


def _resolve(move: PositionalMove, reference: Sequence[str], index: Mapping[str, Item]) -> str:
    if move.selector is Selector.CURRENT_FIRST:
        return reference[0]
    if move.selector is Selector.CURRENT_LAST:
        return reference[-1]
    wanted = move.text.strip()
    hits = [i for i in reference if index[i].text.strip() == wanted]
    if len(hits) != 1:
        raise UnknownItem(f"item text {move.text!r} matches {len(hits)} items")
    return hits[0]


def apply_condition(order: Sequence[str], items: ItemsLike, cond: Condition) -> Ordering:
    index = _index(items)
    _check_permutation(order, index)
    d = cond.directive
    if isinstance(d, SortByKey):
        keys = {i: sort_key(index[i], d.attribute, d.key_kind) for i in order}
        if d.order is SortOrder.ASCENDING:
            return tuple(sorted(order, key=keys.__getitem__))
        # reverse=True keeps ties stable in Python's sort
        return tuple(sorted(order, key=keys.__getitem__, reverse=True))
    if isinstance(d, PartitionMove):
        hit = _matches(d.predicate, order, index)
        yes = [i for i in order if hit[i]]
        no = [i for i in order if not hit[i]]
        return tuple(yes + no) if d.placement is Placement.FRONT else tuple(no + yes)
    if isinstance(d, PositionalMove):
        chosen = _resolve(d, order, index)
        rest = [i for i in order if i != chosen]
        return tuple([chosen] + rest) if d.target is Placement.FRONT else tuple(rest + [chosen])
    raise TypeError(f"unknown directive {d!r}")


def fold(presented: Sequence[str], items: ItemsLike, conds: Iterable[Condition]) -> list[Ordering]:
    """Every intermediate ordering of the priority-ascending fold, starting with `presented`."""
    index = _index(items)
    trace = [tuple(presented)]
    for cond in sort_by_priority(list(conds)):
        trace.append(apply_condition(trace[-1], index, cond))
    return trace


def gold_ranking(items: ItemsLike, presented: Sequence[str], conds: Sequence[Condition]) -> Ordering:
    if not conds:
        raise ValueError("gold ranking needs at least one condition")
    return fold(presented, items, conds)[-1]


def highest_priority_reference(
    items: ItemsLike, presented: Sequence[str], conds: Sequence[Condition]
) -> tuple[Condition, Ordering]:
    """The dominant condition and the ordering it is applied to in the fold."""
    ordered = sort_by_priority(list(conds))
    return ordered[-1], fold(presented, items, ordered[:-1])[-1]


def satisfies(
    order: Sequence[str],
    items: ItemsLike,
    cond: Condition,
    reference: Optional[Sequence[str]] = None,
) -> bool:
    index = _index(items)
    _check_permutation(order, index)
    if cond.is_identity:
        return True
    d = cond.directive
    if isinstance(d, SortByKey):
        keys = [sort_key(index[i], d.attribute, d.key_kind) for i in order]
        pairs = zip(keys, keys[1:])
        if d.order is SortOrder.ASCENDING:
            return all(a <= b for a, b in pairs)
        return all(a >= b for a, b in pairs)
    if isinstance(d, PartitionMove):
        hit = _matches(d.predicate, order, index)
        flags = [hit[i] for i in order]
        if d.placement is Placement.BACK:
            flags = [not f for f in flags]
        # matching block strictly before the rest
        return flags == sorted(flags, reverse=True)
    if isinstance(d, PositionalMove):
        if d.selector is not Selector.BY_ITEM_TEXT and reference is None:
            raise MissingReference(f"{cond.surface!r} needs the pre-application ordering")
        chosen = _resolve(d, reference if reference is not None else order, index)
        return order[0] == chosen if d.target is Placement.FRONT else order[-1] == chosen
    raise TypeError(f"unknown directive {d!r}")


def inversion_distance(a: Sequence[str], b: Sequence[str]) -> int:
    pos = {x: i for i, x in enumerate(b)}
    seq = [pos[x] for x in a]
    return sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])


def brute_force_gold(items: ItemsLike, presented: Sequence[str], conds: Sequence[Condition]) -> Ordering:
    """Exhaustive reference for `gold_ranking`.

    For each condition in ascending priority, enumerate every permutation,
    keep those satisfying the condition (against the previous ordering as
    reference) and take the one with the fewest pairwise inversions relative
    to the previous ordering. Ties at the minimum mean the fold is not
    uniquely determined and raise ``ValueError``.
    """
    index = _index(items)
    if len(index) > BRUTE_FORCE_LIMIT:
        raise TooManyItems(f"{len(index)} items exceeds the brute-force limit of {BRUTE_FORCE_LIMIT}")
    _check_permutation(presented, index)
    current: Ordering = tuple(presented)
    for cond in sort_by_priority(list(conds)):
        best: list[Ordering] = []
        best_d = None
        for perm in itertools.permutations(current):
            if not satisfies(perm, index, cond, reference=current):
                continue
            dist = inversion_distance(perm, current)
            if best_d is None or dist < best_d:
                best, best_d = [perm], dist
            elif dist == best_d:
                best.append(perm)
        if len(best) != 1:
            raise ValueError(f"{len(best)} nearest permutations satisfy {cond.surface!r}")
        current = best[0]
    return current
