"""Structured ranking conditions and their English surface forms.

Every condition in the benchmark is one of 36 fixed English templates. Each
template is bound here to a structured directive (a stable sort, a stable
partition, or a positional move) so that gold orderings can be computed
deterministically. Parsing and rendering are exact inverses of each other.
"""

from __future__ import annotations

import datetime as _dt
import enum
import re
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

from .errors import MalformedSlot, UnrecognizedTemplate

CONDITION_SEPARATOR = "; "


class Priority(enum.IntEnum):
    LOW = 0
    MEDIUM = 1
    HIGH = 2

    @property
    def tag(self) -> str:
        return self.name.lower()

    @classmethod
    def from_tag(cls, tag: str) -> "Priority":
        return cls[tag.strip().upper()]


class Category(str, enum.Enum):
    POSITIONAL = "positional"
    LOCATIONAL = "locational"
    TEMPORAL = "temporal"
    TRAIT = "trait"
    REASON = "reason"
    CHAR_COUNT = "char_count"


# the five categories a sample's medium-priority condition is drawn from
SAMPLE_CATEGORIES = (
    Category.POSITIONAL,
    Category.LOCATIONAL,
    Category.TEMPORAL,
    Category.TRAIT,
    Category.REASON,
)


class KeyKind(str, enum.Enum):
    NUMBER = "number"
    DATE = "date"
    TEXT_LENGTH = "text_length"
    ORDINAL_LABEL = "ordinal_label"


class SortOrder(str, enum.Enum):
    ASCENDING = "ascending"
    DESCENDING = "descending"


class Placement(str, enum.Enum):
    FRONT = "front"
    BACK = "back"


class Op(str, enum.Enum):
    EQ = "eq"
    LT = "lt"
    GT = "gt"
    IS_MAX = "is_max"
    IS_MIN = "is_min"


class Selector(str, enum.Enum):
    BY_ITEM_TEXT = "by_item_text"
    CURRENT_FIRST = "current_first"
    CURRENT_LAST = "current_last"


@dataclass(frozen=True)
class Predicate:
    attribute: str
    op: Op
    value: Optional[str] = None
    kind: KeyKind = KeyKind.ORDINAL_LABEL

    def __post_init__(self) -> None:
        needs_value = self.op in (Op.EQ, Op.LT, Op.GT)
        if needs_value != (self.value is not None):
            raise ValueError(f"predicate {self.op.value} value presence is wrong: {self.value!r}")


@dataclass(frozen=True)
class SortByKey:
    attribute: str
    key_kind: KeyKind
    order: SortOrder = SortOrder.ASCENDING


@dataclass(frozen=True)
class PartitionMove:
    predicate: Predicate
    placement: Placement


@dataclass(frozen=True)
class PositionalMove:
    selector: Selector
    target: Placement
    text: Optional[str] = None

    def __post_init__(self) -> None:
        if (self.selector is Selector.BY_ITEM_TEXT) != (self.text is not None):
            raise ValueError("item text is required exactly for the by-item-text selector")


Directive = Union[SortByKey, PartitionMove, PositionalMove]


@dataclass(frozen=True)
class Condition:
    template_id: int
    category: Category
    priority: Priority
    directive: Directive
    surface: str

    def with_priority(self, priority: Priority) -> "Condition":
        return replace(self, priority=priority)

    @property
    def is_identity(self) -> bool:
        return self.template_id in IDENTITY_TEMPLATES

    @property
    def is_full_sort(self) -> bool:
        return isinstance(self.directive, SortByKey)


# --------------------------------------------------------------------------
# typed slot values
# --------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"^\s*([-+]?(?:\d+(?:\.\d*)?|\.\d+))\s*([^\d\s].*)?$")
_YEAR_RE = re.compile(r"^\d{4}$")
_ISO_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")


def parse_number(value: object) -> float:
    """Numeric value of a number or of a decimal literal with a unit suffix."""
    if isinstance(value, bool):
        raise ValueError(f"not a number: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    m = _NUMBER_RE.match(str(value))
    if not m:
        raise ValueError(f"not a number: {value!r}")
    return float(m.group(1))


def normalize_date(value: object) -> str:
    """ISO-8601 ``YYYY-MM-DD`` form of a full date or a bare year."""
    text = str(value).strip()
    if _YEAR_RE.match(text):
        return f"{text}-01-01"
    m = _ISO_RE.match(text)
    if not m:
        raise ValueError(f"not a date: {value!r}")
    _dt.date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    return text


def attribute_from_slot(text: str) -> str:
    if "_" in text:
        raise MalformedSlot(f"attribute slot may not contain underscores: {text!r}")
    return text.replace(" ", "_")


def attribute_to_slot(attribute: str) -> str:
    return attribute.replace("_", " ")


# --------------------------------------------------------------------------
# template table
# --------------------------------------------------------------------------

Slots = dict


@dataclass(frozen=True)
class Template:
    id: int
    category: Category
    pattern: str
    build: Callable[[Slots], Directive]
    slots: Callable[[Directive], Slots]
    alias_of: Optional[int] = None

    @property
    def slot_names(self) -> tuple[str, ...]:
        return tuple(n for n in ("X", "Y") if "{" + n + "}" in self.pattern)

    def render(self, slots: Slots) -> str:
        return self.pattern.format(**slots)


def _check_date(text: str) -> str:
    try:
        normalize_date(text)
    except ValueError as exc:
        raise MalformedSlot(str(exc)) from None
    return text


def _check_number(text: str) -> str:
    try:
        parse_number(text)
    except ValueError as exc:
        raise MalformedSlot(str(exc)) from None
    return text


def _move_text(target: Placement):
    def build(s: Slots) -> Directive:
        return PositionalMove(Selector.BY_ITEM_TEXT, target, text=s["X"])

    def slots(d: Directive) -> Slots:
        assert isinstance(d, PositionalMove) and d.text is not None
        return {"X": d.text}

    return build, slots


def _move_self(selector: Selector, target: Placement):
    return (lambda s: PositionalMove(selector, target)), (lambda d: {})


def _sort(attribute: str, kind: KeyKind):
    return (lambda s: SortByKey(attribute, kind)), (lambda d: {})


def _sort_slot_attr():
    def build(s: Slots) -> Directive:
        return SortByKey(attribute_from_slot(s["X"]), KeyKind.NUMBER)

    def slots(d: Directive) -> Slots:
        assert isinstance(d, SortByKey)
        return {"X": attribute_to_slot(d.attribute)}

    return build, slots


def _label_eq(attribute: str, placement: Placement):
    def build(s: Slots) -> Directive:
        return PartitionMove(Predicate(attribute, Op.EQ, s["X"]), placement)

    def slots(d: Directive) -> Slots:
        assert isinstance(d, PartitionMove)
        return {"X": d.predicate.value}

    return build, slots


def _label_eq_slot_attr(placement: Placement):
    def build(s: Slots) -> Directive:
        return PartitionMove(Predicate(attribute_from_slot(s["Y"]), Op.EQ, s["X"]), placement)

    def slots(d: Directive) -> Slots:
        assert isinstance(d, PartitionMove)
        return {"X": d.predicate.value, "Y": attribute_to_slot(d.predicate.attribute)}

    return build, slots


def _compare(attribute: str, op: Op, kind: KeyKind, placement: Placement):
    check = _check_date if kind is KeyKind.DATE else _check_number

    def build(s: Slots) -> Directive:
        return PartitionMove(Predicate(attribute, op, check(s["X"]), kind), placement)

    def slots(d: Directive) -> Slots:
        assert isinstance(d, PartitionMove)
        return {"X": d.predicate.value}

    return build, slots


def _extreme(op: Op, placement: Placement):
    def build(s: Slots) -> Directive:
        return PartitionMove(Predicate(attribute_from_slot(s["X"]), op, None, KeyKind.NUMBER), placement)

    def slots(d: Directive) -> Slots:
        assert isinstance(d, PartitionMove)
        return {"X": attribute_to_slot(d.predicate.attribute)}

    return build, slots


P, L, T, TR, R = (
    Category.POSITIONAL,
    Category.LOCATIONAL,
    Category.TEMPORAL,
    Category.TRAIT,
    Category.REASON,
)
F, B = Placement.FRONT, Placement.BACK
D, N = KeyKind.DATE, KeyKind.NUMBER

_TABLE = [
    (1, P, 'Item "{X}" should be the last from left', _move_text(B)),
    (2, P, 'Item "{X}" should be the last from right', _move_text(F)),
    (3, P, "First item in the final sorted order should appear in the end", _move_self(Selector.CURRENT_FIRST, B)),
    (4, P, "First item in the final sorted order should appear in the beginning", _move_self(Selector.CURRENT_FIRST, F)),
    (5, P, "Last item in the final sorted order should appear in the end", _move_self(Selector.CURRENT_LAST, B)),
    (6, P, "Last item in the final sorted order should appear in the beginning", _move_self(Selector.CURRENT_LAST, F)),
    (7, L, 'Items that are in "{X}" should appear at the beginning', _label_eq("location", F)),
    (8, L, 'Items that are in "{X}" should appear at the end', _label_eq("location", B)),
    (9, L, 'Items that have "{Y}" in "{X}" should appear at the beginning', _label_eq_slot_attr(F)),
    (10, L, 'Items that that have "{Y}" in "{X}" should appear at the end', _label_eq_slot_attr(B)),
    (11, T, "Sort the items based on their birthday from the oldest to the newest", _sort("birthday", D)),
    (12, T, 'Item that born before "{X}" should appear at the end', _compare("birthday", Op.LT, D, B)),
    (13, T, 'Item that born after "{X}" should appear at the beginning', _compare("birthday", Op.GT, D, F)),
    (14, T, "Sort items based on their deadline from the first to the last", _sort("deadline", D)),
    (15, T, 'Item that has a deadline before "{X}" should appear at the end', _compare("deadline", Op.LT, D, B)),
    (16, T, 'Item that has a deadline after "{X}" should appear at the beginning', _compare("deadline", Op.GT, D, F)),
    (17, T, "Sort items based on mentioned publication date from the first to the last", _sort("publication_date", D)),
    (18, T, 'Item that has a publication date before "{X}" should appear at the end', _compare("publication_date", Op.LT, D, B)),
    (19, T, 'Item that has a publication date after "{X}" should appear at the beginning', _compare("publication_date", Op.GT, D, F)),
    (20, TR, "Sort the items based on their size from the smallest to the largest", _sort("size", N)),
    (21, TR, "Sort the items based on their height from the shortest to the tallest", _sort("height", N)),
    (22, TR, 'Item with a size of less than "{X}" should appear at the end', _compare("size", Op.LT, N, B)),
    (23, TR, 'Item with a size of more than "{X}" should appear at the beginning', _compare("size", Op.GT, N, F)),
    (24, TR, "Sort the items based on their size from the smallest to the largest", _sort("size", N)),
    (25, TR, 'Item that is a "{X}" should appear at the end', _label_eq("type", B)),
    (26, TR, 'Item that is a "{X}" should appear at the beginning', _label_eq("type", F)),
    (27, TR, 'Item with a "{X}" color should appear at the end', _label_eq("color", B)),
    (28, TR, 'Item with a "{X}" color should appear at the beginning', _label_eq("color", F)),
    (29, TR, 'Item with the "{X}" genre should appear at the end', _label_eq("genre", B)),
    (30, TR, 'Item with the "{X}" genre should appear at the beginning', _label_eq("genre", F)),
    (31, Category.CHAR_COUNT, "Sort the items based on their character count from the smallest to largest", _sort("char_count", KeyKind.TEXT_LENGTH)),
    (32, R, 'Items in the category "{X}" should appear at the beginning', _label_eq("category", F)),
    (33, R, 'Items in the category "{X}" should appear at the end', _label_eq("category", B)),
    (34, R, 'Sort items based on "{X}" from the smallest to the largest', _sort_slot_attr()),
    (35, R, 'Items that has the largest "{X}" should appear at the beginning', _extreme(Op.IS_MAX, F)),
    (36, R, 'Items that has the smallest "{X}" should appear at the end', _extreme(Op.IS_MIN, B)),
]
del P, L, T, TR, R, F, B, D, N

TEMPLATES: dict[int, Template] = {}
for _tid, _cat, _pattern, (_build, _slots) in _TABLE:
    TEMPLATES[_tid] = Template(_tid, _cat, _pattern, _build, _slots, alias_of=20 if _tid == 24 else None)

IDENTITY_TEMPLATES = frozenset({4, 5})
POSITIONAL_TEMPLATES = tuple(range(1, 7))

_TAG_RE = re.compile(r"^\((low|medium|high) priority\):\s*(.*)$", re.IGNORECASE | re.DOTALL)


def _compile(pattern: str) -> re.Pattern:
    parts = re.split(r"(\{[XY]\})", pattern)
    out = []
    for part in parts:
        if part in ("{X}", "{Y}"):
            out.append(f"(?P<{part[1]}>[^\"]*)")
        else:
            out.append(re.escape(part))
    return re.compile("^" + "".join(out) + "$")


_MATCHERS = [(t, _compile(t.pattern)) for t in TEMPLATES.values() if t.alias_of is None]


def canonical_template_id(template_id: int) -> int:
    if template_id not in TEMPLATES:
        raise UnrecognizedTemplate(f"no template #{template_id}")
    alias = TEMPLATES[template_id].alias_of
    return alias if alias is not None else template_id


def make_condition(
    template_id: int,
    x: Optional[str] = None,
    y: Optional[str] = None,
    priority: Priority = Priority.MEDIUM,
) -> Condition:
    """Build a condition from a template number and its slot values.

    Template #24 repeats #20 word for word, so it is folded into #20.
    """
    template = TEMPLATES[canonical_template_id(template_id)]
    given = {"X": x, "Y": y}
    slots: Slots = {}
    for name in template.slot_names:
        value = given[name]
        if value is None or not str(value).strip():
            raise MalformedSlot(f"template #{template.id} needs a non-empty [{name}] slot")
        if '"' in value:
            raise MalformedSlot(f"slot [{name}] may not contain double quotes: {value!r}")
        slots[name] = value
    directive = template.build(slots)
    return Condition(template.id, template.category, priority, directive, template.render(slots))


def parse_condition(surface: str) -> Condition:
    text = surface.strip()
    priority = Priority.MEDIUM
    m = _TAG_RE.match(text)
    if m:
        priority = Priority.from_tag(m.group(1))
        text = m.group(2).strip()
    if text.endswith("."):
        text = text[:-1]
    for template, regex in _MATCHERS:
        hit = regex.match(text)
        if hit:
            groups = hit.groupdict()
            return make_condition(template.id, groups.get("X"), groups.get("Y"), priority)
    raise UnrecognizedTemplate(f"no condition template matches {surface!r}")


def render_condition(cond: Condition, with_priority_tag: bool = False) -> str:
    template = TEMPLATES[canonical_template_id(cond.template_id)]
    text = template.render(template.slots(cond.directive))
    if with_priority_tag:
        return f"({cond.priority.tag} priority): {text}"
    return text


def join_conditions(conds: list[Condition], with_priority_tag: bool = True) -> str:
    return CONDITION_SEPARATOR.join(render_condition(c, with_priority_tag) for c in conds)


def extract_conditions(condition_string: str) -> list[Condition]:
    fragments = [f for f in condition_string.split(CONDITION_SEPARATOR.strip())]
    if not condition_string.strip():
        raise UnrecognizedTemplate("empty condition string")
    return [parse_condition(f) for f in fragments]


def sort_by_priority(conds: list[Condition]) -> list[Condition]:
    """Lowest priority first; ties keep their surface order."""
    return sorted(conds, key=lambda c: c.priority)


def strip_priority_tag(surface: str) -> str:
    m = _TAG_RE.match(surface.strip())
    return m.group(2).strip() if m else surface.strip()
