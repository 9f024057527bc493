"""Benchmark synthesis: scenarios, labeled item pools, samples and filtering.

Randomness: every draw comes from ``random.Random(derive_seed(seed, *path))``
where ``derive_seed`` hashes the root seed together with a path such as
``(scenario_index, category_index, sample_index)``. Streams for different
samples are therefore independent of generation order, and any single sample
can be regenerated from its ``seed_trace``.
"""

from __future__ import annotations

import hashlib
import json
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

from . import conditions as C
from .conditions import Category, Condition, KeyKind, Op, PartitionMove, Priority, SortByKey
from .engine import Item, Level, Ordering, _matches, char_count, gold_ranking, sort_key
from .errors import MCRankError, PoolExhausted, UnsatisfiableSlot

LEVELS = (Level.TOKEN, Level.PARAGRAPH)
CONDITION_COUNTS = (1, 2, 3)
ITEM_COUNTS = (3, 5, 7)
RESHUFFLES = 20


def derive_seed(seed: int, *path: object) -> int:
    """64-bit child seed for ``path`` under ``seed``."""
    material = "/".join([str(int(seed))] + [str(p) for p in path]).encode()
    return int.from_bytes(hashlib.sha256(material).digest()[:8], "big")


def rng_for(seed: int, *path: object) -> random.Random:
    return random.Random(derive_seed(seed, *path))


@dataclass(frozen=True, order=True)
class Scenario:
    level: Level
    n_conditions: int
    n_items: int

    @property
    def key(self) -> str:
        return f"{self.level.value}-c{self.n_conditions}-i{self.n_items}"

    @property
    def index(self) -> int:
        return ALL_SCENARIOS.index(self)

    def to_json(self) -> dict:
        return {"level": self.level.value, "n_conditions": self.n_conditions, "n_items": self.n_items}

    @classmethod
    def from_json(cls, d: dict) -> "Scenario":
        return cls(Level(d["level"]), int(d["n_conditions"]), int(d["n_items"]))


ALL_SCENARIOS = tuple(Scenario(lv, nc, ni) for lv in LEVELS for nc in CONDITION_COUNTS for ni in ITEM_COUNTS)


def select_scenarios(
    level: Optional[Level] = None,
    n_conditions: Optional[int] = None,
    n_items: Optional[int] = None,
) -> list[Scenario]:
    return [
        s
        for s in ALL_SCENARIOS
        if (level is None or s.level is level)
        and (n_conditions is None or s.n_conditions == n_conditions)
        and (n_items is None or s.n_items == n_items)
    ]


# --------------------------------------------------------------------------
# pools
# --------------------------------------------------------------------------

def item_to_json(item: Item) -> dict:
    return {
        "id": item.id,
        "text": item.text,
        "level": item.level.value,
        "attributes": dict(item.attributes),
        "positional_ok": item.positional_ok,
    }


def item_from_json(d: dict) -> Item:
    return Item(
        id=str(d["id"]),
        text=d["text"],
        level=Level(d.get("level", "token")),
        attributes=dict(d.get("attributes", {})),
        positional_ok=bool(d.get("positional_ok", False)),
    )


@dataclass
class ItemPool:
    level: Level
    attribute_schema: dict[str, KeyKind]
    entries: list[Item]

    def __post_init__(self) -> None:
        for e in self.entries:
            if e.level is not self.level:
                raise ValueError(f"pool entry {e.id!r} is {e.level.value}-level in a {self.level.value} pool")
            for name, value in e.attributes.items():
                kind = self.attribute_schema.get(name)
                if kind is None:
                    raise ValueError(f"pool entry {e.id!r} has attribute {name!r} outside the schema")
                if kind is not KeyKind.ORDINAL_LABEL:
                    sort_key(e, name, kind)

    def with_attribute(self, attribute: Optional[str], positional: bool = False) -> list[Item]:
        out = []
        for e in self.entries:
            if positional and not e.positional_ok:
                continue
            if attribute is not None and attribute not in e.attributes:
                continue
            out.append(e)
        return out


def infer_schema(entries: Iterable[Item]) -> dict[str, KeyKind]:
    schema: dict[str, KeyKind] = {}
    for e in entries:
        for name, value in e.attributes.items():
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                kind = KeyKind.NUMBER
            else:
                try:
                    C.normalize_date(value)
                    kind = KeyKind.DATE
                except ValueError:
                    kind = KeyKind.ORDINAL_LABEL
            prev = schema.setdefault(name, kind)
            if prev is not kind:
                schema[name] = KeyKind.ORDINAL_LABEL
    return schema


def load_pool(path: str | Path, level: Level) -> ItemPool:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                item = item_from_json(json.loads(line))
                if item.level is level:
                    entries.append(item)
    return ItemPool(level, infer_schema(entries), entries)


def write_pool(pools: Sequence[ItemPool], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pool in pools:
            for e in pool.entries:
                fh.write(json.dumps(item_to_json(e), sort_keys=True) + "\n")


# --------------------------------------------------------------------------
# samples
# --------------------------------------------------------------------------

@dataclass
class Sample:
    id: str
    scenario: Scenario
    category: Category
    conditions: list[Condition]
    condition_string: str
    items: list[Item]
    gold: Ordering
    seed_trace: int

    @property
    def presented(self) -> Ordering:
        return tuple(it.id for it in self.items)

    @property
    def item_index(self) -> dict[str, Item]:
        return {it.id: it for it in self.items}

    def to_json(self) -> dict:
        items = []
        for k, it in enumerate(self.items, start=1):
            row = {"id": it.id, "text": it.text, "attributes": dict(it.attributes)}
            if self.scenario.level is Level.PARAGRAPH:
                row["label"] = f"Item-{k}"
            items.append(row)
        return {
            "id": self.id,
            "scenario": self.scenario.to_json(),
            "category": self.category.value,
            "conditions": [
                {"surface": c.surface, "priority": c.priority.tag, "template_id": c.template_id}
                for c in self.conditions
            ],
            "condition_string": self.condition_string,
            "items": items,
            "gold": list(self.gold),
            "seed_trace": self.seed_trace,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Sample":
        scenario = Scenario.from_json(d["scenario"])
        conds = [
            C.parse_condition(c["surface"]).with_priority(C.Priority.from_tag(c["priority"]))
            for c in d["conditions"]
        ]
        items = [
            Item(id=str(r["id"]), text=r["text"], level=scenario.level, attributes=dict(r.get("attributes", {})))
            for r in d["items"]
        ]
        return cls(
            id=d["id"],
            scenario=scenario,
            category=Category(d["category"]),
            conditions=conds,
            condition_string=d["condition_string"],
            items=items,
            gold=tuple(d["gold"]),
            seed_trace=int(d["seed_trace"]),
        )


def dump_samples(samples: Iterable[Sample]) -> str:
    return "".join(json.dumps(s.to_json(), sort_keys=True, ensure_ascii=False) + "\n" for s in samples)


def write_dataset(samples: Iterable[Sample], path: str | Path) -> None:
    Path(path).write_text(dump_samples(samples), encoding="utf-8")


def read_dataset(path: str | Path) -> list[Sample]:
    with open(path, encoding="utf-8") as fh:
        return [Sample.from_json(json.loads(line)) for line in fh if line.strip()]


# --------------------------------------------------------------------------
# filtering
# --------------------------------------------------------------------------

def _has_char_count(conds: Iterable[Condition]) -> bool:
    return any(c.category is Category.CHAR_COUNT for c in conds)


def filter_sample(candidate: Sample) -> bool:
    """Whether a candidate sample is kept in the benchmark."""
    index = candidate.item_index
    ids = candidate.presented
    try:
        if _has_char_count(candidate.conditions):
            counts = [char_count(it.text) for it in candidate.items]
            if len(set(counts)) != len(counts):
                return False
        for cond in candidate.conditions:
            d = cond.directive
            if isinstance(d, SortByKey):
                keys = [sort_key(index[i], d.attribute, d.key_kind) for i in ids]
                if len(set(keys)) != len(keys):
                    return False
            elif isinstance(d, PartitionMove):
                hits = sum(_matches(d.predicate, ids, index).values())
                if hits == 0 or hits == len(ids):
                    return False
        if candidate.scenario.n_conditions >= 2 and _needs_reshuffle_check(candidate.conditions):
            rng = rng_for(candidate.seed_trace, "reshuffle")
            reference = gold_ranking(index, ids, candidate.conditions)
            for _ in range(RESHUFFLES):
                order = list(ids)
                rng.shuffle(order)
                if gold_ranking(index, order, candidate.conditions) != reference:
                    return False
    except MCRankError:
        return False
    return True


def _needs_reshuffle_check(conds: Sequence[Condition]) -> bool:
    # Only conditions that fix a total order make the gold independent of
    # the presented order; without one, gold is relative to the presented
    # order exactly as in single-condition partition samples.
    return any(c.is_full_sort for c in conds)


# --------------------------------------------------------------------------
# generation
# --------------------------------------------------------------------------

FIXED_ATTRIBUTE_TEMPLATES = {
    "location", "birthday", "deadline", "publication_date", "size",
    "height", "type", "color", "genre", "category", "char_count",
}
# templates whose attribute is itself a slot value
_LABEL_SLOT_TEMPLATES = (9, 10)
_NUMBER_SLOT_TEMPLATES = (34, 35, 36)


def category_templates(category: Category) -> list[int]:
    return [
        t.id
        for t in C.TEMPLATES.values()
        if t.category is category and t.alias_of is None
    ]


def template_attribute(template_id: int) -> Optional[str]:
    """Attribute a template fixes, or None for slot-attribute and positional templates."""
    probe = _probe_condition(template_id)
    d = probe.directive
    if isinstance(d, SortByKey):
        return d.attribute
    if isinstance(d, PartitionMove) and template_id not in _LABEL_SLOT_TEMPLATES + _NUMBER_SLOT_TEMPLATES:
        return d.predicate.attribute
    return None


def _probe_condition(template_id: int) -> Condition:
    t = C.TEMPLATES[template_id]
    slots = {"X": "2000", "Y": "probe"} if template_id not in (22, 23) else {"X": "1"}
    if template_id in (1, 2):
        slots = {"X": "probe"}
    return C.make_condition(template_id, slots.get("X") if "X" in t.slot_names else None,
                            slots.get("Y") if "Y" in t.slot_names else None)


def slot_attributes(pool: ItemPool, template_id: int) -> list[str]:
    if template_id in _LABEL_SLOT_TEMPLATES:
        kind = KeyKind.ORDINAL_LABEL
    elif template_id in _NUMBER_SLOT_TEMPLATES:
        kind = KeyKind.NUMBER
    else:
        return []
    return sorted(a for a, k in pool.attribute_schema.items() if k is kind and a not in FIXED_ATTRIBUTE_TEMPLATES)


def _format_value(value: object) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def _options(pool: ItemPool, template_id: int, n_items: int) -> list[tuple[int, Optional[str], list[Item]]]:
    """(template, attribute, eligible entries) choices that can fill a sample."""
    if template_id in C.POSITIONAL_TEMPLATES:
        eligible = pool.with_attribute(None, positional=True)
        return [(template_id, None, eligible)] if len(eligible) >= n_items else []
    attrs = slot_attributes(pool, template_id) or [template_attribute(template_id)]
    out = []
    for attr in attrs:
        if attr is None:
            continue
        eligible = pool.entries if attr == "char_count" else pool.with_attribute(attr)
        if len(eligible) >= n_items:
            out.append((template_id, attr, eligible))
    return out


def _category_condition(
    rng: random.Random, template_id: int, attr: Optional[str], drawn: list[Item]
) -> Condition:
    t = C.TEMPLATES[template_id]
    if template_id in C.POSITIONAL_TEMPLATES:
        x = rng.choice(drawn).text if "X" in t.slot_names else None
        return C.make_condition(template_id, x)
    if template_id in _NUMBER_SLOT_TEMPLATES:
        return C.make_condition(template_id, C.attribute_to_slot(attr))
    probe = _probe_condition(template_id)
    d = probe.directive
    if isinstance(d, SortByKey):
        return probe
    pred = d.predicate
    if pred.op is Op.EQ:
        values = Counter(str(it.attributes[attr]) for it in drawn)
        splitting = sorted(v for v, n in values.items() if n < len(drawn))
        value = rng.choice(splitting or sorted(values))
        y = C.attribute_to_slot(attr) if template_id in _LABEL_SLOT_TEMPLATES else None
        return C.make_condition(template_id, value, y)
    # LT / GT threshold taken from a drawn item so both sides are non-empty
    keyed = sorted({(sort_key(it, attr, pred.kind), _format_value(it.attributes[attr])) for it in drawn})
    if len(keyed) < 2:
        choices = keyed
    elif pred.op is Op.LT:
        choices = keyed[1:]
    else:
        choices = keyed[:-1]
    return C.make_condition(template_id, rng.choice(choices)[1])


def _extra_positional(rng: random.Random, drawn: list[Item]) -> Condition:
    template_id = rng.choice(C.POSITIONAL_TEMPLATES)
    x = rng.choice(drawn).text if template_id in (1, 2) else None
    return C.make_condition(template_id, x, priority=Priority.HIGH)


def build_candidate(
    pool: ItemPool, scenario: Scenario, category: Category, sample_index: int, seed: int
) -> Sample:
    """One candidate sample before filtering."""
    cat_index = C.SAMPLE_CATEGORIES.index(category)
    trace = derive_seed(seed, scenario.index, cat_index, sample_index)
    rng = random.Random(trace)

    options = [o for tid in category_templates(category) for o in _options(pool, tid, scenario.n_items)]
    if not options:
        raise PoolExhausted(
            f"no {category.value} template has {scenario.n_items} {scenario.level.value}-level entries"
        )
    template_id, attr, eligible = rng.choice(options)
    drawn = rng.sample(eligible, scenario.n_items)
    main = _category_condition(rng, template_id, attr, drawn)

    conds = [main]
    if scenario.n_conditions == 2:
        if rng.random() < 0.5:
            conds.append(C.make_condition(31, priority=Priority.LOW))
        else:
            conds.append(_extra_positional(rng, drawn))
    elif scenario.n_conditions == 3:
        conds.append(C.make_condition(31, priority=Priority.LOW))
        conds.append(_extra_positional(rng, drawn))

    rng.shuffle(drawn)
    rng.shuffle(conds)
    presented = tuple(it.id for it in drawn)
    try:
        gold = gold_ranking(drawn, presented, conds)
    except MCRankError:
        gold = presented
    return Sample(
        id=f"{scenario.key}-{category.value}-{sample_index:04d}",
        scenario=scenario,
        category=category,
        conditions=conds,
        condition_string=C.join_conditions(conds),
        items=drawn,
        gold=gold,
        seed_trace=trace,
    )


def _check_slots_satisfiable(pool: ItemPool, category: Category, n_items: int) -> None:
    if category is Category.POSITIONAL:
        return
    for tid in category_templates(category):
        for _, attr, eligible in _options(pool, tid, n_items):
            t = _probe_condition(tid)
            if isinstance(t.directive, SortByKey):
                return
            if len({str(e.attributes[attr]) for e in eligible}) > 1:
                return
    raise UnsatisfiableSlot(f"no {category.value} slot value can split the pool's items")


def generate_scenario(pool: ItemPool, scenario: Scenario, per_category: int, seed: int) -> list[Sample]:
    if pool.level is not scenario.level:
        raise ValueError(f"{pool.level.value} pool cannot build a {scenario.level.value} scenario")
    if per_category < 1:
        raise ValueError("per_category must be at least 1")
    out = []
    for category in C.SAMPLE_CATEGORIES:
        _check_slots_satisfiable(pool, category, scenario.n_items)
        for k in range(per_category):
            candidate = build_candidate(pool, scenario, category, k, seed)
            if filter_sample(candidate):
                out.append(candidate)
    return out


def generate_dataset(
    pools: dict[Level, ItemPool], scenarios: Iterable[Scenario], per_category: int, seed: int
) -> list[Sample]:
    out: list[Sample] = []
    for scenario in scenarios:
        out.extend(generate_scenario(pools[scenario.level], scenario, per_category, seed))
    return out


# --------------------------------------------------------------------------
# statistics
# --------------------------------------------------------------------------

def dataset_stats(samples: Iterable[Sample]) -> dict[tuple[Level, int], float]:
    """Mean sample count over the item-count scenarios, per (level, n_conditions)."""
    per_scenario: Counter = Counter(s.scenario for s in samples)
    grouped: dict[tuple[Level, int], list[int]] = defaultdict(list)
    for scenario, n in sorted(per_scenario.items()):
        grouped[(scenario.level, scenario.n_conditions)].append(n)
    return {k: sum(v) / len(v) for k, v in sorted(grouped.items(), key=lambda kv: (LEVELS.index(kv[0][0]), kv[0][1]))}


def format_stats(table: dict[tuple[Level, int], float]) -> str:
    header = "level    " + "".join(f"{n} Condition{'s' if n > 1 else '':<1}".rjust(15) for n in CONDITION_COUNTS)
    lines = [header.rstrip()]
    for level, label in ((Level.TOKEN, "T-level"), (Level.PARAGRAPH, "P-level")):
        if not any(k[0] is level for k in table):
            continue
        cells = []
        for n in CONDITION_COUNTS:
            v = table.get((level, n))
            cells.append(("-" if v is None else f"{v:.1f}").rjust(15))
        lines.append(f"{label:<9}" + "".join(cells))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# synthetic pools
# --------------------------------------------------------------------------

_ADJ = [
    "Amber", "Bold", "Crimson", "Dusky", "Elder", "Frosted", "Gilded", "Hollow", "Ivory", "Jade",
    "Keen", "Lunar", "Misty", "Noble", "Olive", "Pale", "Quiet", "Rustic", "Silver", "Tawny",
    "Umber", "Velvet", "Wild", "Young", "Zesty", "Ancient", "Brisk", "Copper", "Distant", "Emerald",
]
_NOUN = [
    "Fox", "Harbor", "Lantern", "Orchard", "Kettle", "Falcon", "Meadow", "Anvil", "Compass", "Willow",
    "Quarry", "Saddle", "Beacon", "Thistle", "Canyon", "Marble", "Pelican", "Trellis", "Garnet", "Violin",
    "Ox", "Elm", "Bay", "Reef", "Mill", "Pier", "Crest", "Grove", "Ridge", "Forge",
]
_TAIL = ["", "", "", " of the North", " Company", " Works", " Society", " Mk II", " Junior", " and Sons"]
_CONTINENTS = ["Africa", "Asia", "Europe", "North America", "South America", "Oceania"]
_COUNTRIES = ["Kenya", "Japan", "France", "Canada", "Brazil", "Australia", "Egypt", "India", "Norway", "Chile"]
_TYPES = ["tool", "fruit", "vehicle", "instrument", "animal"]
_COLORS = ["red", "blue", "green", "yellow", "black", "white"]
_GENRES = ["jazz", "rock", "drama", "comedy", "thriller"]
_CATEGORIES = ["kitchen", "sports", "music", "garden", "office"]
_FILLER = [
    "It is often mentioned in regional guides.",
    "Several reviewers described it as reliable.",
    "Its history is documented in a number of archives.",
    "Visitors usually remark on its unusual appearance.",
    "The original records were digitized a few years ago.",
    "Local newspapers covered it on more than one occasion.",
    "Collectors keep an eye on it at seasonal fairs.",
    "A short documentary once featured it in passing.",
]

SYNTH_SCHEMA: dict[str, KeyKind] = {
    "location": KeyKind.ORDINAL_LABEL,
    "country_of_citizenship": KeyKind.ORDINAL_LABEL,
    "birthday": KeyKind.DATE,
    "deadline": KeyKind.DATE,
    "publication_date": KeyKind.DATE,
    "size": KeyKind.NUMBER,
    "height": KeyKind.NUMBER,
    "type": KeyKind.ORDINAL_LABEL,
    "color": KeyKind.ORDINAL_LABEL,
    "genre": KeyKind.ORDINAL_LABEL,
    "category": KeyKind.ORDINAL_LABEL,
    "yards_of_touchdown": KeyKind.NUMBER,
}


def _dates(rng: random.Random, start: int, end: int, n: int) -> list[str]:
    import datetime as dt

    first = dt.date(start, 1, 1).toordinal()
    last = dt.date(end, 12, 31).toordinal()
    return [dt.date.fromordinal(o).isoformat() for o in rng.sample(range(first, last + 1), n)]


def _paragraph(rng: random.Random, name: str, attrs: dict) -> str:
    sentences = [
        f"{name} is a {attrs['color']} {attrs['type']} associated with {attrs['country_of_citizenship']}, "
        f"in {attrs['location']}.",
        f"It measures {attrs['size']} units in size and {attrs['height']} units in height.",
        f"Records give a birthday of {attrs['birthday']} and a publication date of {attrs['publication_date']}.",
        f"Applications related to it close on {attrs['deadline']}.",
        f"It is filed under {attrs['category']} and the {attrs['genre']} genre, with a longest touchdown "
        f"of {attrs['yards_of_touchdown']} yards.",
    ]
    filler = rng.sample(_FILLER, rng.randint(0, len(_FILLER)))
    body = sentences + filler
    rng.shuffle(body)
    return " ".join([sentences[0]] + [s for s in body if s != sentences[0]])


_PAD = {1: "I", 2: "II", 3: "III", 4: "Beta", 5: "Prime", 6: "Junior", 7: "Company", 8: "Workshop"}


def _name_of_length(rng: random.Random, target: int, seen: set[str]) -> str:
    """A made-up entity name exactly ``target`` characters long."""
    while True:
        name = rng.choice(_NOUN)
        while target - len(name) > 9:
            name = f"{rng.choice(_ADJ)} {name}"
        gap = target - len(name)
        if gap < 0 or gap == 1:
            continue
        if gap:
            name = f"{name} {_PAD[gap - 1]}"
        if name not in seen:
            seen.add(name)
            return name


def synth_pool(level: Level, size: int, seed: int, collision_rate: float = 0.0) -> ItemPool:
    """Deterministic pool where every entry carries every attribute in ``SYNTH_SCHEMA``.

    ``collision_rate`` is the fraction of entries rewritten to share their
    character count with an earlier entry.
    """
    if size < 7:
        raise ValueError("synthetic pools need at least 7 entries")
    rng = rng_for(seed, "synth_pool", level.value, size)
    # every entry gets its own character count; collisions come only from collision_rate
    targets = rng.sample(range(3, 3 + size), size)
    seen: set[str] = set()
    names = [_name_of_length(rng, t, seen) for t in targets]

    birthdays = _dates(rng, 1930, 2005, size)
    deadlines = _dates(rng, 2024, 2027, size)
    publications = _dates(rng, 1950, 2023, size)
    sizes = [v / 10 for v in rng.sample(range(1, 50000), size)]
    heights = [v / 10 for v in rng.sample(range(1, 30000), size)]
    yards = rng.sample(range(1, 100 * max(1, size // 50 + 1) + 1), size)

    entries = []
    used_lengths: set[int] = set()
    for k, name in enumerate(names):
        attrs = {
            "location": rng.choice(_CONTINENTS),
            "country_of_citizenship": rng.choice(_COUNTRIES),
            "birthday": birthdays[k],
            "deadline": deadlines[k],
            "publication_date": publications[k],
            "size": sizes[k],
            "height": heights[k],
            "type": rng.choice(_TYPES),
            "color": rng.choice(_COLORS),
            "genre": rng.choice(_GENRES),
            "category": rng.choice(_CATEGORIES),
            "yards_of_touchdown": yards[k],
        }
        if level is Level.TOKEN:
            text = name
        else:
            text = _paragraph(rng, name, attrs)
            while char_count(text) in used_lengths:
                text = _paragraph(rng, name, attrs)
            used_lengths.add(char_count(text))
        entries.append([f"{level.value[0]}{k:05d}", text, attrs])

    if collision_rate > 0:
        texts = {e[1] for e in entries}
        for k in range(1, size):
            if rng.random() >= collision_rate:
                continue
            # same length, different text
            twin = entries[rng.randrange(k)][1]
            variant = twin.upper() if twin.upper() not in texts else twin.swapcase()
            if variant in texts or char_count(variant) != char_count(twin):
                continue
            texts.discard(entries[k][1])
            entries[k][1] = variant
            texts.add(variant)

    items = [Item(i, t, level, a, positional_ok=True) for i, t, a in entries]
    return ItemPool(level, dict(SYNTH_SCHEMA), items)


def iter_scenario_sections(samples: Sequence[Sample]) -> Iterator[tuple[Scenario, list[Sample]]]:
    groups: dict[Scenario, list[Sample]] = defaultdict(list)
    for s in samples:
        groups[s.scenario].append(s)
    for scenario in ALL_SCENARIOS:
        if scenario in groups:
            yield scenario, groups[scenario]
