"""Prompt templates for ranking, condition extraction and condition sorting."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Sequence, Union

from ..engine import Item, Level
from ..errors import LevelMismatch, PromptUnparseable


class PromptKind(str, enum.Enum):
    RANK_TOKEN = "rank_token"
    RANK_PARAGRAPH = "rank_paragraph"
    EXTRACT_CONDITIONS = "extract_conditions"
    SORT_CONDITIONS = "sort_conditions"
    RANK_TOKEN_COT = "rank_token_cot"
    RANK_PARAGRAPH_COT = "rank_paragraph_cot"

    @property
    def is_ranking(self) -> bool:
        return self not in (PromptKind.EXTRACT_CONDITIONS, PromptKind.SORT_CONDITIONS)

    @property
    def level(self) -> Level | None:
        if self in (PromptKind.RANK_TOKEN, PromptKind.RANK_TOKEN_COT):
            return Level.TOKEN
        if self in (PromptKind.RANK_PARAGRAPH, PromptKind.RANK_PARAGRAPH_COT):
            return Level.PARAGRAPH
        return None


RANK_TOKEN = (
    'Given following conditions: "{conditions}", sort the list of items "{items}" from left to right. '
    "Do not provide any explanation."
)
RANK_PARAGRAPH = (
    'Given following conditions: "{conditions}", sort the items from left to right. '
    "Do not provide any explanation and only provide a permutation of Item-1, ..., Item-{k} "
    "enter separated as the output."
)
EXTRACT_CONDITIONS = (
    "Given the conditions, extract the conditions into numbered items separated by enter. "
    "Do not provide any explanation and do not modify the conditions.\n"
    "Conditions: {conditions}"
)
SORT_CONDITIONS = (
    "Given the conditions, sort these conditions in the order that they should be applied to a list of "
    "items sequentially based on their priority to satisfy all their requirements as much as possible "
    "from the lowest priority to the highest priority. Do not provide any explanation and do not modify "
    "the conditions.\n"
    "Conditions:\n{conditions}"
)
COT_INSTRUCTION = (
    "To sort the items, first extract the conditions, then sort the conditions based on their priority. "
    "Finally, apply the sorted conditions on the list of items iteratively updating their order in each "
    "iteration. Only report the final sorted list of items."
)

ITEM_SEPARATOR = ", "


def item_label(k: int) -> str:
    return f"Item-{k}"


def numbered(lines: Sequence[str]) -> str:
    return "\n".join(f"{k}. {line}" for k, line in enumerate(lines, start=1))


def render_prompt(
    kind: PromptKind,
    conditions: Union[str, Sequence[str]],
    items: Sequence[Item] = (),
) -> str:
    """Fill a prompt template.

    ``conditions`` is the raw condition string for every kind except
    ``SORT_CONDITIONS``, which takes the list of extracted conditions.
    """
    if kind is PromptKind.SORT_CONDITIONS:
        lines = [conditions] if isinstance(conditions, str) else list(conditions)
        return SORT_CONDITIONS.format(conditions=numbered(lines))
    if not isinstance(conditions, str):
        conditions = "; ".join(conditions)
    if kind is PromptKind.EXTRACT_CONDITIONS:
        return EXTRACT_CONDITIONS.format(conditions=conditions)

    if not conditions.strip():
        raise ValueError("ranking prompts need a non-empty condition string")
    wrong = [it.id for it in items if it.level is not kind.level]
    if wrong:
        raise LevelMismatch(f"{kind.value} prompt cannot list items {wrong}")

    if kind.level is Level.TOKEN:
        text = RANK_TOKEN.format(conditions=conditions, items=ITEM_SEPARATOR.join(it.text for it in items))
        if kind is PromptKind.RANK_TOKEN_COT:
            text += "\n" + COT_INSTRUCTION
        return text

    head = RANK_PARAGRAPH.format(conditions=conditions, k=len(items))
    if kind is PromptKind.RANK_PARAGRAPH_COT:
        head += "\n" + COT_INSTRUCTION
    body = "\n".join(f"{item_label(k)}: {it.text}" for k, it in enumerate(items, start=1))
    return head + "\n" + body


# --------------------------------------------------------------------------
# reading rendered prompts back (used by the oracle backend)
# --------------------------------------------------------------------------

@dataclass
class DecodedPrompt:
    kind: PromptKind
    conditions: Union[str, list[str]]
    item_texts: list[str]


_RANK_HEAD = re.compile(r'^Given following conditions: "(?P<conds>.*)", sort the (?P<rest>.*)$', re.DOTALL)
_TOKEN_TAIL = re.compile(r'^list of items "(?P<items>.*)" from left to right\. Do not provide any explanation\.$', re.DOTALL)
_PARA_TAIL = re.compile(r"^items from left to right\. Do not provide any explanation and only provide a permutation")
_ITEM_LINE = re.compile(r"^Item-(\d+): (.*)$")


def decode_prompt(text: str) -> DecodedPrompt:
    if text.startswith(EXTRACT_CONDITIONS.split("{")[0]):
        return DecodedPrompt(PromptKind.EXTRACT_CONDITIONS, text.split("\nConditions: ", 1)[1], [])
    if text.startswith(SORT_CONDITIONS.split("{")[0]):
        from .parsers import parse_condition_list

        return DecodedPrompt(PromptKind.SORT_CONDITIONS, parse_condition_list(text.split("\nConditions:\n", 1)[1]), [])

    cot = ("\n" + COT_INSTRUCTION) in text
    stripped = text.replace("\n" + COT_INSTRUCTION, "")
    m = _RANK_HEAD.match(stripped.split("\n", 1)[0])
    if not m:
        raise PromptUnparseable("not a recognized prompt")
    rest = m.group("rest")
    tok = _TOKEN_TAIL.match(rest)
    if tok:
        texts = tok.group("items").split(ITEM_SEPARATOR)
        kind = PromptKind.RANK_TOKEN_COT if cot else PromptKind.RANK_TOKEN
        return DecodedPrompt(kind, m.group("conds"), texts)
    if _PARA_TAIL.match(rest):
        texts = []
        for k, line in enumerate(stripped.split("\n")[1:], start=1):
            hit = _ITEM_LINE.match(line)
            if not hit or int(hit.group(1)) != k:
                raise PromptUnparseable(f"bad item line {line!r}")
            texts.append(hit.group(2))
        kind = PromptKind.RANK_PARAGRAPH_COT if cot else PromptKind.RANK_PARAGRAPH
        return DecodedPrompt(kind, m.group("conds"), texts)
    raise PromptUnparseable("ranking prompt has no recognizable item list")
