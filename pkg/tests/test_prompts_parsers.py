from __future__ import annotations

import pytest

from mcrank import conditions as C
from mcrank.backend.parsers import (
    labels_to_ordering,
    parse_condition_list,
    parse_paragraph_ranking,
    parse_token_ranking,
)
from mcrank.backend.prompts import PromptKind, decode_prompt, render_prompt
from mcrank.engine import Item, Level
from mcrank.errors import EmptyOutput, LevelMismatch, NotAPermutation

COND = 'Item "apple" should be the last from left'


def paras(n):
    return [Item(f"p{k}", f"Paragraph number {k}. It has text.", Level.PARAGRAPH) for k in range(1, n + 1)]


def test_token_prompt(fruits):
    text = render_prompt(PromptKind.RANK_TOKEN, COND, fruits)
    assert text == (
        'Given following conditions: "Item "apple" should be the last from left", '
        'sort the list of items "banana, kiwi, apple" from left to right. Do not provide any explanation.'
    )
    assert text.endswith("Do not provide any explanation.")


def test_extract_prompt_embeds_conditions():
    conds = "(low priority): A; (medium priority): B; (high priority): C"
    text = render_prompt(PromptKind.EXTRACT_CONDITIONS, conds)
    assert text.endswith("Conditions: " + conds)
    assert "do not modify the conditions" in text


def test_paragraph_prompt_lines():
    text = render_prompt(PromptKind.RANK_PARAGRAPH, COND, paras(5))
    lines = text.split("\n")
    assert "permutation of Item-1, ..., Item-5 enter separated" in lines[0]
    assert [ln.split(":")[0] for ln in lines[1:]] == [f"Item-{k}" for k in range(1, 6)]


def test_sort_prompt_numbers_conditions():
    text = render_prompt(PromptKind.SORT_CONDITIONS, ["a cond", "b cond"])
    assert text.endswith("Conditions:\n1. a cond\n2. b cond")
    assert "from the lowest priority to the highest priority" in text


def test_cot_prompts_carry_instruction(fruits):
    tok = render_prompt(PromptKind.RANK_TOKEN_COT, COND, fruits)
    par = render_prompt(PromptKind.RANK_PARAGRAPH_COT, COND, paras(3))
    for text in (tok, par):
        assert "Only report the final sorted list of items." in text
    assert par.index("Only report") < par.index("Item-1:")


def test_level_mismatch(fruits):
    with pytest.raises(LevelMismatch):
        render_prompt(PromptKind.RANK_PARAGRAPH, COND, fruits)


@pytest.mark.parametrize("kind", list(PromptKind))
def test_decode_inverts_render(kind, fruits):
    items = fruits if kind.level is Level.TOKEN else paras(3)
    conds = C.join_conditions([C.make_condition(1, "apple", priority=C.Priority.HIGH), C.make_condition(31, priority=C.Priority.LOW)])
    arg = conds.split("; ") if kind is PromptKind.SORT_CONDITIONS else conds
    decoded = decode_prompt(render_prompt(kind, arg, items if kind.is_ranking else ()))
    assert decoded.kind is kind
    if kind.is_ranking:
        assert decoded.item_texts == [it.text for it in items]
        assert decoded.conditions == conds
    elif kind is PromptKind.SORT_CONDITIONS:
        assert decoded.conditions == conds.split("; ")


def test_token_parse(fruits):
    assert parse_token_ranking("kiwi, apple, banana", fruits) == ("kiwi", "apple", "banana")
    assert parse_token_ranking("1. Kiwi\n2. Apple\n3. Banana", fruits) == ("kiwi", "apple", "banana")
    assert parse_token_ranking('"Kiwi", "apple".\n"banana"', fruits) == ("kiwi", "apple", "banana")
    with pytest.raises(NotAPermutation):
        parse_token_ranking("kiwi, kiwi, banana", fruits)
    with pytest.raises(NotAPermutation):
        parse_token_ranking("kiwi, banana", fruits)


def test_paragraph_parse():
    assert parse_paragraph_ranking("Item-2\nItem-1\nItem-3", 3) == (2, 1, 3)
    assert parse_paragraph_ranking("item-3, item-1, item-2", 3) == (3, 1, 2)
    with pytest.raises(NotAPermutation):
        parse_paragraph_ranking("Item-1\nItem-1\nItem-2", 3)
    assert labels_to_ordering((2, 1, 3), ["a", "b", "c"]) == ("b", "a", "c")


def test_condition_list_parse():
    assert parse_condition_list("1. A\n2. B") == ["A", "B"]
    assert parse_condition_list("- A\n\n- B\n") == ["A", "B"]
    with pytest.raises(EmptyOutput):
        parse_condition_list("")
