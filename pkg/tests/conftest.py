from __future__ import annotations

import pytest

from mcrank import benchgen as bg
from mcrank.engine import Item, Level


def fruit(text: str, **attrs) -> Item:
    return Item(text, text, Level.TOKEN, attrs)


@pytest.fixture
def fruits():
    return [fruit("banana"), fruit("kiwi"), fruit("apple")]


@pytest.fixture
def africa_items():
    # five items, two in Africa; char counts 11, 4, 9, 17, 5
    return [
        fruit("Nairobi Fox", location="Africa"),
        fruit("Lima", location="South America"),
        fruit("Cairo Elm", location="Africa"),
        fruit("Oslo Harbor Works", location="Europe"),
        fruit("Tokyo", location="Asia"),
    ]


@pytest.fixture(scope="session")
def token_pool():
    return bg.synth_pool(Level.TOKEN, 200, 1)


@pytest.fixture(scope="session")
def paragraph_pool():
    return bg.synth_pool(Level.PARAGRAPH, 200, 1)


@pytest.fixture(scope="session")
def pools(token_pool, paragraph_pool):
    return {Level.TOKEN: token_pool, Level.PARAGRAPH: paragraph_pool}


@pytest.fixture(scope="session")
def desk_dataset(pools):
    """All 18 scenarios, 10 candidates per category."""
    return bg.generate_dataset(pools, bg.ALL_SCENARIOS, 10, 3)


@pytest.fixture(scope="session")
def desk_files(tmp_path_factory, pools, desk_dataset):
    root = tmp_path_factory.mktemp("desk")
    pool_path = root / "pool.jsonl"
    data_path = root / "dataset.jsonl"
    bg.write_pool(list(pools.values()), pool_path)
    bg.write_dataset(desk_dataset, data_path)
    return root, pool_path, data_path


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n:>2}: {detail}")
