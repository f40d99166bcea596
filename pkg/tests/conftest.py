from __future__ import annotations

import random
from pathlib import Path

import pytest

from difangzhi_miner.corpus import Passage
from difangzhi_miner.labels import DynastyVocabulary, EntityLabel, default_dynasties
from difangzhi_miner.lexicon import Lexicon, Span, load_lexicon

DATA = Path(__file__).parent / "data"

T1 = "李常字公擇南康建昌人自宣州觀察推官發運使"

PAPER_ANNOTATION = (
    "<NAME Song>李常</NAME>字公擇<ADDRESS>南康</ADDRESS><ADDRESS>建昌</ADDRESS>"
    "人自<ADDRESS>宣州</ADDRESS><OFFICE Song>觀察推官</OFFICE>"
    "<OFFICE Song>發運使</OFFICE>"
)


@pytest.fixture(scope="session")
def vocab() -> DynastyVocabulary:
    return default_dynasties()


@pytest.fixture(scope="session")
def mini_lexicon(vocab) -> Lexicon:
    return load_lexicon([DATA / "mini_lexicon.tsv"], vocab)


@pytest.fixture()
def t1_passage() -> Passage:
    return Passage(source_id="t1", index=0, start=0, end=len(T1), content=T1)


@pytest.fixture()
def t1_spans(mini_lexicon) -> list[Span]:
    return mini_lexicon.scan(T1)


def make_span(start: int, end: int, label: EntityLabel, dynasties=(),
              surface: str | None = None) -> Span:
    if surface is None:
        surface = "x" * (end - start)
    return Span(start=start, end=end, label=label, surface=surface,
                dynasties=frozenset(dynasties))


def random_span_instance(rng: random.Random, vocab: DynastyVocabulary,
                         max_spans: int = 8, max_dynasties: int = 3,
                         text_len: int = 14) -> list[Span]:
    """A random, scanner-plausible ambiguity set over a synthetic passage."""
    text = "".join(rng.choice("甲乙丙丁戊己庚辛") for _ in range(text_len))
    dynasty_pool = list(vocab.names[:max_dynasties])
    labels = list(EntityLabel)
    seen: set[tuple[int, int, EntityLabel]] = set()
    spans: list[Span] = []
    for _ in range(rng.randint(0, max_spans)):
        start = rng.randrange(text_len)
        end = min(text_len, start + rng.randint(1, 4))
        label = rng.choice(labels)
        if (start, end, label) in seen:
            continue
        seen.add((start, end, label))
        if label in (EntityLabel.NAME, EntityLabel.OFFICE, EntityLabel.REIGN):
            k = rng.randint(1, len(dynasty_pool))
            dynasties = frozenset(rng.sample(dynasty_pool, k))
        else:
            dynasties = frozenset()
        spans.append(Span(start=start, end=end, label=label,
                          surface=text[start:end], dynasties=dynasties))
    return spans


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one pass/fail line per acceptance criterion after the run."""
    seen = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py" in nodeid:
                name = nodeid.split("::")[-1]
                seen[name] = "PASS" if status == "passed" else "FAIL"
    if seen:
        terminalreporter.write_line("")
        terminalreporter.write_line("acceptance criteria:")
        for name in sorted(seen):
            terminalreporter.write_line(f"  {seen[name]}  {name}")
