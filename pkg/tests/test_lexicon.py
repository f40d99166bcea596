from __future__ import annotations

import random

import pytest

from difangzhi_miner.labels import EntityLabel
from difangzhi_miner.lexicon import Lexicon, LexiconEntry, LexiconError, load_lexicon

from conftest import T1


def entry(surface, label, dynasties=()):
    return LexiconEntry(surface=surface, label=EntityLabel(label),
                        dynasties=frozenset(dynasties))


def brute_force_scan(entries, text):
    """Oracle: test every (position, entry) pair directly."""
    hits = []
    for i in range(len(text)):
        for e in entries:
            if text.startswith(e.surface, i):
                hits.append((i, i + len(e.surface), e.label, e.surface))
    return sorted(hits)


def test_load_merges_and_canonicalizes(tmp_path, vocab):
    p = tmp_path / "lex.tsv"
    p.write_text(
        "李常\tNAME\t宋,元,明,清\n"
        "觀察推官\tOFFICE\t唐,宋\n"
        "察推\tOFFICE\tSong,Yuan\n"   # pinyin aliases accepted
        "宣州\tADDRESS\t\n"
        "宣州\tADDRESS\t\n",          # duplicate row merges away
        encoding="utf-8")
    lex = load_lexicon([p], vocab)
    assert len(lex) == 4
    by_surface = {e.surface: e for e in lex.entries}
    assert by_surface["李常"].dynasties == frozenset({"Song", "Yuan", "Ming", "Qing"})
    assert by_surface["察推"].dynasties == frozenset({"Song", "Yuan"})
    assert by_surface["宣州"].dynasties == frozenset()


def test_duplicate_rows_union_dynasties(tmp_path, vocab):
    p = tmp_path / "lex.tsv"
    p.write_text("某官\tOFFICE\t唐\n某官\tOFFICE\t宋\n", encoding="utf-8")
    lex = load_lexicon([p], vocab)
    assert len(lex) == 1
    assert lex.entries[0].dynasties == frozenset({"Tang", "Song"})


@pytest.mark.parametrize("row,message", [
    ("宣州\tADDRESS\t宋", "dynasty list not allowed"),
    ("李常\tNAME\t", "requires a dynasty list"),
    ("李常\tWHAT\t宋", "unknown entity label"),
    ("李常\tNAME\t漢", "unknown dynasty"),
    ("\tNAME\t宋", "empty surface"),
    ("李常\tNAME\t宋\textra\tmore", "expected surface"),
])
def test_malformed_rows_report_location(tmp_path, vocab, row, message):
    p = tmp_path / "lex.tsv"
    p.write_text("# comment\n" + row + "\n", encoding="utf-8")
    with pytest.raises(LexiconError, match=message) as exc:
        load_lexicon([p], vocab)
    assert ":2:" in str(exc.value)


def test_scan_t1_offsets(mini_lexicon):
    spans = mini_lexicon.scan(T1)
    assert [(s.start, s.end) for s in spans] == [
        (0, 2), (5, 7), (7, 9), (11, 13), (13, 17), (14, 16), (17, 20)]
    assert [s.surface for s in spans] == [
        "李常", "南康", "建昌", "宣州", "觀察推官", "察推", "發運使"]
    for s in spans:
        assert T1[s.start:s.end] == s.surface


def test_scan_reports_nested_matches(mini_lexicon):
    spans = mini_lexicon.scan("觀察推官")
    assert {(s.start, s.end, s.surface) for s in spans} == {
        (0, 4, "觀察推官"), (1, 3, "察推")}


def test_scan_empty_and_repeats():
    lex = Lexicon([entry("察推", "OFFICE", {"Song"})])
    assert lex.scan("甲乙丙") == []
    assert [(s.start, s.end) for s in lex.scan("察推察推")] == [(0, 2), (2, 4)]


def test_scan_sorted_start_asc_end_desc():
    lex = Lexicon([entry("甲", "ADDRESS"), entry("甲乙", "ADDRESS"),
                   entry("乙", "ADDRESS")])
    spans = lex.scan("甲乙")
    assert [(s.start, s.end) for s in spans] == [(0, 2), (0, 1), (1, 2)]


def test_scan_equals_brute_force_random():
    rng = random.Random(7081)
    alphabet = "甲乙丙丁"
    labels = ["NAME", "ADDRESS", "ENTRY", "OFFICE", "REIGN"]
    for _ in range(100):
        entries = []
        seen = set()
        for _ in range(rng.randint(1, 8)):
            surface = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 3)))
            label = rng.choice(labels)
            if (surface, label) in seen:
                continue
            seen.add((surface, label))
            dyn = {"Song"} if label in ("NAME", "OFFICE", "REIGN") else ()
            entries.append(entry(surface, label, dyn))
        lex = Lexicon(entries)
        text = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 20)))
        got = sorted((s.start, s.end, s.label, s.surface) for s in lex.scan(text))
        assert got == brute_force_scan(entries, text)


def test_span_content_equals_surface(mini_lexicon):
    text = "自宣州觀察推官"
    for s in mini_lexicon.scan(text):
        assert text[s.start:s.end] == s.surface
