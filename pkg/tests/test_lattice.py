from __future__ import annotations

import random

from difangzhi_miner.labels import EntityLabel
from difangzhi_miner.lattice import (
    consistent_sequences,
    enumerate_candidates,
    resolve_longest_match,
    verify_against_enumeration,
)

from conftest import make_span, random_span_instance

NAME = EntityLabel.NAME
ADDRESS = EntityLabel.ADDRESS
OFFICE = EntityLabel.OFFICE
REIGN = EntityLabel.REIGN


def restricted_t1(t1_spans):
    return [s for s in t1_spans if s.surface in ("李常", "觀察推官", "察推")]


def test_enumerate_t1_restricted_is_16(t1_spans, vocab):
    enum = enumerate_candidates(restricted_t1(t1_spans), vocab)
    assert len(enum.candidates) == 16
    assert not enum.truncated
    # 4 name dynasties x 2 dynasties for each of the two office readings
    committed = [c.committed_dynasty() for c in enum.candidates]
    assert committed.count("Song") == 2  # (李常 Song, 觀察推官 Song), (李常 Song, 察推 Song)
    assert committed.count("Yuan") == 1  # (李常 Yuan, 察推 Yuan)


def test_enumerate_single_span(vocab):
    spans = [make_span(0, 2, NAME, {"Song"})]
    enum = enumerate_candidates(spans, vocab)
    assert len(enum.candidates) == 1
    assert enum.candidates[0].choices == ("Song",)


def test_enumerate_disjoint_neutral_spans(vocab):
    spans = [make_span(0, 2, ADDRESS), make_span(3, 5, ADDRESS)]
    enum = enumerate_candidates(spans, vocab)
    assert len(enum.candidates) == 1
    assert len(enum.candidates[0].spans) == 2


def test_enumerate_cap_flags_truncation(vocab):
    spans = [make_span(0, 2, NAME, {"Song", "Yuan"}),
             make_span(3, 5, OFFICE, {"Song", "Yuan"})]
    enum = enumerate_candidates(spans, vocab, cap=3)
    assert enum.truncated
    assert len(enum.candidates) == 3


def test_enumerate_deterministic(t1_spans, vocab):
    a = enumerate_candidates(t1_spans, vocab)
    b = enumerate_candidates(t1_spans, vocab)
    assert a.candidates == b.candidates


def test_longest_match_song_drops_nested_office(t1_spans):
    survivors = resolve_longest_match(t1_spans, "Song")
    surfaces = [s.surface for s in survivors]
    assert "察推" not in surfaces
    assert surfaces == ["李常", "南康", "建昌", "宣州", "觀察推官", "發運使"]


def test_longest_match_yuan_keeps_nested_office(t1_spans):
    surfaces = [s.surface for s in resolve_longest_match(t1_spans, "Yuan")]
    assert "觀察推官" not in surfaces and "發運使" not in surfaces
    assert "察推" in surfaces


def test_longest_match_tang_drops_name(t1_spans):
    surfaces = [s.surface for s in resolve_longest_match(t1_spans, "Tang")]
    assert "李常" not in surfaces
    assert "觀察推官" in surfaces


def test_longest_match_cross_label_prefers_longer():
    spans = [make_span(0, 2, NAME, {"Song"}), make_span(1, 4, ADDRESS)]
    assert [s.label for s in resolve_longest_match(spans, "Song")] == [ADDRESS]


def test_longest_match_cross_label_tie_uses_priority():
    spans = [make_span(0, 2, ADDRESS), make_span(1, 3, NAME, {"Song"})]
    assert [s.label for s in resolve_longest_match(spans, "Song")] == [NAME]


def test_consistent_sequences_t1(t1_spans, vocab):
    seqs = consistent_sequences(t1_spans, vocab)
    assert [(q.dynasty, q.label_string) for q in seqs] == [
        ("Song", "NAME ADDRESS ADDRESS ADDRESS OFFICE OFFICE"),
        ("Yuan", "NAME ADDRESS ADDRESS ADDRESS OFFICE"),
    ]
    song, yuan = seqs
    assert [s.surface for s in song.spans] == ["李常", "南康", "建昌", "宣州", "觀察推官", "發運使"]
    assert [s.surface for s in yuan.spans] == ["李常", "南康", "建昌", "宣州", "察推"]


def test_consistent_sequences_disjoint_dynasty_sets(vocab):
    spans = [make_span(0, 2, NAME, {"Song"}), make_span(3, 5, OFFICE, {"Yuan"})]
    seqs = consistent_sequences(spans, vocab)
    for q in seqs:
        bearing = [s for s in q.spans if s.dynasties]
        assert len(bearing) <= 1  # never two dynasty-bearing spans together


def test_consistent_sequences_tang_via_office(vocab):
    text_spans = [make_span(0, 2, NAME, {"Tang"}, surface="薛平"),
                  make_span(10, 13, OFFICE, {"Tang"}, surface="節度使")]
    seqs = consistent_sequences(text_spans, vocab)
    assert len(seqs) == 1
    assert seqs[0].dynasty == "Tang"


def test_consistent_sequences_committed_dynasty_in_every_bearing_span(vocab):
    rng = random.Random(2045)
    for _ in range(100):
        spans = random_span_instance(rng, vocab)
        for q in consistent_sequences(spans, vocab):
            for s in q.spans:
                if s.dynasties:
                    assert q.dynasty in s.dynasties
            # no overlaps
            for a, b in zip(q.spans, q.spans[1:]):
                assert a.end <= b.start


def test_longest_match_dominance_property(vocab):
    rng = random.Random(551)
    for _ in range(100):
        spans = random_span_instance(rng, vocab)
        for q in consistent_sequences(spans, vocab):
            for s in q.spans:
                for t in spans:
                    if (t.key != s.key and t.label == s.label
                            and t.valid_in(q.dynasty)
                            and t.start <= s.start and s.end <= t.end
                            and (t.start < s.start or s.end < t.end)):
                        raise AssertionError(f"{s} shadowed by {t} in {q.dynasty}")


def test_verify_t1(t1_spans, vocab):
    assert verify_against_enumeration(restricted_t1(t1_spans), vocab).ok
    assert verify_against_enumeration(t1_spans, vocab).ok


def test_verify_empty(vocab):
    outcome = verify_against_enumeration([], vocab)
    assert outcome.ok and outcome.applicable


def test_verify_truncation_reported_not_failed(vocab):
    spans = [make_span(i * 2, i * 2 + 1, NAME, {"Song", "Yuan", "Ming"})
             for i in range(8)]
    outcome = verify_against_enumeration(spans, vocab, cap=4)
    assert outcome.ok and not outcome.applicable


def test_verify_random_instances(vocab):
    rng = random.Random(90210)
    for i in range(50):
        spans = random_span_instance(rng, vocab)
        outcome = verify_against_enumeration(spans, vocab, cap=100_000)
        assert outcome.applicable, f"instance {i} unexpectedly truncated"
        assert outcome.ok, f"instance {i}: {outcome.detail}"


def test_determinism(t1_spans, vocab):
    assert consistent_sequences(t1_spans, vocab) == consistent_sequences(t1_spans, vocab)


def test_sixteen_candidates_filter_down_to_survivors(t1_spans, vocab):
    """Brute-filter the enumerated lattice and compare with the production route."""
    spans = restricted_t1(t1_spans)
    enum = enumerate_candidates(spans, vocab)
    survivors = []
    for cand in enum.candidates:
        dynasty = cand.committed_dynasty()
        if dynasty is None and any(s.dynasties for s in cand.spans):
            continue
        shadowed = any(
            t.label == s.label and t.valid_in(dynasty) and t.overlaps(s) and len(t) > len(s)
            for s in cand.spans for t in spans)
        if not shadowed:
            survivors.append((dynasty, frozenset(s.key for s in cand.spans)))
    produced = {(q.dynasty, q.span_keys) for q in consistent_sequences(spans, vocab)}
    assert produced == set(survivors)
    assert len(survivors) == 2
