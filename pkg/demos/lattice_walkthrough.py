#!/usr/bin/env python3
"""Walk one gazetteer passage through the whole disambiguation story.

The passage 李常字公擇南康建昌人自宣州觀察推官發運使 is ambiguous in two
ways: the name 李常 exists in four dynasties, and the office characters
admit two overlapping readings (觀察推官 for Tang/Song, 察推 inside it
for Song/Yuan). This script prints the exhaustive scan, the enumerated
lattice, the dynasty-consistent survivors, the annotated renderings, and
the extracted records.
"""

from __future__ import annotations

from pathlib import Path

from difangzhi_miner import (
    apply_grammar,
    consistent_sequences,
    default_dynasties,
    default_pattern_config,
    enumerate_candidates,
    load_lexicon,
    pattern_select,
    render_annotation,
    resolve_longest_match,
)
from difangzhi_miner.corpus import Passage

DATA = Path(__file__).parent / "data"

text = "李常字公擇南康建昌人自宣州觀察推官發運使"
passage = Passage(source_id="demo", index=0, start=0, end=len(text), content=text)

vocab = default_dynasties()
lexicon = load_lexicon([DATA / "mini_lexicon.tsv"], vocab)

print(f"passage ({len(text)} characters): {text}\n")

spans = lexicon.scan(text)
print("exhaustive dictionary scan (note the nested office readings):")
for s in spans:
    dyn = ",".join(vocab.sort(s.dynasties)) or "-"
    print(f"  [{s.start:2},{s.end:2}) {s.label.value:<8} {s.surface}  ({dyn})")

restricted = [s for s in spans if s.surface in ("李常", "觀察推官", "察推")]
enum = enumerate_candidates(restricted, vocab)
print(f"\nlattice over the ambiguous part: {len(enum.candidates)} candidate sequences")
consistent = [c for c in enum.candidates if c.committed_dynasty()]
print(f"of which dynasty-consistent: {len(consistent)}")
for c in consistent:
    parts = " ".join(s.surface for s in c.spans)
    print(f"  {c.committed_dynasty():<5} {parts}")

print("\nper-dynasty projection with the longer-word preference:")
for dynasty in vocab.names:
    surviving = resolve_longest_match(spans, dynasty)
    print(f"  {dynasty:<9} {' '.join(s.surface for s in surviving) or '(nothing)'}")

seqs = consistent_sequences(spans, vocab)
print("\ncommitted sequences (dominated dynasties dropped):")
for q in seqs:
    print(f"  {q.dynasty:<5} {q.label_string}")
    print(f"        {render_annotation(q, passage)}")

patterns, rules = default_pattern_config()
print("\nextracted records:")
for pair in pattern_select(seqs, patterns):
    for r in apply_grammar(pair, passage, rules):
        print(f"  ({r.dynasty}, {r.name}, {r.style_name}) "
              f"style kind={r.style_kind}, via {r.pattern_id}")
