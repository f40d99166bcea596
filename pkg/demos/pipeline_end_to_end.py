#!/usr/bin/env python3
"""Run the whole pipeline on a transcribed gazetteer page and link the records.

Loads the circle-delimited page, extracts records, classifies them against
the reference table, prints the eight-type match report, and shows the
review batch an expert would see.
"""

from __future__ import annotations

import json
from pathlib import Path

from difangzhi_miner import (
    classify,
    default_dynasties,
    default_pattern_config,
    export_review_batch,
    extract_corpus,
    load_corpus,
    load_lexicon,
    load_reference,
    report,
)

DATA = Path(__file__).parent / "data"

vocab = default_dynasties()
corpus = load_corpus([DATA / "gazetteer_page.txt"])
lexicon = load_lexicon([DATA / "mini_lexicon.tsv"], vocab)
patterns, rules = default_pattern_config()

doc = corpus.documents["gazetteer_page"]
passages = corpus.passages("gazetteer_page")
print(f"document: {len(doc)} characters, {len(passages)} passages\n")

records = extract_corpus(corpus, lexicon, patterns, rules, vocab)
print("extracted records:")
for r in records:
    print(f"  ({r.dynasty}, {r.name}, {r.style_name})  "
          f"passage {r.passage_index}, chars [{r.name_start},{r.name_end})")

table = load_reference(DATA / "reference.tsv", vocab)
classifications = [classify(r, table) for r in records]
print(f"\nmatch report against {len(table)} reference rows:")
print(report(classifications).to_text())

batch = export_review_batch(classifications, corpus, context_chars=12)
print(f"review batch ({len(batch['items'])} items needing expert confirmation):")
for item in batch["items"]:
    rec = item["record"]
    ctx = item["context"]
    print(f"  type {rec['type_code']}  ({rec['dynasty']}, {rec['name']}, "
          f"{rec['style_name']})  matched person {rec['matched_person_id']}")
    if ctx["available"]:
        a, b = ctx["name_span"]
        print(f"    context: …{ctx['text']}…  (name at [{a},{b}) in window)")

print("\nreview batch JSON shape:")
print(json.dumps(batch["items"][0], ensure_ascii=False, indent=1)[:400], "…")
