#!/usr/bin/env python3
"""Show how label n-gram statistics surface candidate filter patterns.

Builds a small synthetic corpus of biographical openings mixed with noise,
counts 6-grams over the consistent sequences, and ranks 4-label windows:
windows with more distinct labels rise to the top, which is how templates
like NAME ADDRESS ADDRESS ADDRESS earn their place in the pattern file.
"""

from __future__ import annotations

import random

from difangzhi_miner import consistent_sequences, default_dynasties
from difangzhi_miner.labels import EntityLabel
from difangzhi_miner.lexicon import Lexicon, LexiconEntry
from difangzhi_miner.seqmodel import count_ngrams, format_subsequence_report, mine_subsequences

rng = random.Random(7)
vocab = default_dynasties()

names = ["李常", "薛平", "韓綜", "王安"]
addresses = ["南康", "建昌", "宣州", "河東", "滑州"]
entries = ["進士", "舉人"]
reigns = ["熙寧", "光緒"]

lexicon = Lexicon(
    [LexiconEntry(surface=s, label=EntityLabel.NAME, dynasties=frozenset({"Song"}))
     for s in names]
    + [LexiconEntry(surface=s, label=EntityLabel.ADDRESS, dynasties=frozenset())
       for s in addresses]
    + [LexiconEntry(surface=s, label=EntityLabel.ENTRY, dynasties=frozenset())
       for s in entries]
    + [LexiconEntry(surface=s, label=EntityLabel.REIGN, dynasties=frozenset({"Song"}))
       for s in reigns])

passages = []
for _ in range(120):
    roll = rng.random()
    name = rng.choice(names)
    a1, a2, a3 = rng.sample(addresses, 3)
    if roll < 0.5:
        passages.append(f"{name}字某某{a1}{a2}人自{a3}任官")
    elif roll < 0.8:
        passages.append(f"{name}{a1}人{rng.choice(reigns)}{rng.choice(entries)}知縣")
    else:
        passages.append("".join(rng.choice("青苗取息上疏言均輸") for _ in range(12)))

sequences = []
for content in passages:
    sequences.extend(consistent_sequences(lexicon.scan(content), vocab))

print(f"{len(passages)} passages -> {len(sequences)} consistent sequences\n")

ngrams = count_ngrams(sequences, n=6)
print("top 6-grams:")
for labels, count in sorted(ngrams.items(), key=lambda kv: -kv[1])[:5]:
    print(f"  {count:3}  " + " ".join(l.value for l in labels))

stats = mine_subsequences(sequences, k=4, require_name=True)
print("\nranked 4-label windows containing a NAME (pattern candidates):")
print(format_subsequence_report(stats[:8]))
