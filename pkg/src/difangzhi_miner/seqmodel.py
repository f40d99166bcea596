"""Label n-gram statistics over consistent sequences.

Counting supports filter-pattern discovery: recurring short label windows
with many different labels are good candidates for new patterns. This is
advisory tooling; patterns actually used for extraction come from the
pattern configuration file.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .labels import EntityLabel
from .lattice import ConsistentSequence

DEFAULT_NGRAM_N = 6
DEFAULT_SUBSEQ_K = 4


def count_ngrams(sequences: list[ConsistentSequence],
                 n: int = DEFAULT_NGRAM_N) -> dict[tuple[EntityLabel, ...], int]:
    """Slide a window of ``n`` labels over each sequence and count windows.

    Sequences shorter than ``n`` contribute nothing; counts aggregate over
    the whole corpus.
    """
    if n < 1:
        raise ValueError("n must be positive")
    counts: Counter[tuple[EntityLabel, ...]] = Counter()
    for seq in sequences:
        labels = seq.labels
        for i in range(len(labels) - n + 1):
            counts[labels[i:i + n]] += 1
    return dict(counts)


@dataclass(frozen=True)
class SubsequenceStat:
    labels: tuple[EntityLabel, ...]
    frequency: int

    @property
    def distinct_labels(self) -> int:
        return len(set(self.labels))

    @property
    def has_name(self) -> bool:
        return EntityLabel.NAME in self.labels


def _label_order(labels: tuple[EntityLabel, ...]) -> tuple[int, ...]:
    order = list(EntityLabel)
    return tuple(order.index(label) for label in labels)


def mine_subsequences(sequences: list[ConsistentSequence], k: int = DEFAULT_SUBSEQ_K,
                      require_name: bool = True) -> list[SubsequenceStat]:
    """Rank contiguous length-k label windows for pattern discovery.

    Frequency counts the number of sequences containing the window at least
    once. Ranking prefers more distinct labels, then higher frequency, then
    label order, so the output is a total order.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    freq: Counter[tuple[EntityLabel, ...]] = Counter()
    for seq in sequences:
        labels = seq.labels
        windows = {labels[i:i + k] for i in range(len(labels) - k + 1)}
        for window in windows:
            if require_name and EntityLabel.NAME not in window:
                continue
            freq[window] += 1
    stats = [SubsequenceStat(labels=labels, frequency=count)
             for labels, count in freq.items()]
    stats.sort(key=lambda s: (-s.distinct_labels, -s.frequency, _label_order(s.labels)))
    return stats


def format_ngram_report(counts: dict[tuple[EntityLabel, ...], int]) -> str:
    """TSV: labels joined by '+', count; highest counts first."""
    lines = ["labels\tcount"]
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], _label_order(kv[0])))
    for labels, count in ordered:
        lines.append("+".join(label.value for label in labels) + f"\t{count}")
    return "\n".join(lines) + "\n"


def format_subsequence_report(stats: list[SubsequenceStat]) -> str:
    """TSV: labels joined by '+', count, distinct_labels; rank order."""
    lines = ["labels\tcount\tdistinct_labels"]
    for stat in stats:
        labels = "+".join(label.value for label in stat.labels)
        lines.append(f"{labels}\t{stat.frequency}\t{stat.distinct_labels}")
    return "\n".join(lines) + "\n"
