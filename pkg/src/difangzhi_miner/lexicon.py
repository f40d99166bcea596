"""Dynasty-tagged entity dictionaries and exhaustive passage scanning.

The scanner reports every occurrence of every lexicon surface, including
overlapping and nested matches; all preference logic (longer-word rule,
dynasty consistency) lives downstream in the lattice stage, which needs
the full ambiguity set.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .corpus import DELIMITER, Passage
from .labels import DYNASTY_BEARING, DynastyVocabulary, EntityLabel, label_priority, parse_label

log = logging.getLogger(__name__)


class LexiconError(Exception):
    """Raised for malformed lexicon rows; message carries file and line."""


@dataclass(frozen=True)
class LexiconEntry:
    surface: str
    label: EntityLabel
    dynasties: frozenset[str]


@dataclass(frozen=True, order=True)
class Span:
    """A labeled occurrence of a lexicon surface at [start, end) in a passage.

    ``dynasties`` is empty exactly when the label is dynasty-neutral.
    """

    start: int
    end: int
    label: EntityLabel
    surface: str
    dynasties: frozenset[str]

    def __len__(self) -> int:
        return self.end - self.start

    def overlaps(self, other: "Span") -> bool:
        return self.start < other.end and other.start < self.end

    def valid_in(self, dynasty: str) -> bool:
        return not self.dynasties or dynasty in self.dynasties

    @property
    def key(self) -> tuple[int, int, EntityLabel]:
        return (self.start, self.end, self.label)


class Lexicon:
    """Merged entity dictionary with a prefix-tree match index.

    Immutable once built; safe to share across parallel passage scans.
    """

    def __init__(self, entries: list[LexiconEntry]):
        self.entries = list(entries)
        # Nested-dict trie; the terminal marker holds the entries ending there.
        self._trie: dict = {}
        for entry in self.entries:
            node = self._trie
            for ch in entry.surface:
                node = node.setdefault(ch, {})
            node.setdefault(None, []).append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def matches_at(self, text: str, pos: int) -> list[tuple[LexiconEntry, int]]:
        """All (entry, end) pairs whose surface starts at ``pos``."""
        out: list[tuple[LexiconEntry, int]] = []
        node = self._trie
        i = pos
        n = len(text)
        while True:
            if None in node:
                out.extend((entry, i) for entry in node[None])
            if i >= n:
                break
            node = node.get(text[i])
            if node is None:
                break
            i += 1
        return out

    def scan(self, text: str) -> list[Span]:
        """Every occurrence of every surface in ``text``, exhaustively.

        Sorted by (start ascending, end descending, label priority).
        """
        spans = [
            Span(start=i, end=end, label=entry.label,
                 surface=entry.surface, dynasties=entry.dynasties)
            for i in range(len(text))
            for entry, end in self.matches_at(text, i)
        ]
        spans.sort(key=lambda s: (s.start, -s.end, label_priority(s.label)))
        return spans


def scan_passage(lexicon: Lexicon, passage: Passage) -> list[Span]:
    return lexicon.scan(passage.content)


def _parse_row(parts: list[str], vocabulary: DynastyVocabulary,
               where: str) -> LexiconEntry:
    if len(parts) == 2:
        parts = parts + [""]
    if len(parts) != 3:
        raise LexiconError(f"{where}: expected surface<TAB>label<TAB>dynasties")
    surface, label_token, dyn_field = parts[0], parts[1], parts[2]
    if not surface:
        raise LexiconError(f"{where}: empty surface")
    if DELIMITER in surface or "\n" in surface:
        raise LexiconError(f"{where}: surface contains a delimiter")
    try:
        label = parse_label(label_token)
    except ValueError as exc:
        raise LexiconError(f"{where}: {exc}") from None
    tokens = [t for t in dyn_field.split(",") if t.strip()]
    if label in DYNASTY_BEARING:
        if not tokens:
            raise LexiconError(f"{where}: label {label} requires a dynasty list")
        try:
            dynasties = frozenset(vocabulary.canonicalize(t) for t in tokens)
        except ValueError as exc:
            raise LexiconError(f"{where}: {exc}") from None
    else:
        if tokens:
            raise LexiconError(f"{where}: dynasty list not allowed for {label}")
        dynasties = frozenset()
    return LexiconEntry(surface=surface, label=label, dynasties=dynasties)


def load_lexicon(paths: list[str | Path], vocabulary: DynastyVocabulary) -> Lexicon:
    """Load and merge lexicon TSV files.

    Format: surface<TAB>label<TAB>comma-separated dynasties ('#' lines are
    comments; the dynasty field must be empty for ADDRESS/ENTRY). Duplicate
    (surface, label) rows merge by unioning their dynasty sets.
    """
    merged: dict[tuple[str, EntityLabel], frozenset[str]] = {}
    rows = 0
    for path in paths:
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            entry = _parse_row(line.split("\t"), vocabulary, f"{path}:{lineno}")
            rows += 1
            key = (entry.surface, entry.label)
            merged[key] = merged.get(key, frozenset()) | entry.dynasties
    entries = [LexiconEntry(surface=s, label=l, dynasties=d)
               for (s, l), d in sorted(merged.items(), key=lambda kv: (kv[0][0], kv[0][1]))]
    log.info("lexicon: %d rows merged into %d entries", rows, len(entries))
    return Lexicon(entries)
