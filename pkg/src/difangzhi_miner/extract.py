"""Filter-pattern selection, style-name grammar rules, and record extraction.

A consistent sequence is record-bearing when its label string contains one
of the configured filter patterns. For each NAME span in a selected
sequence, a grammar rule may capture the style name: a fixed-length string
right after the trigger character (字 for zi, 號 for hao) that follows the
name, bounded by a right-context span. Records carry full provenance back
to the passage.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import DELIMITER, Corpus, Passage
from .labels import DynastyVocabulary, EntityLabel, parse_label
from .lattice import ConsistentSequence, consistent_sequences
from .lexicon import Lexicon

log = logging.getLogger(__name__)


class PatternConfigError(Exception):
    """Raised for malformed pattern/rule configuration rows."""


@dataclass(frozen=True)
class FilterPattern:
    id: str
    labels: tuple[EntityLabel, ...]

    def __post_init__(self):
        if len(self.labels) < 2:
            raise PatternConfigError(f"pattern {self.id}: needs at least 2 labels")
        if EntityLabel.NAME not in self.labels:
            raise PatternConfigError(f"pattern {self.id}: must contain NAME")

    @property
    def distinct_labels(self) -> int:
        return len(set(self.labels))


@dataclass(frozen=True)
class GrammarRule:
    id: str
    anchor_label: EntityLabel
    trigger: str
    capture_length: int
    right_context: EntityLabel
    style_kind: str

    def __post_init__(self):
        if len(self.trigger) != 1:
            raise PatternConfigError(f"rule {self.id}: trigger must be one character")
        if self.capture_length < 1:
            raise PatternConfigError(f"rule {self.id}: capture_length must be positive")
        if self.style_kind not in ("zi", "hao"):
            raise PatternConfigError(f"rule {self.id}: style_kind must be zi or hao")


@dataclass(frozen=True)
class ExtractedRecord:
    dynasty: str
    name: str
    style_name: str | None
    style_kind: str  # zi | hao | none
    source_id: str
    passage_index: int
    name_start: int
    name_end: int
    sequence_labels: str
    pattern_id: str

    @property
    def key(self) -> str:
        return (f"{self.source_id}:{self.passage_index}:"
                f"{self.name_start}:{self.name_end}:{self.dynasty}")

    @property
    def style_span(self) -> tuple[int, int] | None:
        """Capture offsets in the passage: right after the trigger character."""
        if self.style_name is None:
            return None
        start = self.name_end + 1
        return (start, start + len(self.style_name))

    def to_json_dict(self) -> dict:
        return {
            "key": self.key,
            "dynasty": self.dynasty,
            "name": self.name,
            "style_name": self.style_name,
            "style_kind": self.style_kind,
            "source_id": self.source_id,
            "passage_index": self.passage_index,
            "name_span": [self.name_start, self.name_end],
            "sequence_labels": self.sequence_labels,
            "pattern_id": self.pattern_id,
        }


def record_from_json_dict(obj: dict) -> ExtractedRecord:
    return ExtractedRecord(
        dynasty=obj["dynasty"], name=obj["name"],
        style_name=obj.get("style_name"), style_kind=obj.get("style_kind", "none"),
        source_id=obj["source_id"], passage_index=obj["passage_index"],
        name_start=obj["name_span"][0], name_end=obj["name_span"][1],
        sequence_labels=obj.get("sequence_labels", ""),
        pattern_id=obj.get("pattern_id", ""))


def load_pattern_config(path: str | Path) -> tuple[list[FilterPattern], list[GrammarRule]]:
    """Read the pattern/rule configuration TSV.

    Rows: ``pattern<TAB>id<TAB>label,label,...`` or
    ``rule<TAB>id<TAB>anchor<TAB>trigger<TAB>capture_len<TAB>right_context<TAB>style_kind``.
    """
    patterns: list[FilterPattern] = []
    rules: list[GrammarRule] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        where = f"{path}:{lineno}"
        try:
            if parts[0] == "pattern" and len(parts) == 3:
                labels = tuple(parse_label(t) for t in parts[2].split(","))
                patterns.append(FilterPattern(id=parts[1], labels=labels))
            elif parts[0] == "rule" and len(parts) == 7:
                rules.append(GrammarRule(
                    id=parts[1], anchor_label=parse_label(parts[2]),
                    trigger=parts[3], capture_length=int(parts[4]),
                    right_context=parse_label(parts[5]), style_kind=parts[6]))
            else:
                raise PatternConfigError(f"{where}: unrecognized row")
        except (ValueError, PatternConfigError) as exc:
            raise PatternConfigError(f"{where}: {exc}") from None
    return patterns, rules


def default_pattern_config() -> tuple[list[FilterPattern], list[GrammarRule]]:
    """P1..P4 and the zi/hao rules shipped with the package."""
    with resources.as_file(resources.files("difangzhi_miner") / "data" / "patterns.tsv") as p:
        return load_pattern_config(p)


def _contains(hay: tuple[EntityLabel, ...], needle: tuple[EntityLabel, ...]) -> bool:
    return any(hay[i:i + len(needle)] == needle
               for i in range(len(hay) - len(needle) + 1))


def pattern_select(sequences: list[ConsistentSequence],
                   patterns: list[FilterPattern]) -> list[tuple[ConsistentSequence, FilterPattern]]:
    """Pair each sequence with the best pattern its label string contains.

    Best: most distinct labels, ties to the lowest pattern id. Sequences
    containing no pattern are dropped.
    """
    if not patterns:
        raise ValueError("patterns must not be empty")
    selected = []
    for seq in sequences:
        hits = [p for p in patterns if _contains(seq.labels, p.labels)]
        if hits:
            hits.sort(key=lambda p: (-p.distinct_labels, p.id))
            selected.append((seq, hits[0]))
    return selected


def apply_grammar(selected: tuple[ConsistentSequence, FilterPattern], passage: Passage,
                  rules: list[GrammarRule]) -> list[ExtractedRecord]:
    """Emit one record per NAME span of a selected sequence.

    A rule fires when the character right after the name is its trigger,
    the following ``capture_length`` characters are free of delimiters and
    of the sequence's own spans, and the next span of the sequence starts
    exactly where the capture ends and carries the right-context label.
    The first firing rule wins; with none, the record has no style name.
    """
    sequence, pattern = selected
    content = passage.content
    records = []
    for i, span in enumerate(sequence.spans):
        if span.label != EntityLabel.NAME:
            continue
        style_name: str | None = None
        style_kind = "none"
        for rule in rules:
            if rule.anchor_label != span.label:
                continue
            trigger_pos = span.end
            cap_start = trigger_pos + 1
            cap_end = cap_start + rule.capture_length
            if cap_end > len(content) or content[trigger_pos] != rule.trigger:
                continue
            capture = content[cap_start:cap_end]
            if DELIMITER in capture or "\n" in capture:
                continue
            if any(other.start < cap_end and cap_start < other.end
                   for other in sequence.spans):
                continue
            following = next((s for s in sequence.spans[i + 1:] if s.start >= cap_end), None)
            if following is None or following.start != cap_end:
                continue
            if following.label != rule.right_context:
                continue
            style_name = capture
            style_kind = rule.style_kind
            break
        records.append(ExtractedRecord(
            dynasty=sequence.dynasty, name=span.surface,
            style_name=style_name, style_kind=style_kind,
            source_id=passage.source_id, passage_index=passage.index,
            name_start=span.start, name_end=span.end,
            sequence_labels=sequence.label_string, pattern_id=pattern.id))
    return records


def render_annotation(sequence: ConsistentSequence, passage: Passage) -> str:
    """Wrap each sequence span of the passage in its label tag.

    Dynasty-bearing labels render as ``<LABEL Dynasty>``; neutral labels as
    ``<LABEL>``. Untagged characters pass through, so stripping all tags
    reproduces the passage content exactly.
    """
    content = passage.content
    parts: list[str] = []
    cursor = 0
    for span in sequence.spans:
        parts.append(content[cursor:span.start])
        tag = span.label.value
        if span.dynasties:
            parts.append(f"<{tag} {sequence.dynasty}>{span.surface}</{tag}>")
        else:
            parts.append(f"<{tag}>{span.surface}</{tag}>")
        cursor = span.end
    parts.append(content[cursor:])
    return "".join(parts)


@dataclass
class PassageAnalysis:
    """Everything the pipeline derives from one passage, for all consumers."""

    passage: Passage
    spans: list
    sequences: list[ConsistentSequence]
    selected: list[tuple[ConsistentSequence, FilterPattern]]
    records: list[ExtractedRecord]


def analyze_passage(passage: Passage, lexicon: Lexicon, patterns: list[FilterPattern],
                    rules: list[GrammarRule],
                    vocabulary: DynastyVocabulary) -> PassageAnalysis:
    spans = lexicon.scan(passage.content)
    sequences = consistent_sequences(spans, vocabulary)
    selected = pattern_select(sequences, patterns)
    records = [r for pair in selected for r in apply_grammar(pair, passage, rules)]
    return PassageAnalysis(passage=passage, spans=spans, sequences=sequences,
                           selected=selected, records=records)


def analyze_corpus(corpus: Corpus, lexicon: Lexicon, patterns: list[FilterPattern],
                   rules: list[GrammarRule],
                   vocabulary: DynastyVocabulary) -> list[PassageAnalysis]:
    """Run the full per-passage pipeline; a failing document is skipped."""
    analyses: list[PassageAnalysis] = []
    for source_id in corpus.source_ids():
        try:
            for passage in corpus.passages(source_id):
                analyses.append(analyze_passage(passage, lexicon, patterns,
                                                rules, vocabulary))
        except Exception:
            log.exception("skipping document %s", source_id)
    return analyses


def extract_corpus(corpus: Corpus, lexicon: Lexicon, patterns: list[FilterPattern],
                   rules: list[GrammarRule],
                   vocabulary: DynastyVocabulary) -> list[ExtractedRecord]:
    """All records of the corpus, ordered by provenance then dynasty."""
    analyses = analyze_corpus(corpus, lexicon, patterns, rules, vocabulary)
    records = [r for a in analyses for r in a.records]
    records.sort(key=lambda r: (r.source_id, r.passage_index, r.name_start,
                                vocabulary.index(r.dynasty)))
    return records


def write_records_jsonl(records: list[ExtractedRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record.to_json_dict(), ensure_ascii=False) + "\n")


def read_records_jsonl(path: str | Path) -> list[ExtractedRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(record_from_json_dict(json.loads(line)))
    return records
