"""Match extracted records against a reference biographical table.

Every record gets a flag triple (dynasty, name, style) against its best
reference candidate; the triple maps to an eight-way type code. Types:

    1 ooo   2 oox   3 xoo   4 oxo   5 xox   6 xxo   7 oxx   8 xxx

where o is a match and x a mismatch, in (dynasty, name, style) order.
Records that are not a full match (types 2-8) go to the expert review
batch with their original-text context.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .corpus import Corpus
from .extract import ExtractedRecord

TYPE_CODES: dict[tuple[bool, bool, bool], int] = {
    (True, True, True): 1,
    (True, True, False): 2,
    (False, True, True): 3,
    (True, False, True): 4,
    (False, True, False): 5,
    (False, False, True): 6,
    (True, False, False): 7,
    (False, False, False): 8,
}


class ReferenceError(Exception):
    """Raised for malformed reference rows; message carries file and line."""


@dataclass(frozen=True)
class ReferenceRecord:
    person_id: str
    dynasty: str
    name: str
    style_name: str | None = None
    style_kind: str = "none"


def _id_order(person_id: str) -> tuple[int, int | str]:
    return (0, int(person_id)) if person_id.isdigit() else (1, person_id)


class ReferenceTable:
    """Reference records indexed by name and by style name."""

    def __init__(self, records: list[ReferenceRecord]):
        self.records = list(records)
        self._by_name: dict[str, list[ReferenceRecord]] = {}
        self._by_style: dict[str, list[ReferenceRecord]] = {}
        for rec in self.records:
            self._by_name.setdefault(rec.name, []).append(rec)
            if rec.style_name:
                self._by_style.setdefault(rec.style_name, []).append(rec)

    def __len__(self) -> int:
        return len(self.records)

    def candidates(self, record: ExtractedRecord) -> list[ReferenceRecord]:
        found = self._by_name.get(record.name, [])
        if not found and record.style_name:
            found = self._by_style.get(record.style_name, [])
        return found


def load_reference(path: str | Path, vocabulary) -> ReferenceTable:
    """Read the reference TSV: person_id, dynasty, name, style_name, style_kind.

    Duplicate person_id rows are rejected; dynasty tokens are canonicalized
    through the vocabulary.
    """
    records: list[ReferenceRecord] = []
    seen: set[str] = set()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        where = f"{path}:{lineno}"
        if len(parts) < 3 or len(parts) > 5:
            raise ReferenceError(f"{where}: expected 3-5 tab-separated fields")
        parts += [""] * (5 - len(parts))
        person_id, dyn_token, name, style, kind = (p.strip() for p in parts)
        if not person_id or not name:
            raise ReferenceError(f"{where}: person_id and name are required")
        if person_id in seen:
            raise ReferenceError(f"{where}: duplicate person_id {person_id!r}")
        seen.add(person_id)
        try:
            dynasty = vocabulary.canonicalize(dyn_token)
        except ValueError as exc:
            raise ReferenceError(f"{where}: {exc}") from None
        if kind and kind not in ("zi", "hao", "none"):
            raise ReferenceError(f"{where}: bad style_kind {kind!r}")
        records.append(ReferenceRecord(
            person_id=person_id, dynasty=dynasty, name=name,
            style_name=style or None, style_kind=kind or "none"))
    return ReferenceTable(records)


@dataclass(frozen=True)
class MatchClassification:
    record: ExtractedRecord
    matched_person_id: str | None
    dynasty_match: bool
    name_match: bool
    style_match: bool

    @property
    def type_code(self) -> int:
        return TYPE_CODES[(self.dynasty_match, self.name_match, self.style_match)]

    def to_json_dict(self) -> dict:
        out = self.record.to_json_dict()
        out.update({
            "matched_person_id": self.matched_person_id,
            "dynasty_match": self.dynasty_match,
            "name_match": self.name_match,
            "style_match": self.style_match,
            "type_code": self.type_code,
        })
        return out


def _field_matches(record: ExtractedRecord, ref: ReferenceRecord) -> tuple[bool, bool, bool]:
    dynasty_match = record.dynasty == ref.dynasty
    name_match = record.name == ref.name
    style_match = bool(
        record.style_name and ref.style_name
        and record.style_name == ref.style_name
        and record.style_kind == ref.style_kind)
    return dynasty_match, name_match, style_match


def classify(record: ExtractedRecord, table: ReferenceTable) -> MatchClassification:
    """Flag the record against its best-scoring reference candidate.

    Candidates come from the name index, falling back to the style-name
    index; ties on score break to the smallest person_id. With no
    candidate at all, every flag is false (type 8).
    """
    best: ReferenceRecord | None = None
    best_key: tuple | None = None
    for ref in table.candidates(record):
        score = sum(_field_matches(record, ref))
        key = (-score, _id_order(ref.person_id))
        if best_key is None or key < best_key:
            best, best_key = ref, key
    if best is None:
        return MatchClassification(record=record, matched_person_id=None,
                                   dynasty_match=False, name_match=False,
                                   style_match=False)
    dynasty_match, name_match, style_match = _field_matches(record, best)
    return MatchClassification(record=record, matched_person_id=best.person_id,
                               dynasty_match=dynasty_match, name_match=name_match,
                               style_match=style_match)


def format_proportion(pct: float) -> str:
    """Printed precision: one decimal at >=10%, three significant figures below."""
    if pct >= 10:
        return f"{pct:.1f}"
    if pct >= 1:
        return f"{pct:.2f}"
    return f"{pct:.3g}"


@dataclass
class TypeReport:
    counts: dict[int, int]
    total: int

    def proportion(self, type_code: int) -> float:
        if self.total == 0:
            return 0.0
        return 100.0 * self.counts.get(type_code, 0) / self.total

    def to_tsv(self) -> str:
        lines = ["type\tdynasty\tname\tstyle_name\tquantity\tproportion"]
        for code in range(1, 9):
            flags = next(f for f, c in TYPE_CODES.items() if c == code)
            marks = "\t".join("o" if f else "x" for f in flags)
            lines.append(f"{code}\t{marks}\t{self.counts.get(code, 0)}"
                         f"\t{format_proportion(self.proportion(code))}%")
        lines.append(f"total\t\t\t\t{self.total}\t")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"{'Type':>4} {'Dyn':>3} {'Name':>4} {'Style':>5} {'Quan.':>6} {'Prop.':>7}"]
        for code in range(1, 9):
            flags = next(f for f, c in TYPE_CODES.items() if c == code)
            marks = [("o" if f else "x") for f in flags]
            lines.append(f"{code:>4} {marks[0]:>3} {marks[1]:>4} {marks[2]:>5} "
                         f"{self.counts.get(code, 0):>6} "
                         f"{format_proportion(self.proportion(code)) + '%':>7}")
        lines.append(f"{'all':>4} {'':>3} {'':>4} {'':>5} {self.total:>6}")
        return "\n".join(lines) + "\n"


def report(classifications: list[MatchClassification]) -> TypeReport:
    counts = Counter(c.type_code for c in classifications)
    return TypeReport(counts=dict(counts), total=len(classifications))


def export_review_batch(classifications: list[MatchClassification], corpus: Corpus | None,
                        context_chars: int, include_type1: bool = False) -> dict:
    """Review items for the expert: record, flags, and original-text context.

    Type-1 records are excluded unless ``include_type1``. The context window
    extends ``context_chars`` around the name span, clamped to the passage;
    highlight offsets are relative to the window. A missing source document
    leaves the item's context marked unavailable.
    """
    items = []
    for cls in classifications:
        if cls.type_code == 1 and not include_type1:
            continue
        rec = cls.record
        passage = corpus.get_passage(rec.source_id, rec.passage_index) if corpus else None
        if passage is None:
            context = {"available": False, "text": "", "window_start": 0,
                       "name_span": None, "style_span": None}
        else:
            content = passage.content
            style_span = rec.style_span
            lo = max(0, rec.name_start - context_chars)
            hi = min(len(content), rec.name_end + context_chars)
            if style_span:
                hi = max(hi, min(len(content), style_span[1]))
            context = {
                "available": True,
                "text": content[lo:hi],
                "window_start": lo,
                "name_span": [rec.name_start - lo, rec.name_end - lo],
                "style_span": ([style_span[0] - lo, style_span[1] - lo]
                               if style_span else None),
            }
        items.append({"record": cls.to_json_dict(), "context": context})
    return {"context_chars": context_chars, "items": items}


def write_classifications_jsonl(classifications: list[MatchClassification],
                                path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for cls in classifications:
            fh.write(json.dumps(cls.to_json_dict(), ensure_ascii=False) + "\n")


def read_classifications_jsonl(path: str | Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(json.loads(line))
    return out
