"""Gazetteer documents and circle-delimited passage segmentation.

Source files are plain UTF-8 transcriptions where the circle U+25CB marks
the end of a line, the end of a page, a space, or a formatting transition.
Circles and newlines are hard boundaries: passages never cross them.
Offsets everywhere in this package index Unicode scalar values, never bytes.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

DELIMITER = "○"  # ○

_FRAGMENT = re.compile(rf"[^{DELIMITER}\n]+")


class DocumentLoadError(Exception):
    """Raised when a source file cannot be read or decoded."""


@dataclass
class Document:
    source_id: str
    text: str
    title: str | None = None
    period: str | None = None

    def __len__(self) -> int:
        return len(self.text)


@dataclass(frozen=True)
class Passage:
    """A maximal delimiter-free run of a document's text.

    ``start``/``end`` are offsets into the document text; ``content`` equals
    ``document.text[start:end]`` and contains no delimiter or newline.
    """

    source_id: str
    index: int
    start: int
    end: int
    content: str


def load_document(path: str | Path, title: str | None = None,
                  period: str | None = None) -> Document:
    """Read one UTF-8 file into a Document.

    Text is preserved verbatim except that CRLF/CR line breaks are
    normalized to a single newline. Decoding errors report the byte offset
    of the first invalid sequence.
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise DocumentLoadError(f"{path}: {exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DocumentLoadError(
            f"{path}: invalid UTF-8 at byte offset {exc.start}") from exc
    text = text.replace("\r\n", "\n").replace("\r", "\n")
    doc = Document(source_id=path.stem, text=text, title=title, period=period)
    log.info("loaded %s: %d characters", doc.source_id, len(doc))
    return doc


def segment_passages(doc: Document) -> list[Passage]:
    """Split a document at every maximal run of circles and newlines.

    Empty fragments are dropped; an empty document yields an empty list.
    """
    return [
        Passage(source_id=doc.source_id, index=i,
                start=m.start(), end=m.end(), content=m.group(0))
        for i, m in enumerate(_FRAGMENT.finditer(doc.text))
    ]


def read_metadata(path: str | Path) -> dict[str, tuple[str, str]]:
    """Read the optional sidecar TSV: source_id, title, period."""
    meta: dict[str, tuple[str, str]] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) < 1 or not parts[0]:
            raise DocumentLoadError(f"{path}:{lineno}: missing source_id")
        parts += [""] * (3 - len(parts))
        meta[parts[0]] = (parts[1], parts[2])
    return meta


@dataclass
class Corpus:
    """Loaded documents with cached passage segmentation."""

    documents: dict[str, Document] = field(default_factory=dict)
    _passages: dict[str, list[Passage]] = field(default_factory=dict, repr=False)

    def add(self, doc: Document) -> None:
        if doc.source_id in self.documents:
            raise DocumentLoadError(f"duplicate source_id {doc.source_id!r}")
        self.documents[doc.source_id] = doc

    def source_ids(self) -> list[str]:
        return sorted(self.documents)

    def passages(self, source_id: str) -> list[Passage]:
        if source_id not in self._passages:
            self._passages[source_id] = segment_passages(self.documents[source_id])
        return self._passages[source_id]

    def get_passage(self, source_id: str, index: int) -> Passage | None:
        if source_id not in self.documents:
            return None
        passages = self.passages(source_id)
        if 0 <= index < len(passages):
            return passages[index]
        return None


def load_corpus(paths: list[str | Path], metadata: str | Path | None = None) -> Corpus:
    """Load documents from files and/or directories of ``*.txt`` files.

    Per-file load failures are logged and skipped; the rest of the corpus
    still loads.
    """
    meta = read_metadata(metadata) if metadata else {}
    corpus = Corpus()
    files: list[Path] = []
    for p in paths:
        p = Path(p)
        if p.is_dir():
            files.extend(sorted(p.glob("*.txt")))
        else:
            files.append(p)
    for f in files:
        title, period = meta.get(f.stem, (None, None))
        try:
            corpus.add(load_document(f, title=title or None, period=period or None))
        except DocumentLoadError as exc:
            log.error("skipping document: %s", exc)
    return corpus
