"""Biographical record mining for unpunctuated literary-Chinese gazetteers.

Pipeline: load circle-delimited passages, annotate them exhaustively from
dynasty-tagged entity dictionaries, resolve the ambiguity lattice into
dynasty-consistent label sequences, select record-bearing sequences with
filter patterns, capture style names with grammar rules, and link the
extracted records against a reference biographical table. Uncertain
matches are routed to a human expert through a local review endpoint.
"""

from .corpus import Corpus, Document, Passage, load_corpus, load_document, segment_passages
from .extract import (
    ExtractedRecord,
    FilterPattern,
    GrammarRule,
    apply_grammar,
    default_pattern_config,
    extract_corpus,
    load_pattern_config,
    pattern_select,
    render_annotation,
)
from .labels import DynastyVocabulary, EntityLabel, default_dynasties, load_dynasties
from .lattice import (
    CandidateSequence,
    ConsistentSequence,
    consistent_sequences,
    enumerate_candidates,
    resolve_longest_match,
    verify_against_enumeration,
)
from .lexicon import Lexicon, LexiconEntry, Span, load_lexicon, scan_passage
from .linkage import (
    MatchClassification,
    ReferenceRecord,
    ReferenceTable,
    classify,
    export_review_batch,
    load_reference,
    report,
)
from .seqmodel import count_ngrams, mine_subsequences

__version__ = "0.1.0"

__all__ = [
    "Corpus", "Document", "Passage", "load_corpus", "load_document", "segment_passages",
    "DynastyVocabulary", "EntityLabel", "default_dynasties", "load_dynasties",
    "Lexicon", "LexiconEntry", "Span", "load_lexicon", "scan_passage",
    "CandidateSequence", "ConsistentSequence", "consistent_sequences",
    "enumerate_candidates", "resolve_longest_match", "verify_against_enumeration",
    "count_ngrams", "mine_subsequences",
    "ExtractedRecord", "FilterPattern", "GrammarRule", "apply_grammar",
    "default_pattern_config", "extract_corpus", "load_pattern_config",
    "pattern_select", "render_annotation",
    "MatchClassification", "ReferenceRecord", "ReferenceTable", "classify",
    "export_review_batch", "load_reference", "report",
    "__version__",
]
