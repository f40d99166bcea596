"""Command-line orchestration: annotate, extract, match, report, serve.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 internal
failure. Every config key can come from a config file, a DIFANGZHI_*
environment variable, or a flag; flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import extract as extract_mod
from . import linkage, seqmodel, server
from .config import ConfigError, RunConfig, build_config
from .corpus import Corpus, DocumentLoadError, load_corpus
from .labels import DynastyVocabulary, default_dynasties, load_dynasties
from .lattice import lattice_dump
from .lexicon import Lexicon, LexiconError, load_lexicon

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_INTERNAL = 4


def _vocabulary(cfg: RunConfig) -> DynastyVocabulary:
    if cfg.dynasties is not None:
        return load_dynasties(cfg.dynasties)
    return default_dynasties()


def _pattern_config(cfg: RunConfig):
    if cfg.patterns is not None:
        return extract_mod.load_pattern_config(cfg.patterns)
    return extract_mod.default_pattern_config()


def _load_inputs(cfg: RunConfig) -> tuple[Corpus, Lexicon, DynastyVocabulary]:
    vocabulary = _vocabulary(cfg)
    corpus = load_corpus(cfg.corpus, metadata=cfg.metadata)
    lexicon = load_lexicon(cfg.lexicon, vocabulary)
    return corpus, lexicon, vocabulary


def cmd_annotate(cfg: RunConfig) -> int:
    cfg.validate(require=("corpus", "lexicon"))
    corpus, lexicon, vocabulary = _load_inputs(cfg)
    patterns, rules = _pattern_config(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)
    written = 0
    for source_id in corpus.source_ids():
        lines = []
        dump = []
        try:
            for passage in corpus.passages(source_id):
                analysis = extract_mod.analyze_passage(passage, lexicon, patterns,
                                                       rules, vocabulary)
                for sequence, _pattern in analysis.selected:
                    lines.append(f"{passage.index}\t{sequence.dynasty}\t"
                                 f"{extract_mod.render_annotation(sequence, passage)}")
                if cfg.dump_lattice:
                    dump.append({"passage_index": passage.index,
                                 "spans": lattice_dump(analysis.spans)})
        except Exception:
            log.exception("annotation failed for %s; continuing", source_id)
            continue
        (cfg.out / f"{source_id}.ann.txt").write_text(
            "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        if cfg.dump_lattice:
            (cfg.out / f"{source_id}.lattice.json").write_text(
                json.dumps(dump, ensure_ascii=False, indent=1), encoding="utf-8")
        written += 1
    print(f"annotated {written} document(s) into {cfg.out}")
    return EXIT_OK


def cmd_extract(cfg: RunConfig) -> int:
    cfg.validate(require=("corpus", "lexicon"))
    corpus, lexicon, vocabulary = _load_inputs(cfg)
    patterns, rules = _pattern_config(cfg)
    cfg.out.mkdir(parents=True, exist_ok=True)

    analyses = extract_mod.analyze_corpus(corpus, lexicon, patterns, rules, vocabulary)
    records = [r for a in analyses for r in a.records]
    records.sort(key=lambda r: (r.source_id, r.passage_index, r.name_start,
                                vocabulary.index(r.dynasty)))
    sequences = [seq for a in analyses for seq in a.sequences]

    extract_mod.write_records_jsonl(records, cfg.out / "records.jsonl")
    ngrams = seqmodel.count_ngrams(sequences, n=cfg.ngram_n)
    (cfg.out / "ngrams.tsv").write_text(seqmodel.format_ngram_report(ngrams),
                                        encoding="utf-8")
    stats = seqmodel.mine_subsequences(sequences, k=cfg.subseq_k, require_name=True)
    (cfg.out / "subsequences.tsv").write_text(
        seqmodel.format_subsequence_report(stats), encoding="utf-8")
    print(f"extracted {len(records)} record(s) from "
          f"{len(corpus.documents)} document(s) into {cfg.out}")
    return EXIT_OK


def cmd_match(cfg: RunConfig) -> int:
    cfg.validate(require=("reference",))
    vocabulary = _vocabulary(cfg)
    records_path = cfg.out / "records.jsonl"
    if not records_path.exists():
        raise DocumentLoadError(f"no extraction output at {records_path}; run extract first")
    records = extract_mod.read_records_jsonl(records_path)
    table = linkage.load_reference(cfg.reference, vocabulary)
    corpus = load_corpus(cfg.corpus, metadata=cfg.metadata) if cfg.corpus else None

    classifications = [linkage.classify(r, table) for r in records]
    linkage.write_classifications_jsonl(classifications, cfg.out / "classifications.jsonl")
    type_report = linkage.report(classifications)
    (cfg.out / "report.tsv").write_text(type_report.to_tsv(), encoding="utf-8")
    batch = linkage.export_review_batch(classifications, corpus, cfg.context,
                                        include_type1=cfg.include_type1)
    (cfg.out / "review_batch.json").write_text(
        json.dumps(batch, ensure_ascii=False, indent=1), encoding="utf-8")
    print(type_report.to_text())
    print(f"matched {len(records)} record(s) against {len(table)} reference row(s); "
          f"{len(batch['items'])} for review")
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    path = cfg.out / "classifications.jsonl"
    if not path.exists():
        raise DocumentLoadError(f"no classifications at {path}; run match first")
    rows = linkage.read_classifications_jsonl(path)
    from collections import Counter
    counts = Counter(row["type_code"] for row in rows)
    type_report = linkage.TypeReport(counts=dict(counts), total=len(rows))
    (cfg.out / "report.tsv").write_text(type_report.to_tsv(), encoding="utf-8")
    print(type_report.to_text())
    return EXIT_OK


def cmd_serve(cfg: RunConfig) -> int:
    path = cfg.out / "classifications.jsonl"
    if not path.exists():
        raise DocumentLoadError(f"no classifications at {path}; run match first")
    records = linkage.read_classifications_jsonl(path)
    corpus = load_corpus(cfg.corpus, metadata=cfg.metadata) if cfg.corpus else None
    state = server.ReviewState(records=records, corpus=corpus,
                               decisions_path=cfg.out / "decisions.jsonl",
                               ui_dir=cfg.ui)
    print(f"serving {len(records)} record(s) on http://127.0.0.1:{cfg.port}")
    server.serve_forever(state, cfg.port)
    return EXIT_OK


_COMMANDS = {
    "annotate": cmd_annotate,
    "extract": cmd_extract,
    "match": cmd_match,
    "report": cmd_report,
    "serve": cmd_serve,
}

# (flag, config key, kwargs)
_FLAGS = [
    ("--corpus", "corpus", {"help": "comma-separated corpus files/directories"}),
    ("--lexicon", "lexicon", {"help": "comma-separated lexicon TSV files"}),
    ("--metadata", "metadata", {"help": "sidecar metadata TSV"}),
    ("--reference", "reference", {"help": "reference table TSV"}),
    ("--patterns", "patterns", {"help": "pattern/rule configuration file"}),
    ("--dynasties", "dynasties", {"help": "dynasty vocabulary TSV"}),
    ("--out", "out", {"help": "output directory (default: out)"}),
    ("--ngram-n", "ngram_n", {"help": "label n-gram size (default: 6)"}),
    ("--cap", "cap", {"help": "candidate enumeration cap (default: 4096)"}),
    ("--context", "context", {"help": "review context window size (default: 30)"}),
    ("--port", "port", {"help": "serve port (default: 8053)"}),
    ("--ui", "ui", {"help": "static review UI directory to serve"}),
]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="difangzhi-miner",
        description="Mine biographical records from literary-Chinese local gazetteers.")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="flat key=value configuration file")
    for flag, key, kwargs in _FLAGS:
        parser.add_argument(flag, dest=key, default=None, **kwargs)
    parser.add_argument("--include-type1", dest="include_type1", action="store_const",
                        const="true", default=None,
                        help="include type-1 records in the review batch")
    parser.add_argument("--dump-lattice", dest="dump_lattice", action="store_const",
                        const="true", default=None,
                        help="write per-document lattice JSON next to annotations")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    flag_values = {key: value for key, value in vars(args).items()
                   if key not in ("command", "config", "verbose") and value is not None}
    try:
        cfg = build_config(args.config, flag_values)
        return _COMMANDS[args.command](cfg)
    except (ConfigError, LexiconError, extract_mod.PatternConfigError,
            linkage.ReferenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DocumentLoadError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except Exception as exc:  # pragma: no cover - defensive
        log.exception("internal failure")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
