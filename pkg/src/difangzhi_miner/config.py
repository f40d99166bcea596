"""Run configuration: flat key-value files, environment, and CLI flags.

Precedence, lowest to highest: built-in defaults, config file, environment
variables (``DIFANGZHI_<KEY>``), command-line flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

ENV_PREFIX = "DIFANGZHI_"

_LIST_KEYS = {"corpus", "lexicon"}
_PATH_KEYS = {"metadata", "reference", "patterns", "dynasties", "out", "ui"}
_INT_KEYS = {"ngram_n", "subseq_k", "cap", "context", "port"}
_BOOL_KEYS = {"include_type1", "dump_lattice"}


class ConfigError(Exception):
    """Raised for unusable configuration: bad keys, values, or paths."""


@dataclass
class RunConfig:
    corpus: list[Path] = field(default_factory=list)
    lexicon: list[Path] = field(default_factory=list)
    metadata: Path | None = None
    reference: Path | None = None
    patterns: Path | None = None   # None -> packaged default
    dynasties: Path | None = None  # None -> packaged default
    out: Path = Path("out")
    ngram_n: int = 6
    subseq_k: int = 4
    cap: int = 4096
    context: int = 30
    port: int = 8053
    include_type1: bool = False
    dump_lattice: bool = False
    ui: Path | None = None

    def set_key(self, key: str, raw: str) -> None:
        if key in _LIST_KEYS:
            setattr(self, key, [Path(p.strip()) for p in raw.split(",") if p.strip()])
        elif key in _PATH_KEYS:
            setattr(self, key, Path(raw) if raw else None)
        elif key in _INT_KEYS:
            try:
                setattr(self, key, int(raw))
            except ValueError:
                raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
        elif key in _BOOL_KEYS:
            if raw.lower() in ("1", "true", "yes", "on"):
                setattr(self, key, True)
            elif raw.lower() in ("0", "false", "no", "off"):
                setattr(self, key, False)
            else:
                raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
        else:
            raise ConfigError(f"unknown config key {key!r}")

    def validate(self, require: tuple[str, ...] = ()) -> None:
        """Check required keys are set, paths exist, and numbers are positive."""
        for key in require:
            value = getattr(self, key)
            if value is None or value == []:
                raise ConfigError(f"missing required setting {key!r}")
        for key in ("corpus", "lexicon"):
            for p in getattr(self, key):
                if not p.exists():
                    raise ConfigError(f"{key} path does not exist: {p}")
        for key in ("metadata", "reference", "patterns", "dynasties", "ui"):
            p = getattr(self, key)
            if p is not None and not p.exists():
                raise ConfigError(f"{key} path does not exist: {p}")
        for key in _INT_KEYS:
            if getattr(self, key) <= 0:
                raise ConfigError(f"{key} must be positive")


def known_keys() -> list[str]:
    return [f.name for f in fields(RunConfig)]


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read ``key = value`` lines; '#' starts a comment."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, raw = line.partition("=")
        values[key.strip()] = raw.strip()
    return values


def build_config(config_file: str | Path | None,
                 flag_values: dict[str, str] | None = None,
                 environ: dict[str, str] | None = None) -> RunConfig:
    cfg = RunConfig()
    if config_file is not None:
        for key, raw in parse_config_file(config_file).items():
            cfg.set_key(key, raw)
    env = os.environ if environ is None else environ
    for key in known_keys():
        raw = env.get(ENV_PREFIX + key.upper())
        if raw is not None:
            cfg.set_key(key, raw)
    for key, raw in (flag_values or {}).items():
        cfg.set_key(key, raw)
    return cfg
