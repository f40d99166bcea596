"""Entity labels and the configurable dynasty vocabulary."""

from __future__ import annotations

from enum import Enum
from importlib import resources
from pathlib import Path


class EntityLabel(str, Enum):
    NAME = "NAME"
    ADDRESS = "ADDRESS"
    ENTRY = "ENTRY"
    OFFICE = "OFFICE"
    REIGN = "REIGN"

    def __str__(self) -> str:
        return self.value


# Labels whose lexicon entries carry a dynasty set; ADDRESS and ENTRY are
# dynasty-neutral.
DYNASTY_BEARING = frozenset({EntityLabel.NAME, EntityLabel.OFFICE, EntityLabel.REIGN})

# Tie-break order for overlapping spans of equal length but different labels.
_PRIORITY = (
    EntityLabel.NAME,
    EntityLabel.OFFICE,
    EntityLabel.REIGN,
    EntityLabel.ENTRY,
    EntityLabel.ADDRESS,
)
_PRIORITY_RANK = {label: rank for rank, label in enumerate(_PRIORITY)}


def label_priority(label: EntityLabel) -> int:
    """Rank used to break ties between overlapping spans; lower wins."""
    return _PRIORITY_RANK[label]


def parse_label(token: str) -> EntityLabel:
    try:
        return EntityLabel(token.strip())
    except ValueError:
        raise ValueError(f"unknown entity label {token!r}") from None


class DynastyVocabulary:
    """Closed, chronologically ordered set of dynasty names.

    Canonical names are the ASCII forms used in annotated output
    (``<NAME Song>``). Aliases (typically the Chinese forms) are accepted
    on input and canonicalized. The vocabulary is configuration: load a
    different TSV to extend or reorder it.
    """

    def __init__(self, names: list[str], aliases: dict[str, str] | None = None):
        if not names:
            raise ValueError("dynasty vocabulary must not be empty")
        if len(set(names)) != len(names):
            raise ValueError("duplicate dynasty name in vocabulary")
        self._names = tuple(names)
        self._index = {name: i for i, name in enumerate(names)}
        self._aliases = dict(aliases or {})
        for alias, target in self._aliases.items():
            if target not in self._index:
                raise ValueError(f"alias {alias!r} points at unknown dynasty {target!r}")

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return len(self._names)

    def index(self, name: str) -> int:
        return self._index[name]

    def canonicalize(self, token: str) -> str:
        token = token.strip()
        if token in self._index:
            return token
        if token in self._aliases:
            return self._aliases[token]
        raise ValueError(f"unknown dynasty {token!r}")

    def sort(self, names) -> list[str]:
        """Order a collection of canonical names chronologically."""
        return sorted(names, key=self.index)


def load_dynasties(path: str | Path) -> DynastyVocabulary:
    """Load a dynasty vocabulary TSV: canonical<TAB>comma-separated aliases.

    Rows are in chronological order; '#' lines are comments.
    """
    names: list[str] = []
    aliases: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) > 2 or not parts[0]:
            raise ValueError(f"{path}:{lineno}: expected canonical<TAB>aliases")
        canonical = parts[0].strip()
        names.append(canonical)
        if len(parts) == 2 and parts[1].strip():
            for alias in parts[1].split(","):
                alias = alias.strip()
                if alias:
                    aliases[alias] = canonical
    return DynastyVocabulary(names, aliases)


def default_dynasties() -> DynastyVocabulary:
    """The vocabulary shipped with the package: Tang through Republic."""
    with resources.as_file(resources.files("difangzhi_miner") / "data" / "dynasties.tsv") as p:
        return load_dynasties(p)
