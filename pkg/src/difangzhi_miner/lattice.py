"""Label-sequence lattice: candidate enumeration and dynasty-consistent resolution.

The scanner hands this module every dictionary match in a passage, nested
and overlapping ones included. Two routes lead from that ambiguity set to
committed label sequences:

* ``enumerate_candidates`` spells out the full lattice: every maximal
  non-overlapping span selection, branched over each span's possible
  dynasties. Exponential; kept behind a cap for testing and small passages.

* ``consistent_sequences`` is the production route: project the span set
  per dynasty, apply the longer-word preference, greedily select one
  sequence per dynasty, and drop dominated dynasties. Polynomial, and it
  agrees with the filtered enumeration (``verify_against_enumeration``
  checks exactly that).

A dynasty d is *dominated* when some other viable dynasty admits a strict
superset of d's surviving spans: every reading valid under d is also valid
under the other dynasty, which explains strictly more of the passage, so
committing d would assert less-supported readings. This is what keeps a
name like 李常 (valid in four dynasties) from producing four records when
only two dynasties are corroborated by surrounding offices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .labels import DynastyVocabulary, EntityLabel, label_priority
from .lexicon import Span


@dataclass(frozen=True)
class CandidateSequence:
    """One lattice path: non-overlapping spans plus a dynasty choice per span.

    ``choices`` is aligned with ``spans``; dynasty-neutral spans carry None.
    """

    spans: tuple[Span, ...]
    choices: tuple[str | None, ...]

    def committed_dynasty(self) -> str | None:
        """The single dynasty all bearing spans agreed on, if they did."""
        chosen = {c for c in self.choices if c is not None}
        if len(chosen) == 1:
            return next(iter(chosen))
        return None


@dataclass(frozen=True)
class ConsistentSequence:
    """Non-overlapping spans committed to one dynasty."""

    spans: tuple[Span, ...]
    dynasty: str
    labels: tuple[EntityLabel, ...]

    @property
    def label_string(self) -> str:
        return " ".join(label.value for label in self.labels)

    @property
    def span_keys(self) -> frozenset[tuple[int, int, EntityLabel]]:
        return frozenset(s.key for s in self.spans)


@dataclass
class CandidateEnumeration:
    candidates: list[CandidateSequence]
    truncated: bool


def _dynasty_choices(span: Span, vocabulary: DynastyVocabulary) -> list[str | None]:
    if not span.dynasties:
        return [None]
    return vocabulary.sort(span.dynasties)


def enumerate_candidates(spans: list[Span], vocabulary: DynastyVocabulary,
                         cap: int = 4096) -> CandidateEnumeration:
    """Every maximal non-overlapping span selection, expanded over dynasties.

    Maximal: no input span can be added without overlap. Output order is
    deterministic (lexicographic by span starts, then by dynasty order);
    if more than ``cap`` candidates exist, the first ``cap`` are returned
    and the result is flagged truncated.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    ordered = sorted(spans, key=lambda s: (s.start, s.end, label_priority(s.label)))
    selections: list[tuple[Span, ...]] = []

    def extend(cursor: int, chosen: tuple[Span, ...]) -> None:
        nxt = [s for s in ordered if s.start >= cursor]
        if not nxt:
            selections.append(chosen)
            return
        for s in nxt:
            # Maximality: a span skipped entirely (ends before this pick
            # starts) could still be added later, so that branch is illegal.
            if any(t.end <= s.start for t in nxt if t.start < s.start):
                continue
            extend(s.end, chosen + (s,))

    extend(0, ())

    candidates: list[CandidateSequence] = []
    truncated = False
    for selection in selections:
        per_span = [_dynasty_choices(s, vocabulary) for s in selection]
        for combo in product(*per_span):
            if len(candidates) >= cap:
                truncated = True
                break
            candidates.append(CandidateSequence(spans=selection, choices=tuple(combo)))
        if truncated:
            break
    return CandidateEnumeration(candidates=candidates, truncated=truncated)


def _shadow_filter(valid: list[Span]) -> list[Span]:
    """Apply the longer-word preference to a dynasty-restricted span set.

    Same-label overlapping pair: the shorter is dropped. Among survivors,
    an overlapping pair with different labels keeps the longer, breaking
    length ties by label priority, then by smaller start. Pairs are judged
    against the incoming set, not cascaded.
    """
    stage1 = [
        s for s in valid
        if not any(t.label == s.label and t.overlaps(s) and len(t) > len(s)
                   for t in valid)
    ]

    def strength(s: Span) -> tuple[int, int, int]:
        return (len(s), -label_priority(s.label), -s.start)

    return [
        s for s in stage1
        if not any(t.label != s.label and t.overlaps(s) and strength(t) > strength(s)
                   for t in stage1)
    ]


def resolve_longest_match(spans: list[Span], dynasty: str) -> list[Span]:
    """Restrict spans to one dynasty and apply the longer-word preference."""
    valid = [s for s in spans if s.valid_in(dynasty)]
    survivors = _shadow_filter(valid)
    survivors.sort(key=lambda s: (s.start, -s.end, label_priority(s.label)))
    return survivors


def _greedy_select(pool: list[Span]) -> tuple[Span, ...]:
    """Left-to-right pick: at each position the longest span, ties by priority."""
    ordered = sorted(pool, key=lambda s: (s.start, -s.end, label_priority(s.label)))
    chosen: list[Span] = []
    cursor = 0
    for s in ordered:
        if s.start >= cursor:
            chosen.append(s)
            cursor = s.end
    return tuple(chosen)


def consistent_sequences(spans: list[Span],
                         vocabulary: DynastyVocabulary) -> list[ConsistentSequence]:
    """One committed sequence per viable, non-dominated dynasty.

    A dynasty is viable when at least one dynasty-bearing span survives its
    projection; it is emitted unless another viable dynasty's survivor set
    strictly contains its own (see module docstring). Dynasties with equal
    survivor sets are all emitted, one sequence each.
    """
    pools: dict[str, list[Span]] = {}
    for dynasty in vocabulary.names:
        pool = resolve_longest_match(spans, dynasty)
        if any(s.dynasties for s in pool):
            pools[dynasty] = pool

    keysets = {d: frozenset(s.key for s in pool) for d, pool in pools.items()}
    out: list[ConsistentSequence] = []
    for dynasty in vocabulary.names:
        if dynasty not in pools:
            continue
        keys = keysets[dynasty]
        if any(keys < other for d, other in keysets.items() if d != dynasty):
            continue
        selection = _greedy_select(pools[dynasty])
        if not any(s.dynasties for s in selection):
            continue
        out.append(ConsistentSequence(
            spans=selection, dynasty=dynasty,
            labels=tuple(s.label for s in selection)))
    return out


@dataclass
class VerificationOutcome:
    ok: bool
    applicable: bool
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_against_enumeration(spans: list[Span], vocabulary: DynastyVocabulary,
                               cap: int = 4096) -> VerificationOutcome:
    """Check the production route against a brute-force reference.

    The reference re-derives, by naive subset enumeration, the set of
    dynasties that should be emitted and the maximal selections each one
    admits; every production sequence must land in that set, and the
    emitted dynasties must agree exactly. A truncated lattice makes the
    check inapplicable (reported, not failed).
    """
    if enumerate_candidates(spans, vocabulary, cap=cap).truncated:
        return VerificationOutcome(ok=True, applicable=False,
                                   detail="enumeration truncated; check not applicable")

    # Brute-force pools: dynasty restriction and both shadowing rules as
    # plain double loops over the original set.
    bf_pools: dict[str, list[Span]] = {}
    for dynasty in vocabulary.names:
        valid = [s for s in spans if not s.dynasties or dynasty in s.dynasties]
        keep1 = []
        for s in valid:
            shadowed = False
            for t in valid:
                if t is not s and t.label == s.label and t.overlaps(s) and len(t) > len(s):
                    shadowed = True
            if not shadowed:
                keep1.append(s)
        keep2 = []
        for s in keep1:
            beaten = False
            for t in keep1:
                if t is s or t.label == s.label or not t.overlaps(s):
                    continue
                ks = (len(s), -label_priority(s.label), -s.start)
                kt = (len(t), -label_priority(t.label), -t.start)
                if kt > ks:
                    beaten = True
            if not beaten:
                keep2.append(s)
        if any(s.dynasties for s in keep2):
            bf_pools[dynasty] = keep2

    bf_keysets = {d: frozenset(s.key for s in pool) for d, pool in bf_pools.items()}
    expected_dynasties = {
        d for d, keys in bf_keysets.items()
        if not any(keys < other for d2, other in bf_keysets.items() if d2 != d)
    }

    def all_maximal_selections(pool: list[Span]) -> set[frozenset]:
        found: set[frozenset] = set()
        n = len(pool)
        for mask in range(1 << n):
            subset = [pool[i] for i in range(n) if mask >> i & 1]
            if any(a.overlaps(b) for i, a in enumerate(subset) for b in subset[i + 1:]):
                continue
            if any(all(not s.overlaps(t) for t in subset) for s in pool if s not in subset):
                continue
            found.add(frozenset(s.key for s in subset))
        return found

    produced = consistent_sequences(spans, vocabulary)
    produced_dynasties = {seq.dynasty for seq in produced}
    if produced_dynasties != expected_dynasties:
        return VerificationOutcome(
            ok=False, applicable=True,
            detail=f"dynasties {sorted(produced_dynasties)} != expected {sorted(expected_dynasties)}")
    for seq in produced:
        if seq.span_keys not in all_maximal_selections(bf_pools[seq.dynasty]):
            return VerificationOutcome(
                ok=False, applicable=True,
                detail=f"{seq.dynasty} selection {sorted(seq.span_keys)} not maximal in reference")
    return VerificationOutcome(ok=True, applicable=True)


def lattice_dump(spans: list[Span]) -> list[dict]:
    """JSON-ready view of a passage's ambiguity set, for debugging."""
    return [
        {"start": s.start, "end": s.end, "label": s.label.value,
         "surface": s.surface, "dynasties": sorted(s.dynasties)}
        for s in spans
    ]
