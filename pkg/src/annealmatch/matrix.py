"""Sparse same-kind similarity matrix between the entities of two ontologies."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterator

from .lexical import CorpusStats, LexicalScorer
from .ontology import EntityKind, Ontology
from .structural import StructuralContext, data_property_similarity, object_property_similarity
from .text import StopList
from .wordnet import WordNetTaxonomy

logger = logging.getLogger(__name__)

DEFAULT_FLOOR = 0.05


@dataclass
class SimilarityMatrix:
    """``(iri1, iri2) -> score`` for same-kind pairs scoring at least ``floor``."""

    floor: float = DEFAULT_FLOOR
    entries: dict[tuple[str, str], float] = field(default_factory=dict)
    kinds: dict[tuple[str, str], EntityKind] = field(default_factory=dict)

    def set(self, iri1: str, iri2: str, kind: EntityKind, score: float) -> None:
        if not 0.0 <= score <= 1.0:
            raise ValueError(f"score {score} outside [0, 1]")
        if score < self.floor:
            return
        self.entries[iri1, iri2] = score
        self.kinds[iri1, iri2] = kind

    def get(self, iri1: str, iri2: str, default: float = 0.0) -> float:
        return self.entries.get((iri1, iri2), default)

    def __contains__(self, pair) -> bool:
        return pair in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[tuple[str, str]]:
        return iter(sorted(self.entries))

    def items(self):
        return sorted(self.entries.items())

    def block(self, kind: EntityKind) -> dict[tuple[str, str], float]:
        return {k: v for k, v in sorted(self.entries.items()) if self.kinds[k] is kind}


def _candidate_pairs(scorer: LexicalScorer, kind: EntityKind) -> list[tuple[str, str]]:
    # only pairs sharing a close token pair can have a non-zero name score
    o1, o2 = scorer.o1, scorer.o2
    ents1 = [e.iri for e in o1.of_kind(kind)]
    ents2 = [e.iri for e in o2.of_kind(kind)]

    def tokens(side, iri):
        bag = scorer.bags[side][iri]
        surf = bag.surface_of()
        return [(t, surf[t]) for t in dict.fromkeys(bag.tokens)]

    toks1 = {iri: tokens(0, iri) for iri in ents1}
    toks2 = {iri: tokens(1, iri) for iri in ents2}
    close = scorer.close_token_pairs(
        (t for ts in toks1.values() for t in ts), (t for ts in toks2.values() for t in ts)
    )
    partners: dict[tuple[str, str], set] = {}
    for a, b in close:
        partners.setdefault(a, set()).add(b)
    by_token2: dict[tuple[str, str], list[str]] = {}
    for iri, ts in toks2.items():
        for t in ts:
            by_token2.setdefault(t, []).append(iri)
    pairs = set()
    for iri1, ts in toks1.items():
        for t in ts:
            for u in partners.get(t, ()):
                for iri2 in by_token2.get(u, ()):
                    pairs.add((iri1, iri2))
    return sorted(pairs)


def build_similarity_matrix(
    o1: Ontology,
    o2: Ontology,
    stats: CorpusStats | None = None,
    wn: WordNetTaxonomy | None = None,
    floor: float = DEFAULT_FLOOR,
    stops: StopList | None = None,
    ctx: StructuralContext | None = None,
) -> SimilarityMatrix:
    """Score every same-kind cross-ontology pair and keep those >= ``floor``.

    Class pairs carry their lexical (Soft TF-IDF) score; object and data
    property pairs carry the property similarity, which already folds in
    the name score. Pass ``ctx`` to reuse an existing scorer and its caches.
    """
    if ctx is None:
        ctx = StructuralContext(o1, o2, LexicalScorer(o1, o2, wn, stops, stats))
    scorer = ctx.scorer
    sims = SimilarityMatrix(floor)
    for iri1, iri2 in _candidate_pairs(scorer, EntityKind.CLASS):
        e1, e2 = o1.entities[iri1], o2.entities[iri2]
        sims.set(iri1, iri2, EntityKind.CLASS, scorer.name_similarity(e1, e2))
    for kind, score in (
        (EntityKind.OBJECT_PROPERTY, object_property_similarity),
        (EntityKind.DATA_PROPERTY, data_property_similarity),
    ):
        for e1 in o1.of_kind(kind):
            for e2 in o2.of_kind(kind):
                sims.set(e1.iri, e2.iri, kind, score(e1, e2, ctx))
    ctx.sims = sims
    logger.info(
        "similarity matrix %s x %s: %d entries >= %.3f", o1.id, o2.id, len(sims), floor
    )
    return sims
