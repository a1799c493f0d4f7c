"""Structural similarity: subsumption propagation and property-driven scores.

Class pairs gain similarity from a matched pair of direct superclasses and
from object properties they anchor (as domain); property pairs are scored
from their names together with their domain and range classes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping

from .errors import KindMismatch
from .lexical import LexicalScorer
from .ontology import EntityKind, EntityRef, Ontology

if TYPE_CHECKING:
    from .annealing import AlignmentState
    from .matrix import SimilarityMatrix


@dataclass
class StructuralContext:
    """Inputs shared by the structural scores.

    ``current`` is read only; anything exposing ``pairs`` (O1 IRI -> O2 IRI)
    and ``pair_fitness`` ((IRI, IRI) -> fitness) will do.
    """

    o1: Ontology
    o2: Ontology
    scorer: LexicalScorer | None = None
    sims: "SimilarityMatrix | None" = None
    current: "AlignmentState | None" = None
    _anchor_cache: dict = field(default_factory=dict, repr=False)
    _static_cache: dict = field(default_factory=dict, repr=False)

    def with_state(self, state) -> "StructuralContext":
        ctx = StructuralContext(self.o1, self.o2, self.scorer, self.sims, state)
        ctx._anchor_cache = self._anchor_cache
        ctx._static_cache = self._static_cache
        return ctx


def _check_pair(e1: EntityRef, e2: EntityRef, kind: EntityKind | None = None) -> None:
    if e1.kind is not e2.kind or (kind is not None and e1.kind is not kind):
        raise KindMismatch(f"{e1.iri} ({e1.kind.value}) vs {e2.iri} ({e2.kind.value})")


def subsumption_boost(
    c1: EntityRef,
    c2: EntityRef,
    ctx: StructuralContext,
    fitness: Mapping[tuple[str, str], float] | None = None,
) -> float:
    """Best fitness of a current correspondence between direct superclasses.

    ``fitness`` overrides the per-pair fitness table of ``ctx.current``.
    """
    _check_pair(c1, c2, EntityKind.CLASS)
    state = ctx.current
    if state is None:
        return 0.0
    if fitness is None:
        fitness = state.pair_fitness
    parents2 = ctx.o2.subclass_of.get(c2.iri, ())
    best = 0.0
    for s1 in ctx.o1.subclass_of.get(c1.iri, ()):
        s2 = state.pairs.get(s1)
        if s2 is not None and s2 in parents2:
            best = max(best, fitness[s1, s2])
    return best


def _top_two_mean(scores) -> float:
    a, b = sorted(scores, reverse=True)[:2]
    return (a + b) / 2


def object_property_similarity(p1: EntityRef, p2: EntityRef, ctx: StructuralContext) -> float:
    """Mean of the two best of name, domain and range Soft TF-IDF scores."""
    _check_pair(p1, p2, EntityKind.OBJECT_PROPERTY)
    key = (p1.iri, p2.iri)
    hit = ctx._static_cache.get(key)
    if hit is None:
        sc = ctx.scorer
        names = sc.name_similarity(p1, p2)
        domains = sc.set_similarity(ctx.o1.prop_domain.get(p1.iri, ()), ctx.o2.prop_domain.get(p2.iri, ()))
        ranges = sc.set_similarity(ctx.o1.prop_range.get(p1.iri, ()), ctx.o2.prop_range.get(p2.iri, ()))
        hit = ctx._static_cache[key] = _top_two_mean((names, domains, ranges))
    return hit


def data_property_similarity(p1: EntityRef, p2: EntityRef, ctx: StructuralContext) -> float:
    _check_pair(p1, p2, EntityKind.DATA_PROPERTY)
    key = (p1.iri, p2.iri)
    hit = ctx._static_cache.get(key)
    if hit is None:
        sc = ctx.scorer
        names = sc.name_similarity(p1, p2)
        domains = sc.set_similarity(ctx.o1.prop_domain.get(p1.iri, ()), ctx.o2.prop_domain.get(p2.iri, ()))
        hit = ctx._static_cache[key] = (names + domains) / 2
    return hit


def _anchored(o: Ontology) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for p in o.object_properties:
        for c in o.prop_domain.get(p.iri, ()):
            out.setdefault(c, []).append(p.iri)
    return out


def class_similarity_from_properties(e1: EntityRef, e2: EntityRef, ctx: StructuralContext) -> float:
    """Best ``(range similarity + property name similarity) / 2`` over the
    object properties whose domains contain ``e1`` and ``e2``."""
    _check_pair(e1, e2, EntityKind.CLASS)
    cache = ctx._anchor_cache
    if "anchors" not in cache:
        cache["anchors"] = (_anchored(ctx.o1), _anchored(ctx.o2))
        cache["pairs"] = {}
    anchors1, anchors2 = cache["anchors"]
    props1 = anchors1.get(e1.iri, ())
    props2 = anchors2.get(e2.iri, ())
    best = 0.0
    sc = ctx.scorer
    pair_scores = cache["pairs"]
    for op1 in props1:
        for op2 in props2:
            score = pair_scores.get((op1, op2))
            if score is None:
                names = sc.name_similarity(ctx.o1.entities[op1], ctx.o2.entities[op2])
                ranges = sc.set_similarity(ctx.o1.prop_range.get(op1, ()), ctx.o2.prop_range.get(op2, ()))
                score = pair_scores[op1, op2] = (ranges + names) / 2
            best = max(best, score)
    return best


def static_similarity(e1: EntityRef, e2: EntityRef, ctx: StructuralContext) -> float:
    """The part of :func:`combined_similarity` that does not depend on the
    current alignment.

    With ``ctx.sims`` set, the stored matrix score stands in for the
    lexical score of classes and the property score of properties (pairs
    below the matrix floor count as 0).
    """
    _check_pair(e1, e2)
    if ctx.sims is not None:
        base = ctx.sims.get(e1.iri, e2.iri)
    elif e1.kind is EntityKind.OBJECT_PROPERTY:
        base = object_property_similarity(e1, e2, ctx)
    elif e1.kind is EntityKind.DATA_PROPERTY:
        base = data_property_similarity(e1, e2, ctx)
    else:
        base = ctx.scorer.name_similarity(e1, e2)
    if e1.kind is EntityKind.CLASS:
        return max(base, class_similarity_from_properties(e1, e2, ctx))
    return base


def combined_similarity(
    e1: EntityRef,
    e2: EntityRef,
    ctx: StructuralContext,
    fitness: Mapping[tuple[str, str], float] | None = None,
) -> float:
    """Componentwise max of the lexical and structural scores of a pair."""
    static = static_similarity(e1, e2, ctx)
    if e1.kind is not EntityKind.CLASS:
        return static
    return max(static, subsumption_boost(e1, e2, ctx, fitness))
