import itertools
import random
from types import SimpleNamespace

import pytest

from annealmatch.annealing import state_from_pairs
from annealmatch.errors import KindMismatch
from annealmatch.lexical import LexicalScorer
from annealmatch.matrix import build_similarity_matrix
from annealmatch.ontology import EntityKind, load_ontology
from annealmatch.structural import (
    StructuralContext,
    class_similarity_from_properties,
    combined_similarity,
    data_property_similarity,
    object_property_similarity,
    static_similarity,
    subsumption_boost,
)
from annealmatch.wordnet import WordNetTaxonomy

from helpers import DATA, OracleTaxonomy, all_matchings, ontology, oracle_soft_tfidf, oracle_token_sim

CONF = WordNetTaxonomy.load(DATA / "conference.tsv")
FIXTURES = ["cmt.owl", "conference.json", "confOf.json"]
PAIRS = list(itertools.combinations(FIXTURES, 2))


class FakeScorer:
    """Scorer returning preset name and set similarities."""

    def __init__(self, names=None, sets=None, default=0.0):
        self.names = names or {}
        self.sets = sets or {}
        self.default = default

    def name_similarity(self, e1, e2):
        return self.names.get((e1.iri, e2.iri), self.default)

    def set_similarity(self, a, b):
        return self.sets.get((tuple(sorted(a)), tuple(sorted(b))), 0.0)


def ns(o, name):
    return f"http://example.org/{o}#{name}"


def property_pair(o1_props, o2_props):
    o1 = ontology("a", ["Paper", "Person"], props=o1_props)
    o2 = ontology("b", ["Paper", "Person"], props=o2_props)
    return o1, o2


# ----------------------------------------------------- component arithmetic


@pytest.mark.parametrize(
    "name, dom, rng, expected",
    [(1.0, 1.0, 0.2, 1.0), (0.8, 0.6, 0.4, 0.7), (0.2, 0.9, 0.5, 0.7), (0.0, 0.0, 0.0, 0.0)],
)
def test_object_property_top_two_mean(name, dom, rng, expected):
    o1, o2 = property_pair([("p", "op", ["Paper"], ["Person"])], [("q", "op", ["Paper"], ["Person"])])
    scorer = FakeScorer(
        names={(ns("a", "p"), ns("b", "q")): name},
        sets={
            ((ns("a", "Paper"),), (ns("b", "Paper"),)): dom,
            ((ns("a", "Person"),), (ns("b", "Person"),)): rng,
        },
    )
    ctx = StructuralContext(o1, o2, scorer)
    assert object_property_similarity(o1.entity(ns("a", "p")), o2.entity(ns("b", "q")), ctx) == pytest.approx(expected)


@pytest.mark.parametrize("name, dom, declared, expected", [(1.0, 1.0, True, 1.0), (0.9, 0.0, False, 0.45), (0.6, 0.8, True, 0.7)])
def test_data_property_mean(name, dom, declared, expected):
    doms = ["Paper"] if declared else []
    o1, o2 = property_pair([("p", "dp", doms, [])], [("q", "dp", doms, [])])
    scorer = FakeScorer(
        names={(ns("a", "p"), ns("b", "q")): name},
        sets={((ns("a", "Paper"),), (ns("b", "Paper"),)): dom},
    )
    ctx = StructuralContext(o1, o2, scorer)
    assert data_property_similarity(o1.entity(ns("a", "p")), o2.entity(ns("b", "q")), ctx) == pytest.approx(expected)


def test_identical_properties_score_one():
    o1, o2 = property_pair([("hasAuthor", "op", ["Paper"], ["Person"])], [("hasAuthor", "op", ["Paper"], ["Person"])])
    ctx = StructuralContext(o1, o2, LexicalScorer(o1, o2))
    assert object_property_similarity(o1.entity(ns("a", "hasAuthor")), o2.entity(ns("b", "hasAuthor")), ctx) == pytest.approx(1.0)


def test_class_from_properties_examples():
    o1, o2 = property_pair(
        [("p", "op", ["Paper"], ["Person"]), ("r", "op", ["Paper"], ["Paper"])],
        [("q", "op", ["Paper"], ["Person"])],
    )
    scorer = FakeScorer(
        names={(ns("a", "p"), ns("b", "q")): 0.7, (ns("a", "r"), ns("b", "q")): 0.5},
        sets={((ns("a", "Person"),), (ns("b", "Person"),)): 0.9, ((ns("a", "Paper"),), (ns("b", "Person"),)): 1.0},
    )
    ctx = StructuralContext(o1, o2, scorer)
    paper1, paper2 = o1.entity(ns("a", "Paper")), o2.entity(ns("b", "Paper"))
    # p~q: (0.9 + 0.7) / 2 = 0.8 beats r~q: (1.0 + 0.5) / 2 = 0.75
    assert class_similarity_from_properties(paper1, paper2, ctx) == pytest.approx(0.8)
    person1, person2 = o1.entity(ns("a", "Person")), o2.entity(ns("b", "Person"))
    assert class_similarity_from_properties(person1, person2, ctx) == 0.0


def boost_setup():
    o1 = ontology("a", ["A", "B", "C"], [("C", "A"), ("C", "B")])
    o2 = ontology("b", ["X", "Y", "Z"], [("Z", "X"), ("Z", "Y")])
    return o1, o2


def test_subsumption_boost_examples():
    o1, o2 = boost_setup()
    c1, c2 = o1.entity(ns("a", "C")), o2.entity(ns("b", "Z"))
    ctx = StructuralContext(o1, o2)
    assert subsumption_boost(c1, c2, ctx) == 0.0
    one = SimpleNamespace(pairs={ns("a", "A"): ns("b", "X")}, pair_fitness={(ns("a", "A"), ns("b", "X")): 0.8})
    assert subsumption_boost(c1, c2, ctx.with_state(one)) == 0.8
    two = SimpleNamespace(
        pairs={ns("a", "A"): ns("b", "X"), ns("a", "B"): ns("b", "Y")},
        pair_fitness={(ns("a", "A"), ns("b", "X")): 0.6, (ns("a", "B"), ns("b", "Y")): 0.9},
    )
    assert subsumption_boost(c1, c2, ctx.with_state(two)) == 0.9
    # a parent matched to a non-parent does not count
    cross = SimpleNamespace(pairs={ns("a", "A"): ns("b", "Z")}, pair_fitness={(ns("a", "A"), ns("b", "Z")): 1.0})
    assert subsumption_boost(c1, o2.entity(ns("b", "X")), ctx.with_state(cross)) == 0.0


def test_combined_similarity_examples():
    o1, o2 = boost_setup()
    ctx = StructuralContext(o1, o2, FakeScorer(names={(ns("a", "A"), ns("b", "X")): 1.0}))
    a, x = o1.entity(ns("a", "A")), o2.entity(ns("b", "X"))
    c, z = o1.entity(ns("a", "C")), o2.entity(ns("b", "Z"))
    state = SimpleNamespace(pairs={ns("a", "A"): ns("b", "X")}, pair_fitness={(ns("a", "A"), ns("b", "X")): 0.8})
    assert combined_similarity(a, x, ctx) == 1.0
    assert combined_similarity(c, z, ctx.with_state(state)) == 0.8
    assert combined_similarity(c, z, ctx) == 0.0


def test_kind_mismatch():
    o1 = ontology("a", ["A"], props=[("p", "op", [], [])])
    ctx = StructuralContext(o1, o1, FakeScorer())
    a, p = o1.entity(ns("a", "A")), o1.entity(ns("a", "p"))
    for fn in (subsumption_boost, class_similarity_from_properties, object_property_similarity, data_property_similarity):
        with pytest.raises(KindMismatch):
            fn(a, p, ctx)
    with pytest.raises(KindMismatch):
        combined_similarity(a, p, ctx)


# ------------------------------------------------ brute-force enumerators


def oracle_context(f1, f2):
    o1, o2 = load_ontology(DATA / f1), load_ontology(DATA / f2)
    scorer = LexicalScorer(o1, o2, CONF)
    docs = list(scorer.bags[0].values()) + list(scorer.bags[1].values())
    sim = oracle_token_sim(OracleTaxonomy(DATA / "conference.tsv"))

    def bags_score(iris1, iris2):
        if not iris1 or not iris2:
            return 0.0
        a = b = None
        for iri in sorted(iris1):
            a = scorer.bags[0][iri] if a is None else a + scorer.bags[0][iri]
        for iri in sorted(iris2):
            b = scorer.bags[1][iri] if b is None else b + scorer.bags[1][iri]
        return oracle_soft_tfidf(a, b, docs, sim)

    return o1, o2, scorer, bags_score


def oracle_class_from_properties(c1, c2, o1, o2, bags_score):
    best = 0.0
    for p1, p2 in itertools.product(o1.object_properties, o2.object_properties):
        if c1 in o1.prop_domain.get(p1.iri, ()) and c2 in o2.prop_domain.get(p2.iri, ()):
            score = (bags_score({p1.iri}, {p2.iri}) + bags_score(o1.prop_range.get(p1.iri, ()), o2.prop_range.get(p2.iri, ()))) / 2
            best = max(best, score)
    return best


@pytest.mark.parametrize("f1, f2", PAIRS)
def test_property_scores_match_enumerator(f1, f2):
    o1, o2, scorer, bags_score = oracle_context(f1, f2)
    assert len(o1.classes) <= 6 and len(o1.entities) - len(o1.classes) <= 4
    ctx = StructuralContext(o1, o2, scorer)
    for c1, c2 in itertools.product(o1.classes, o2.classes):
        expected = oracle_class_from_properties(c1.iri, c2.iri, o1, o2, bags_score)
        assert class_similarity_from_properties(c1, c2, ctx) == pytest.approx(expected, abs=1e-9)
    for p1, p2 in itertools.product(o1.object_properties, o2.object_properties):
        parts = sorted(
            [
                bags_score({p1.iri}, {p2.iri}),
                bags_score(o1.prop_domain.get(p1.iri, ()), o2.prop_domain.get(p2.iri, ())),
                bags_score(o1.prop_range.get(p1.iri, ()), o2.prop_range.get(p2.iri, ())),
            ]
        )
        assert object_property_similarity(p1, p2, ctx) == pytest.approx((parts[1] + parts[2]) / 2, abs=1e-9)
    for p1, p2 in itertools.product(o1.data_properties, o2.data_properties):
        expected = (bags_score({p1.iri}, {p2.iri}) + bags_score(o1.prop_domain.get(p1.iri, ()), o2.prop_domain.get(p2.iri, ()))) / 2
        assert data_property_similarity(p1, p2, ctx) == pytest.approx(expected, abs=1e-9)


def oracle_boost(c1, c2, o1, o2, pairs, fitness):
    best = 0.0
    for s1, s2 in itertools.product(o1.classes, o2.classes):
        if (
            s1.iri in o1.subclass_of.get(c1, ())
            and s2.iri in o2.subclass_of.get(c2, ())
            and pairs.get(s1.iri) == s2.iri
        ):
            best = max(best, fitness[s1.iri, s2.iri])
    return best


@pytest.mark.parametrize("f1, f2", PAIRS)
def test_subsumption_boost_matches_enumerator_on_sampled_states(f1, f2):
    o1, o2 = load_ontology(DATA / f1), load_ontology(DATA / f2)
    ctx = StructuralContext(o1, o2, FakeScorer())
    left, right = [c.iri for c in o1.classes], [c.iri for c in o2.classes]
    rng = random.Random(7)
    matchings = list(all_matchings(left, right))
    for pairs in rng.sample(matchings, 300):
        pairs = dict(pairs)
        fitness = {p: rng.random() for p in pairs.items()}
        state = SimpleNamespace(pairs=pairs, pair_fitness=fitness)
        view = ctx.with_state(state)
        for c1, c2 in itertools.product(o1.classes, o2.classes):
            expected = oracle_boost(c1.iri, c2.iri, o1, o2, pairs, fitness)
            assert subsumption_boost(c1, c2, view) == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("f1, f2", PAIRS)
def test_state_fitness_matches_top_down_oracle(f1, f2):
    o1, o2, scorer, bags_score = oracle_context(f1, f2)
    ctx = StructuralContext(o1, o2, scorer)
    sims = build_similarity_matrix(o1, o2, ctx=ctx, floor=0.0)
    rng = random.Random(3)
    classes = list(all_matchings([c.iri for c in o1.classes], [c.iri for c in o2.classes]))
    for pairs in rng.sample(classes, 100):
        matched = dict(pairs)
        memo = {}

        def value(a, b):
            if (a, b) not in memo:
                v = max(sims.get(a, b), oracle_class_from_properties(a, b, o1, o2, bags_score))
                for s1 in o1.subclass_of.get(a, ()):
                    s2 = matched.get(s1)
                    if s2 is not None and s2 in o2.subclass_of.get(b, ()):
                        v = max(v, value(s1, s2))
                memo[a, b] = v
            return memo[a, b]

        state = state_from_pairs(pairs, ctx)
        assert state.fitness == pytest.approx(sum(value(a, b) for a, b in pairs), abs=1e-9)


# ------------------------------------------------------------- invariants


@pytest.mark.parametrize("f1, f2", PAIRS)
def test_scores_symmetric_under_swapping_sides(f1, f2):
    o1, o2 = load_ontology(DATA / f1), load_ontology(DATA / f2)
    ctx = StructuralContext(o1, o2, LexicalScorer(o1, o2, CONF))
    rev = StructuralContext(o2, o1, LexicalScorer(o2, o1, CONF))
    for e1 in o1.entities.values():
        for e2 in o2.entities.values():
            if e1.kind is not e2.kind:
                continue
            a = static_similarity(e1, e2, ctx)
            assert 0.0 <= a <= 1.0
            assert a == pytest.approx(static_similarity(e2, e1, rev), abs=1e-12)
            if e1.kind is EntityKind.CLASS:
                assert class_similarity_from_properties(e1, e2, ctx) == pytest.approx(
                    class_similarity_from_properties(e2, e1, rev), abs=1e-12
                )


def test_boost_monotone_when_adding_correspondences():
    o1, o2 = load_ontology(DATA / "conference.json"), load_ontology(DATA / "confOf.json")
    ctx = StructuralContext(o1, o2, FakeScorer())
    rng = random.Random(11)
    left, right = [c.iri for c in o1.classes], [c.iri for c in o2.classes]
    fitness = {(a, b): rng.random() for a in left for b in right}
    for _ in range(200):
        pairs = {}
        before = {}
        order = rng.sample(left, len(left))
        free = rng.sample(right, len(right))
        for a, b in zip(order, free):
            pairs[a] = b
            view = ctx.with_state(SimpleNamespace(pairs=dict(pairs), pair_fitness=fitness))
            for c1, c2 in itertools.product(o1.classes, o2.classes):
                now = subsumption_boost(c1, c2, view)
                assert now >= before.get((c1.iri, c2.iri), 0.0)
                before[c1.iri, c2.iri] = now
