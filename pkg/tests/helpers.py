"""Shared fixtures and brute-force oracles for the test suite.

The oracles here deliberately avoid the package's own scoring code paths
(incremental fitness, matrix blocking, optimal token matching) so that
tests compare two independent computations.
"""
from __future__ import annotations

import itertools
import math
import os
import random
from pathlib import Path

from annealmatch.matrix import SimilarityMatrix
from annealmatch.ontology import EntityKind, EntityRef, Ontology
from annealmatch.structural import StructuralContext

DATA = Path(__file__).resolve().parent / "data"


def ontology(id, classes, sub=(), props=(), labels=None, ns=None):
    """Small ontology from local names.

    ``classes``: names; ``sub``: (child, parent) pairs; ``props``:
    (name, kind, domains, ranges) with kind "op" or "dp"; ``labels``:
    name -> list of labels.
    """
    ns = ns or f"http://example.org/{id}#"
    labels = labels or {}
    ents = [EntityRef(ns + c, EntityKind.CLASS) for c in classes]
    lab = {ns + k: list(v) for k, v in labels.items()}
    subclass_of: dict[str, list[str]] = {}
    for c, p in sub:
        subclass_of.setdefault(ns + c, []).append(ns + p)
    dom: dict[str, list[str]] = {}
    rng: dict[str, list[str]] = {}
    for name, kind, ds, rs in props:
        k = EntityKind.OBJECT_PROPERTY if kind == "op" else EntityKind.DATA_PROPERTY
        ents.append(EntityRef(ns + name, k))
        if ds:
            dom[ns + name] = [ns + d for d in ds]
        if rs:
            rng[ns + name] = [r if r.startswith("http") else ns + r for r in rs]
    return Ontology.build(id, ents, lab, subclass_of, dom, rng)


# ----------------------------------------------------------------- SA oracle


def synthetic_instance(seed: int, max_entities: int = 5):
    """A random class-only matching instance with hierarchies on both sides.

    Every same-kind pair is a candidate (floor 0), so the annealer and the
    exhaustive search range over the same set of matchings.
    """
    rng = random.Random(seed)

    def side(id):
        n = rng.randint(3, max_entities)
        names = [f"C{i}" for i in range(n)]
        sub = []
        for i in range(1, n):
            if rng.random() < 0.7:
                sub.append((names[i], names[rng.randrange(i)]))
        return ontology(id, names, sub)

    o1, o2 = side("s"), side("t")
    sims = SimilarityMatrix(floor=0.0)
    for e1 in o1.classes:
        for e2 in o2.classes:
            # a mix of strong, weak and zero scores, with some exact ties
            r = rng.random()
            score = 0.0 if r < 0.3 else round(rng.random(), 2 if r < 0.6 else 6)
            sims.set(e1.iri, e2.iri, EntityKind.CLASS, score)
    ctx = StructuralContext(o1, o2, None, sims)
    return o1, o2, sims, ctx


def oracle_fitness(pairs, o1: Ontology, o2: Ontology, sims: SimilarityMatrix) -> float:
    """Fitness of an explicit matching, recomputed from the definitions:
    each class pair scores the max of its matrix score and the fitness of
    any matched pair of direct superclasses, evaluated top-down."""
    matched = dict(pairs)
    memo: dict[tuple[str, str], float] = {}

    def value(a, b):
        if (a, b) in memo:
            return memo[a, b]
        v = sims.get(a, b)
        for s1 in o1.subclass_of.get(a, ()):
            s2 = matched.get(s1)
            if s2 is not None and s2 in o2.subclass_of.get(b, ()):
                v = max(v, value(s1, s2))
        memo[a, b] = v
        return v

    return math.fsum(value(a, b) for a, b in matched.items())


def all_matchings(left, right):
    """Every partial injective matching between two lists."""
    for k in range(min(len(left), len(right)) + 1):
        for subset in itertools.combinations(left, k):
            for image in itertools.permutations(right, k):
                yield list(zip(subset, image))


def exhaustive_optimum(o1, o2, sims) -> float:
    left = [e.iri for e in o1.classes]
    right = [e.iri for e in o2.classes]
    return max(oracle_fitness(m, o1, o2, sims) for m in all_matchings(left, right))


# ------------------------------------------------------------ metric oracles


def oracle_jaro(s1: str, s2: str, floor_transpositions: bool = False) -> float:
    """Jaro from the definition, matching each character of the shorter
    (then lexicographically smaller) string to the first free equal
    character of the other inside the window.

    ``floor_transpositions`` reproduces the strcmp95 convention used by
    jellyfish, which halves the mismatch count with integer division.
    """
    if s1 == s2:
        return 1.0
    if not s1 or not s2:
        return 0.0
    a, b = sorted([s1, s2], key=lambda s: (len(s), s))
    window = max(len(a), len(b)) // 2 - 1
    taken = set()
    a_hits = []
    for i, ch in enumerate(a):
        for j in range(max(0, i - window), min(len(b), i + window + 1)):
            if j not in taken and b[j] == ch:
                taken.add(j)
                a_hits.append(ch)
                break
    if not a_hits:
        return 0.0
    b_hits = [b[j] for j in sorted(taken)]
    mismatches = sum(x != y for x, y in zip(a_hits, b_hits))
    t = mismatches // 2 if floor_transpositions else mismatches / 2
    m = len(a_hits)
    return (m / len(a) + m / len(b) + (m - t) / m) / 3


def oracle_jaro_winkler(s1: str, s2: str) -> float:
    j = oracle_jaro(s1, s2)
    ell = len(os.path.commonprefix([s1[:4], s2[:4]]))
    return j + ell * 0.1 * (1 - j)


class OracleTaxonomy:
    """Wu-Palmer straight from a TSV file: depth is the longest hop count
    from the root plus one, the lcs is the deepest shared ancestor."""

    NOUN_SUFFIXES = (("ses", "s"), ("xes", "x"), ("zes", "z"), ("ches", "ch"),
                     ("shes", "sh"), ("men", "man"), ("ies", "y"), ("s", ""))

    def __init__(self, path):
        self.parents: dict[str, list[str]] = {}
        self.senses: dict[str, list[str]] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            sid, parents, words = (line.split("\t") + ["", ""])[:3]
            self.parents[sid] = [p for p in parents.split(",") if p]
            for w in words.split(","):
                if w:
                    self.senses.setdefault(w.lower(), []).append(sid)

    def depth(self, s):
        return 1 + max((self.depth(p) for p in self.parents[s]), default=0)

    def up(self, s):
        out = {s}
        for p in self.parents[s]:
            out |= self.up(p)
        return out

    def lookup(self, word):
        if word in self.senses:
            return self.senses[word]
        for suffix, repl in self.NOUN_SUFFIXES:
            if word.endswith(suffix) and len(word) > len(suffix):
                base = word[: -len(suffix)] + repl
                if base in self.senses:
                    return self.senses[base]
        return []

    def wp(self, w1, w2):
        best = 0.0
        for a in self.lookup(w1):
            for b in self.lookup(w2):
                lcs_depth = max(self.depth(c) for c in self.up(a) & self.up(b))
                best = max(best, 2 * lcs_depth / (self.depth(a) + self.depth(b)))
        return best


def oracle_soft_tfidf(bag_a, bag_b, docs, token_sim) -> float:
    """Soft TF-IDF by enumerating every one-to-one pairing of distinct tokens.

    ``docs``: the token bags of the corpus; ``token_sim(t, u, surface_t,
    surface_u)``: thresholded base similarity.
    """
    n = len(docs)
    df = {}
    for d in docs:
        for t in set(d.tokens):
            df[t] = df.get(t, 0) + 1

    def vector(bag):
        counts = {}
        for t in bag.tokens:
            counts[t] = counts.get(t, 0) + 1
        raw = {t: c * math.log(n / df.get(t, 1)) for t, c in counts.items()}
        if not any(raw.values()):
            raw = {t: float(c) for t, c in counts.items()}
        norm = math.sqrt(sum(v * v for v in raw.values()))
        return {t: v / norm for t, v in raw.items()}

    va, vb = vector(bag_a), vector(bag_b)
    sa, sb = bag_a.surface_of(), bag_b.surface_of()
    best = 0.0
    for pairing in all_matchings(list(va), list(vb)):
        total = sum(va[t] * vb[u] * token_sim(t, u, sa[t], sb[u]) for t, u in pairing)
        best = max(best, total)
    return min(1.0, best)


def oracle_token_sim(oracle_wn):
    def sim(t, u, st, su):
        jw = oracle_jaro_winkler(t, u)
        w1 = st if oracle_wn.lookup(st) else t
        w2 = su if oracle_wn.lookup(su) else u
        wp = 1.0 if (w1 == w2 and oracle_wn.lookup(w1)) else oracle_wn.wp(w1, w2)
        return max(jw if jw >= 0.9 else 0.0, wp if wp >= 0.95 else 0.0)

    return sim
