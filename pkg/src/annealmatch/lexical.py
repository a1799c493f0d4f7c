"""Token metrics (Jaro-Winkler, Wu-Palmer) and Soft TF-IDF name similarity."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyBag, KindMismatch
from .ontology import EntityRef, Ontology, entity_name
from .text import StopList, TokenBag, default_stoplist, preprocess
from .wordnet import WordNetTaxonomy, wu_palmer

JW_THRESHOLD = 0.9
WP_THRESHOLD = 0.95
# hypernym depth below which no non-identical pair can reach WP_THRESHOLD
_WP_MIN_LCS_DEPTH = math.ceil(WP_THRESHOLD / (2 * (1 - WP_THRESHOLD)))


def jaro(s1: str, s2: str) -> float:
    if s1 == s2:
        return 1.0
    if not s1 or not s2:
        return 0.0
    # greedy matching depends on argument order; fix it to keep the metric symmetric
    if (len(s1), s1) > (len(s2), s2):
        s1, s2 = s2, s1
    n1, n2 = len(s1), len(s2)
    window = max(max(n1, n2) // 2 - 1, 0)
    used = [False] * n2
    matched1 = []
    for i, ch in enumerate(s1):
        lo = max(0, i - window)
        hi = min(n2, i + window + 1)
        for j in range(lo, hi):
            if not used[j] and s2[j] == ch:
                used[j] = True
                matched1.append(ch)
                break
    m = len(matched1)
    if m == 0:
        return 0.0
    matched2 = [s2[j] for j in range(n2) if used[j]]
    transpositions = sum(a != b for a, b in zip(matched1, matched2)) / 2
    return (m / n1 + m / n2 + (m - transpositions) / m) / 3


def jaro_winkler(s1: str, s2: str, prefix_scale: float = 0.1, max_prefix: int = 4) -> float:
    j = jaro(s1, s2)
    prefix = 0
    for a, b in zip(s1[:max_prefix], s2[:max_prefix]):
        if a != b:
            break
        prefix += 1
    return min(1.0, j + prefix * prefix_scale * (1.0 - j))


def _jw_can_reach(s1: str, s2: str, threshold: float = JW_THRESHOLD) -> bool:
    # jw <= 0.6 * jaro + 0.4 and jaro is bounded by the length ratio
    n1, n2 = len(s1), len(s2)
    if not n1 or not n2:
        return s1 == s2
    m = min(n1, n2)
    jaro_bound = (m / n1 + m / n2 + 1) / 3
    return 0.6 * jaro_bound + 0.4 >= threshold - 1e-12


def base_token_similarity(
    t1: str,
    t2: str,
    wn: WordNetTaxonomy,
    surface1: str | None = None,
    surface2: str | None = None,
) -> float:
    """Thresholded max of Jaro-Winkler (on stems) and Wu-Palmer (on words).

    Wu-Palmer looks up the unstemmed surface form when it is known to the
    taxonomy and falls back to the stem otherwise.
    """
    jw = jaro_winkler(t1, t2)
    if jw < JW_THRESHOLD:
        jw = 0.0
    w1 = surface1 if surface1 and surface1 in wn else t1
    w2 = surface2 if surface2 and surface2 in wn else t2
    wp = wu_palmer(w1, w2, wn)
    if wp < WP_THRESHOLD:
        wp = 0.0
    return max(jw, wp)


@dataclass(frozen=True)
class CorpusStats:
    doc_count: int
    doc_freq: Mapping[str, int]

    @classmethod
    def from_bags(cls, bags: Iterable[TokenBag]) -> "CorpusStats":
        df: Counter = Counter()
        n = 0
        for bag in bags:
            n += 1
            df.update(set(bag.tokens))
        return cls(n, dict(df))

    def idf(self, token: str) -> float:
        df = self.doc_freq.get(token, 1)
        return math.log(max(self.doc_count, 1) / df)

    def weights(self, bag: TokenBag) -> dict[str, float]:
        """L2-normalised TF-IDF vector of a bag.

        If every token occurs in every document the TF-IDF vector is zero;
        plain term frequencies are used instead so the bag still matches.
        """
        tf = Counter(bag.tokens)
        raw = {t: c * self.idf(t) for t, c in tf.items()}
        norm = math.sqrt(sum(v * v for v in raw.values()))
        if norm <= 0.0:
            raw = {t: float(c) for t, c in tf.items()}
            norm = math.sqrt(sum(v * v for v in raw.values()))
        return {t: v / norm for t, v in raw.items()}


def best_matching_weight(weights: np.ndarray) -> float:
    """Maximum total weight of a one-to-one matching between rows and columns."""
    if weights.size == 0:
        return 0.0
    if weights.shape[0] == 1 or weights.shape[1] == 1:
        return float(weights.max())
    rows, cols = linear_sum_assignment(weights, maximize=True)
    return float(weights[rows, cols].sum())


def soft_tfidf(
    bag_a: TokenBag,
    bag_b: TokenBag,
    stats: CorpusStats,
    wn: WordNetTaxonomy,
    token_sim: Callable[[str, str, str, str], float] | None = None,
) -> float:
    """Soft TF-IDF between two token bags.

    Sum over matched close token pairs of ``V(t, A) * V(u, B) * sim(t, u)``
    where ``V`` is the normalised TF-IDF weight and ``sim`` the thresholded
    base token similarity. Each token is matched to at most one partner on
    the other side; the matching maximises the sum.
    """
    if not bag_a.tokens or not bag_b.tokens:
        raise EmptyBag("soft TF-IDF needs non-empty bags")
    if token_sim is None:

        def token_sim(t, u, st, su):
            return base_token_similarity(t, u, wn, st, su)

    va = stats.weights(bag_a)
    vb = stats.weights(bag_b)
    sa = bag_a.surface_of()
    sb = bag_b.surface_of()
    ta = list(va)
    tb = list(vb)
    w = np.zeros((len(ta), len(tb)))
    any_close = False
    for i, t in enumerate(ta):
        for j, u in enumerate(tb):
            sim = token_sim(t, u, sa[t], sb[u])
            if sim > 0.0:
                w[i, j] = va[t] * vb[u] * sim
                any_close = True
    if not any_close:
        return 0.0
    return min(1.0, max(0.0, best_matching_weight(w)))


class LexicalScorer:
    """Name bags, corpus statistics and cached token similarities for one
    ontology pair."""

    def __init__(
        self,
        o1: Ontology,
        o2: Ontology,
        wn: WordNetTaxonomy | None = None,
        stops: StopList | None = None,
        stats: CorpusStats | None = None,
    ):
        self.o1 = o1
        self.o2 = o2
        self.wn = wn if wn is not None else WordNetTaxonomy.empty()
        self.stops = stops if stops is not None else default_stoplist()
        self.bags = (
            {iri: preprocess(entity_name(o1, e), self.stops) for iri, e in o1.entities.items()},
            {iri: preprocess(entity_name(o2, e), self.stops) for iri, e in o2.entities.items()},
        )
        if stats is None:
            stats = CorpusStats.from_bags(list(self.bags[0].values()) + list(self.bags[1].values()))
        self.stats = stats
        self._token_cache: dict[tuple, float] = {}
        self._set_cache: dict[tuple, float] = {}

    def token_similarity(self, t: str, u: str, st: str | None = None, su: str | None = None) -> float:
        key = (t, st, u, su) if (t, st or "") <= (u, su or "") else (u, su, t, st)
        hit = self._token_cache.get(key)
        if hit is None:
            hit = self._token_cache[key] = base_token_similarity(key[0], key[2], self.wn, key[1], key[3])
        return hit

    def bag_similarity(self, a: TokenBag, b: TokenBag) -> float:
        return soft_tfidf(a, b, self.stats, self.wn, self.token_similarity)

    def name_similarity(self, e1: EntityRef, e2: EntityRef) -> float:
        if e1.kind is not e2.kind:
            raise KindMismatch(f"{e1.iri} ({e1.kind.value}) vs {e2.iri} ({e2.kind.value})")
        return self.bag_similarity(self.bags[0][e1.iri], self.bags[1][e2.iri])

    def concat_bag(self, side: int, iris: Iterable[str]) -> TokenBag | None:
        """Concatenation of the name bags of a set of entities (sorted by IRI)."""
        bags = self.bags[side]
        out = None
        for iri in sorted(iris):
            bag = bags.get(iri)
            if bag is None:
                continue
            out = bag if out is None else out + bag
        return out

    def set_similarity(self, iris1: Iterable[str], iris2: Iterable[str]) -> float:
        """Soft TF-IDF of two entity sets' concatenated names; 0 if either is empty."""
        k1, k2 = tuple(sorted(iris1)), tuple(sorted(iris2))
        key = (k1, k2)
        hit = self._set_cache.get(key)
        if hit is None:
            a = self.concat_bag(0, k1)
            b = self.concat_bag(1, k2)
            hit = 0.0 if a is None or b is None else self.bag_similarity(a, b)
            self._set_cache[key] = hit
        return hit

    def close_token_pairs(self, tokens1: Iterable[tuple[str, str]], tokens2: Iterable[tuple[str, str]]):
        """All (token1, token2) pairs with non-zero base similarity.

        Tokens are ``(stem, surface)`` tuples. Pairs that can reach neither
        threshold are pruned without evaluating the metrics.
        """
        tokens1 = sorted(set(tokens1))
        tokens2 = sorted(set(tokens2))
        keys2: dict[str, set[tuple[str, str]]] = {}
        for tok in tokens2:
            for key in self._wordnet_keys(tok):
                keys2.setdefault(key, set()).add(tok)
        out = {}
        for a in tokens1:
            candidates = {b for b in tokens2 if _jw_can_reach(a[0], b[0])}
            for key in self._wordnet_keys(a):
                candidates |= keys2.get(key, set())
            for b in candidates:
                sim = self.token_similarity(a[0], b[0], a[1], b[1])
                if sim > 0.0:
                    out[a, b] = sim
        return out

    def _wordnet_keys(self, tok: tuple[str, str]) -> set[str]:
        # a pair can reach WP_THRESHOLD only through a shared synset or a deep
        # shared hypernym, so index each word by those nodes
        wn = self.wn
        word = tok[1] if tok[1] in wn else tok[0]
        keys = set()
        for s in wn.lookup(word):
            keys.add(s)
            keys.update(a for a in wn.ancestors(s) if wn.depth[a] >= _WP_MIN_LCS_DEPTH)
        return keys


def lexical_similarity(
    e1: EntityRef,
    e2: EntityRef,
    o1: Ontology,
    o2: Ontology,
    stats: CorpusStats | None = None,
    wn: WordNetTaxonomy | None = None,
    stops: StopList | None = None,
) -> float:
    """Soft TF-IDF between the preprocessed names of ``e1`` and ``e2``."""
    if e1.kind is not e2.kind:
        raise KindMismatch(f"{e1.iri} ({e1.kind.value}) vs {e2.iri} ({e2.kind.value})")
    stops = stops if stops is not None else default_stoplist()
    wn = wn if wn is not None else WordNetTaxonomy.empty()
    a = preprocess(entity_name(o1, e1), stops)
    b = preprocess(entity_name(o2, e2), stops)
    if stats is None:
        stats = CorpusStats.from_bags(
            [preprocess(entity_name(o, e), stops) for o in (o1, o2) for e in o.entities.values()]
        )
    return soft_tfidf(a, b, stats, wn)
