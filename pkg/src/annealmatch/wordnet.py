"""Noun hypernym taxonomy and the Wu-Palmer relatedness measure.

Two on-disk formats are read:

* Princeton WordNet 3.x ``data.noun`` / ``index.noun`` (optionally
  ``noun.exc``); synset ids are the 8-digit byte offsets;
* a simplified TSV, one synset per line::

      synset_id <TAB> parent_id,parent_id <TAB> word,word

  Blank lines and lines starting with ``#`` are ignored.

Depths count hops from the root along the longest hypernym path, with
depth(root) = 1 and depth(s) = 1 + max depth of its parents, so every
hypernym is strictly shallower than its hyponyms. When the file has several
parentless synsets a virtual root ``__root__`` is glued above them.
"""
from __future__ import annotations

import graphlib
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

logger = logging.getLogger(__name__)

VIRTUAL_ROOT = "__root__"

# noun detachment rules used by WordNet's morphological processor
_NOUN_SUFFIXES = (
    ("ses", "s"),
    ("xes", "x"),
    ("zes", "z"),
    ("ches", "ch"),
    ("shes", "sh"),
    ("men", "man"),
    ("ies", "y"),
    ("s", ""),
)


@dataclass(eq=False)
class WordNetTaxonomy:
    synsets: frozenset[str]
    word_index: Mapping[str, tuple[str, ...]]
    hypernyms: Mapping[str, frozenset[str]]
    depth: Mapping[str, int]
    root: str
    exceptions: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    misses: Counter = field(default_factory=Counter)

    def __post_init__(self):
        self._ancestors: dict[str, frozenset[str]] = {}

    @classmethod
    def from_edges(
        cls,
        hypernyms: Mapping[str, Iterable[str]],
        words: Mapping[str, Iterable[str]],
        exceptions: Mapping[str, Iterable[str]] | None = None,
    ) -> "WordNetTaxonomy":
        """Build from ``synset -> parents`` and ``word -> synsets`` maps."""
        hyper = {s: frozenset(ps) for s, ps in hypernyms.items()}
        nodes = set(hyper)
        for ps in hyper.values():
            nodes |= ps
        for ids in words.values():
            nodes |= set(ids)
        for s in nodes:
            hyper.setdefault(s, frozenset())
        roots = sorted(s for s, ps in hyper.items() if not ps)
        if len(roots) == 1:
            root = roots[0]
        else:
            root = VIRTUAL_ROOT
            for r in roots:
                hyper[r] = frozenset([VIRTUAL_ROOT])
            hyper[VIRTUAL_ROOT] = frozenset()

        depth: dict[str, int] = {}
        try:
            for s in graphlib.TopologicalSorter(hyper).static_order():
                depth[s] = 1 + max((depth[p] for p in hyper[s]), default=0)
        except graphlib.CycleError as exc:
            raise ValueError(f"hypernym graph has a cycle: {exc.args[1][:5]}") from None

        index = {}
        for w, ids in words.items():
            ids = tuple(dict.fromkeys(ids))
            if ids:
                index[w.lower()] = ids
        exc = {k.lower(): tuple(v) for k, v in (exceptions or {}).items()}
        return cls(frozenset(hyper), index, hyper, depth, root, exc)

    @classmethod
    def empty(cls) -> "WordNetTaxonomy":
        return cls.from_edges({VIRTUAL_ROOT: ()}, {})

    @classmethod
    def from_tsv(cls, path: str | Path) -> "WordNetTaxonomy":
        hyper: dict[str, set[str]] = {}
        words: dict[str, list[str]] = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                raise ValueError(f"{path}:{lineno}: expected at least 2 tab-separated columns")
            sid = cols[0].strip()
            hyper.setdefault(sid, set()).update(p.strip() for p in cols[1].split(",") if p.strip())
            for w in cols[2].split(",") if len(cols) > 2 else ():
                w = w.strip().replace(" ", "_")
                if w:
                    words.setdefault(w.lower(), []).append(sid)
        return cls.from_edges(hyper, words)

    @classmethod
    def from_princeton(cls, directory: str | Path) -> "WordNetTaxonomy":
        directory = Path(directory)
        hyper: dict[str, set[str]] = {}
        with open(directory / "data.noun", encoding="utf-8", errors="replace") as fh:
            for line in fh:
                if line.startswith("  "):
                    continue
                fields = line.split(" | ", 1)[0].split()
                offset = fields[0]
                n_words = int(fields[3], 16)
                i = 4 + 2 * n_words
                n_ptrs = int(fields[i])
                parents = hyper.setdefault(offset, set())
                i += 1
                for _ in range(n_ptrs):
                    symbol, target, pos = fields[i], fields[i + 1], fields[i + 2]
                    if symbol in ("@", "@i") and pos == "n":
                        parents.add(target)
                    i += 4
        words: dict[str, list[str]] = {}
        with open(directory / "index.noun", encoding="utf-8", errors="replace") as fh:
            for line in fh:
                if line.startswith("  "):
                    continue
                fields = line.split()
                n_synsets = int(fields[2])
                words[fields[0]] = fields[len(fields) - n_synsets:]
        exceptions: dict[str, list[str]] = {}
        exc_file = directory / "noun.exc"
        if exc_file.exists():
            for line in exc_file.read_text(encoding="utf-8", errors="replace").splitlines():
                parts = line.split()
                if len(parts) >= 2:
                    exceptions[parts[0]] = parts[1:]
        wn = cls.from_edges(hyper, words, exceptions)
        logger.info("wordnet: %d noun synsets, %d lemmas", len(wn.synsets), len(wn.word_index))
        return wn

    @classmethod
    def load(cls, path: str | Path) -> "WordNetTaxonomy":
        """Princeton directory (containing ``data.noun``) or TSV file."""
        path = Path(path)
        if path.is_dir():
            return cls.from_princeton(path)
        return cls.from_tsv(path)

    def lookup(self, word: str) -> tuple[str, ...]:
        """Noun synsets for ``word``, trying its base forms when needed."""
        word = word.lower()
        hit = self.word_index.get(word)
        if hit:
            return hit
        for base in self.exceptions.get(word, ()):
            if base in self.word_index:
                return self.word_index[base]
        for suffix, repl in _NOUN_SUFFIXES:
            if word.endswith(suffix) and len(word) > len(suffix):
                base = word[: len(word) - len(suffix)] + repl
                if base in self.word_index:
                    return self.word_index[base]
        return ()

    def __contains__(self, word: str) -> bool:
        return bool(self.lookup(word))

    def ancestors(self, synset: str) -> frozenset[str]:
        """``synset`` together with all of its transitive hypernyms."""
        hit = self._ancestors.get(synset)
        if hit is None:
            out = {synset}
            for p in self.hypernyms.get(synset, ()):
                out |= self.ancestors(p)
            hit = self._ancestors[synset] = frozenset(out)
        return hit

    def lcs(self, a: str, b: str) -> str:
        """Deepest common hypernym of two synsets (ties broken by id)."""
        common = self.ancestors(a) & self.ancestors(b)
        return max(common, key=lambda s: (self.depth[s], s))

    def synset_similarity(self, a: str, b: str) -> float:
        return min(1.0, 2.0 * self.depth[self.lcs(a, b)] / (self.depth[a] + self.depth[b]))


def wu_palmer(t1: str, t2: str, wn: WordNetTaxonomy) -> float:
    """Wu-Palmer relatedness: best ``2 d(lcs) / (d(a) + d(b))`` over noun senses.

    Words missing from the taxonomy score 0 and are tallied in ``wn.misses``.
    """
    s1 = wn.lookup(t1)
    s2 = wn.lookup(t2)
    if not s1:
        wn.misses[t1.lower()] += 1
    if not s2:
        wn.misses[t2.lower()] += 1
    if not s1 or not s2:
        return 0.0
    if set(s1) & set(s2):
        return 1.0
    return max(wn.synset_similarity(a, b) for a in s1 for b in s2)
