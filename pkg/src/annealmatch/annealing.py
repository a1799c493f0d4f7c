"""Simulated annealing over one-to-one alignments.

A state is a partial injective matching between same-kind entities of the
two ontologies. Its fitness is the sum of the per-pair combined
similarities, where a class pair may inherit the fitness of a matched pair
of direct superclasses. Moves add a candidate pair, remove a pair, or swap
the partner of one entity; fitness is updated incrementally, pushing
changes down to subclass pairs in hierarchy order.
"""
from __future__ import annotations

import heapq
import logging
import math
import random
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .alignment import Alignment, Correspondence
from .errors import NoMoveAvailable
from .ontology import EntityKind
from .structural import StructuralContext, combined_similarity, static_similarity

logger = logging.getLogger(__name__)

MOVE_WEIGHTS = {"add": 0.5, "remove": 0.2, "swap": 0.3}


@dataclass
class SAConfig:
    """Annealing schedule.

    ``iterations_per_temperature=None`` means 50 * max(|O1|, |O2|) moves per
    temperature level, counted in entities.
    """

    initial_temperature: float = 1.0
    cooling_rate: float = 0.95
    iterations_per_temperature: int | None = None
    min_temperature: float = 1e-4
    seed: int = 0
    restarts: int = 3
    extraction_threshold: float = 0.5

    def __post_init__(self):
        if self.initial_temperature <= 0:
            raise ValueError("initial_temperature must be positive")
        if not 0 < self.cooling_rate < 1:
            raise ValueError("cooling_rate must lie in (0, 1)")
        if self.iterations_per_temperature is not None and self.iterations_per_temperature < 1:
            raise ValueError("iterations_per_temperature must be positive")
        if not 0 < self.min_temperature < self.initial_temperature:
            raise ValueError("need 0 < min_temperature < initial_temperature")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.restarts < 1:
            raise ValueError("restarts must be positive")
        if not 0.0 <= self.extraction_threshold:
            raise ValueError("extraction_threshold must be non-negative")

    def levels(self) -> int:
        """Number of temperature levels visited."""
        n = 0
        t = self.initial_temperature
        while t >= self.min_temperature:
            n += 1
            t *= self.cooling_rate
        return n


class _IndexedSet:
    """Set with O(1) insert, delete and uniform random choice."""

    __slots__ = ("items", "pos")

    def __init__(self):
        self.items = []
        self.pos = {}

    def add(self, x):
        if x not in self.pos:
            self.pos[x] = len(self.items)
            self.items.append(x)

    def discard(self, x):
        i = self.pos.pop(x, None)
        if i is None:
            return
        last = self.items.pop()
        if i < len(self.items):
            self.items[i] = last
            self.pos[last] = i

    def choice(self, rng):
        return self.items[int(rng.random() * len(self.items))]

    def __len__(self):
        return len(self.items)

    def __contains__(self, x):
        return x in self.pos


class _MoveIndex:
    """Which moves a state currently allows, kept up to date by the annealer."""

    def __init__(self):
        self.addable = _IndexedSet()
        self.swappable = _IndexedSet()
        self.matched = _IndexedSet()
        self.status: dict[tuple[str, str], int] = {}


class AlignmentState:
    """Injective partial matching with per-pair and total fitness caches."""

    def __init__(self):
        self.pairs: dict[str, str] = {}
        self.reverse: dict[str, str] = {}
        self.pair_fitness: dict[tuple[str, str], float] = {}
        self.fitness = 0.0
        self.index: _MoveIndex | None = None

    def copy(self) -> "AlignmentState":
        other = AlignmentState()
        other.pairs = dict(self.pairs)
        other.reverse = dict(self.reverse)
        other.pair_fitness = dict(self.pair_fitness)
        other.fitness = self.fitness
        return other

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        return self.pairs.get(pair[0]) == pair[1]

    def __iter__(self):
        return iter(sorted(self.pairs.items()))

    def __repr__(self):
        return f"AlignmentState({len(self)} pairs, fitness={self.fitness:.6f})"


def _ops(old, new):
    """Primitive operations of a move that removes ``old`` and adds ``new``
    (either may be None)."""
    if old is None:
        return (("add", *new),)
    if new is None:
        return (("remove", *old),)
    return (("remove", *old), ("add", *new))


def accept(delta: float, temperature: float, uniform) -> bool:
    """Metropolis rule: improvements and ties always pass; a worsening move
    passes with probability exp(delta / T). ``uniform`` is only drawn from
    for worsening moves."""
    return delta >= 0 or uniform() < math.exp(delta / temperature)


def _ordered(pairs: Iterable[tuple[str, str]], ctx: StructuralContext | None):
    level = ctx.o1.level if ctx is not None else {}
    return sorted(pairs, key=lambda p: (level.get(p[0], 0), p))


def _entity_pair(ctx: StructuralContext, i1: str, i2: str):
    return ctx.o1.entity(i1), ctx.o2.entity(i2)


def state_fitness(state: AlignmentState, ctx: StructuralContext) -> float:
    """Fitness of ``state`` recomputed from scratch (ignores its caches)."""
    table: dict[tuple[str, str], float] = {}
    view = ctx.with_state(state)
    for i1, i2 in _ordered(state.pairs.items(), ctx):
        e1, e2 = _entity_pair(ctx, i1, i2)
        table[i1, i2] = combined_similarity(e1, e2, view, table)
    return math.fsum(table.values())


def state_from_pairs(pairs: Iterable[tuple[str, str]], ctx: StructuralContext) -> AlignmentState:
    """Build a state (with coherent caches) from explicit pairs.

    Raises ``ValueError`` if the pairs are not injective or mix kinds.
    """
    state = AlignmentState()
    for i1, i2 in pairs:
        if i1 in state.pairs or i2 in state.reverse:
            raise ValueError(f"pair ({i1}, {i2}) breaks injectivity")
        e1, e2 = _entity_pair(ctx, i1, i2)
        if e1.kind is not e2.kind:
            raise ValueError(f"pair ({i1}, {i2}) mixes kinds")
        state.pairs[i1] = i2
        state.reverse[i2] = i1
    view = ctx.with_state(state)
    for i1, i2 in _ordered(state.pairs.items(), ctx):
        e1, e2 = _entity_pair(ctx, i1, i2)
        state.pair_fitness[i1, i2] = combined_similarity(e1, e2, view, state.pair_fitness)
    state.fitness = math.fsum(state.pair_fitness.values())
    return state


class Annealer:
    """Move generation, incremental fitness and the annealing loop for one
    ontology pair. Candidate pairs are the entries of the similarity matrix."""

    def __init__(self, sims, ctx: StructuralContext | None = None, config: SAConfig | None = None):
        self.sims = sims
        self.ctx = ctx
        self.config = config or SAConfig()
        if ctx is not None:
            if ctx.sims is None:
                ctx.sims = sims
            self.sub1 = ctx.o1.subclass_of
            self.sup2 = ctx.o2.subclass_of
            self.children1 = ctx.o1.subclasses
            self.level1 = ctx.o1.level
        else:
            self.sub1 = self.sup2 = self.children1 = self.level1 = {}
        self.candidates = sorted(sims.entries)
        self.is_class: dict[tuple[str, str], bool] = {}
        self.static: dict[tuple[str, str], float] = {}
        # candidate pairs of direct superclasses / subclasses of each class pair
        self.parent_pairs: dict[tuple[str, str], list] = {}
        self.child_pairs: dict[tuple[str, str], list] = {}
        for pair in self.candidates:
            kind = sims.kinds.get(pair, EntityKind.CLASS)
            self.is_class[pair] = kind is EntityKind.CLASS
            if ctx is not None:
                e1, e2 = _entity_pair(ctx, *pair)
                self.static[pair] = static_similarity(e1, e2, ctx)
            else:
                self.static[pair] = sims.entries[pair]
        for pair in self.candidates:
            if self.is_class[pair]:
                self._link(pair)
        self.partners1: dict[str, list[str]] = {}
        self.partners2: dict[str, list[str]] = {}
        for i1, i2 in self.candidates:
            self.partners1.setdefault(i1, []).append(i2)
            self.partners2.setdefault(i2, []).append(i1)
        self.pairs_of1 = {a: [(a, b) for b in bs] for a, bs in self.partners1.items()}
        self.pairs_of2 = {b: [(a, b) for a in as_] for b, as_ in self.partners2.items()}

    def _link(self, pair) -> None:
        i1, i2 = pair
        sup2 = self.sup2.get(i2, ())
        for s1 in self.sub1.get(i1, ()):
            for s2 in sup2:
                q = (s1, s2)
                if q in self.static and self.is_class[q]:
                    self.parent_pairs.setdefault(pair, []).append(q)
                    self.child_pairs.setdefault(q, []).append(pair)

    def _register(self, pair) -> None:
        """Make a pair outside the similarity matrix usable in a state."""
        e1, e2 = _entity_pair(self.ctx, *pair)
        if e1.kind is not e2.kind:
            raise ValueError(f"pair {pair} mixes kinds")
        self.static[pair] = static_similarity(e1, e2, self.ctx)
        self.is_class[pair] = e1.kind is EntityKind.CLASS
        if not self.is_class[pair]:
            return
        self._link(pair)
        # pairs already known that sit directly below the new one
        children2 = self.ctx.o2.subclasses.get(pair[1], ())
        for c1 in self.children1.get(pair[0], ()):
            for c2 in children2:
                q = (c1, c2)
                if q in self.static and self.is_class[q]:
                    self.parent_pairs.setdefault(q, []).append(pair)
                    self.child_pairs.setdefault(pair, []).append(q)

    # ------------------------------------------------------------ fitness

    def _value(self, state: AlignmentState, i1: str, i2: str) -> float:
        pair = (i1, i2)
        value = self.static.get(pair)
        if value is None:
            if self.ctx is None:
                return 0.0
            self._register(pair)
            value = self.static[pair]
        parents = self.parent_pairs.get(pair)
        if parents:
            matched = state.pairs
            fit = state.pair_fitness
            for q in parents:
                if matched.get(q[0]) == q[1]:
                    f = fit[q]
                    if f > value:
                        value = f
        return value

    def _propagate(self, state: AlignmentState, i1: str, i2: str) -> float:
        """Recompute matched subclass pairs below (i1, i2) in hierarchy order;
        returns the fitness change."""
        children = self.child_pairs.get((i1, i2))
        if not children:
            return 0.0
        matched = state.pairs
        level = self.level1
        heap = [(level[c[0]], c) for c in children if matched.get(c[0]) == c[1]]
        if not heap:
            return 0.0
        heapq.heapify(heap)
        queued = {c for _, c in heap}
        fit = state.pair_fitness
        delta = 0.0
        while heap:
            _, c = heapq.heappop(heap)
            old = fit[c]
            new = self._value(state, *c)
            if new != old:
                fit[c] = new
                delta += new - old
                for g in self.child_pairs.get(c, ()):
                    if g not in queued and matched.get(g[0]) == g[1]:
                        queued.add(g)
                        heapq.heappush(heap, (level[g[0]], g))
        return delta

    def add(self, state: AlignmentState, i1: str, i2: str) -> float:
        pair = (i1, i2)
        state.pairs[i1] = i2
        state.reverse[i2] = i1
        value = self.static.get(pair)
        if value is None or pair in self.parent_pairs:
            value = self._value(state, i1, i2)
        state.pair_fitness[pair] = value
        if pair in self.child_pairs:
            value += self._propagate(state, i1, i2)
        state.fitness += value
        return value

    def remove(self, state: AlignmentState, i1: str, i2: str) -> float:
        pair = (i1, i2)
        delta = -state.pair_fitness.pop(pair)
        del state.pairs[i1]
        del state.reverse[i2]
        if pair in self.child_pairs:
            delta += self._propagate(state, i1, i2)
        state.fitness += delta
        return delta

    def apply(self, state: AlignmentState, ops) -> float:
        delta = 0.0
        for op, i1, i2 in ops:
            delta += self.add(state, i1, i2) if op == "add" else self.remove(state, i1, i2)
        return delta

    def undo(self, state: AlignmentState, ops) -> None:
        for op, i1, i2 in reversed(ops):
            if op == "add":
                self.remove(state, i1, i2)
            else:
                self.add(state, i1, i2)

    # -------------------------------------------------------------- moves

    def track(self, state: AlignmentState) -> "_MoveIndex":
        """Attach a fresh move index to ``state`` (recomputed from its pairs)."""
        index = _MoveIndex()
        for i1 in state.pairs:
            index.matched.add(i1)
        self._reclassify(state, index, self.candidates)
        state.index = index
        return index

    @staticmethod
    def _reclassify(state, index, pairs):
        # status: 0 = in the state or blocked on both sides, 1 = addable,
        # 2 = swappable (exactly one side matched). The set operations of
        # _IndexedSet are inlined; this runs after every accepted move.
        matched1, matched2, status_of = state.pairs, state.reverse, index.status
        sets = (None, index.addable, index.swappable)
        for pair in pairs:
            m1 = pair[0] in matched1
            m2 = pair[1] in matched2
            status = 2 if m1 != m2 else (0 if m1 else 1)
            old = status_of.get(pair, 0)
            if status == old:
                continue
            status_of[pair] = status
            if old:
                target = sets[old]
                items, pos = target.items, target.pos
                i = pos.pop(pair)
                last = items.pop()
                if i < len(items):
                    items[i] = last
                    pos[last] = i
            if status:
                target = sets[status]
                target.pos[pair] = len(target.items)
                target.items.append(pair)

    def reindex(self, state: AlignmentState, ops) -> None:
        """Bring ``state.index`` up to date after ``ops`` were applied."""
        index = state.index
        if index is None:
            return
        for _, i1, i2 in ops:
            if i1 in state.pairs:
                index.matched.add(i1)
            else:
                index.matched.discard(i1)
            self._reclassify(state, index, self.pairs_of1.get(i1, ()))
            self._reclassify(state, index, self.pairs_of2.get(i2, ()))

    def initial_state(self) -> AlignmentState:
        """Greedy matching by descending static score."""
        state = AlignmentState()
        order = sorted(self.candidates, key=lambda p: (-self.static[p], p))
        for i1, i2 in order:
            if i1 not in state.pairs and i2 not in state.reverse:
                self.add(state, i1, i2)
        state.fitness = math.fsum(state.pair_fitness.values())
        return state

    def draw(self, state: AlignmentState, rng: random.Random):
        """Pick one move as a list of primitive ops, or None if none exists.

        Move kinds are drawn with :data:`MOVE_WEIGHTS`, renormalised over the
        kinds that are currently possible; within a kind the choice is
        uniform (add: a candidate with both entities free; remove: a matched
        pair; swap: a candidate with exactly one entity matched, which then
        replaces that entity's current pair).
        """
        index = state.index if state.index is not None else self.track(state)
        w_add = MOVE_WEIGHTS["add"] if index.addable else 0.0
        w_remove = MOVE_WEIGHTS["remove"] if index.matched else 0.0
        w_swap = MOVE_WEIGHTS["swap"] if index.swappable else 0.0
        total = w_add + w_remove + w_swap
        if total == 0.0:
            return None
        r = rng.random() * total
        if r < w_add:
            i1, i2 = index.addable.choice(rng)
            return [("add", i1, i2)]
        if r < w_add + w_remove:
            i1 = index.matched.choice(rng)
            return [("remove", i1, state.pairs[i1])]
        a, b = index.swappable.choice(rng)
        if a in state.pairs:
            return [("remove", a, state.pairs[a]), ("add", a, b)]
        return [("remove", state.reverse[b], b), ("add", a, b)]

    # --------------------------------------------------------------- loop

    def iterations_per_temperature(self) -> int:
        if self.config.iterations_per_temperature is not None:
            return self.config.iterations_per_temperature
        if self.ctx is not None:
            n = max(len(self.ctx.o1), len(self.ctx.o2))
        else:
            n = max(len(self.partners1), len(self.partners2))
        return 50 * max(n, 1)

    def run_chain(self, seed: int) -> AlignmentState:
        """One annealing chain; returns the best state it visited.

        The move draw is :meth:`draw` and the acceptance test is
        :func:`accept`, both inlined (same random stream), since this loop
        dominates the running time.
        """
        cfg = self.config
        rng = random.Random(seed)
        uniform = rng.random
        exp = math.exp
        state = self.initial_state()
        index = self.track(state)
        addable = index.addable.items
        swappable = index.swappable.items
        matched = index.matched.items
        pairs, reverse = state.pairs, state.reverse
        apply, reindex = self.apply, self.reindex
        child_pairs, parent_pairs, static = self.child_pairs, self.parent_pairs, self.static
        fitness_of = state.pair_fitness
        w_add, w_remove, w_swap = MOVE_WEIGHTS["add"], MOVE_WEIGHTS["remove"], MOVE_WEIGHTS["swap"]

        best_fitness = state.fitness
        best_pairs = None  # None means "the current state is the best"
        iters = self.iterations_per_temperature()
        t = cfg.initial_temperature
        while t >= cfg.min_temperature:
            # the kind weights only change when a move is accepted
            wa = w_add if addable else 0.0
            wr = w_remove if matched else 0.0
            total = wa + wr + (w_swap if swappable else 0.0)
            war = wa + wr
            for _ in range(iters):
                if total == 0.0:
                    break
                r = uniform() * total
                if r < wa:
                    old = None
                    new = addable[int(uniform() * len(addable))]
                elif r < war:
                    i1 = matched[int(uniform() * len(matched))]
                    old = (i1, pairs[i1])
                    new = None
                else:
                    new = swappable[int(uniform() * len(swappable))]
                    a, b = new
                    old = (a, pairs[a]) if a in pairs else (reverse[b], b)
                # Without matched pairs below them, the change is local and
                # can be scored without touching the state. (In a swap the
                # removed pair is never a superclass pair of the added one.)
                speculative = True
                below = child_pairs.get(old)
                if below:
                    for c in below:
                        if pairs.get(c[0]) == c[1]:
                            speculative = False
                            break
                below = child_pairs.get(new)
                if below and speculative:
                    for c in below:
                        if pairs.get(c[0]) == c[1]:
                            speculative = False
                            break
                if speculative:
                    delta = -fitness_of[old] if old is not None else 0.0
                    if new is not None:
                        v = static[new]
                        above = parent_pairs.get(new)
                        if above:
                            for q in above:
                                if pairs.get(q[0]) == q[1] and fitness_of[q] > v:
                                    v = fitness_of[q]
                        delta += v
                else:
                    ops = _ops(old, new)
                    delta = apply(state, ops)
                # accept(), inlined
                if delta >= 0 or uniform() < exp(delta / t):
                    if speculative:
                        ops = _ops(old, new)
                        if delta < 0 and best_pairs is None:
                            best_pairs = dict(pairs)
                        apply(state, ops)
                    reindex(state, ops)
                    wa = w_add if addable else 0.0
                    wr = w_remove if matched else 0.0
                    total = wa + wr + (w_swap if swappable else 0.0)
                    war = wa + wr
                    if state.fitness > best_fitness + 1e-12:
                        best_fitness = state.fitness
                        best_pairs = None
                    elif not speculative and delta < 0 and best_pairs is None:
                        self.undo(state, ops)
                        best_pairs = dict(pairs)
                        apply(state, ops)
                elif not speculative:
                    self.undo(state, ops)
            t *= cfg.cooling_rate
        state.index = None
        if best_pairs is not None:
            state = self.rebuild(best_pairs.items())
        state.fitness = math.fsum(state.pair_fitness.values())
        return state

    def rebuild(self, pairs: Iterable[tuple[str, str]]) -> AlignmentState:
        state = AlignmentState()
        for i1, i2 in _ordered(pairs, self.ctx):
            self.add(state, i1, i2)
        state.fitness = math.fsum(state.pair_fitness.values())
        return state

    def anneal(self) -> AlignmentState:
        cfg = self.config
        seeds = [
            int(s.generate_state(1, dtype=np.uint64)[0])
            for s in np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
        ]
        best = None
        for i, seed in enumerate(seeds):
            state = self.run_chain(seed)
            logger.debug("chain %d: %d pairs, fitness %.6f", i, len(state), state.fitness)
            if best is None or state.fitness > best.fitness + 1e-12:
                best = state
        return best


def propose_move(state: AlignmentState, sims, rng, ctx: StructuralContext | None = None) -> AlignmentState:
    """Return a copy of ``state`` changed by exactly one random move.

    Raises :class:`NoMoveAvailable` when no add, remove or swap applies.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    annealer = Annealer(sims, ctx)
    new = state.copy()
    ops = annealer.draw(new, rng)
    if ops is None:
        raise NoMoveAvailable("no candidate pairs and nothing to remove")
    annealer.apply(new, ops)
    annealer.reindex(new, ops)
    new.index = None
    return new


def anneal(o1, o2, sims, config: SAConfig | None = None, ctx: StructuralContext | None = None) -> AlignmentState:
    """Run ``config.restarts`` seeded chains and return the fittest state."""
    if ctx is None:
        from .lexical import LexicalScorer

        ctx = StructuralContext(o1, o2, LexicalScorer(o1, o2), sims)
    return Annealer(sims, ctx, config).anneal()


def extract_alignment(
    state: AlignmentState,
    threshold: float,
    onto1: str = "",
    onto2: str = "",
) -> Alignment:
    """Keep pairs whose combined similarity reaches ``threshold``."""
    cells = [
        Correspondence(i1, i2, "=", min(1.0, max(0.0, state.pair_fitness[i1, i2])))
        for i1, i2 in sorted(state.pairs.items())
        if state.pair_fitness[i1, i2] >= threshold
    ]
    return Alignment(cells, onto1, onto2)
