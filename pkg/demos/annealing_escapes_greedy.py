"""Why the matcher anneals instead of taking the best pairs greedily.

Four classes on each side. The single best-looking pair A~Y blocks two
other good pairs, so the greedy matching settles below the optimum.
Annealing accepts some worsening moves early on while the temperature is
high, which lets it leave that trap.

    python demos/annealing_escapes_greedy.py
"""
from annealmatch import Annealer, EntityKind, EntityRef, Ontology, SAConfig, SimilarityMatrix, StructuralContext

A, B = "http://example.org/a#", "http://example.org/b#"


def classes(prefix, names, sub):
    refs = [EntityRef(prefix + n, EntityKind.CLASS) for n in names]
    return Ontology.build(prefix.rstrip("#").rsplit("/", 1)[-1], refs, {prefix + c: {prefix + p} for c, p in sub})


o1 = classes(A, "ABCD", [("C", "A"), ("D", "B")])
o2 = classes(B, "XYZW", [("Z", "X"), ("W", "Y")])
scores = {
    ("A", "X"): 0.8, ("A", "Y"): 0.9, ("B", "Y"): 0.85, ("B", "X"): 0.2,
    ("C", "Z"): 0.3, ("C", "W"): 0.5, ("D", "W"): 0.45, ("D", "Z"): 0.1,
}
sims = SimilarityMatrix(floor=0.0)
for (a, b), v in scores.items():
    sims.set(A + a, B + b, EntityKind.CLASS, v)
ctx = StructuralContext(o1, o2, None, sims)


def show(label, state):
    pairs = ", ".join(f"{a[-1]}~{b[-1]}" for a, b in sorted(state.pairs.items()))
    print(f"{label:>9}: fitness {state.fitness:.3f}  [{pairs}]")


annealer = Annealer(sims, ctx, SAConfig(seed=3))
show("greedy", annealer.initial_state())
# Subclass pairs inherit the fitness of a matched superclass pair, so C~Z
# and D~W become worth far more once A~X and B~Y are both in place.
show("annealed", annealer.anneal())
