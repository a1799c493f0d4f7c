"""How two entity names become one lexical score.

Names are split into words, stop words are dropped and the rest is stemmed.
Each pair of words is then compared by spelling (Jaro-Winkler) and by
meaning (Wu-Palmer over a noun taxonomy). A score under its threshold
counts as zero. Soft TF-IDF finally combines the word scores, weighting
rare words more heavily than common ones.

    python demos/similarity_walkthrough.py
"""
from pathlib import Path

from annealmatch import CorpusStats, WordNetTaxonomy, jaro_winkler, preprocess, soft_tfidf, wu_palmer
from annealmatch.lexical import base_token_similarity

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"
wn = WordNetTaxonomy.load(DATA / "conference.tsv")

# "isPartOf" is made only of stop words; rather than leave an empty name,
# the words are kept.
for raw in ("hasConferenceMember", "Accepted_Paper", "isPartOf", "PCMember"):
    bag = preprocess(raw)
    print(f"{raw:>20} -> {list(bag.tokens)}")

print("\nspelling: Jaro-Winkler (kept only at 0.9 or above)")
for a, b in (("review", "reviews"), ("author", "authors"), ("paper", "person")):
    print(f"  {a} / {b}: {jaro_winkler(a, b):.3f}")

print("\nmeaning: Wu-Palmer on the toy taxonomy (kept only at 0.95 or above)")
for a, b in (("paper", "article"), ("article", "contribution"), ("paper", "person")):
    print(f"  {a} / {b}: {wu_palmer(a, b, wn):.3f} -> counts as {base_token_similarity(a, b, wn):.3f}")

# The corpus decides how informative each word is: "paper" appears in most
# names here, so a match on it alone is weak evidence.
names = ["Paper", "Accepted_Paper", "Rejected_Paper", "Reviewer", "Contribution", "Accepted contribution"]
bags = [preprocess(n) for n in names]
stats = CorpusStats.from_bags(bags)
print("\nSoft TF-IDF over the six names above")
for i, j in ((1, 5), (1, 2), (0, 4)):
    print(f"  {names[i]} / {names[j]}: {soft_tfidf(bags[i], bags[j], stats, wn):.3f}")
