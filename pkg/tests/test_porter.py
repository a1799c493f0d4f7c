import csv

import pytest

from annealmatch.porter import stem

from helpers import DATA


def lexicon():
    with open(DATA / "porter_lexicon.tsv", encoding="utf-8") as fh:
        rows = csv.reader((line for line in fh if not line.startswith("#")), delimiter="\t")
        return [(w, s) for w, s in rows]


def test_lexicon_size():
    assert len(lexicon()) >= 200


def test_lexicon_agreement():
    wrong = [(w, s, stem(w)) for w, s in lexicon() if stem(w) != s]
    assert wrong == []


def test_idempotent_where_the_oracle_is():
    # Porter is not idempotent in general ("agreed" -> "agre" -> "agr"), so
    # only words whose stem the reference implementation leaves fixed count
    porter = pytest.importorskip("nltk.stem.porter")
    oracle = porter.PorterStemmer(mode=porter.PorterStemmer.ORIGINAL_ALGORITHM)
    checked = 0
    for w, s in lexicon():
        if oracle.stem(s) == s:
            assert stem(stem(w)) == stem(w), w
            checked += 1
    assert checked >= 200


@pytest.mark.parametrize(
    "word, expected",
    [("caresses", "caress"), ("ponies", "poni"), ("a", "a"), ("is", "is"), ("ties", "ti")],
)
def test_examples(word, expected):
    assert stem(word) == expected


# the worked example of every rule of Porter's algorithm, step by step
RULE_EXAMPLES = {
    "1a": "caresses ponies ties caress cats",
    "1b": "feed agreed plastered bled motoring sing",
    "1b cleanup": "conflated troubled sized hopping tanned falling hissing fizzed failing filing",
    "1c": "happy sky",
    "2": "relational conditional rational valenci hesitanci digitizer conformabli radicalli differentli "
         "vileli analogousli vietnamization predication operator feudalism decisiveness hopefulness "
         "callousness formaliti sensitiviti sensibiliti",
    "3": "triplicate formative formalize electriciti electrical hopeful goodness",
    "4": "revival allowance inference airliner gyroscopic adjustable defensible irritant replacement "
         "adjustment dependent adoption homologou communism activate angulariti homologous effective bowdlerize",
    "5a": "probate rate cease",
    "5b": "controll roll",
}


def rule_examples():
    return [w for words in RULE_EXAMPLES.values() for w in words.split()]


def test_every_rule_example_is_in_the_lexicon():
    words = {w for w, _ in lexicon()}
    assert len(rule_examples()) == 75
    assert [w for w in rule_examples() if w not in words] == []
