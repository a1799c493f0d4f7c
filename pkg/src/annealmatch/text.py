"""Entity-name cleaning: tokenization, stop-word removal and stemming."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import EmptyName
from .porter import stem

__all__ = [
    "TokenBag",
    "StopList",
    "tokenize",
    "remove_stopwords",
    "stem",
    "preprocess",
    "default_stoplist",
]

_SEPARATORS = re.compile(r"[\W_]+")


@dataclass(frozen=True)
class TokenBag:
    """Ordered word tokens of one name.

    ``surface`` optionally keeps the unstemmed form of each token (same
    length as ``tokens``); it does not take part in equality.
    """

    tokens: tuple[str, ...]
    source: str = ""
    surface: tuple[str, ...] = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "surface", tuple(self.surface))
        if self.surface and len(self.surface) != len(self.tokens):
            raise ValueError("surface forms must align with tokens")

    def surface_of(self) -> dict[str, str]:
        """First unstemmed form seen for each token."""
        out: dict[str, str] = {}
        for tok, surf in zip(self.tokens, self.surface or self.tokens):
            out.setdefault(tok, surf)
        return out

    def __add__(self, other: "TokenBag") -> "TokenBag":
        return TokenBag(
            self.tokens + other.tokens,
            " ".join(s for s in (self.source, other.source) if s),
            (self.surface or self.tokens) + (other.surface or other.tokens),
        )

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class StopList:
    words: frozenset[str]

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.words

    @classmethod
    def from_lines(cls, lines) -> "StopList":
        words = set()
        for line in lines:
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line.lower())
        return cls(frozenset(words))

    @classmethod
    def load(cls, path: str | Path) -> "StopList":
        return cls.from_lines(Path(path).read_text(encoding="utf-8").splitlines())


_default_stoplist = None


def default_stoplist() -> StopList:
    """The bundled Glasgow IR group stop list."""
    global _default_stoplist
    if _default_stoplist is None:
        text = resources.files("annealmatch").joinpath("data/glasgow_stopwords.txt").read_text("utf-8")
        _default_stoplist = StopList.from_lines(text.splitlines())
    return _default_stoplist


def _char_class(ch: str) -> str:
    if ch.isdigit():
        return "d"
    if ch.isupper():
        return "u"
    return "l"


def _split_chunk(chunk: str) -> list[str]:
    # boundaries: letter/digit changes, lower->Upper, and the last capital of an
    # acronym run when it starts a lowercase word ("NCIThesaurus" -> NCI|Thesaurus)
    parts = []
    start = 0
    classes = [_char_class(ch) for ch in chunk]
    for i in range(1, len(chunk)):
        a, b = classes[i - 1], classes[i]
        cut = False
        if (a == "d") != (b == "d"):
            cut = True
        elif a == "l" and b == "u":
            cut = True
        elif a == "u" and b == "u" and i + 1 < len(chunk) and classes[i + 1] == "l":
            cut = True
        if cut:
            parts.append(chunk[start:i])
            start = i
    parts.append(chunk[start:])
    return parts


def tokenize(raw: str) -> TokenBag:
    """Split a raw entity name into lowercase word tokens.

    >>> tokenize("hasAuthor_Name").tokens
    ('has', 'author', 'name')
    """
    tokens = []
    for chunk in _SEPARATORS.split(raw):
        for part in _split_chunk(chunk) if chunk else ():
            # lowercasing can emit combining marks, so split once more
            tokens.extend(t for t in _SEPARATORS.split(part.lower()) if t)
    if not tokens:
        raise EmptyName(f"name {raw!r} yields no tokens")
    return TokenBag(tokens, raw)


def remove_stopwords(bag: TokenBag, stops: StopList) -> TokenBag:
    kept = [t for t in bag.tokens if t not in stops]
    if not kept:
        return bag
    return TokenBag(kept, bag.source)


def preprocess(raw: str, stops: StopList | None = None) -> TokenBag:
    """tokenize -> remove stop words -> Porter-stem each token."""
    if stops is None:
        stops = default_stoplist()
    bag = remove_stopwords(tokenize(raw), stops)
    return TokenBag([stem(t) for t in bag.tokens], raw, bag.tokens)
