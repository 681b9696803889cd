"""Tokenization, stopwords and trigram utilities shared by all modules.

All string comparisons in the package are case insensitive and operate on the
token stream produced by :func:`tokenize`: lowercase, split on any
non-alphanumeric character except intra-word apostrophes, so "Don't Panic!"
becomes ``["don't", "panic"]``.
"""

from __future__ import annotations

import re
from array import array
from functools import lru_cache

_TOKEN_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercased tokens; intra-word apostrophes are kept inside the token."""
    return _TOKEN_RE.findall(text.replace("’", "'").lower())


def normalize(text: str) -> str:
    """Canonical form used for whole-string comparisons."""
    return " ".join(tokenize(text))


def normalize_name(name: str) -> str:
    """Canonical form of a person name (lowercase, collapsed whitespace)."""
    return " ".join(name.lower().split())


def last_name(name: str) -> str:
    """Final whitespace-separated token of a name, lowercased."""
    parts = name.split()
    return parts[-1].lower() if parts else ""


def first_initial(name: str) -> str | None:
    """First letter of the first name, or None for single-token names."""
    parts = name.split()
    if len(parts) < 2:
        return None
    return parts[0][0].lower()


# Fixed English stopword list, referenced by id from generator specs so that
# keyword extraction is reproducible across runs and machines.
STOPWORDS_EN = frozenset(
    """a about an and are as at be been but by for from had has have he her his
    how if in into is it its more no not of on or our she so that the their
    then there these they this to was we were what when which who will with
    you your""".split()
)

STOPWORD_LISTS: dict[str, frozenset[str]] = {
    "english-default": STOPWORDS_EN,
    "none": frozenset(),
}


def stopword_list(list_id: str) -> frozenset[str]:
    try:
        return STOPWORD_LISTS[list_id]
    except KeyError:
        raise KeyError(f"unknown stopword list id: {list_id!r}") from None


def remove_stopwords(tokens: list[str], stopwords: frozenset[str]) -> list[str]:
    return [t for t in tokens if t not in stopwords]


# Character trigrams are interned into a shared integer code space so that the
# similarity kernels can work on sorted int arrays instead of strings.
_TRIGRAM_IDS: dict[str, int] = {}


@lru_cache(maxsize=262144)
def trigram_codes(text: str) -> array:
    """Sorted trigram-code multiset of the normalized form of ``text``."""
    norm = normalize(text)
    ids = _TRIGRAM_IDS
    codes = array("i")
    for i in range(len(norm) - 2):
        gram = norm[i : i + 3]
        code = ids.get(gram)
        if code is None:
            code = len(ids)
            ids[gram] = code
        codes.append(code)
    return array("i", sorted(codes))
