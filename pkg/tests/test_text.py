from hypothesis import given
from hypothesis import strategies as st

from queryforge.text import (
    STOPWORDS_EN,
    first_initial,
    last_name,
    normalize,
    remove_stopwords,
    stopword_list,
    tokenize,
    trigram_codes,
)


def test_tokenize_keeps_intraword_apostrophes():
    assert tokenize("Don't Panic!") == ["don't", "panic"]
    assert tokenize("The Hitchhiker's Guide to the Galaxy") == [
        "the",
        "hitchhiker's",
        "guide",
        "to",
        "the",
        "galaxy",
    ]


def test_tokenize_splits_on_punctuation_and_keeps_numbers():
    assert tokenize("MOMA – A Mapping-based Object Matching System") == [
        "moma",
        "a",
        "mapping",
        "based",
        "object",
        "matching",
        "system",
    ]
    assert tokenize("The question to 42") == ["the", "question", "to", "42"]


def test_tokenize_handles_unicode_apostrophe():
    assert tokenize("Don’t") == ["don't"]


def test_stopword_removal():
    tokens = tokenize("The question to 42")
    assert remove_stopwords(tokens, STOPWORDS_EN) == ["question", "42"]


def test_stopword_list_lookup():
    assert stopword_list("english-default") is STOPWORDS_EN
    assert stopword_list("none") == frozenset()
    try:
        stopword_list("no-such-list")
    except KeyError:
        pass
    else:
        raise AssertionError("expected KeyError")


def test_name_helpers():
    assert last_name("J. Smith") == "smith"
    assert last_name("Smith") == "smith"
    assert first_initial("J. Smith") == "j"
    assert first_initial("Smith") is None


@given(st.text(max_size=60))
def test_tokenize_is_lowercase_and_normalize_idempotent(text):
    tokens = tokenize(text)
    assert all(t == t.lower() for t in tokens)
    assert normalize(normalize(text)) == normalize(text)


def test_trigram_codes_sorted_and_cached():
    codes = trigram_codes("question 42")
    assert list(codes) == sorted(codes)
    assert trigram_codes("question 42") is codes  # lru cache hit
    assert len(trigram_codes("ab")) == 0
