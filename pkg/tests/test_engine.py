import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from queryforge.corpus import Corpus, Publication, build_index, zero_noise
from queryforge.engine import (
    BasicQuery,
    EngineCapabilities,
    EngineIndex,
    PredicateSpec,
    Query,
    QueryRejected,
    ResultPage,
    SearchValue,
    caps_from_dict,
    caps_to_dict,
    execute,
    load_caps,
    save_caps,
    scholar_profile,
    serialize_query,
    term_matches,
    validate,
)

AMAZON_LIKE = EngineCapabilities(
    id="amazon-like",
    predicates=(
        PredicateSpec("title", "field-scoped", "title", frozenset(("value", "keywords", "phrase"))),
        PredicateSpec("free", "free", None, frozenset(("value", "keywords", "phrase"))),
    ),
    supports_or=True,
    max_disjuncts=10,
    page_size=12,
    max_pages=10,
    soft_and_threshold=1.0,
)


def q_intitle(value: SearchValue) -> Query:
    return Query.single(("intitle", value))


class TestValidate:
    def test_intitle_keywords_ok(self, scholar_caps):
        query = q_intitle(SearchValue.keywords(["question", "42"]))
        assert validate(query, scholar_caps) is None

    def test_pattern_rejected_without_capability(self):
        query = Query.single(("title", SearchValue.pattern(["moma", "*", "object"])))
        rejection = validate(query, AMAZON_LIKE)
        assert rejection is not None
        assert rejection.code == "unsupported-value-kind"

    def test_too_many_disjuncts(self, scholar_caps):
        basic = BasicQuery((("intitle", SearchValue.keywords(["x"])),))
        query = Query(tuple(basic for _ in range(11)))
        assert validate(query, scholar_caps).code == "too-many-disjuncts"

    def test_unknown_predicate(self, scholar_caps):
        query = Query.single(("isbn", SearchValue.value("42")))
        assert validate(query, scholar_caps).code == "unknown-predicate"

    def test_or_not_supported(self):
        caps = EngineCapabilities(
            id="no-or",
            predicates=(PredicateSpec("free", "free", None, frozenset(("keywords",))),),
            supports_or=False,
            max_disjuncts=1,
            page_size=10,
            max_pages=10,
            soft_and_threshold=1.0,
        )
        basic = BasicQuery((("free", SearchValue.keywords(["x"])),))
        assert validate(Query((basic, basic)), caps).code == "or-not-supported"

    def test_execute_raises_on_invalid(self, table1_corpus, scholar_caps):
        index, _ = build_index(table1_corpus, zero_noise())
        query = Query.single(("isbn", SearchValue.value("42")))
        with pytest.raises(QueryRejected):
            execute(index, query, 1, scholar_caps)


class TestTermMatches:
    INTITLE = scholar_profile().predicate("intitle")
    AUTHOR = scholar_profile().predicate("author")
    YEAR = scholar_profile().predicate("year")
    FREE = scholar_profile().predicate("free")

    MOMA = Publication(
        "tr07", ("A. Thor", "E. Rahm"), "MOMA – A Mapping-based Object Matching System",
        2007, "CIDR 2007",
    )

    def test_pattern_with_wildcards(self):
        value = SearchValue.pattern(["MOMA", "*", "*", "*", "Object"])
        assert term_matches(self.MOMA, self.INTITLE, value)

    def test_keywords_with_apostrophe(self):
        pub = Publication("s2", ("Williams", "Smith"), "Don't Panic!", 2005, "V 2005")
        assert term_matches(pub, self.INTITLE, SearchValue.keywords(["don't", "panic"]))

    def test_phrase_mismatch(self):
        pub = Publication("s1", ("Smith",), "The question to 42", 2005, "V 2005")
        assert not term_matches(pub, self.INTITLE, SearchValue.phrase("question 43"))
        assert term_matches(pub, self.INTITLE, SearchValue.phrase("question to 42"))

    def test_value_on_year_and_authors(self):
        assert term_matches(self.MOMA, self.YEAR, SearchValue.value("2007"))
        assert not term_matches(self.MOMA, self.YEAR, SearchValue.value("2006"))
        assert not term_matches(self.MOMA, self.YEAR, SearchValue.value("n/a"))
        assert term_matches(self.MOMA, self.AUTHOR, SearchValue.value("thor"))
        assert not term_matches(self.MOMA, self.AUTHOR, SearchValue.value("smith"))

    def test_free_concatenates_all_fields(self):
        assert term_matches(self.MOMA, self.FREE, SearchValue.keywords(["rahm", "moma"]))
        assert term_matches(self.MOMA, self.FREE, SearchValue.value("2007"))
        assert term_matches(self.MOMA, self.FREE, SearchValue.keywords(["cidr"]))
        assert not term_matches(self.MOMA, self.FREE, SearchValue.keywords(["panic"]))

    def test_wildcard_needs_exactly_one_token(self):
        pub = Publication("x", ("A",), "alpha beta gamma", 2000, "V")
        assert term_matches(pub, self.INTITLE, SearchValue.pattern(["alpha", "*", "gamma"]))
        assert not term_matches(pub, self.INTITLE, SearchValue.pattern(["alpha", "*", "*", "gamma"]))


class TestExecute:
    def test_author_smith_on_table1(self, table1_corpus, scholar_caps):
        index, _ = build_index(table1_corpus, zero_noise())
        query = Query.single(("author", SearchValue.value("smith")))
        page = execute(index, query, 1, scholar_caps)
        assert sorted(e.id for e in page.entities) == ["s1~0", "s2~0"]
        assert not page.has_next
        again = execute(index, query, 1, scholar_caps)
        assert [e.id for e in again.entities] == [e.id for e in page.entities]

    def test_pagination_519_matches(self, scholar_caps):
        pubs = [
            Publication(f"m{i:03d}", ("Prolific Author",), f"Title number {i}", 2000, "V 2000")
            for i in range(519)
        ]
        pubs += [
            Publication(f"o{i:03d}", ("Other Person",), f"Unrelated thing {i}", 2000, "V 2000")
            for i in range(40)
        ]
        index, _ = build_index(Corpus(pubs), zero_noise())
        query = Query.single(("author", SearchValue.value("prolific")))
        sizes = []
        page_no = 1
        while True:
            page = execute(index, query, page_no, scholar_caps)
            sizes.append(len(page.entities))
            if not page.has_next:
                break
            page_no += 1
        assert sizes == [100, 100, 100, 100, 100, 19]
        beyond = execute(index, query, 7, scholar_caps)
        assert beyond.entities == () and not beyond.has_next

    def test_page_beyond_max_pages_cuts_next(self):
        pubs = [
            Publication(f"m{i}", ("Busy Person",), f"Work item {i}", 2000, "V") for i in range(35)
        ]
        caps = EngineCapabilities(
            id="tiny",
            predicates=(PredicateSpec("author", "field-scoped", "authors",
                                      frozenset(("value",))),),
            supports_or=True,
            max_disjuncts=10,
            page_size=10,
            max_pages=2,
            soft_and_threshold=1.0,
        )
        index, _ = build_index(Corpus(pubs), zero_noise())
        query = Query.single(("author", SearchValue.value("busy")))
        first = execute(index, query, 1, caps)
        second = execute(index, query, 2, caps)
        assert first.has_next
        assert not second.has_next  # page == max_pages, although more entities exist
        assert len(second.entities) == 10


def _random_index(rng: random.Random, n: int) -> EngineIndex:
    vocab = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"]
    names = ["Anna Abel", "Ben Berg", "Cara Cole", "Dan Dorn"]
    pubs = []
    for i in range(n):
        pubs.append(
            Publication(
                f"e{i}",
                tuple(rng.sample(names, rng.randint(1, 2))),
                " ".join(rng.choices(vocab, k=rng.randint(1, 4))),
                rng.choice([2000, 2001, 2002]),
                rng.choice(["V 2000", "W 2001"]),
            )
        )
    return EngineIndex(pubs, seed=rng.randint(0, 999))


def _random_query(rng: random.Random, caps: EngineCapabilities) -> Query:
    vocab = ["alpha", "beta", "gamma", "delta", "epsilon", "zeta"]
    disjuncts = []
    for _ in range(rng.randint(1, 3)):
        terms = []
        for _ in range(rng.randint(1, 2)):
            choice = rng.random()
            if choice < 0.4:
                terms.append(
                    ("intitle", SearchValue.keywords(rng.choices(vocab, k=rng.randint(1, 2))))
                )
            elif choice < 0.6:
                terms.append(("intitle", SearchValue.phrase(" ".join(rng.choices(vocab, k=2)))))
            elif choice < 0.75:
                items = [rng.choice(vocab), "*", rng.choice(vocab)]
                terms.append(("intitle", SearchValue.pattern(items)))
            elif choice < 0.9:
                terms.append(("author", SearchValue.value(rng.choice(["abel", "berg", "cole"]))))
            else:
                terms.append(("year", SearchValue.value(str(rng.choice([2000, 2001])))))
        disjuncts.append(BasicQuery(tuple(terms)))
    return Query(tuple(disjuncts))


def _all_entities(index, query, caps):
    ids = []
    page_no = 1
    while True:
        page = execute(index, query, page_no, caps)
        ids.extend(e.id for e in page.entities)
        if not page.has_next:
            break
        page_no += 1
    return ids


class TestExecutionProperties:
    def test_strict_and_matches_brute_force(self, scholar_caps):
        rng = random.Random(42)
        for _ in range(30):
            index = _random_index(rng, rng.randint(1, 25))
            query = _random_query(rng, scholar_caps)
            got = set(_all_entities(index, query, scholar_caps))
            expected = set()
            for entity in index.entries:
                for bq in query.disjuncts:
                    if all(
                        term_matches(entity, scholar_caps.predicate(name), value)
                        for name, value in bq.terms
                    ):
                        expected.add(entity.id)
                        break
            assert got == expected

    def test_soft_and_matches_brute_force(self):
        caps = EngineCapabilities(
            id="soft",
            predicates=scholar_profile().predicates,
            supports_or=True,
            max_disjuncts=10,
            page_size=100,
            max_pages=10,
            soft_and_threshold=0.5,
        )
        rng = random.Random(7)
        for _ in range(30):
            index = _random_index(rng, rng.randint(1, 25))
            query = _random_query(rng, caps)
            got = set(_all_entities(index, query, caps))
            expected = set()
            for entity in index.entries:
                for bq in query.disjuncts:
                    hits = sum(
                        term_matches(entity, caps.predicate(name), value)
                        for name, value in bq.terms
                    )
                    if hits / len(bq.terms) >= 0.5:
                        expected.add(entity.id)
                        break
            assert got == expected

    def test_or_union(self, scholar_caps):
        rng = random.Random(3)
        for _ in range(25):
            index = _random_index(rng, rng.randint(1, 20))
            q1 = _random_query(rng, scholar_caps)
            q2 = _random_query(rng, scholar_caps)
            if len(q1.disjuncts) + len(q2.disjuncts) > scholar_caps.max_disjuncts:
                continue
            combined = Query(q1.disjuncts + q2.disjuncts)
            union = set(_all_entities(index, q1, scholar_caps)) | set(
                _all_entities(index, q2, scholar_caps)
            )
            assert set(_all_entities(index, combined, scholar_caps)) == union

    def test_pagination_partition(self):
        caps = EngineCapabilities(
            id="paged",
            predicates=scholar_profile().predicates,
            supports_or=True,
            max_disjuncts=10,
            page_size=3,
            max_pages=50,
            soft_and_threshold=1.0,
        )
        rng = random.Random(11)
        for _ in range(25):
            index = _random_index(rng, rng.randint(1, 30))
            query = _random_query(rng, caps)
            pages = []
            page_no = 1
            while True:
                page = execute(index, query, page_no, caps)
                pages.append(page)
                if not page.has_next:
                    break
                page_no += 1
            ids = [e.id for p in pages for e in p.entities]
            assert len(ids) == len(set(ids))
            for page in pages[:-1]:
                assert len(page.entities) == caps.page_size
            full = _all_entities(index, query, caps)
            assert ids == full

    def test_monotone_relaxation(self, scholar_caps):
        rng = random.Random(5)
        intitle = scholar_profile().predicate("intitle")
        for _ in range(60):
            index = _random_index(rng, rng.randint(1, 20))
            entity = index.entries[rng.randrange(len(index.entries))]
            tokens = entity.title.split()
            phrase = SearchValue.phrase(entity.title)
            keywords = SearchValue.keywords(tokens)
            pattern_items = [
                t if i % 2 == 0 else "*" for i, t in enumerate(tokens)
            ]
            if all(t == "*" for t in pattern_items):
                pattern_items[0] = tokens[0]
            pattern = SearchValue.pattern(pattern_items)
            for other in index.entries:
                if term_matches(other, intitle, phrase):
                    assert term_matches(other, intitle, keywords)
                    assert term_matches(other, intitle, pattern)


class TestProfilesAndSerialization:
    def test_scholar_profile_values(self, scholar_caps):
        assert scholar_caps.page_size == 100
        assert scholar_caps.supports_or
        assert scholar_caps.max_disjuncts == 10
        assert scholar_caps.soft_and_threshold == 1.0
        intitle = scholar_caps.predicate("intitle")
        assert "pattern" in intitle.value_kinds
        assert {p.name for p in scholar_caps.predicates} == {"intitle", "author", "year", "free"}

    def test_caps_file_round_trip(self, tmp_path, scholar_caps):
        path = tmp_path / "scholar.caps"
        save_caps(scholar_caps, path)
        assert load_caps(path) == scholar_caps

    def test_bundled_profiles_parse(self):
        bundled = load_caps("configs/engines/google-scholar.caps")
        assert bundled == scholar_profile()
        amazon = load_caps("configs/engines/amazon-books.caps")
        assert amazon.page_size == 12
        assert "pattern" not in amazon.predicate("title").value_kinds
        assert load_caps("configs/engines/ebay.caps").page_size == 200
        product = load_caps("configs/engines/product-search.caps")
        assert "pattern" in product.predicate("name").value_kinds

    def test_caps_dict_round_trip(self, scholar_caps):
        assert caps_from_dict(caps_to_dict(scholar_caps)) == scholar_caps

    def test_serialize_query(self):
        query = Query(
            (
                BasicQuery(
                    (
                        ("intitle", SearchValue.keywords(["question", "42"])),
                        ("year", SearchValue.value("2005")),
                    )
                ),
                BasicQuery((("intitle", SearchValue.phrase("Don't Panic!")),)),
            )
        )
        assert serialize_query(query) == (
            'intitle:(keywords question 42) AND year:(value 2005)'
            ' OR intitle:(phrase "Don\'t Panic!")'
        )
        pattern_q = Query.single(("intitle", SearchValue.pattern(["moma", "*", "object"])))
        assert serialize_query(pattern_q) == "intitle:(pattern moma * object)"

    def test_capability_invariants(self):
        with pytest.raises(ValueError):
            EngineCapabilities("x", (), True, 10, 0, 10, 1.0)
        with pytest.raises(ValueError):
            EngineCapabilities("x", (), False, 10, 10, 10, 1.0)
        with pytest.raises(ValueError):
            EngineCapabilities("x", (), True, 10, 10, 10, 0.0)

    def test_search_value_invariants(self):
        with pytest.raises(ValueError):
            SearchValue.keywords([])
        with pytest.raises(ValueError):
            SearchValue.pattern(["*", "*"])
        with pytest.raises(ValueError):
            BasicQuery(())
        with pytest.raises(ValueError):
            Query(())
