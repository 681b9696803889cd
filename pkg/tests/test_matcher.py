import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from queryforge.corpus import Publication
from queryforge.matcher import (
    MatchConfig,
    author_sim,
    match,
    title_sim,
    year_sim,
)

from .oracles import trigram_dice


class TestYearSim:
    def test_spot_values(self):
        assert year_sim(2005, 2005) == 1.0
        assert year_sim(2000, 2003) == 0.7
        assert year_sim(1990, 2005) == 0.0
        assert year_sim(1990, 2000) == 0.0  # difference capped at 10

    def test_symmetry_and_equality_iff_one(self):
        for y1 in range(1990, 2010, 3):
            for y2 in range(1990, 2010, 3):
                assert year_sim(y1, y2) == year_sim(y2, y1)
                assert (year_sim(y1, y2) == 1.0) == (y1 == y2)
                assert 0.0 <= year_sim(y1, y2) <= 1.0


class TestAuthorSim:
    def test_identity(self):
        assert author_sim(["Smith", "Jones"], ["Smith", "Jones"]) == 1.0

    def test_partial_overlap_normalized_by_longer_list(self):
        assert author_sim(["Williams", "Smith"], ["Smith"]) == 0.5

    def test_first_initial_mismatch(self):
        assert author_sim(["J. Smith"], ["K. Smith"]) == 0.0

    def test_missing_first_name_matches_on_last_name(self):
        assert author_sim(["Smith"], ["J. Smith"]) == 1.0

    def test_order_insensitive(self):
        assert author_sim(["A. Abel", "B. Berg"], ["B. Berg", "A. Abel"]) == 1.0

    def test_one_to_one_assignment(self):
        # the duplicate "J. Smith" on the left can only consume one right name
        assert author_sim(["J. Smith", "J. Smith"], ["J. Smith"]) == 0.5

    def test_case_insensitive(self):
        assert author_sim(["alice keller"], ["Alice KELLER"]) == 1.0

    @given(
        st.lists(st.sampled_from(["A. Abel", "B. Berg", "C. Cole", "Abel"]), min_size=1, max_size=4),
        st.lists(st.sampled_from(["A. Abel", "B. Berg", "C. Cole", "Abel"]), min_size=1, max_size=4),
    )
    def test_symmetric_and_bounded(self, a1, a2):
        s = author_sim(a1, a2)
        assert s == author_sim(a2, a1)
        assert 0.0 <= s <= 1.0


class TestTitleSim:
    def test_normalization_identity(self):
        assert title_sim("Don't Panic!", "don't panic") == 1.0

    def test_reflexive(self, small_corpus):
        for pub in list(small_corpus)[:20]:
            assert title_sim(pub.title, pub.title) == 1.0

    def test_unrelated_below_threshold(self):
        value = title_sim("The question to 42", "completely unrelated words")
        assert value == pytest.approx(trigram_dice("The question to 42", "completely unrelated words"))
        assert value < 0.8

    def test_small_typo_stays_above_threshold(self):
        assert title_sim("Entity matching systems", "Entity matcing systems") >= 0.8

    def test_short_unequal_strings(self):
        assert title_sim("ab", "xy") == 0.0

    @given(st.text(max_size=40), st.text(max_size=40))
    def test_agrees_with_counter_oracle(self, t1, t2):
        assert title_sim(t1, t2) == pytest.approx(trigram_dice(t1, t2))

    @given(st.text(max_size=40), st.text(max_size=40))
    def test_symmetric(self, t1, t2):
        assert title_sim(t1, t2) == pytest.approx(title_sim(t2, t1))


def _copy(pub: Publication, new_id: str, **changes) -> Publication:
    data = pub.to_dict()
    data["id"] = new_id
    data.update(changes)
    return Publication.from_dict(data)


class TestMatch:
    def test_exact_copies_identity(self, table1_pubs):
        copies = [_copy(p, f"{p.id}~0") for p in table1_pubs]
        mapping = match(table1_pubs, copies)
        assert len(mapping) == 3
        assert {(p.s_id, p.t_id) for p in mapping.pairs} == {
            ("s1", "s1~0"),
            ("s2", "s2~0"),
            ("s3", "s3~0"),
        }
        for pair in mapping.pairs:
            assert pair.author_sim == pair.title_sim == pair.year_sim == 1.0

    def test_year_shift_excluded(self, table1_pubs):
        shifted = [_copy(table1_pubs[0], "s1~1", year=2006)]
        mapping = match(table1_pubs, shifted)
        assert len(mapping) == 0  # year_sim 0.9 < 1.0 threshold

    def test_year_shift_accepted_with_relaxed_threshold(self, table1_pubs):
        shifted = [_copy(table1_pubs[0], "s1~1", year=2006)]
        mapping = match(table1_pubs, shifted, MatchConfig(year_threshold=0.9))
        assert {(p.s_id, p.t_id) for p in mapping.pairs} == {("s1", "s1~1")}

    def test_empty_results(self, table1_pubs):
        assert len(match(table1_pubs, [])) == 0
        assert len(match([], table1_pubs)) == 0

    def test_many_to_many(self, table1_pubs):
        dupes = [_copy(table1_pubs[0], "s1~0"), _copy(table1_pubs[0], "s1~1")]
        mapping = match(table1_pubs, dupes)
        assert {(p.s_id, p.t_id) for p in mapping.pairs} == {("s1", "s1~0"), ("s1", "s1~1")}
        assert mapping.domain_ids() == {"s1"}
        assert mapping.range_ids() == {"s1~0", "s1~1"}

    def test_threshold_soundness_brute_force(self):
        rng = random.Random(17)
        titles = [
            "graph mining methods",
            "graph mining method",
            "entity search engines",
            "completely different topic",
        ]
        names = [["A. Abel"], ["A. Abel", "B. Berg"], ["C. Cole"]]
        config = MatchConfig()
        for _ in range(25):
            inputs = [
                Publication(f"s{i}", tuple(rng.choice(names)), rng.choice(titles),
                            rng.choice([2000, 2001]), "V")
                for i in range(rng.randint(1, 4))
            ]
            results = [
                Publication(f"t{i}", tuple(rng.choice(names)), rng.choice(titles),
                            rng.choice([2000, 2001]), "V")
                for i in range(rng.randint(0, 6))
            ]
            mapping = match(inputs, results, config)
            got = {(p.s_id, p.t_id) for p in mapping.pairs}
            expected = {
                (s.id, t.id)
                for s in inputs
                for t in results
                if year_sim(s.year, t.year) >= config.year_threshold
                and author_sim(s.authors, t.authors) >= config.author_threshold
                and title_sim(s.title, t.title) >= config.title_threshold
            }
            assert got == expected

    def test_config_validation(self):
        with pytest.raises(ValueError):
            MatchConfig(author_threshold=1.2)
