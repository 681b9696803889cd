"""Automatic entity matching between input sets and search results.

A pair of publications is accepted into the mapping when all three attribute
similarities reach their thresholds: author lists are compared by last name
plus first initial under a maximum one-to-one assignment, titles by the Dice
coefficient over character trigrams of the normalized token stream, and
years by a capped linear distance. Accepted pairs keep their similarity
values for later audit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import kernels
from .corpus import Publication
from .text import first_initial, last_name, normalize, trigram_codes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchConfig:
    author_threshold: float = 0.5
    title_threshold: float = 0.8
    year_threshold: float = 1.0

    def __post_init__(self):
        for name in ("author_threshold", "title_threshold", "year_threshold"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")

    def to_dict(self) -> dict:
        return {
            "author_threshold": self.author_threshold,
            "title_threshold": self.title_threshold,
            "year_threshold": self.year_threshold,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "MatchConfig":
        return cls(**dict(data))


@dataclass(frozen=True)
class MatchPair:
    s_id: str
    t_id: str
    author_sim: float
    title_sim: float
    year_sim: float


@dataclass(frozen=True)
class MatchMapping:
    """The set of (input, result) pairs judged to be the same entity."""

    pairs: tuple[MatchPair, ...]

    def domain_ids(self) -> set[str]:
        return {p.s_id for p in self.pairs}

    def range_ids(self) -> set[str]:
        return {p.t_id for p in self.pairs}

    def __len__(self) -> int:
        return len(self.pairs)


def year_sim(y1: int, y2: int) -> float:
    """1 - min(|y1 - y2|, 10) / 10; equal years score exactly 1."""
    return 1.0 - min(abs(y1 - y2), 10) / 10


def _name_key(name: str) -> tuple[str, str | None]:
    if len(name.split()) > 2:
        # compound surnames get reduced to their final token; fragile but rare
        logger.debug("multi-part name %r keyed on final token only", name)
    return last_name(name), first_initial(name)


def _names_agree(key1: tuple[str, str | None], key2: tuple[str, str | None]) -> bool:
    last1, init1 = key1
    last2, init2 = key2
    if last1 != last2 or not last1:
        return False
    if init1 is None or init2 is None:  # a name lacking a first name matches on last name
        return True
    return init1 == init2


def _max_matching(keys1: Sequence, keys2: Sequence) -> int:
    """Maximum one-to-one agreement matching (augmenting paths; lists are tiny)."""
    adjacency = [
        [j for j, k2 in enumerate(keys2) if _names_agree(k1, k2)] for k1 in keys1
    ]
    matched_to: list[int | None] = [None] * len(keys2)

    def try_assign(i: int, seen: list[bool]) -> bool:
        for j in adjacency[i]:
            if not seen[j]:
                seen[j] = True
                if matched_to[j] is None or try_assign(matched_to[j], seen):
                    matched_to[j] = i
                    return True
        return False

    count = 0
    for i in range(len(keys1)):
        if try_assign(i, [False] * len(keys2)):
            count += 1
    return count


def author_sim(authors1: Iterable[str], authors2: Iterable[str]) -> float:
    """Fraction of one-to-one name agreements, normalized by the longer list."""
    keys1 = [_name_key(n) for n in authors1]
    keys2 = [_name_key(n) for n in authors2]
    if not keys1 or not keys2:
        return 0.0
    return _max_matching(keys1, keys2) / max(len(keys1), len(keys2))


def title_sim(title1: str, title2: str) -> float:
    """Trigram Dice similarity of the normalized titles."""
    norm1, norm2 = normalize(title1), normalize(title2)
    if norm1 == norm2:
        return 1.0
    codes1, codes2 = trigram_codes(title1), trigram_codes(title2)
    if not codes1 and not codes2:
        return 0.0  # both too short for trigrams but not equal
    return kernels.dice_sorted(codes1, codes2)


def match(
    inputs: Sequence[Publication],
    results: Sequence[Publication],
    config: MatchConfig = MatchConfig(),
) -> MatchMapping:
    """All (s, t) pairs meeting every threshold; many-to-many is permitted."""
    pairs: list[MatchPair] = []
    for s in inputs:
        for t in results:
            y = year_sim(s.year, t.year)
            if y < config.year_threshold:
                continue
            a = author_sim(s.authors, t.authors)
            if a < config.author_threshold:
                continue
            ti = title_sim(s.title, t.title)
            if ti < config.title_threshold:
                continue
            pairs.append(MatchPair(s.id, t.id, a, ti, y))
    return MatchMapping(tuple(pairs))
