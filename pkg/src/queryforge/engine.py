"""Entity-search-engine simulator.

A declarative capability profile describes what an engine accepts (which
search predicates, which value kinds, whether basic queries may be
OR-combined, how many result entities fit on one page). Queries are ASTs:
a query is a disjunction of basic queries, a basic query a conjunction of
(predicate, search value) terms. Execution runs against an immutable
in-process index with soft-conjunction semantics: an entity matches a basic
query when the fraction of its terms it satisfies reaches the engine's
threshold (1.0 = strict AND). Results are ranked by that fraction, ties
broken by a static per-entity rank assigned at index build, and returned in
pages of at most ``page_size`` entities with a "next link" flag.
"""

from __future__ import annotations

import json
import random
from array import array
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from . import kernels
from .text import tokenize

if TYPE_CHECKING:
    from .corpus import Publication

CAPS_FORMAT = "qf-caps-1"

FIELDS = ("authors", "title", "year", "venue")
VALUE_KINDS = ("value", "keywords", "phrase", "pattern")

WILDCARD = "*"


class CapabilityError(ValueError):
    """Invalid capability profile or capability file."""


@dataclass(frozen=True)
class PredicateSpec:
    """One search predicate: a named condition of the engine's search form."""

    name: str
    kind: str  # "field-scoped" or "free"
    field: str | None = None
    value_kinds: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.kind not in ("field-scoped", "free"):
            raise CapabilityError(f"predicate {self.name}: bad kind {self.kind!r}")
        if self.kind == "field-scoped" and self.field not in FIELDS:
            raise CapabilityError(f"predicate {self.name}: bad field {self.field!r}")
        if not self.value_kinds:
            raise CapabilityError(f"predicate {self.name}: accepts no value kinds")
        if not set(self.value_kinds) <= set(VALUE_KINDS):
            raise CapabilityError(f"predicate {self.name}: unknown value kinds")


@dataclass(frozen=True)
class EngineCapabilities:
    id: str
    predicates: tuple[PredicateSpec, ...]
    supports_or: bool
    max_disjuncts: int
    page_size: int
    max_pages: int
    soft_and_threshold: float

    def __post_init__(self):
        if self.page_size < 1:
            raise CapabilityError("page_size must be >= 1")
        if self.max_pages < 1:
            raise CapabilityError("max_pages must be >= 1")
        if self.max_disjuncts < 1:
            raise CapabilityError("max_disjuncts must be >= 1")
        if not self.supports_or and self.max_disjuncts != 1:
            raise CapabilityError("max_disjuncts must be 1 when OR is unsupported")
        if not 0.0 < self.soft_and_threshold <= 1.0:
            raise CapabilityError("soft_and_threshold must be in (0, 1]")

    def predicate(self, name: str) -> PredicateSpec | None:
        for pred in self.predicates:
            if pred.name == name:
                return pred
        return None


@dataclass(frozen=True)
class SearchValue:
    """A predicate's search value: single value, keywords, phrase or pattern."""

    kind: str
    payload: str | tuple[str, ...]

    def __post_init__(self):
        if self.kind not in VALUE_KINDS:
            raise ValueError(f"unknown search value kind {self.kind!r}")
        if self.kind == "keywords" and not self.payload:
            raise ValueError("keywords value must contain at least one token")
        if self.kind == "pattern" and not any(t != WILDCARD for t in self.payload):
            raise ValueError("pattern must contain at least one literal token")

    @classmethod
    def value(cls, payload: str) -> "SearchValue":
        return cls("value", str(payload))

    @classmethod
    def keywords(cls, tokens: Iterable[str]) -> "SearchValue":
        return cls("keywords", tuple(tokens))

    @classmethod
    def phrase(cls, payload: str) -> "SearchValue":
        return cls("phrase", payload)

    @classmethod
    def pattern(cls, items: Iterable[str]) -> "SearchValue":
        return cls("pattern", tuple(items))


@dataclass(frozen=True)
class BasicQuery:
    """Conjunction of (predicate name, search value) terms."""

    terms: tuple[tuple[str, SearchValue], ...]

    def __post_init__(self):
        if not self.terms:
            raise ValueError("basic query needs at least one term")


@dataclass(frozen=True)
class Query:
    """Disjunction of basic queries (a single disjunct is the common case)."""

    disjuncts: tuple[BasicQuery, ...]

    def __post_init__(self):
        if not self.disjuncts:
            raise ValueError("query needs at least one disjunct")

    @classmethod
    def single(cls, *terms: tuple[str, SearchValue]) -> "Query":
        return cls((BasicQuery(tuple(terms)),))


@dataclass(frozen=True)
class Rejection:
    """Structured reason why a query is not executable against a profile."""

    code: str  # unknown-predicate | unsupported-value-kind | or-not-supported | too-many-disjuncts
    detail: str

    def __str__(self):
        return f"{self.code}: {self.detail}"


class QueryRejected(ValueError):
    def __init__(self, rejection: Rejection):
        super().__init__(str(rejection))
        self.rejection = rejection


@dataclass(frozen=True)
class ResultPage:
    query: str  # serialized query, doubles as the query id
    page: int  # 1-based
    entities: tuple
    has_next: bool


def validate(query: Query, caps: EngineCapabilities) -> Rejection | None:
    """None when the query is executable against ``caps``, else the reason."""
    if len(query.disjuncts) > 1 and not caps.supports_or:
        return Rejection("or-not-supported", f"{caps.id} does not support OR aggregation")
    if len(query.disjuncts) > caps.max_disjuncts:
        return Rejection(
            "too-many-disjuncts",
            f"{len(query.disjuncts)} disjuncts exceed limit {caps.max_disjuncts}",
        )
    for bq in query.disjuncts:
        for name, value in bq.terms:
            pred = caps.predicate(name)
            if pred is None:
                return Rejection("unknown-predicate", f"{name!r} not offered by {caps.id}")
            if value.kind not in pred.value_kinds:
                return Rejection(
                    "unsupported-value-kind",
                    f"predicate {name!r} does not accept {value.kind} values",
                )
    return None


def serialize_value(value: SearchValue) -> str:
    if value.kind == "keywords":
        return "keywords " + " ".join(value.payload)
    if value.kind == "pattern":
        return "pattern " + " ".join(value.payload)
    if value.kind == "phrase":
        return f'phrase "{value.payload}"'
    return f"value {value.payload}"


def serialize_query(query: Query) -> str:
    """Textual form used in logs and the results warehouse."""
    parts = []
    for bq in query.disjuncts:
        parts.append(" AND ".join(f"{name}:({serialize_value(v)})" for name, v in bq.terms))
    return " OR ".join(parts)


def field_tokens(entity: "Publication", field_name: str) -> list[str]:
    """Token stream a predicate matches against."""
    if field_name == "title":
        return tokenize(entity.title)
    if field_name == "authors":
        return [tok for name in entity.authors for tok in tokenize(name)]
    if field_name == "venue":
        return tokenize(entity.venue)
    if field_name == "year":
        return [str(entity.year)]
    if field_name == "free":
        out = [tok for name in entity.authors for tok in tokenize(name)]
        out += tokenize(entity.title)
        out.append(str(entity.year))
        out += tokenize(entity.venue)
        return out
    raise ValueError(f"unknown field {field_name!r}")


def _window_match(tokens: Sequence[str], items: Sequence[str]) -> bool:
    n, m = len(tokens), len(items)
    if m == 0 or m > n:
        return False
    for start in range(n - m + 1):
        if all(it == WILDCARD or tokens[start + k] == it for k, it in enumerate(items)):
            return True
    return False


def term_matches(entity: "Publication", pred: PredicateSpec, value: SearchValue) -> bool:
    """Direct (index-free) evaluation of one query term against one entity."""
    field_name = "free" if pred.kind == "free" else pred.field
    if value.kind == "value" and field_name == "year":
        try:
            return int(value.payload) == entity.year
        except (TypeError, ValueError):
            return False
    tokens = field_tokens(entity, field_name)
    if value.kind == "keywords":
        toks = set(tokens)
        return all(t in toks for t in value.payload)
    if value.kind == "value":
        toks = set(tokens)
        wanted = tokenize(value.payload)
        return bool(wanted) and all(t in toks for t in wanted)
    if value.kind == "phrase":
        return _window_match(tokens, tokenize(value.payload))
    # pattern: literal tokens in order, exactly one token per wildcard slot
    return _window_match(tokens, [t if t == WILDCARD else t.lower() for t in value.payload])


class EngineIndex:
    """Immutable searchable snapshot of a set of entities.

    Builds per-field inverted token indexes once; queries then touch only the
    posting lists of their own tokens. Every entity receives a static rank
    key at build time (a seeded pseudo-popularity), which breaks ranking ties
    deterministically, so execution is a pure function of (index, query).
    """

    def __init__(
        self,
        entries: Sequence["Publication"],
        rank_keys: Sequence[float] | None = None,
        seed: int = 0,
    ):
        self.entries: tuple = tuple(entries)
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("index entries must have unique ids")
        self._by_id = {e.id: e for e in self.entries}
        if rank_keys is None:
            rng = random.Random(seed)
            rank_keys = [rng.random() for _ in self.entries]
        if len(rank_keys) != len(self.entries):
            raise ValueError("rank_keys length mismatch")
        self.rank_keys: tuple[float, ...] = tuple(rank_keys)

        self._vocab: dict[str, int] = {}
        self._tokens: dict[str, list[array]] = {}  # field -> per-entity token id arrays
        self._postings: dict[str, dict[int, list[int]]] = {}
        for field_name in ("authors", "title", "venue", "free"):
            seqs: list[array] = []
            postings: dict[int, list[int]] = {}
            for ordinal, entity in enumerate(self.entries):
                ids_arr = array("i", [self._intern(t) for t in field_tokens(entity, field_name)])
                seqs.append(ids_arr)
                for tid in set(ids_arr):
                    postings.setdefault(tid, []).append(ordinal)
            self._tokens[field_name] = seqs
            self._postings[field_name] = postings
        self._years: dict[int, list[int]] = {}
        for ordinal, entity in enumerate(self.entries):
            self._years.setdefault(entity.year, []).append(ordinal)
        self._ranked_cache: dict[tuple[str, float], tuple[int, ...]] = {}

    def _intern(self, token: str) -> int:
        tid = self._vocab.get(token)
        if tid is None:
            tid = len(self._vocab)
            self._vocab[token] = tid
        return tid

    def __len__(self):
        return len(self.entries)

    def entity(self, entity_id: str) -> "Publication":
        return self._by_id[entity_id]

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self._by_id

    def _candidates(self, field_name: str, tokens: list[str]) -> set[int] | None:
        """Ordinals of entities containing every token, None for empty-token query."""
        if not tokens:
            return None
        postings = self._postings[field_name]
        lists = []
        for tok in tokens:
            tid = self._vocab.get(tok)
            if tid is None or tid not in postings:
                return set()
            lists.append(postings[tid])
        lists.sort(key=len)
        result = set(lists[0])
        for lst in lists[1:]:
            result.intersection_update(lst)
            if not result:
                break
        return result

    def _term_match_set(self, pred: PredicateSpec, value: SearchValue) -> set[int]:
        field_name = "free" if pred.kind == "free" else pred.field
        if value.kind == "value" and field_name == "year":
            try:
                year = int(value.payload)
            except (TypeError, ValueError):
                return set()
            return set(self._years.get(year, ()))
        if value.kind in ("value", "phrase"):
            wanted = tokenize(value.payload)
        elif value.kind == "keywords":
            wanted = list(value.payload)
        else:
            wanted = [t.lower() for t in value.payload if t != WILDCARD]
        candidates = self._candidates(field_name, wanted)
        if not candidates:
            return set()
        if value.kind in ("keywords", "value"):
            return candidates
        if value.kind == "phrase":
            items = tokenize(value.payload)
        else:
            items = [t if t == WILDCARD else t.lower() for t in value.payload]
        pat = array("i", [-1 if t == WILDCARD else self._vocab[t] for t in items])
        seqs = self._tokens[field_name]
        return {o for o in candidates if kernels.contains_window(seqs[o], pat)}

    def _ranked(self, query: Query, caps: EngineCapabilities) -> tuple[int, ...]:
        key = (serialize_query(query), caps.soft_and_threshold)
        cached = self._ranked_cache.get(key)
        if cached is not None:
            return cached
        threshold = caps.soft_and_threshold
        best: dict[int, float] = {}
        for bq in query.disjuncts:
            sets = []
            for name, value in bq.terms:
                pred = caps.predicate(name)
                sets.append(self._term_match_set(pred, value))
            if threshold >= 1.0:
                matched = set.intersection(*sets) if sets else set()
                fractions = {o: 1.0 for o in matched}
            else:
                counts: dict[int, int] = {}
                for s in sets:
                    for o in s:
                        counts[o] = counts.get(o, 0) + 1
                nterms = len(bq.terms)
                fractions = {
                    o: c / nterms for o, c in counts.items() if c / nterms >= threshold
                }
            for o, frac in fractions.items():
                if frac > best.get(o, -1.0):
                    best[o] = frac
        ranked = tuple(
            sorted(best, key=lambda o: (-best[o], self.rank_keys[o], o))
        )
        if len(self._ranked_cache) >= 1024:
            self._ranked_cache.clear()
        self._ranked_cache[key] = ranked
        return ranked


def execute(index: EngineIndex, query: Query, page: int, caps: EngineCapabilities) -> ResultPage:
    """Fetch one result page; pages beyond the last are empty with no next link."""
    rejection = validate(query, caps)
    if rejection is not None:
        raise QueryRejected(rejection)
    if page < 1:
        raise ValueError("page numbers are 1-based")
    ranked = index._ranked(query, caps)
    start = (page - 1) * caps.page_size
    chunk = ranked[start : start + caps.page_size]
    has_next = len(ranked) > page * caps.page_size and page < caps.max_pages
    return ResultPage(
        query=serialize_query(query),
        page=page,
        entities=tuple(index.entries[o] for o in chunk),
        has_next=has_next,
    )


def scholar_profile() -> EngineCapabilities:
    """Capability profile of a Scholar-like bibliographic search engine."""
    return EngineCapabilities(
        id="google-scholar",
        predicates=(
            PredicateSpec("intitle", "field-scoped", "title", frozenset(VALUE_KINDS)),
            PredicateSpec(
                "author", "field-scoped", "authors", frozenset(("value", "keywords", "phrase"))
            ),
            PredicateSpec("year", "field-scoped", "year", frozenset(("value",))),
            PredicateSpec("free", "free", None, frozenset(VALUE_KINDS)),
        ),
        supports_or=True,
        max_disjuncts=10,
        page_size=100,
        max_pages=10,
        soft_and_threshold=1.0,
    )


def caps_to_dict(caps: EngineCapabilities) -> dict:
    return {
        "id": caps.id,
        "predicates": [
            {
                "name": p.name,
                "kind": p.kind,
                "field": p.field,
                "value_kinds": sorted(p.value_kinds),
            }
            for p in caps.predicates
        ],
        "supports_or": caps.supports_or,
        "max_disjuncts": caps.max_disjuncts,
        "page_size": caps.page_size,
        "max_pages": caps.max_pages,
        "soft_and_threshold": caps.soft_and_threshold,
    }


def caps_from_dict(data: Mapping) -> EngineCapabilities:
    try:
        predicates = tuple(
            PredicateSpec(
                name=p["name"],
                kind=p["kind"],
                field=p.get("field"),
                value_kinds=frozenset(p["value_kinds"]),
            )
            for p in data["predicates"]
        )
        return EngineCapabilities(
            id=data["id"],
            predicates=predicates,
            supports_or=bool(data["supports_or"]),
            max_disjuncts=int(data["max_disjuncts"]),
            page_size=int(data["page_size"]),
            max_pages=int(data["max_pages"]),
            soft_and_threshold=float(data["soft_and_threshold"]),
        )
    except KeyError as exc:
        raise CapabilityError(f"capability file missing field {exc}") from None


def save_caps(caps: EngineCapabilities, path: str | Path) -> None:
    body = json.dumps(caps_to_dict(caps), indent=2, sort_keys=True)
    Path(path).write_text(f"format={CAPS_FORMAT}\n{body}\n", encoding="utf-8")


def load_caps(path: str | Path) -> EngineCapabilities:
    raw = Path(path).read_text(encoding="utf-8")
    header, _, body = raw.partition("\n")
    if header.strip() != f"format={CAPS_FORMAT}":
        raise CapabilityError(f"{path}: expected header format={CAPS_FORMAT}")
    try:
        data = json.loads(body)
    except json.JSONDecodeError as exc:
        raise CapabilityError(f"{path}: malformed capability JSON: {exc}") from None
    return caps_from_dict(data)
