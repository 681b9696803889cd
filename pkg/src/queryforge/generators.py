"""Query generators: partitioning, attribute-predicate mapping, search value
generation and OR-aggregation, plus the catalog of ten stock generators.

A generator turns an input entity set into a plan of engine queries. The
naive partitioning emits one basic query per entity; the frequent-value
partitioning greedily mines frequent attribute values (author names, title
keywords, years) so a single query can cover many entities at once. Search
values are derived per attribute (keywords, phrase, single value, author
last name, or a wildcard pattern kept just specific enough to identify one
title in the source corpus), and consecutive basic queries can be folded
into disjunctive queries to cut the number of requests.
"""

from __future__ import annotations

import weakref
from array import array
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import json

from . import kernels
from .corpus import Corpus, Publication
from .engine import (
    WILDCARD,
    BasicQuery,
    EngineCapabilities,
    Query,
    SearchValue,
    validate,
)
from .text import last_name, normalize_name, remove_stopwords, stopword_list, tokenize

GENSPEC_FORMAT = "qf-genspec-1"

ATTRIBUTES = ("authors", "title", "year", "venue")

# value-generation functions and the attribute each one applies to
VALUE_GEN_KINDS: dict[str, str] = {
    "keywords": "title",
    "phrase": "title",
    "pattern": "title",
    "gs_authors": "authors",
    "value": "year",
}


class SpecError(ValueError):
    """Malformed generator spec or spec file."""


class PlanError(ValueError):
    """Spec cannot be planned against the target engine capabilities."""

    def __init__(self, code: str, detail: str):
        super().__init__(f"{code}: {detail}")
        self.code = code
        self.detail = detail


@dataclass(frozen=True)
class NaivePartitioning:
    strategy = "naive"


@dataclass(frozen=True)
class FrequentValuePartitioning:
    attributes: tuple[str, ...]
    min_support: int = 2
    items_required: int = 1
    strategy = "frequent-value"

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if not self.attributes or not set(self.attributes) <= set(ATTRIBUTES):
            raise SpecError(f"bad partitioning attributes {self.attributes!r}")
        if self.min_support < 2:
            raise SpecError("min_support must be >= 2")
        if self.items_required < 1:
            raise SpecError("items_required must be >= 1")


@dataclass(frozen=True)
class GeneratorSpec:
    """The four building blocks of one query generator."""

    id: str
    partitioning: NaivePartitioning | FrequentValuePartitioning
    mapping: tuple[tuple[str, str], ...]  # (attribute, predicate name)
    value_gen: Mapping[str, str]  # attribute -> value-generation function
    aggregation: int | None = None  # OR(k); None = no aggregation
    stopwords: str = "english-default"

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple((a, p) for a, p in self.mapping))
        object.__setattr__(self, "value_gen", dict(self.value_gen))
        attrs = [a for a, _ in self.mapping]
        if not attrs:
            raise SpecError(f"{self.id}: empty mapping")
        if not set(attrs) <= set(ATTRIBUTES):
            raise SpecError(f"{self.id}: unknown attributes in mapping")
        for attr in attrs:
            kind = self.value_gen.get(attr)
            if kind is None:
                raise SpecError(f"{self.id}: no value_gen for attribute {attr!r}")
            if kind not in VALUE_GEN_KINDS:
                raise SpecError(f"{self.id}: unknown value_gen {kind!r}")
            if VALUE_GEN_KINDS[kind] != attr:
                raise SpecError(f"{self.id}: value_gen {kind!r} not applicable to {attr!r}")
        if self.aggregation is not None and self.aggregation < 2:
            raise SpecError(f"{self.id}: OR aggregation needs k >= 2")
        stopword_list(self.stopwords)


@dataclass(frozen=True)
class Partition:
    """One subset of the input set, queried with a single basic query."""

    members: tuple[Publication, ...]
    anchor: tuple[tuple[str, str], ...] | None = None  # frequent (attribute, value) items

    def member_ids(self) -> tuple[str, ...]:
        return tuple(p.id for p in self.members)


@dataclass(frozen=True)
class PlannedQuery:
    query: Query
    partitions: tuple[Partition, ...]


@dataclass(frozen=True)
class QueryPlan:
    generator_id: str
    queries: tuple[PlannedQuery, ...]
    flags: tuple[str, ...] = ()

    def covered_ids(self) -> set[str]:
        return {
            pid
            for pq in self.queries
            for part in pq.partitions
            for pid in part.member_ids()
        }


def partition_naive(entities: Sequence[Publication]) -> list[Partition]:
    """Singleton partitions in input order: one basic query per entity."""
    if not entities:
        raise ValueError("input entity set must be non-empty")
    return [Partition(members=(e,)) for e in entities]


def _entity_items(
    entity: Publication, attributes: Iterable[str], stopwords: frozenset[str]
) -> set[tuple[str, str]]:
    items: set[tuple[str, str]] = set()
    for attr in attributes:
        if attr == "authors":
            items.update(("authors", normalize_name(n)) for n in entity.authors)
        elif attr == "title":
            items.update(
                ("title", t) for t in remove_stopwords(tokenize(entity.title), stopwords)
            )
        elif attr == "year":
            items.add(("year", str(entity.year)))
        elif attr == "venue":
            items.add(("venue", entity.venue))
    return items


def partition_frequent_value(
    entities: Sequence[Publication],
    attributes: Sequence[str],
    min_support: int = 2,
    items_required: int = 1,
    stopwords: frozenset[str] = stopword_list("english-default"),
) -> list[Partition]:
    """Greedy Apriori-style partitioning by frequent attribute values.

    Repeatedly mines the itemset of ``items_required`` items with the highest
    support over the not-yet-covered entities (ties: lexicographically
    smallest item sequence); its supporting entities form one anchored
    partition. Entities left when no itemset reaches ``min_support`` become
    unanchored singleton partitions.
    """
    if min_support < 2:
        raise ValueError("min_support must be >= 2")
    if items_required < 1:
        raise ValueError("items_required must be >= 1")
    if not attributes:
        raise ValueError("attributes must be non-empty")
    remaining = list(entities)
    item_cache = {e.id: _entity_items(e, attributes, stopwords) for e in entities}
    partitions: list[Partition] = []
    while remaining:
        counts: Counter = Counter()
        for entity in remaining:
            items = sorted(item_cache[entity.id])
            counts.update(combinations(items, items_required))
        eligible = [c for c, n in counts.items() if n >= min_support]
        if not eligible:
            break
        anchor = min(eligible, key=lambda c: (-counts[c], c))
        members = tuple(e for e in remaining if set(anchor) <= item_cache[e.id])
        partitions.append(Partition(members=members, anchor=anchor))
        covered = {e.id for e in members}
        remaining = [e for e in remaining if e.id not in covered]
    partitions.extend(Partition(members=(e,)) for e in remaining)
    return partitions


def gen_value(
    attribute: str,
    raw,
    kind: str,
    *,
    context: Corpus | None = None,
    stopwords: frozenset[str] = stopword_list("english-default"),
    anchor: str | None = None,
    flags: list[str] | None = None,
) -> SearchValue:
    """Derive one predicate search value from an attribute value.

    ``raw`` is the attribute value (title string, author name list, year) or,
    for anchored partitions, the mined anchor values. An empty keyword list
    after stopword removal falls back to the full token list and records a
    flag.
    """
    if kind == "keywords":
        if isinstance(raw, (list, tuple)):
            return SearchValue.keywords(tuple(raw))
        tokens = tokenize(raw)
        kept = remove_stopwords(tokens, stopwords)
        if not kept:
            if flags is not None:
                flags.append(f"keywords-fallback: all tokens of {raw!r} are stopwords")
            kept = tokens
        return SearchValue.keywords(kept)
    if kind == "phrase":
        return SearchValue.phrase(raw)
    if kind == "value":
        return SearchValue.value(str(raw))
    if kind == "gs_authors":
        name = anchor
        if name is None:
            name = raw[0] if isinstance(raw, (list, tuple)) else raw
        return SearchValue.value(last_name(name))
    if kind == "pattern":
        if context is None:
            raise ValueError("pattern generation needs the context corpus")
        return gen_pattern(raw, context, flags=flags)
    raise ValueError(f"unknown value generation kind {kind!r}")


class _PatternContext:
    """Title token postings of a corpus, reused across pattern generations."""

    def __init__(self, corpus: Corpus):
        self.token_seqs: list[tuple[str, ...]] = []
        self.postings: dict[str, set[int]] = {}
        self.vocab: dict[str, int] = {}
        self._id_seqs: list[array] = []
        for ordinal, pub in enumerate(corpus):
            toks = tuple(tokenize(pub.title))
            self.token_seqs.append(toks)
            ids = array("i")
            for t in toks:
                tid = self.vocab.setdefault(t, len(self.vocab))
                ids.append(tid)
                self.postings.setdefault(t, set()).add(ordinal)
            self._id_seqs.append(ids)

    def df(self, token: str) -> int:
        return len(self.postings.get(token, ()))

    def count_matches(self, items: Sequence[str], limit: int = 2) -> int:
        """Number of corpus entries whose title matches the pattern (capped)."""
        literals = [t for t in items if t != WILDCARD]
        candidates: set[int] | None = None
        for tok in literals:
            posting = self.postings.get(tok)
            if not posting:
                return 0
            candidates = set(posting) if candidates is None else candidates & posting
            if not candidates:
                return 0
        pat = array("i", [-1 if t == WILDCARD else self.vocab[t] for t in items])
        hits = 0
        for ordinal in candidates or ():
            if kernels.contains_window(self._id_seqs[ordinal], pat):
                hits += 1
                if hits >= limit:
                    return hits
        return hits


_pattern_contexts: "weakref.WeakKeyDictionary[Corpus, _PatternContext]" = (
    weakref.WeakKeyDictionary()
)


def _pattern_context(corpus: Corpus) -> _PatternContext:
    ctx = _pattern_contexts.get(corpus)
    if ctx is None:
        ctx = _PatternContext(corpus)
        _pattern_contexts[corpus] = ctx
    return ctx


def _pattern_items(tokens: Sequence[str], literal_positions: Iterable[int]) -> tuple[str, ...]:
    """Pattern spanning the first to last literal; outer wildcards are trimmed."""
    positions = sorted(literal_positions)
    first, last = positions[0], positions[-1]
    keep = set(positions)
    return tuple(
        tokens[i] if i in keep else WILDCARD for i in range(first, last + 1)
    )


def gen_pattern(
    title: str, context: Corpus, *, flags: list[str] | None = None
) -> SearchValue:
    """Wildcard pattern identifying ``title`` uniquely within the corpus.

    Literal tokens are added greedily by ascending corpus document frequency
    (ties: leftmost first) until the pattern matches exactly one corpus entry;
    all other positions between the outermost literals become single-token
    wildcards. When even the fully literal title is ambiguous (duplicate
    titles, or a title contained in a longer one) the full-literal pattern is
    returned and the ambiguity flagged.
    """
    tokens = tokenize(title)
    if not tokens:
        raise ValueError("title has no tokens")
    ctx = _pattern_context(context)
    order = sorted(range(len(tokens)), key=lambda i: (ctx.df(tokens[i]), i))
    literal_positions: list[int] = []
    for pos in order:
        literal_positions.append(pos)
        items = _pattern_items(tokens, literal_positions)
        hits = ctx.count_matches(items)
        if hits == 1:
            return SearchValue.pattern(items)
    items = _pattern_items(tokens, range(len(tokens)))
    hits = ctx.count_matches(items)
    if hits == 0:
        raise ValueError(f"title {title!r} does not occur in the context corpus")
    if flags is not None:
        flags.append(f"pattern-ambiguous: {title!r} not unique even fully literal")
    return SearchValue.pattern(items)


def _anchor_values(partition: Partition) -> dict[str, list[str]]:
    grouped: dict[str, list[str]] = {}
    for attr, value in partition.anchor or ():
        grouped.setdefault(attr, []).append(value)
    return grouped


def _partition_query(
    spec: GeneratorSpec,
    partition: Partition,
    context: Corpus,
    stopwords: frozenset[str],
    flags: list[str],
) -> BasicQuery:
    anchored = _anchor_values(partition)
    terms: list[tuple[str, SearchValue]] = []
    for attr, pred_name in spec.mapping:
        kind = spec.value_gen[attr]
        if partition.anchor is not None:
            # anchored partitions query only the attributes the anchor fixes
            values = anchored.get(attr)
            if not values:
                continue
            if kind == "keywords":
                value = SearchValue.keywords(tuple(values))
            elif kind == "gs_authors":
                value = gen_value(attr, values, kind, anchor=values[0], flags=flags)
            else:
                value = gen_value(attr, values[0], kind, context=context,
                                  stopwords=stopwords, flags=flags)
        else:
            entity = partition.members[0]
            raw = getattr(entity, attr)
            value = gen_value(attr, raw, kind, context=context, stopwords=stopwords,
                              flags=flags)
        terms.append((pred_name, value))
    if not terms:
        raise PlanError("empty-query", f"partition anchored on {partition.anchor!r} "
                                       f"maps to no predicate of spec {spec.id}")
    return BasicQuery(tuple(terms))


def build_plan(
    spec: GeneratorSpec,
    entities: Sequence[Publication],
    caps: EngineCapabilities,
    context: Corpus,
) -> QueryPlan:
    """Plan the spec's queries for one input set against one engine profile.

    Every input entity is covered by exactly one partition and thus by
    exactly one planned query; with OR(k) aggregation consecutive basic
    queries are folded into ceil(n/k) disjunctive queries.
    """
    if not entities:
        raise ValueError("input entity set must be non-empty")
    for attr, pred_name in spec.mapping:
        pred = caps.predicate(pred_name)
        if pred is None:
            raise PlanError("unknown-predicate", f"{pred_name!r} not offered by {caps.id}")
        kind = spec.value_gen[attr]
        value_kind = "value" if kind == "gs_authors" else kind
        if value_kind not in pred.value_kinds:
            raise PlanError(
                "unsupported-value-kind",
                f"predicate {pred_name!r} does not accept {value_kind} values",
            )
    k = spec.aggregation
    if k is not None:
        if not caps.supports_or:
            raise PlanError("or-not-supported", f"{caps.id} does not support OR aggregation")
        if k > caps.max_disjuncts:
            raise PlanError(
                "too-many-disjuncts", f"OR({k}) exceeds limit {caps.max_disjuncts}"
            )

    stopwords = stopword_list(spec.stopwords)
    if isinstance(spec.partitioning, NaivePartitioning):
        partitions = partition_naive(entities)
    else:
        partitions = partition_frequent_value(
            entities,
            spec.partitioning.attributes,
            spec.partitioning.min_support,
            spec.partitioning.items_required,
            stopwords,
        )

    flags: list[str] = []
    basic = [
        (_partition_query(spec, part, context, stopwords, flags), part)
        for part in partitions
    ]
    planned: list[PlannedQuery] = []
    step = k or 1
    for i in range(0, len(basic), step):
        chunk = basic[i : i + step]
        query = Query(tuple(bq for bq, _ in chunk))
        planned.append(PlannedQuery(query=query, partitions=tuple(p for _, p in chunk)))
    plan = QueryPlan(generator_id=spec.id, queries=tuple(planned), flags=tuple(flags))
    for pq in plan.queries:
        rejection = validate(pq.query, caps)
        if rejection is not None:
            raise PlanError(rejection.code, rejection.detail)
    return plan


def table3_catalog() -> list[GeneratorSpec]:
    """The ten stock generators, in catalog order."""
    freq_all = FrequentValuePartitioning(
        attributes=("authors", "title", "year"), min_support=2, items_required=2
    )
    mapping3 = (("authors", "author"), ("title", "intitle"), ("year", "year"))
    valgen3 = {"authors": "gs_authors", "title": "keywords", "year": "value"}
    return [
        GeneratorSpec("g01", NaivePartitioning(), (("title", "intitle"),), {"title": "keywords"}),
        GeneratorSpec("g02", NaivePartitioning(), (("title", "intitle"),), {"title": "phrase"}),
        GeneratorSpec("g03", NaivePartitioning(), (("title", "intitle"),), {"title": "phrase"},
                      aggregation=2),
        GeneratorSpec("g04", NaivePartitioning(), mapping3, valgen3),
        GeneratorSpec("g05", FrequentValuePartitioning(attributes=("authors",)),
                      (("authors", "author"),), {"authors": "gs_authors"}),
        GeneratorSpec("g06", FrequentValuePartitioning(attributes=("title",)),
                      (("title", "intitle"),), {"title": "keywords"}),
        GeneratorSpec("g07", freq_all, mapping3, valgen3),
        GeneratorSpec("g08", freq_all,
                      (("authors", "free"), ("title", "free"), ("year", "free")), valgen3),
        GeneratorSpec("g09", NaivePartitioning(), (("title", "intitle"),), {"title": "pattern"}),
        GeneratorSpec("g10", NaivePartitioning(), (("title", "intitle"),), {"title": "pattern"},
                      aggregation=10),
    ]


def spec_to_dict(spec: GeneratorSpec) -> dict:
    if isinstance(spec.partitioning, NaivePartitioning):
        part: dict = {"strategy": "naive"}
    else:
        part = {
            "strategy": "frequent-value",
            "attributes": list(spec.partitioning.attributes),
            "min_support": spec.partitioning.min_support,
            "items_required": spec.partitioning.items_required,
        }
    return {
        "id": spec.id,
        "partitioning": part,
        "mapping": [list(pair) for pair in spec.mapping],
        "value_gen": dict(spec.value_gen),
        "aggregation": None if spec.aggregation is None else {"or": spec.aggregation},
        "stopwords": spec.stopwords,
    }


def spec_from_dict(data: Mapping) -> GeneratorSpec:
    try:
        part_data = data["partitioning"]
        if part_data["strategy"] == "naive":
            partitioning: NaivePartitioning | FrequentValuePartitioning = NaivePartitioning()
        elif part_data["strategy"] == "frequent-value":
            partitioning = FrequentValuePartitioning(
                attributes=tuple(part_data["attributes"]),
                min_support=int(part_data.get("min_support", 2)),
                items_required=int(part_data.get("items_required", 1)),
            )
        else:
            raise SpecError(f"unknown partitioning strategy {part_data['strategy']!r}")
        aggregation = data.get("aggregation")
        return GeneratorSpec(
            id=str(data["id"]),
            partitioning=partitioning,
            mapping=tuple((a, p) for a, p in data["mapping"]),
            value_gen=dict(data["value_gen"]),
            aggregation=None if aggregation is None else int(aggregation["or"]),
            stopwords=str(data.get("stopwords", "english-default")),
        )
    except KeyError as exc:
        raise SpecError(f"generator spec missing field {exc}") from None


def save_genspec(spec: GeneratorSpec, path: str | Path) -> None:
    body = json.dumps(spec_to_dict(spec), indent=2, sort_keys=True)
    Path(path).write_text(f"format={GENSPEC_FORMAT}\n{body}\n", encoding="utf-8")


def load_genspec(path: str | Path) -> GeneratorSpec:
    raw = Path(path).read_text(encoding="utf-8")
    header, _, body = raw.partition("\n")
    if header.strip() != f"format={GENSPEC_FORMAT}":
        raise SpecError(f"{path}: expected header format={GENSPEC_FORMAT}")
    try:
        data = json.loads(body)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: malformed generator spec JSON: {exc}") from None
    return spec_from_dict(data)
