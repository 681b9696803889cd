"""Publication data model, corpus and dataset I/O, and index derivation.

The corpus is the clean source of truth (the stand-in for a bibliographic
database). Evaluation datasets are seeded subsets of it grouped by a shared
author, title keyword or venue, or drawn at random. The searchable index is
derived from the corpus through a configurable noise model (duplicates,
typos, misspelled authors, shifted years, dropped old entries, distractors)
so it mimics the data quality of a scraped search engine, while the exact
provenance of every index entry is retained as ground truth.
"""

from __future__ import annotations

import json
import math
import random
import string
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .engine import EngineIndex
from .seeding import derive_seed
from .text import STOPWORDS_EN, normalize_name, tokenize

CORPUS_FORMAT = "qf-corpus-1"
DATASET_FORMAT = "qf-dataset-1"
INDEX_FORMAT = "qf-index-1"

CATEGORIES = ("Author", "Title", "Venue", "Random")


class CorpusError(ValueError):
    """Malformed corpus/dataset file or inconsistent record."""


class DatasetGenerationError(ValueError):
    """A (category, size) cell cannot be satisfied by the corpus."""


@dataclass(frozen=True)
class Publication:
    """One bibliographic entity; also the element type of search results."""

    id: str
    authors: tuple[str, ...]
    title: str
    year: int
    venue: str

    def __post_init__(self):
        if not self.id:
            raise CorpusError("publication id must be non-empty")
        object.__setattr__(self, "authors", tuple(self.authors))
        if not self.authors or any(not a.strip() for a in self.authors):
            raise CorpusError(f"{self.id}: authors must be non-empty names")
        if not isinstance(self.year, int) or not 1900 <= self.year <= 2100:
            raise CorpusError(f"{self.id}: year {self.year!r} outside [1900, 2100]")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "authors": list(self.authors),
            "title": self.title,
            "year": self.year,
            "venue": self.venue,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "Publication":
        try:
            return cls(
                id=str(data["id"]),
                authors=tuple(str(a) for a in data["authors"]),
                title=str(data["title"]),
                year=int(data["year"]),
                venue=str(data["venue"]),
            )
        except KeyError as exc:
            raise CorpusError(f"record missing field {exc}") from None


class Corpus:
    """Ordered collection of publications with unique ids."""

    def __init__(self, publications: Iterable[Publication]):
        self.publications: tuple[Publication, ...] = tuple(publications)
        self._by_id: dict[str, Publication] = {}
        for pub in self.publications:
            if pub.id in self._by_id:
                raise CorpusError(f"duplicate publication id {pub.id!r}")
            self._by_id[pub.id] = pub

    def __len__(self) -> int:
        return len(self.publications)

    def __iter__(self) -> Iterator[Publication]:
        return iter(self.publications)

    def __contains__(self, pub_id: str) -> bool:
        return pub_id in self._by_id

    def get(self, pub_id: str) -> Publication:
        try:
            return self._by_id[pub_id]
        except KeyError:
            raise KeyError(f"unknown publication id {pub_id!r}") from None


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"format={CORPUS_FORMAT}\n")
        for pub in corpus:
            fh.write(json.dumps(pub.to_dict(), ensure_ascii=False) + "\n")


def load_corpus(path: str | Path) -> Corpus:
    """Parse a corpus file; errors report the offending line number."""
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != f"format={CORPUS_FORMAT}":
            raise CorpusError(f"{path}: expected header format={CORPUS_FORMAT}")
        pubs: list[Publication] = []
        seen: set[str] = set()
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                pub = Publication.from_dict(record)
            except (json.JSONDecodeError, CorpusError, TypeError, ValueError) as exc:
                raise CorpusError(f"{path}:{lineno}: malformed record: {exc}") from None
            if pub.id in seen:
                raise CorpusError(f"{path}:{lineno}: duplicate publication id {pub.id!r}")
            seen.add(pub.id)
            pubs.append(pub)
    return Corpus(pubs)


@dataclass(frozen=True)
class Dataset:
    """A seeded input entity set for one evaluation run."""

    id: str
    category: str
    size: int
    members: tuple[str, ...]
    seed: int

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise CorpusError(f"{self.id}: unknown category {self.category!r}")
        if len(self.members) != self.size:
            raise CorpusError(f"{self.id}: member count != size")

    def entities(self, corpus: Corpus) -> list[Publication]:
        return [corpus.get(m) for m in self.members]


def save_datasets(datasets: Sequence[Dataset], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"format={DATASET_FORMAT}\n")
        for ds in datasets:
            record = {
                "id": ds.id,
                "category": ds.category,
                "size": ds.size,
                "seed": ds.seed,
                "members": list(ds.members),
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_datasets(path: str | Path, corpus: Corpus | None = None) -> list[Dataset]:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != f"format={DATASET_FORMAT}":
            raise CorpusError(f"{path}: expected header format={DATASET_FORMAT}")
        datasets: list[Dataset] = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                ds = Dataset(
                    id=str(record["id"]),
                    category=str(record["category"]),
                    size=int(record["size"]),
                    members=tuple(str(m) for m in record["members"]),
                    seed=int(record["seed"]),
                )
            except (json.JSONDecodeError, KeyError, CorpusError, ValueError) as exc:
                raise CorpusError(f"{path}:{lineno}: malformed dataset: {exc}") from None
            if corpus is not None:
                missing = [m for m in ds.members if m not in corpus]
                if missing:
                    raise CorpusError(f"{path}:{lineno}: unknown members {missing[:3]}")
            datasets.append(ds)
    return datasets


def author_key(name: str) -> tuple[str, str | None]:
    """(last name, first initial) key used for the Author category constraint."""
    parts = name.split()
    last = parts[-1].lower() if parts else ""
    initial = parts[0][0].lower() if len(parts) >= 2 else None
    return last, initial


def _grouping(corpus: Corpus, category: str) -> dict:
    groups: dict = {}
    if category == "Author":
        for pub in corpus:
            for name in pub.authors:
                groups.setdefault(normalize_name(name), []).append(pub.id)
    elif category == "Title":
        for pub in corpus:
            for tok in set(tokenize(pub.title)) - STOPWORDS_EN:
                groups.setdefault(tok, []).append(pub.id)
    elif category == "Venue":
        for pub in corpus:
            groups.setdefault((pub.venue, pub.year), []).append(pub.id)
    # a publication may hit the same group several times (e.g. via two authors
    # with the same normalized name); keep each group duplicate-free
    return {key: list(dict.fromkeys(ids)) for key, ids in groups.items()}


def generate_datasets(
    corpus: Corpus,
    sizes: Sequence[int],
    categories: Sequence[str],
    reps: int,
    seed: int,
) -> list[Dataset]:
    """Seeded |sizes| x |categories| x reps dataset grid.

    Within one (size, category) cell the member sets are kept pairwise
    distinct on a best-effort basis (bounded resampling); a cell for which
    the corpus has no sufficiently large group raises, naming the cell.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    for cat in categories:
        if cat not in CATEGORIES:
            raise ValueError(f"unknown category {cat!r}")
    all_ids = [pub.id for pub in corpus]
    groupings = {cat: _grouping(corpus, cat) for cat in categories if cat != "Random"}
    datasets: list[Dataset] = []
    for size in sizes:
        for category in categories:
            if category == "Random":
                pools = [all_ids] if len(all_ids) >= size else []
            else:
                groups = groupings[category]
                pools = [groups[k] for k in sorted(groups, key=str) if len(groups[k]) >= size]
            if not pools:
                raise DatasetGenerationError(
                    f"infeasible cell: no {category} group with >= {size} members"
                )
            chosen: set[frozenset[str]] = set()
            for rep in range(1, reps + 1):
                ds_seed = derive_seed(seed, "dataset", category, str(size), str(rep))
                rng = random.Random(ds_seed)
                members: list[str] = []
                for _ in range(40):  # distinctness is best-effort
                    pool = pools[rng.randrange(len(pools))]
                    members = sorted(rng.sample(pool, size))
                    if frozenset(members) not in chosen:
                        break
                chosen.add(frozenset(members))
                datasets.append(
                    Dataset(
                        id=f"{category.lower()}-s{size:03d}-r{rep:02d}",
                        category=category,
                        size=size,
                        members=tuple(members),
                        seed=ds_seed,
                    )
                )
    return datasets


@dataclass(frozen=True)
class NoiseProfile:
    """Data-quality model applied when deriving the index from the corpus."""

    duplicate_probability: float = 0.0
    max_duplicates: int = 0
    title_typo_rate: float = 0.0  # expected character edits per 100 title chars
    author_misspell_probability: float = 0.0
    year_shift_probability: float = 0.0
    drop_cutoff_year: int = 1995
    drop_probability_old: float = 0.0
    distractor_count: int = 0
    seed: int = 0

    def __post_init__(self):
        for name in (
            "duplicate_probability",
            "author_misspell_probability",
            "year_shift_probability",
            "drop_probability_old",
        ):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.max_duplicates < 0 or self.distractor_count < 0 or self.title_typo_rate < 0:
            raise ValueError("counts and rates must be non-negative")

    def to_dict(self) -> dict:
        return {
            "duplicate_probability": self.duplicate_probability,
            "max_duplicates": self.max_duplicates,
            "title_typo_rate": self.title_typo_rate,
            "author_misspell_probability": self.author_misspell_probability,
            "year_shift_probability": self.year_shift_probability,
            "drop_cutoff_year": self.drop_cutoff_year,
            "drop_probability_old": self.drop_probability_old,
            "distractor_count": self.distractor_count,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "NoiseProfile":
        return cls(**dict(data))


def zero_noise(seed: int = 0) -> NoiseProfile:
    """Profile under which the index is an exact copy of the corpus."""
    return NoiseProfile(seed=seed)


def default_noise(seed: int = 0, distractor_count: int = 500) -> NoiseProfile:
    """Illustrative scraped-engine data quality; not calibrated to any live engine."""
    return NoiseProfile(
        duplicate_probability=0.25,
        max_duplicates=2,
        title_typo_rate=1.5,
        author_misspell_probability=0.15,
        year_shift_probability=0.05,
        drop_cutoff_year=1995,
        drop_probability_old=0.7,
        distractor_count=distractor_count,
        seed=seed,
    )


@dataclass(frozen=True)
class IndexProvenance:
    """Ground truth: which source publication each index entry derives from."""

    sources: Mapping[str, str | None]  # index id -> source id, None for distractors

    def source_of(self, index_id: str) -> str | None:
        return self.sources[index_id]

    def derived_ids(self) -> set[str]:
        return {i for i, s in self.sources.items() if s is not None}

    def distractor_ids(self) -> set[str]:
        return {i for i, s in self.sources.items() if s is None}


def _poisson(rng: random.Random, lam: float) -> int:
    if lam <= 0:
        return 0
    limit = math.exp(-lam)
    k = 0
    p = 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def _typo_title(title: str, rate: float, rng: random.Random) -> str:
    edits = _poisson(rng, rate * len(title) / 100.0)
    chars = list(title)
    for _ in range(edits):
        if not chars:
            break
        pos = rng.randrange(len(chars))
        if len(chars) > 1 and rng.random() < 0.5:
            del chars[pos]
        else:
            old = chars[pos]
            repl = rng.choice(string.ascii_lowercase)
            while repl == old.lower():
                repl = rng.choice(string.ascii_lowercase)
            chars[pos] = repl.upper() if old.isupper() else repl
    return "".join(chars)


def _misspell_author(name: str, rng: random.Random) -> str:
    # One substitution in the last name; the first initial stays intact so the
    # name-level comparison can still fail or succeed deliberately in tests.
    parts = name.split()
    last = parts[-1]
    pos = rng.randrange(len(last))
    old = last[pos]
    repl = rng.choice(string.ascii_lowercase)
    while repl == old.lower():
        repl = rng.choice(string.ascii_lowercase)
    repl = repl.upper() if old.isupper() else repl
    parts[-1] = last[:pos] + repl + last[pos + 1 :]
    return " ".join(parts)


def _perturb(pub: Publication, dup_id: str, profile: NoiseProfile, rng: random.Random) -> Publication:
    title = _typo_title(pub.title, profile.title_typo_rate, rng)
    authors = list(pub.authors)
    if rng.random() < profile.author_misspell_probability:
        idx = rng.randrange(len(authors))
        authors[idx] = _misspell_author(authors[idx], rng)
    year = pub.year
    if rng.random() < profile.year_shift_probability:
        year += rng.choice((-1, 1))
    year = min(max(year, 1900), 2100)
    return Publication(id=dup_id, authors=tuple(authors), title=title, year=year, venue=pub.venue)


def _distractor(
    idx: int,
    token_freq: Counter,
    length_freq: Counter,
    author_freq: Counter,
    year_freq: Counter,
    venue_freq: Counter,
    rng: random.Random,
) -> Publication:
    tokens = rng.choices(list(token_freq), weights=list(token_freq.values()),
                         k=_weighted_choice(length_freq, rng))
    n_auth = 1 + min(_poisson(rng, 1.0), 2)
    names = rng.choices(list(author_freq), weights=list(author_freq.values()), k=n_auth)
    title = " ".join(tokens).capitalize()
    return Publication(
        id=f"distractor~{idx:05d}",
        authors=tuple(dict.fromkeys(names)),  # drop accidental repeats, keep order
        title=title,
        year=_weighted_choice(year_freq, rng),
        venue=_weighted_choice(venue_freq, rng),
    )


def _weighted_choice(freq: Counter, rng: random.Random):
    return rng.choices(list(freq), weights=list(freq.values()), k=1)[0]


def build_index(corpus: Corpus, profile: NoiseProfile) -> tuple[EngineIndex, IndexProvenance]:
    """Derive the searchable index plus exact provenance from the corpus.

    Per retained source entity the index holds one faithful copy and up to
    ``max_duplicates`` perturbed duplicates; entities older than the cutoff
    may be missing entirely; ``distractor_count`` unrelated entities are
    synthesized from corpus-wide frequency tables. Deterministic per seed.
    """
    noise_rng = random.Random(derive_seed(profile.seed, "index-noise"))
    rank_rng = random.Random(derive_seed(profile.seed, "static-rank"))

    entries: list[Publication] = []
    rank_keys: list[float] = []
    sources: dict[str, str | None] = {}

    for pub in corpus:
        if pub.year < profile.drop_cutoff_year and noise_rng.random() < profile.drop_probability_old:
            continue
        faithful = replace(pub, id=f"{pub.id}~0")
        entries.append(faithful)
        sources[faithful.id] = pub.id
        rank_keys.append(rank_rng.random())
        for slot in range(1, profile.max_duplicates + 1):
            if noise_rng.random() < profile.duplicate_probability:
                dup = _perturb(pub, f"{pub.id}~{slot}", profile, noise_rng)
                entries.append(dup)
                sources[dup.id] = pub.id
                rank_keys.append(rank_rng.random())

    if profile.distractor_count:
        token_freq: Counter = Counter()
        length_freq: Counter = Counter()
        author_freq: Counter = Counter()
        year_freq: Counter = Counter()
        venue_freq: Counter = Counter()
        for pub in corpus:
            toks = tokenize(pub.title)
            token_freq.update(toks)
            length_freq[max(len(toks), 1)] += 1
            author_freq.update(pub.authors)
            year_freq[pub.year] += 1
            venue_freq[pub.venue] += 1
        for i in range(profile.distractor_count):
            entity = _distractor(
                i, token_freq, length_freq, author_freq, year_freq, venue_freq, noise_rng
            )
            entries.append(entity)
            sources[entity.id] = None
            # distractors carry a pessimistic popularity prior, mirroring how a
            # live engine ranks scraped junk below established publications
            rank_keys.append(0.5 + rank_rng.random())

    index = EngineIndex(entries, rank_keys=rank_keys)
    return index, IndexProvenance(sources)


def save_index(index: EngineIndex, provenance: IndexProvenance, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"format={INDEX_FORMAT}\n")
        for entry, rank in zip(index.entries, index.rank_keys):
            record = entry.to_dict()
            record["source_id"] = provenance.source_of(entry.id)
            record["rank"] = rank
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_index(path: str | Path) -> tuple[EngineIndex, IndexProvenance]:
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != f"format={INDEX_FORMAT}":
            raise CorpusError(f"{path}: expected header format={INDEX_FORMAT}")
        entries: list[Publication] = []
        ranks: list[float] = []
        sources: dict[str, str | None] = {}
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                pub = Publication.from_dict(record)
                ranks.append(float(record["rank"]))
                sources[pub.id] = record["source_id"]
            except (json.JSONDecodeError, KeyError, CorpusError, ValueError) as exc:
                raise CorpusError(f"{path}:{lineno}: malformed index entry: {exc}") from None
            entries.append(pub)
    return EngineIndex(entries, rank_keys=ranks), IndexProvenance(sources)
