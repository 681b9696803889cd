"""Evaluation pipeline: execute query plans with full request accounting,
match results against the input set, compute the quality and efficiency
measures, analyze next-link pagination, and persist everything to a results
warehouse.

Measures per (dataset, generator) cell:

* coverage   = |domain(M)| / |S|   - inputs with at least one matched result
* recall     = |range(M)| / |T_rel| - found variations of the relevant entries
* precision  = |range(M)| / |T|    - matched share of everything retrieved
* efficiency = |domain(M)| / #requests = coverage * |S| / #requests

where M is the match mapping, T the union of all returned entities and
T_rel the ground-truth relevant index entries (exact here, via provenance).
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import multiprocessing

from . import engine as engine_mod
from .corpus import Corpus, Dataset, IndexProvenance, NoiseProfile, Publication, build_index
from .engine import EngineCapabilities, EngineIndex
from .generators import GeneratorSpec, QueryPlan, build_plan
from .matcher import MatchConfig, MatchMapping, match
from .seeding import derive_seed

WAREHOUSE_FORMAT = "qf-wh-1"

DEFAULT_CUTOFFS = tuple(round(0.05 * i, 2) for i in range(13))  # 0.00 .. 0.60


class EvaluationError(RuntimeError):
    pass


@dataclass(frozen=True)
class AllPages:
    """Follow every next link (the engine caps pages at max_pages)."""


@dataclass(frozen=True)
class FirstPageOnly:
    """One request per query."""


@dataclass(frozen=True)
class PrecisionThreshold:
    """Follow the next link only while the current page's ground-truth
    precision stays at or above ``theta``."""

    theta: float


FollowPolicy = AllPages | FirstPageOnly | PrecisionThreshold


def parse_policy(text: str) -> FollowPolicy:
    if text == "all-pages":
        return AllPages()
    if text == "first-page-only":
        return FirstPageOnly()
    if text.startswith("precision-threshold:"):
        return PrecisionThreshold(theta=float(text.split(":", 1)[1]))
    raise ValueError(f"unknown follow policy {text!r}")


def policy_label(policy: FollowPolicy) -> str:
    if isinstance(policy, AllPages):
        return "all-pages"
    if isinstance(policy, FirstPageOnly):
        return "first-page-only"
    return f"precision-threshold:{policy.theta}"


@dataclass(frozen=True)
class PageTrace:
    request_index: int  # globally sequential within the run
    entity_ids: tuple[str, ...]
    has_next: bool


@dataclass(frozen=True)
class QueryTrace:
    query: str  # serialized form
    pages: tuple[PageTrace, ...]


@dataclass(frozen=True)
class RunRecord:
    dataset_id: str
    generator_id: str
    engine_id: str
    queries: tuple[QueryTrace, ...]
    total_requests: int
    wall_time: float
    seed: int

    @property
    def run_id(self) -> str:
        return f"{self.dataset_id}/{self.generator_id}"

    def returned_ids(self) -> set[str]:
        return {
            eid for qt in self.queries for pt in qt.pages for eid in pt.entity_ids
        }

    def first_page_ids(self) -> set[str]:
        return {
            eid for qt in self.queries if qt.pages for eid in qt.pages[0].entity_ids
        }

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "generator_id": self.generator_id,
            "engine_id": self.engine_id,
            "seed": self.seed,
            "total_requests": self.total_requests,
            "wall_time": self.wall_time,
            "queries": [
                {
                    "query": qt.query,
                    "pages": [
                        {
                            "request_index": pt.request_index,
                            "entities": list(pt.entity_ids),
                            "has_next": pt.has_next,
                        }
                        for pt in qt.pages
                    ],
                }
                for qt in self.queries
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "RunRecord":
        return cls(
            dataset_id=data["dataset_id"],
            generator_id=data["generator_id"],
            engine_id=data["engine_id"],
            seed=data["seed"],
            total_requests=data["total_requests"],
            wall_time=data["wall_time"],
            queries=tuple(
                QueryTrace(
                    query=q["query"],
                    pages=tuple(
                        PageTrace(p["request_index"], tuple(p["entities"]), p["has_next"])
                        for p in q["pages"]
                    ),
                )
                for q in data["queries"]
            ),
        )


def execute_plan(
    plan: QueryPlan,
    index: EngineIndex,
    caps: EngineCapabilities,
    policy: FollowPolicy,
    *,
    relevant_ids: frozenset[str] | None = None,
    dataset_id: str = "",
    engine_id: str | None = None,
    seed: int = 0,
) -> RunRecord:
    """Run every planned query page by page under the follow policy."""
    if isinstance(policy, PrecisionThreshold) and relevant_ids is None:
        raise ValueError("precision-threshold policy needs the relevant id set")
    start = time.perf_counter()
    request_index = 0
    traces: list[QueryTrace] = []
    for pq in plan.queries:
        pages: list[PageTrace] = []
        page = 1
        while True:
            result = engine_mod.execute(index, pq.query, page, caps)
            request_index += 1
            ids = tuple(e.id for e in result.entities)
            pages.append(PageTrace(request_index, ids, result.has_next))
            if isinstance(policy, FirstPageOnly) or not result.has_next:
                break
            if isinstance(policy, PrecisionThreshold):
                hits = sum(1 for eid in ids if eid in relevant_ids)
                precision = hits / len(ids) if ids else 0.0
                if precision < policy.theta:
                    break
            page += 1
        traces.append(QueryTrace(query=engine_mod.serialize_query(pq.query), pages=tuple(pages)))
    return RunRecord(
        dataset_id=dataset_id,
        generator_id=plan.generator_id,
        engine_id=engine_id if engine_id is not None else caps.id,
        queries=tuple(traces),
        total_requests=request_index,
        wall_time=time.perf_counter() - start,
        seed=seed,
    )


def t_rel(inputs: Iterable[Publication | str], provenance: IndexProvenance) -> frozenset[str]:
    """All index entries derived from a member of the input set (ground truth)."""
    input_ids = {p.id if isinstance(p, Publication) else p for p in inputs}
    return frozenset(
        idx_id for idx_id, src in provenance.sources.items() if src in input_ids
    )


@dataclass(frozen=True)
class MeasureReport:
    coverage: float
    recall: float | None  # None when T_rel is empty (undefined)
    precision: float
    efficiency_all: float
    efficiency_first: float
    s_size: int
    t_size: int
    t_rel_size: int
    m_size: int
    domain_size: int
    range_size: int
    total_requests: int
    num_queries: int


def compute_measures(
    record: RunRecord,
    mapping: MatchMapping,
    inputs: Sequence[Publication],
    results: Sequence[Publication],
    relevant_ids: frozenset[str],
) -> MeasureReport:
    """Derive all measures from one run; division-free integers are kept so
    the defining identities can be re-checked exactly."""
    s_size = len({p.id for p in inputs})
    t_ids = {p.id for p in results}
    domain = mapping.domain_ids()
    range_ = mapping.range_ids()
    first_ids = record.first_page_ids()
    domain_first = {p.s_id for p in mapping.pairs if p.t_id in first_ids}
    num_queries = len(record.queries)
    return MeasureReport(
        coverage=len(domain) / s_size if s_size else 0.0,
        recall=len(range_) / len(relevant_ids) if relevant_ids else None,
        precision=len(range_) / len(t_ids) if t_ids else 0.0,
        efficiency_all=len(domain) / record.total_requests if record.total_requests else 0.0,
        efficiency_first=len(domain_first) / num_queries if num_queries else 0.0,
        s_size=s_size,
        t_size=len(t_ids),
        t_rel_size=len(relevant_ids),
        m_size=len(mapping),
        domain_size=len(domain),
        range_size=len(range_),
        total_requests=record.total_requests,
        num_queries=num_queries,
    )


@dataclass(frozen=True)
class PagePrecisionSample:
    run_id: str
    query_index: int
    page: int
    page_precision: float
    next_offered: bool
    next_page_precision: float | None  # set iff next_offered and successor fetched


@dataclass(frozen=True)
class NextLinkSummary:
    pages_total: int
    pages_with_next: int
    next_link_fraction: float
    # (current-page precision cutoff, samples at/above it, mean next-page precision)
    cutoff_means: tuple[tuple[float, int, float | None], ...]


def page_precision_samples(
    record: RunRecord, relevant_ids: frozenset[str]
) -> list[PagePrecisionSample]:
    """One sample per fetched page, with the successor's precision when fetched."""
    samples: list[PagePrecisionSample] = []
    for q_index, qt in enumerate(record.queries):
        for i, pt in enumerate(qt.pages):
            hits = sum(1 for eid in pt.entity_ids if eid in relevant_ids)
            precision = hits / len(pt.entity_ids) if pt.entity_ids else 0.0
            next_precision = None
            if pt.has_next and i + 1 < len(qt.pages):
                nxt = qt.pages[i + 1]
                nxt_hits = sum(1 for eid in nxt.entity_ids if eid in relevant_ids)
                next_precision = nxt_hits / len(nxt.entity_ids) if nxt.entity_ids else 0.0
            samples.append(
                PagePrecisionSample(
                    run_id=record.run_id,
                    query_index=q_index,
                    page=pt.request_index - qt.pages[0].request_index + 1 if qt.pages else i + 1,
                    page_precision=precision,
                    next_offered=pt.has_next,
                    next_page_precision=next_precision,
                )
            )
    return samples


def next_link_analysis(
    records: Sequence[RunRecord],
    relevant_by_dataset: Mapping[str, frozenset[str]],
    cutoffs: Sequence[float] = DEFAULT_CUTOFFS,
) -> tuple[list[PagePrecisionSample], NextLinkSummary]:
    """Follow-the-next-link data: per-page precision pairs and the cutoff table
    behind the "only follow when the current page is precise enough" rule."""
    all_pages: list[PagePrecisionSample] = []
    for record in records:
        relevant = relevant_by_dataset[record.dataset_id]
        all_pages.extend(page_precision_samples(record, relevant))
    followed = [s for s in all_pages if s.next_page_precision is not None]
    with_next = sum(1 for s in all_pages if s.next_offered)
    cutoff_means = []
    for cutoff in cutoffs:
        at_or_above = [s.next_page_precision for s in followed if s.page_precision >= cutoff]
        mean = sum(at_or_above) / len(at_or_above) if at_or_above else None
        cutoff_means.append((cutoff, len(at_or_above), mean))
    summary = NextLinkSummary(
        pages_total=len(all_pages),
        pages_with_next=with_next,
        next_link_fraction=with_next / len(all_pages) if all_pages else 0.0,
        cutoff_means=tuple(cutoff_means),
    )
    return followed, summary


# ---------------------------------------------------------------------------
# experiment sweep and results warehouse


@dataclass(frozen=True)
class CellResult:
    record: RunRecord
    report: MeasureReport
    mapping: MatchMapping
    samples: tuple[PagePrecisionSample, ...]
    category: str
    size: int
    error: str | None = None


@dataclass(frozen=True)
class FailedCell:
    dataset_id: str
    generator_id: str
    error: str


MEASURE_COLUMNS = (
    "dataset_id",
    "category",
    "size",
    "generator_id",
    "coverage",
    "recall",
    "precision",
    "efficiency_all",
    "efficiency_first",
    "total_requests",
    "queries",
    "seed",
)

PAGE_COLUMNS = (
    "run_id",
    "query_index",
    "page",
    "page_precision",
    "next_offered",
    "next_page_precision",
)


class Warehouse:
    """Append-only directory of run results, keyed by an input-content hash."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    @property
    def runs_path(self) -> Path:
        return self.path / "runs.jsonl"

    @property
    def measures_path(self) -> Path:
        return self.path / "measures.csv"

    @property
    def pages_path(self) -> Path:
        return self.path / "pages.csv"

    @property
    def matches_path(self) -> Path:
        return self.path / "matches.jsonl"

    @property
    def manifest_path(self) -> Path:
        return self.path / "manifest"

    def load_measures(self) -> list[dict]:
        rows = []
        with open(self.measures_path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != f"format={WAREHOUSE_FORMAT}":
                raise EvaluationError(f"{self.measures_path}: bad format header")
            for row in csv.DictReader(fh):
                row["size"] = int(row["size"])
                row["total_requests"] = int(row["total_requests"])
                row["queries"] = int(row["queries"])
                row["seed"] = int(row["seed"])
                for key in ("coverage", "precision", "efficiency_all", "efficiency_first"):
                    row[key] = float(row[key])
                row["recall"] = float(row["recall"]) if row["recall"] != "" else None
                rows.append(row)
        return rows

    def load_runs(self) -> list[RunRecord]:
        records = []
        with open(self.runs_path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != f"format={WAREHOUSE_FORMAT}":
                raise EvaluationError(f"{self.runs_path}: bad format header")
            for line in fh:
                if line.strip():
                    records.append(RunRecord.from_dict(json.loads(line)))
        return records

    def load_match_pairs(self) -> dict[str, list[tuple]]:
        """run_id -> list of (s_id, t_id, author_sim, title_sim, year_sim)."""
        out: dict[str, list[tuple]] = {}
        with open(self.matches_path, encoding="utf-8") as fh:
            fh.readline()
            for line in fh:
                if not line.strip():
                    continue
                data = json.loads(line)
                run_id = f"{data['dataset_id']}/{data['generator_id']}"
                out[run_id] = [tuple(p) for p in data["pairs"]]
        return out

    def load_pages(self) -> list[dict]:
        rows = []
        with open(self.pages_path, encoding="utf-8") as fh:
            header = fh.readline().strip()
            if header != f"format={WAREHOUSE_FORMAT}":
                raise EvaluationError(f"{self.pages_path}: bad format header")
            for row in csv.DictReader(fh):
                row["query_index"] = int(row["query_index"])
                row["page"] = int(row["page"])
                row["page_precision"] = float(row["page_precision"])
                row["next_offered"] = row["next_offered"] == "true"
                row["next_page_precision"] = (
                    float(row["next_page_precision"]) if row["next_page_precision"] else None
                )
                rows.append(row)
        return rows

    def load_manifest(self) -> dict:
        raw = self.manifest_path.read_text(encoding="utf-8")
        header, _, body = raw.partition("\n")
        if header.strip() != f"format={WAREHOUSE_FORMAT}":
            raise EvaluationError(f"{self.manifest_path}: bad format header")
        return json.loads(body)


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(value)


_WORKER: dict = {}


def _init_worker(state: dict) -> None:
    _WORKER.update(state)


def _run_cell(args: tuple) -> CellResult | FailedCell:
    dataset, spec = args
    st = _WORKER
    try:
        entities = dataset.entities(st["corpus"])
        plan = build_plan(spec, entities, st["caps"], st["corpus"])
        relevant = t_rel(entities, st["provenance"])
        policy = st["policy"]
        cell_seed = derive_seed(st["seed"], "cell", dataset.id, spec.id)
        record = execute_plan(
            plan,
            st["index"],
            st["caps"],
            policy,
            relevant_ids=relevant,
            dataset_id=dataset.id,
            seed=cell_seed,
        )
        results = [st["index"].entity(eid) for eid in sorted(record.returned_ids())]
        mapping = match(entities, results, st["match_config"])
        report = compute_measures(record, mapping, entities, results, relevant)
        samples = tuple(page_precision_samples(record, relevant))
        return CellResult(
            record=record,
            report=report,
            mapping=mapping,
            samples=samples,
            category=dataset.category,
            size=dataset.size,
        )
    except Exception as exc:  # recorded, sweep continues
        return FailedCell(dataset.id, spec.id, f"{type(exc).__name__}: {exc}")


def _content_hash(payload) -> str:
    return hashlib.sha256(
        json.dumps(payload, sort_keys=True, ensure_ascii=False).encode("utf-8")
    ).hexdigest()


def run_experiment(
    corpus: Corpus,
    datasets: Sequence[Dataset],
    specs: Sequence[GeneratorSpec],
    caps: EngineCapabilities,
    profile: NoiseProfile,
    match_config: MatchConfig,
    policy: FollowPolicy,
    seed: int,
    out_dir: str | Path,
    jobs: int = 1,
) -> tuple[Warehouse, list[FailedCell]]:
    """Execute the full (dataset x generator) grid and persist the warehouse.

    Per-cell seeds are derived from the master seed and the cell key, so the
    warehouse content is identical regardless of ``jobs``; rows are sorted
    on flush.
    """
    index, provenance = build_index(corpus, profile)
    state = {
        "corpus": corpus,
        "index": index,
        "provenance": provenance,
        "caps": caps,
        "match_config": match_config,
        "policy": policy,
        "seed": seed,
    }
    cells = [(ds, spec) for ds in datasets for spec in specs]
    cells.sort(key=lambda c: (c[0].id, c[1].id))

    results: list[CellResult | FailedCell]
    if jobs > 1:
        ctx = multiprocessing.get_context("fork")
        with ProcessPoolExecutor(
            max_workers=jobs, mp_context=ctx, initializer=_init_worker, initargs=(state,)
        ) as pool:
            results = list(pool.map(_run_cell, cells, chunksize=8))
    else:
        _init_worker(state)
        results = [_run_cell(cell) for cell in cells]

    ok = [r for r in results if isinstance(r, CellResult)]
    failed = [r for r in results if isinstance(r, FailedCell)]
    ok.sort(key=lambda r: (r.record.dataset_id, r.record.generator_id))

    out = Warehouse(out_dir)
    out.path.mkdir(parents=True, exist_ok=True)

    with open(out.runs_path, "w", encoding="utf-8") as fh:
        fh.write(f"format={WAREHOUSE_FORMAT}\n")
        for cell in ok:
            fh.write(json.dumps(cell.record.to_dict(), ensure_ascii=False) + "\n")

    with open(out.matches_path, "w", encoding="utf-8") as fh:
        fh.write(f"format={WAREHOUSE_FORMAT}\n")
        for cell in ok:
            record = {
                "dataset_id": cell.record.dataset_id,
                "generator_id": cell.record.generator_id,
                "pairs": [
                    [p.s_id, p.t_id, p.author_sim, p.title_sim, p.year_sim]
                    for p in sorted(cell.mapping.pairs, key=lambda p: (p.s_id, p.t_id))
                ],
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    with open(out.measures_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"format={WAREHOUSE_FORMAT}\n")
        writer = csv.writer(fh)
        writer.writerow(MEASURE_COLUMNS)
        for cell in ok:
            rep = cell.report
            writer.writerow(
                [
                    cell.record.dataset_id,
                    cell.category,
                    cell.size,
                    cell.record.generator_id,
                    repr(rep.coverage),
                    _fmt(rep.recall),
                    repr(rep.precision),
                    repr(rep.efficiency_all),
                    repr(rep.efficiency_first),
                    rep.total_requests,
                    rep.num_queries,
                    cell.record.seed,
                ]
            )

    with open(out.pages_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"format={WAREHOUSE_FORMAT}\n")
        writer = csv.writer(fh)
        writer.writerow(PAGE_COLUMNS)
        for cell in ok:
            for s in cell.samples:
                writer.writerow(
                    [
                        s.run_id,
                        s.query_index,
                        s.page,
                        repr(s.page_precision),
                        "true" if s.next_offered else "false",
                        _fmt(s.next_page_precision),
                    ]
                )

    manifest = {
        "format": WAREHOUSE_FORMAT,
        "seed": seed,
        "engine": caps.id,
        "policy": policy_label(policy),
        "cells": len(cells),
        "completed": len(ok),
        "failed": [
            {"dataset_id": f.dataset_id, "generator_id": f.generator_id, "error": f.error}
            for f in failed
        ],
        "inputs": {
            "corpus": _content_hash([p.to_dict() for p in corpus]),
            "datasets": _content_hash(
                [[d.id, d.category, d.size, list(d.members), d.seed] for d in datasets]
            ),
            "generators": _content_hash([spec.id for spec in specs]),
            "caps": _content_hash(engine_mod.caps_to_dict(caps)),
            "noise": _content_hash(profile.to_dict()),
            "match": _content_hash(match_config.to_dict()),
        },
    }
    with open(out.manifest_path, "w", encoding="utf-8") as fh:
        fh.write(f"format={WAREHOUSE_FORMAT}\n")
        fh.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    return out, failed
