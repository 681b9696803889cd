"""Plot-ready CSV reports derived from a results warehouse.

Each report mirrors one of the evaluation views: mean coverage per
generator and dataset category, the recall/coverage ratio per generator
(coverage normalized to 100%), mean efficiency (first request vs. all
requests) per generator and category, and the next-link scatter of
current-page precision against next-page precision. Reports are derived
from the warehouse files alone.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path
from typing import Sequence

from .corpus import CATEGORIES
from .evaluator import Warehouse

REPORT_KINDS = (
    "coverage-by-category",
    "coverage-recall-ratio",
    "efficiency-by-category",
    "nextlink-scatter",
)


class ReportError(ValueError):
    pass


def _mean(values: Sequence[float]) -> float | None:
    return sum(values) / len(values) if values else None


def _by_generator(rows: list[dict]) -> dict[str, list[dict]]:
    grouped: dict[str, list[dict]] = defaultdict(list)
    for row in rows:
        grouped[row["generator_id"]].append(row)
    return dict(sorted(grouped.items()))


def coverage_by_category(rows: list[dict]) -> tuple[list[str], list[list]]:
    header = ["generator_id", *CATEGORIES]
    table = []
    for gen_id, group in _by_generator(rows).items():
        out: list = [gen_id]
        for category in CATEGORIES:
            mean = _mean([r["coverage"] for r in group if r["category"] == category])
            out.append("" if mean is None else repr(mean))
        table.append(out)
    return header, table


def coverage_recall_ratio(rows: list[dict]) -> tuple[list[str], list[list]]:
    header = ["generator_id", "coverage_pct", "recall_pct"]
    table = []
    for gen_id, group in _by_generator(rows).items():
        coverage = _mean([r["coverage"] for r in group])
        recall = _mean([r["recall"] for r in group if r["recall"] is not None])
        if not coverage or recall is None:
            table.append([gen_id, "100.0", ""])
        else:
            table.append([gen_id, "100.0", repr(100.0 * recall / coverage)])
    return header, table


def efficiency_by_category(rows: list[dict]) -> tuple[list[str], list[list]]:
    header = ["generator_id", "category", "efficiency_first", "efficiency_all"]
    table = []
    for gen_id, group in _by_generator(rows).items():
        for category in CATEGORIES:
            sub = [r for r in group if r["category"] == category]
            if not sub:
                continue
            table.append(
                [
                    gen_id,
                    category,
                    repr(_mean([r["efficiency_first"] for r in sub])),
                    repr(_mean([r["efficiency_all"] for r in sub])),
                ]
            )
    return header, table


def nextlink_scatter(pages: list[dict]) -> tuple[list[str], list[list]]:
    header = [
        "current_page_precision",
        "next_page_precision",
        "run_id",
        "query_index",
        "page",
    ]
    table = []
    for row in pages:
        if row["next_page_precision"] is None:
            continue
        table.append(
            [
                repr(row["page_precision"]),
                repr(row["next_page_precision"]),
                row["run_id"],
                row["query_index"],
                row["page"],
            ]
        )
    return header, table


def build_report(warehouse: Warehouse, kind: str) -> tuple[list[str], list[list]]:
    if kind not in REPORT_KINDS:
        raise ReportError(f"unknown report kind {kind!r}; expected one of {REPORT_KINDS}")
    if kind == "nextlink-scatter":
        return nextlink_scatter(warehouse.load_pages())
    rows = warehouse.load_measures()
    if not rows:
        raise ReportError("warehouse holds no measures")
    if kind == "coverage-by-category":
        return coverage_by_category(rows)
    if kind == "coverage-recall-ratio":
        return coverage_recall_ratio(rows)
    return efficiency_by_category(rows)


def write_report(warehouse: Warehouse, kind: str, out_path: str | Path) -> Path:
    header, table = build_report(warehouse, kind)
    out_path = Path(out_path)
    with open(out_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(table)
    return out_path
