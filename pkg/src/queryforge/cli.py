"""Command-line entry point.

Subcommands: ``gen-corpus`` (synthetic corpus), ``gen-datasets`` (seeded
dataset grid), ``build-index`` (noisy searchable index), ``run`` (full
evaluation sweep into a results warehouse) and ``report`` (plot-ready CSVs
from a warehouse). Exit codes: 0 success, 1 usage or configuration error,
2 partial failure (some grid cells failed), 3 total failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .corpus import (
    CATEGORIES,
    CorpusError,
    DatasetGenerationError,
    NoiseProfile,
    build_index,
    default_noise,
    generate_datasets,
    load_corpus,
    save_corpus,
    save_datasets,
    save_index,
    zero_noise,
)
from .engine import CapabilityError, load_caps
from .evaluator import Warehouse, parse_policy, run_experiment
from .generators import SpecError, load_genspec
from .matcher import MatchConfig
from .report import REPORT_KINDS, ReportError, write_report
from .seeding import derive_seed
from .synth import generate_corpus

RUN_CONFIG_FORMAT = "qf-run-1"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2
EXIT_TOTAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="queryforge", description=__doc__)
    parser.add_argument("--version", action="version", version=f"queryforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-corpus", help="generate a synthetic corpus file")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("gen-datasets", help="generate the evaluation dataset grid")
    p.add_argument("--corpus", required=True)
    p.add_argument("--sizes", default="5,30,100", help="comma-separated dataset sizes")
    p.add_argument("--categories", default=",".join(CATEGORIES))
    p.add_argument("--reps", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("build-index", help="derive a noisy searchable index")
    p.add_argument("--corpus", required=True)
    p.add_argument("--noise", default="default", help="zero | default | path to a JSON profile")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("run", help="run the full evaluation sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="override the output directory from the config")
    p.add_argument("--seed", type=int, help="override the master seed from the config")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker hint")

    p = sub.add_parser("report", help="emit a plot-ready CSV from a warehouse")
    p.add_argument("--warehouse", required=True)
    p.add_argument("--kind", required=True, choices=REPORT_KINDS)
    p.add_argument("--out", required=True)
    return parser


def _noise_profile(spec: str, seed: int) -> NoiseProfile:
    if spec == "zero":
        return zero_noise(seed)
    if spec == "default":
        return default_noise(seed)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"noise profile {spec!r} is neither zero/default nor a file")
    data = json.loads(path.read_text(encoding="utf-8"))
    data.setdefault("seed", seed)
    return NoiseProfile.from_dict(data)


class ConfigError(Exception):
    """Run configuration problem; the message names the offending field."""


def _field(data: dict, path: str, kind, required: bool = True, default=None):
    node = data
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(f"run config: missing field {path!r}")
            return default
        node = node[part]
    if kind is not None and not isinstance(node, kind):
        raise ConfigError(f"run config: field {path!r} has wrong type")
    return node


def load_run_config(path: str | Path) -> dict:
    path = Path(path)
    raw = path.read_text(encoding="utf-8")
    header, _, body = raw.partition("\n")
    if header.strip() != f"format={RUN_CONFIG_FORMAT}":
        raise ConfigError(f"{path}: expected header format={RUN_CONFIG_FORMAT}")
    try:
        data = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON: {exc}") from None
    base = path.parent

    def respath(field_path: str, value: str) -> Path:
        resolved = (base / value).resolve() if not Path(value).is_absolute() else Path(value)
        if not resolved.exists():
            raise ConfigError(f"run config: field {field_path!r} points to missing {resolved}")
        return resolved

    config = {
        "corpus": respath("corpus", _field(data, "corpus", str)),
        "engine_caps": respath("engine_caps", _field(data, "engine_caps", str)),
        "generators": [
            respath(f"generators[{i}]", g)
            for i, g in enumerate(_field(data, "generators", list))
        ],
        "noise": _field(data, "noise", (dict, str)),
        "match": _field(data, "match", dict, required=False, default={}),
        "sizes": _field(data, "grid.sizes", list),
        "categories": _field(data, "grid.categories", list),
        "reps": _field(data, "grid.reps", int),
        "follow_policy": _field(data, "follow_policy", str, required=False, default="all-pages"),
        "seed": _field(data, "seed", int),
        "out": _field(data, "out", str, required=False, default="warehouse"),
    }
    if not config["generators"]:
        raise ConfigError("run config: field 'generators' must list at least one spec")
    for category in config["categories"]:
        if category not in CATEGORIES:
            raise ConfigError(f"run config: field 'grid.categories' has unknown {category!r}")
    return config


def cmd_gen_corpus(args) -> int:
    if args.size < 1:
        raise UsageError("--size must be >= 1")
    corpus = generate_corpus(args.size, args.seed)
    save_corpus(corpus, args.out)
    print(f"wrote corpus of {len(corpus)} publications to {args.out}")
    return EXIT_OK


def cmd_gen_datasets(args) -> int:
    corpus = load_corpus(args.corpus)
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    categories = [c.strip() for c in args.categories.split(",") if c.strip()]
    if not sizes or any(s < 1 for s in sizes):
        raise UsageError("--sizes must list positive integers")
    if args.reps < 1:
        raise UsageError("--reps must be >= 1")
    datasets = generate_datasets(corpus, sizes, categories, args.reps, args.seed)
    save_datasets(datasets, args.out)
    print(f"wrote {len(datasets)} datasets to {args.out}")
    return EXIT_OK


def cmd_build_index(args) -> int:
    corpus = load_corpus(args.corpus)
    profile = _noise_profile(args.noise, args.seed)
    index, provenance = build_index(corpus, profile)
    save_index(index, provenance, args.out)
    distractors = len(provenance.distractor_ids())
    print(f"wrote index of {len(index)} entries ({distractors} distractors) to {args.out}")
    return EXIT_OK


def _print_summary(warehouse: Warehouse) -> None:
    rows = warehouse.load_measures()
    generators = sorted({r["generator_id"] for r in rows})
    print(f"{'generator':<12}" + "".join(f"{c:>16}" for c in CATEGORIES))
    for metric in ("coverage", "efficiency_all"):
        print(f"-- mean {metric} --")
        for gen_id in generators:
            cells = []
            for category in CATEGORIES:
                values = [
                    r[metric]
                    for r in rows
                    if r["generator_id"] == gen_id and r["category"] == category
                ]
                cells.append(f"{sum(values) / len(values):>16.3f}" if values else f"{'-':>16}")
            print(f"{gen_id:<12}" + "".join(cells))


def cmd_run(args) -> int:
    config = load_run_config(args.config)
    seed = args.seed if args.seed is not None else config["seed"]
    out_dir = Path(args.out) if args.out else Path(config["out"])

    corpus = load_corpus(config["corpus"])
    caps = load_caps(config["engine_caps"])
    specs = [load_genspec(p) for p in config["generators"]]
    noise = config["noise"]
    if isinstance(noise, str):
        profile = _noise_profile(noise, derive_seed(seed, "noise"))
    else:
        noise = dict(noise)
        noise.setdefault("seed", derive_seed(seed, "noise"))
        profile = NoiseProfile.from_dict(noise)
    match_config = MatchConfig.from_dict(config["match"]) if config["match"] else MatchConfig()
    policy = parse_policy(config["follow_policy"])
    datasets = generate_datasets(
        corpus, config["sizes"], config["categories"], config["reps"], seed
    )

    warehouse, failed = run_experiment(
        corpus,
        datasets,
        specs,
        caps,
        profile,
        match_config,
        policy,
        seed,
        out_dir,
        jobs=max(args.jobs, 1),
    )
    total = len(datasets) * len(specs)
    print(f"completed {total - len(failed)}/{total} cells into {warehouse.path}")
    if failed:
        for cell in failed[:10]:
            print(f"  failed {cell.dataset_id}/{cell.generator_id}: {cell.error}")
        return EXIT_TOTAL if len(failed) == total else EXIT_PARTIAL
    _print_summary(warehouse)
    return EXIT_OK


def cmd_report(args) -> int:
    warehouse = Warehouse(args.warehouse)
    if not warehouse.measures_path.exists():
        raise UsageError(f"{args.warehouse} is not a warehouse (measures.csv missing)")
    path = write_report(warehouse, args.kind, args.out)
    print(f"wrote {args.kind} report to {path}")
    return EXIT_OK


_COMMANDS = {
    "gen-corpus": cmd_gen_corpus,
    "gen-datasets": cmd_gen_datasets,
    "build-index": cmd_build_index,
    "run": cmd_run,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, CorpusError, CapabilityError, SpecError, ReportError,
            DatasetGenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOTAL


if __name__ == "__main__":
    sys.exit(main())
