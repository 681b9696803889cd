"""Query generators for entity search engines, evaluated against a
deterministic in-process search-engine simulator.

The package covers the whole loop: corpus and dataset management, the
capability-driven engine simulator, the query-generator framework
(partitioning, attribute-predicate mapping, value generation, aggregation),
automatic entity matching, and the evaluation harness computing coverage,
recall, precision and request efficiency into a results warehouse.
"""

__version__ = "0.1.0"

from .corpus import (  # noqa: F401
    Corpus,
    Dataset,
    IndexProvenance,
    NoiseProfile,
    Publication,
    build_index,
    default_noise,
    generate_datasets,
    load_corpus,
    save_corpus,
    zero_noise,
)
from .engine import (  # noqa: F401
    BasicQuery,
    EngineCapabilities,
    EngineIndex,
    PredicateSpec,
    Query,
    ResultPage,
    SearchValue,
    execute,
    scholar_profile,
    serialize_query,
    term_matches,
    validate,
)
from .evaluator import (  # noqa: F401
    AllPages,
    FirstPageOnly,
    MeasureReport,
    PrecisionThreshold,
    RunRecord,
    Warehouse,
    compute_measures,
    execute_plan,
    next_link_analysis,
    run_experiment,
    t_rel,
)
from .generators import (  # noqa: F401
    FrequentValuePartitioning,
    GeneratorSpec,
    NaivePartitioning,
    Partition,
    QueryPlan,
    build_plan,
    gen_pattern,
    gen_value,
    partition_frequent_value,
    partition_naive,
    table3_catalog,
)
from .matcher import (  # noqa: F401
    MatchConfig,
    MatchMapping,
    author_sim,
    match,
    title_sim,
    year_sim,
)
from .synth import generate_corpus  # noqa: F401
