"""Seeded synthetic bibliographic corpus generation.

The generated corpus is shaped so that the evaluation grid is feasible at
desk scale: author productivity follows a Zipf-like curve (a few authors
with very many publications, a long tail), title tokens are drawn from a
skewed vocabulary (so some keywords are shared by many titles), and venues
publish yearly volumes with recency-weighted sizes. Titles are kept
pairwise distinct and window-free (no title occurs as a contiguous token
run inside another), which makes every title identifiable by a wildcard
pattern.
"""

from __future__ import annotations

import random

from .corpus import Corpus, Publication
from .seeding import derive_seed

FIRST_NAMES = (
    "Alice Anna Boris Carla Chen Clara Daniel David Elena Erik Felix Grace "
    "Hannah Henry Igor Ines Jan Julia Karl Laura Lena Marco Maria Martin "
    "Nina Noah Olia Omar Paula Peter Priya Rahul Rosa Samuel Sofia Stefan "
    "Tanja Tomas Vera Wei"
).split()

LAST_NAMES = (
    "Abel Adler Ahmed Albrecht Arnold Baker Bauer Becker Berger Bergmann "
    "Bianchi Braun Brown Busch Carter Chen Clark Conti Costa Dietrich Engel "
    "Ernst Fischer Franke Frei Fuchs Garcia Graf Gruber Haas Hahn Hartmann "
    "Heller Herrmann Hoffmann Huber Ivanov Jansen Jung Kaiser Keller Kim "
    "Klein Koch Kowalski Kraus Krueger Kumar Lang Lehmann Lindgren Lopez "
    "Lorenz Ludwig Maier Marek Martin Mayer Meier Mendez Meyer Moeller "
    "Moreau Mueller Nagel Neumann Novak Otto Peters Petrov Pfeifer Pohl "
    "Richter Rossi Roth Sato Sauer Schmid Schneider Scholz Schubert Schulz "
    "Schwarz Seidel Silva Simon Sommer Stein Tanaka Thomas Vogel Wagner "
    "Walter Weber Weiss Werner Winkler Wolf Yang Zhang Zimmermann"
).split()

TITLE_VOCAB = (
    "adaptive aggregation algebra algorithm algorithms alignment analysis "
    "annotation anomaly approach approximation architecture attention "
    "automata bandit bayesian benchmark benchmarks bounds cache caching "
    "calculus cardinality cascade causal classification cluster clustering "
    "coding collaboration compilation completeness complexity compression "
    "computation concurrency consensus consistency constraint convergence "
    "convex coordination correlation crawling cryptography curation data "
    "database databases decision decomposition deduplication dependency "
    "detection diagnosis discovery distributed diversity document dynamic "
    "efficiency embedding encoding engine entity entropy enumeration "
    "equivalence estimation evaluation evolution execution experiment "
    "exploration extraction factorization feature federated filtering "
    "forecasting fusion games generation geometry gradient graph graphs "
    "hashing heuristic hierarchy hypergraph identification incremental "
    "indexing inference information integration interaction interface "
    "interpolation iteration kernel kernels keyword knowledge labeling "
    "language lattice learning linkage locality logic machine management "
    "mapping markov matching matrix measurement memory metadata method "
    "methods metric migration mining model models monitoring multimodal "
    "navigation network networks neural normalization notation numerical "
    "ontology operator optimization ordering orchestration paging parallel "
    "parsing partitioning pattern patterns performance personalization "
    "pipeline planning policies prediction preference privacy probabilistic "
    "processing profiling programming projection propagation protocol "
    "provenance pruning quality quantization queries query random ranking "
    "reasoning recognition recommendation reconstruction recovery recursion "
    "reduction refinement regression regularization reliability replication "
    "representation resolution retrieval robustness routing sampling "
    "scalability scaling scheduling schema search segmentation selection "
    "semantics sensing sequence serialization services similarity simulation "
    "sketching smoothing spanning sparse spatial spectral stability storage "
    "streaming structure summarization synchronization synthesis systems "
    "temporal tensor testing theory topology tracing tracking transactions "
    "transfer transformation traversal trees uncertainty validation "
    "variational verification versioning visualization vocabulary warehouse "
    "wavelet web workflow workload "
    # long tail: rarer topic words keep most titles identifiable by one or
    # two uncommon tokens, mirroring real bibliographic vocabulary spread
    "abstraction accelerated access accountability accuracy acoustic "
    "actuation admission adversarial advertising aerial affinity agents "
    "allocation amortized analytics anchoring anonymity answering antennas "
    "arbitration arithmetic assembly assessment assignment association "
    "asymptotic atomicity auctions auditing augmentation authentication "
    "authorship automation autonomy availability averaging awareness "
    "backbone backoff backpressure balancing bandwidth batching beacons "
    "belief bidding binarization binding bioinformatics bisection bitmaps "
    "blockchain blocking bloom boosting bootstrapping branching broadcast "
    "brokering buffering bundling bursts bytecode calibration canonical "
    "capacity capture cataloging causality cellular census certification "
    "chaining channels checkpointing circuits citation classifiers cleaning "
    "clocks closures coalescing codebooks cognition coherence cohorts "
    "collection collisions coloring combinatorial commerce commitment "
    "committees commodity communication community comparability compilers "
    "compliance composition concepts conditioning conferencing confidence "
    "configuration conflict congestion conjunctive connectivity "
    "conservation consolidation containers contention contextual contracts "
    "contrastive controllers convection conversion convolution cooperation "
    "copyright corpora correctness counters counting coupling coverage "
    "crowdsourcing cubes curricula customization cycles dashboards "
    "deadlines debugging decentralized decoding deduction defenses delegation "
    "demand denoising density deployment derivation descriptors designs "
    "determinism diagnostics dialogue dictionaries differencing diffusion "
    "digests dimensionality directories disambiguation discretization "
    "dispatching dissemination distillation distortion divergence dividers "
    "documentation domains dominance drift droplets durability dynamics "
    "eavesdropping ecology economics ecosystems editing education elasticity "
    "elections embeddings emulation encryption endorsement energy engines "
    "ensembles entailment enterprises environments episodes epsilon "
    "ergonomics errors escrow ethics etiquette evacuation evidence exchange "
    "expansion expertise explanation exponents exposure expressiveness "
    "extensibility fabrication failover fairness families fault feedback "
    "fidelity filters fingerprinting firmware fitness flooding flows "
    "forensics forgetting formalization formats fragmentation frameworks "
    "franchising freshness frontiers functional gamification gateways "
    "genomics geolocation gestures governance grammars granularity grids "
    "grouping guarantees guidance habitats handoff handshaking hardware "
    "harvesting healthcare heterogeneity histograms holography homomorphic "
    "hosting hotspots hybrid hydrology hygiene hyperparameters hypothesis "
    "idempotence imaging imitation immutability imputation incentives "
    "indirection induction inequalities infrastructure inheritance "
    "initialization injection innovation insertion inspection instability "
    "instrumentation insurance intangibles integrity intelligence intent "
    "interconnect interleaving internet interoperability interpretation "
    "intervals interviews introspection intrusion invariants inventory "
    "inversion irrigation isolation isomorphism journaling judgment "
    "justification kinematics languages latency lattices layering layouts "
    "leaderboards leakage leasing lectures ledgers lemmas lexicons "
    "libraries licensing lifetimes lineage linearization liquidity literacy "
    "localization locks logging logistics lookup lotteries lowering loyalty "
    "machining macros maintenance malware manifests manipulation manuals "
    "marketplaces masking materialization matrices maturity mediation "
    "membership memoization mentorship merging meshes messaging "
    "metaprogramming microservices middleware minimization mirroring "
    "mobility moderation modularity momentum monetization morphology "
    "multicast multiplexing multitenancy mutation negotiation neighborhoods "
    "nesting neutrality nominations norms notarization notification "
    "obfuscation objectives obligations observability offloading onboarding "
    "opacity openness operations opinions optimality oracles orchestrators "
    "organization orientation originality oscillation outliers outsourcing "
    "overlays overprovisioning oversight ownership packaging parallelism "
    "parameters paraphrasing partitions passports patches pathways payments "
    "pedagogy penalties perception permissions persistence perturbation "
    "pharmacology phenotypes phonetics photonics physics pipelines pivoting "
    "placement platforms plausibility playback pluralism pointers policing "
    "pooling popularity portability positioning pragmatics precision "
    "preemption preferences prefetching preprocessing preservation pricing "
    "primitives prioritization probing procedures procurement productivity "
    "prognosis projections proofs propulsion protection prototyping proxies "
    "publishing quadrature qualification quantifiers quotas randomness "
    "reachability reactivity readability rebalancing recalibration receipts "
    "reciprocity reconciliation recordings redaction redistribution "
    "redundancy reflection regimes registration regulation rehearsal "
    "reinforcement relaxation relevance remediation renaming rendering "
    "renewal reordering reparation repositories reproducibility reputation "
    "rescheduling residuals resilience resourcing responsiveness restoration "
    "retention retrospectives reuse revenue reviews revocation rewriting "
    "rigidity risk roadmaps roaming rollback rotation roundtrips safety "
    "sandboxing sanitization satisfiability saturation scanners scenarios "
    "scoping scoring screening scripting scrubbing secrecy sedimentation "
    "seeding semantic sensitivity sentiment separation sequencing sharding "
    "sharing shielding shipping signaling signatures silos simulators "
    "singularity skylines slicing snapshots socialization software solvers "
    "sonar sourcing sovereignty specialization specification speculation "
    "splitting spoofing spreading sprints stacking staging stakeholders "
    "standardization statistics steering stewardship stitching stochastic "
    "strategies stratification subscription subsumption supervision "
    "surfaces surveillance sustainability swarms switching symmetry "
    "synonyms syntax tagging tardiness taxonomies telemetry templates "
    "tenancy termination terminology tessellation throttling throughput "
    "ticketing timeliness timetabling tokenization tolerance tomography "
    "toolkits tradeoffs transcription transduction transitions translation "
    "transparency transpilation triage triangulation trust tuning tunneling "
    "turbulence typing ubiquity unification unlearning updates upgrades "
    "usability utilization valuation variance vectorization venues "
    "verifiability virtualization viscosity vision volatility voting "
    "walkthroughs watermarking weighting wellbeing wireless witnesses "
    "workspaces wrappers zoning"
).split()

VENUES = (
    "SIGDATA",
    "Web Conference",
    "Journal of Data Engineering",
    "IRSearch Symposium",
    "Knowledge Systems Review",
    "Distributed Computing Letters",
    "Semantic Integration Workshop",
    "Transactions on Retrieval",
)

CONNECTORS = ("of", "for", "on", "with", "in")
OPENERS = ("the", "a")

YEAR_MIN, YEAR_MAX = 1970, 2009


def _zipf_weights(n: int, exponent: float) -> list[float]:
    return [1.0 / (k + 1) ** exponent for k in range(n)]


class _TitleFactory:
    """Draws titles that are pairwise distinct and window-free."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        vocab = list(TITLE_VOCAB)
        rng.shuffle(vocab)
        self.vocab = vocab
        self.weights = _zipf_weights(len(vocab), 0.7)
        self.titles: set[tuple[str, ...]] = set()
        self.windows: set[tuple[str, ...]] = set()
        self._overflow = 0

    def _draw_tokens(self) -> list[str]:
        rng = self.rng
        n_content = rng.choices((3, 4, 5, 6), weights=(25, 35, 25, 15))[0]
        content = []
        while len(content) < n_content:
            tok = rng.choices(self.vocab, weights=self.weights)[0]
            if tok not in content:
                content.append(tok)
        tokens = list(content)
        if len(tokens) >= 3 and rng.random() < 0.5:
            tokens.insert(rng.randrange(1, len(tokens)), rng.choice(CONNECTORS))
        if rng.random() < 0.4:
            tokens.insert(0, rng.choice(OPENERS))
        return tokens

    def _conflicts(self, seq: tuple[str, ...]) -> bool:
        if seq in self.windows:  # contained in (or equal to) an existing title
            return True
        n = len(seq)
        for i in range(n):
            for j in range(i + 1, n + 1):
                if seq[i:j] in self.titles:  # contains an existing title
                    return True
        return False

    def next_title(self) -> str:
        for attempt in range(60):
            tokens = self._draw_tokens()
            if attempt >= 40:  # salt with a fresh token to force uniqueness
                self._overflow += 1
                tokens.append(f"v{self._overflow}")
            seq = tuple(tokens)
            if not self._conflicts(seq):
                self.titles.add(seq)
                for i in range(len(seq)):
                    for j in range(i + 1, len(seq) + 1):
                        self.windows.add(seq[i:j])
                return " ".join(tokens).capitalize()
        raise RuntimeError("could not draw a conflict-free title")


def generate_corpus(size: int, seed: int) -> Corpus:
    """Synthetic corpus of ``size`` publications, byte-stable per seed."""
    if size < 1:
        raise ValueError("corpus size must be >= 1")
    rng = random.Random(derive_seed(seed, "synth-corpus"))

    pool_size = max(30, min(900, size))
    names = [(f, l) for f in FIRST_NAMES for l in LAST_NAMES]
    rng.shuffle(names)
    authors = [f"{f} {l}" for f, l in names[:pool_size]]
    author_weights = _zipf_weights(pool_size, 0.55)

    venue_weights = _zipf_weights(len(VENUES), 1.1)
    years = list(range(YEAR_MIN, YEAR_MAX + 1))
    year_weights = [1.08 ** (y - YEAR_MIN) for y in years]

    titles = _TitleFactory(rng)
    pubs: list[Publication] = []
    for ordinal in range(size):
        n_authors = rng.choices((1, 2, 3, 4), weights=(20, 40, 30, 10))[0]
        chosen: list[str] = []
        while len(chosen) < n_authors:
            name = rng.choices(authors, weights=author_weights)[0]
            if name not in chosen:
                chosen.append(name)
        year = rng.choices(years, weights=year_weights)[0]
        venue = f"{rng.choices(VENUES, weights=venue_weights)[0]} {year}"
        pubs.append(
            Publication(
                id=f"p{ordinal:05d}",
                authors=tuple(chosen),
                title=titles.next_title(),
                year=year,
                venue=venue,
            )
        )
    return Corpus(pubs)
