"""End-to-end matching of two loaded ontologies."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from .alignment import Alignment
from .annealing import Annealer, AlignmentState, SAConfig, extract_alignment
from .lexical import LexicalScorer
from .matrix import DEFAULT_FLOOR, SimilarityMatrix, build_similarity_matrix
from .ontology import Ontology
from .structural import StructuralContext
from .text import StopList
from .wordnet import WordNetTaxonomy

logger = logging.getLogger(__name__)


@dataclass
class MatchConfig:
    sa: SAConfig = field(default_factory=SAConfig)
    floor: float = DEFAULT_FLOOR
    wordnet: WordNetTaxonomy | None = None
    stops: StopList | None = None


@dataclass
class MatchResult:
    alignment: Alignment
    state: AlignmentState
    sims: SimilarityMatrix
    diagnostics: dict


def match(o1: Ontology, o2: Ontology, config: MatchConfig | None = None) -> MatchResult:
    """Similarity matrix -> annealing -> thresholded alignment."""
    config = config or MatchConfig()
    started = time.perf_counter()
    wn = config.wordnet if config.wordnet is not None else WordNetTaxonomy.empty()
    misses_before = sum(wn.misses.values())
    ctx = StructuralContext(o1, o2, LexicalScorer(o1, o2, wn, config.stops))
    sims = build_similarity_matrix(o1, o2, floor=config.floor, ctx=ctx)
    state = Annealer(sims, ctx, config.sa).anneal()
    alignment = extract_alignment(state, config.sa.extraction_threshold, o1.id, o2.id)
    diagnostics = {
        "onto1": o1.id,
        "onto2": o2.id,
        "entities1": len(o1),
        "entities2": len(o2),
        "skipped_axioms1": o1.report.skipped_axioms,
        "skipped_axioms2": o2.report.skipped_axioms,
        "matrix_entries": len(sims),
        "wordnet_misses": sum(wn.misses.values()) - misses_before,
        "state_pairs": len(state),
        "final_fitness": state.fitness,
        "correspondences": len(alignment),
        "wall_time_s": time.perf_counter() - started,
    }
    logger.info(
        "matched %s/%s: %d candidates, %d pairs, fitness %.4f, %d correspondences in %.2fs",
        o1.id,
        o2.id,
        len(sims),
        len(state),
        state.fitness,
        len(alignment),
        diagnostics["wall_time_s"],
    )
    return MatchResult(alignment, state, sims, diagnostics)
