"""Ontology matching by simulated annealing over lexical and structural
similarity."""
from .alignment import Alignment, Correspondence, load_alignment, read_alignment, save_alignment, write_alignment
from .annealing import AlignmentState, Annealer, SAConfig, anneal, extract_alignment, propose_move, state_fitness
from .evaluation import EvaluationReport, Scores, evaluate, evaluate_track
from .lexical import CorpusStats, LexicalScorer, jaro, jaro_winkler, lexical_similarity, soft_tfidf
from .matrix import SimilarityMatrix, build_similarity_matrix
from .ontology import EntityKind, EntityRef, Ontology, load_ontology, parse_ontology, serialize_ontology
from .pipeline import MatchConfig, MatchResult, match
from .porter import stem
from .structural import StructuralContext, combined_similarity, subsumption_boost
from .text import StopList, TokenBag, preprocess, tokenize
from .wordnet import WordNetTaxonomy, wu_palmer

__version__ = "0.1.0"
