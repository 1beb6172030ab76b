"""mcqgen: synthesize multiple-choice QA datasets from raw text.

Questions are anchored on named entities found by rules (patterns plus
gazetteers), realized from cloze statements, and paired with distractors
drawn from the global answer pool or a knowledge graph.  Training-free
baselines (sliding window, random) close the loop for quality checks.
"""

from .corpus import CORPUS_FORMATS, Passage, load_corpus, split_sentences
from .distractor import (
    AnswerPool,
    CandidateSet,
    Distractor,
    PoolEntry,
    assemble_candidates,
    hybrid_distractors,
    kg_distractors,
    ne_distractors,
    random_distractors,
)
from .entity import (
    DEFAULT_UNITS,
    GAZETTEER_TYPES,
    PATTERN_TYPES,
    EntityMention,
    EntityType,
    GazetteerSet,
    extract_entities,
    load_annotations,
    validate_mention,
)
from .errors import (
    AnnotationError,
    ClozeError,
    ConfigError,
    CorpusFormatError,
    GazetteerError,
    GenerationFailure,
    GroundingFailed,
    KnowledgeBaseError,
    McqgenError,
    PoolExhausted,
    ResourceError,
    SubgraphExhausted,
)
from .evaluate import EVAL_METHODS, EvalResult, evaluate, sw_predict, sw_score, tokenize
from .kg import (
    EmbeddingTable,
    KnowledgeIndex,
    ScoredCandidate,
    build_index,
    ground,
    load_embeddings,
    load_index,
    normalize_term,
    retrieve_subgraph,
    save_index,
    score_candidates,
)
from .pipeline import (
    STRATEGIES,
    McqaSample,
    PipelineConfig,
    RunReport,
    assign_split,
    derive_seed,
    generate_dataset,
    parse_sample,
    split_hash,
    stats,
)
from .qgen import (
    MASK_TOKEN,
    REALIZATION_MODES,
    GeneratedQuestion,
    QuestionType,
    generate_question,
    make_cloze,
    question_type_of,
    realize_question,
)

__version__ = "0.1.0"

__all__ = [
    "AnnotationError",
    "AnswerPool",
    "CandidateSet",
    "ClozeError",
    "ConfigError",
    "CorpusFormatError",
    "CORPUS_FORMATS",
    "DEFAULT_UNITS",
    "Distractor",
    "EmbeddingTable",
    "EntityMention",
    "EntityType",
    "EVAL_METHODS",
    "EvalResult",
    "GAZETTEER_TYPES",
    "GazetteerError",
    "GazetteerSet",
    "GeneratedQuestion",
    "GenerationFailure",
    "GroundingFailed",
    "KnowledgeBaseError",
    "KnowledgeIndex",
    "MASK_TOKEN",
    "McqaSample",
    "McqgenError",
    "PATTERN_TYPES",
    "Passage",
    "PipelineConfig",
    "PoolEntry",
    "PoolExhausted",
    "QuestionType",
    "REALIZATION_MODES",
    "ResourceError",
    "RunReport",
    "ScoredCandidate",
    "STRATEGIES",
    "SubgraphExhausted",
    "assemble_candidates",
    "assign_split",
    "build_index",
    "derive_seed",
    "evaluate",
    "extract_entities",
    "generate_dataset",
    "generate_question",
    "ground",
    "hybrid_distractors",
    "kg_distractors",
    "load_annotations",
    "load_corpus",
    "load_embeddings",
    "load_index",
    "make_cloze",
    "ne_distractors",
    "normalize_term",
    "parse_sample",
    "question_type_of",
    "random_distractors",
    "realize_question",
    "retrieve_subgraph",
    "save_index",
    "score_candidates",
    "split_hash",
    "split_sentences",
    "stats",
    "sw_predict",
    "sw_score",
    "tokenize",
    "validate_mention",
    "__version__",
]
