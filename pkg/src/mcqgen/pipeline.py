"""End-to-end dataset generation.

Wires corpus loading, entity extraction, question realization and
distractor selection into one deterministic run: a first pass collects
the answer pool, a second pass emits JSON Lines samples split into train
and dev by a stable hash of the passage id.  Per-sample randomness is
seeded from (master seed, passage id, mention span), so reruns over the
same inputs produce byte-identical dataset files.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable

from .corpus import CORPUS_FORMATS, Passage, load_corpus
from .distractor import (
    AnswerPool,
    Distractor,
    assemble_candidates,
    hybrid_distractors,
    kg_distractors,
    ne_distractors,
    random_distractors,
)
from .entity import (
    DEFAULT_UNITS,
    EntityMention,
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
    GenerationFailure,
    ResourceError,
)
from .kg import EmbeddingTable, KnowledgeIndex, build_index, load_embeddings, load_index
from .qgen import (
    MASK_TOKEN,
    REALIZATION_MODES,
    QuestionType,
    make_cloze,
    question_type_of,
    realize_question,
)

STRATEGIES = ("random", "ne", "kg", "kg-ne")

QTYPE_ORDER = tuple(q.value for q in QuestionType)


@dataclass
class PipelineConfig:
    """Flat, JSON-serializable settings for one generation run."""

    corpus_path: str = ""
    corpus_format: str = "plain-lines"
    strategy: str = "ne"
    candidate_size: int = 4
    max_questions_per_passage: int = 1
    realization_mode: str = "replace"
    master_seed: int = 0
    dev_fraction: float = 0.0
    hops: int = 2
    topk_pool: int = 50
    max_ngram: int = 3
    gazetteer_dir: str | None = None
    annotations_path: str | None = None
    unit_lexicon_path: str | None = None
    kg_index_path: str | None = None
    kg_assertions_path: str | None = None
    kg_language: str = "en"
    embeddings_path: str | None = None

    @classmethod
    def from_dict(cls, values: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        config = cls(**values)
        config.validate()
        return config

    @classmethod
    def from_file(cls, path: str) -> "PipelineConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                values = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: config is not valid JSON: {exc}") from exc
        if not isinstance(values, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(values)

    def validate(self) -> None:
        if not self.corpus_path:
            raise ConfigError("corpus_path is required")
        if self.corpus_format not in CORPUS_FORMATS:
            raise ConfigError(f"corpus_format must be one of {CORPUS_FORMATS}")
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"strategy must be one of {STRATEGIES}")
        if self.realization_mode not in REALIZATION_MODES:
            raise ConfigError(f"realization_mode must be one of {REALIZATION_MODES}")
        if not isinstance(self.candidate_size, int) or not 2 <= self.candidate_size <= 8:
            raise ConfigError("candidate_size must be an integer in [2, 8]")
        if not isinstance(self.max_questions_per_passage, int) or self.max_questions_per_passage < 1:
            raise ConfigError("max_questions_per_passage must be >= 1")
        if not isinstance(self.master_seed, int):
            raise ConfigError("master_seed must be an integer")
        if not isinstance(self.dev_fraction, (int, float)) or not 0.0 <= self.dev_fraction < 1.0:
            raise ConfigError("dev_fraction must be in [0, 1)")
        for name in ("hops", "topk_pool", "max_ngram"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.strategy in ("kg", "kg-ne"):
            if not self.embeddings_path:
                raise ConfigError(f"strategy {self.strategy!r} requires embeddings_path")
            if not self.kg_index_path and not self.kg_assertions_path:
                raise ConfigError(
                    f"strategy {self.strategy!r} requires kg_index_path or kg_assertions_path"
                )


def _stable_hash(*parts: str) -> int:
    digest = hashlib.blake2b(digest_size=8)
    for part in parts:
        digest.update(part.encode("utf-8"))
        digest.update(b"\x1f")
    return int.from_bytes(digest.digest(), "big")


def derive_seed(master_seed: int, passage_id: str, span: tuple[int, int]) -> int:
    """Per-sample RNG seed, stable across runs and passage order."""
    return _stable_hash("sample", str(master_seed), passage_id, f"{span[0]}:{span[1]}")


_SPLIT_SALT = b"mcqa-split:"


def split_hash(passage_id: str) -> float:
    """Map a passage id to a stable point in [0, 1)."""
    digest = hashlib.blake2b(passage_id.encode("utf-8"), digest_size=8, salt=_SPLIT_SALT)
    return int.from_bytes(digest.digest(), "big") / 2.0**64


def assign_split(passage_id: str, dev_fraction: float) -> str:
    """Assign ``"dev"`` or ``"train"`` by hashing the passage id.

    The choice depends only on the id, so membership is stable under
    corpus reordering; dev set sizes land within sampling noise of
    ``dev_fraction``.
    """
    if dev_fraction > 0.0 and split_hash(passage_id) < dev_fraction:
        return "dev"
    return "train"


@dataclass
class McqaSample:
    """One multiple-choice question as stored in the dataset files."""

    id: str
    passage_id: str
    context: str
    question: str
    qtype: str
    choices: list[str]
    answer_index: int
    strategy: str
    provenance: list[dict]
    drop_reason: str | None = None

    def to_json(self) -> str:
        record = {
            "id": self.id,
            "passage_id": self.passage_id,
            "context": self.context,
            "question": self.question,
            "qtype": self.qtype,
            "choices": self.choices,
            "answer_index": self.answer_index,
            "strategy": self.strategy,
            "provenance": self.provenance,
        }
        return json.dumps(record)


def parse_sample(line: str) -> McqaSample:
    """Parse one dataset line back into a validated :class:`McqaSample`.

    Raises:
        ValueError: if the record is structurally malformed or violates a
            sample invariant (bad answer index, duplicate choices, mask
            leakage into the question).
    """
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"not valid JSON: {exc}") from exc
    if not isinstance(record, dict):
        raise ValueError("record must be a JSON object")
    for key in ("id", "passage_id", "context", "question", "qtype", "strategy"):
        if not isinstance(record.get(key), str):
            raise ValueError(f"field {key!r} must be a string")
    if record["qtype"] not in QTYPE_ORDER:
        raise ValueError(f"unknown qtype {record['qtype']!r}")
    choices = record.get("choices")
    if not isinstance(choices, list) or len(choices) < 2 or not all(isinstance(c, str) for c in choices):
        raise ValueError("choices must be a list of at least two strings")
    if len({c.casefold() for c in choices}) != len(choices):
        raise ValueError("choices must be case-fold distinct")
    answer_index = record.get("answer_index")
    if not isinstance(answer_index, int) or isinstance(answer_index, bool) or not 0 <= answer_index < len(choices):
        raise ValueError("answer_index out of range")
    provenance = record.get("provenance")
    if not isinstance(provenance, list) or len(provenance) != len(choices) - 1 or not all(isinstance(p, dict) for p in provenance):
        raise ValueError("provenance must hold one entry per non-gold choice")
    if MASK_TOKEN in record["question"]:
        raise ValueError("question leaks the mask token")
    return McqaSample(
        id=record["id"],
        passage_id=record["passage_id"],
        context=record["context"],
        question=record["question"],
        qtype=record["qtype"],
        choices=choices,
        answer_index=answer_index,
        strategy=record["strategy"],
        provenance=provenance,
    )


@dataclass
class RunReport:
    """Accounting for one generation run.

    ``attempted`` counts every selected mention; each one is either
    emitted (by question type) or dropped (by reason), never both.
    """

    passages_total: int = 0
    train_passages: int = 0
    dev_passages: int = 0
    skipped_corpus_records: dict[str, int] = field(default_factory=dict)
    skipped_masked_passages: int = 0
    annotation_row_errors: int = 0
    annotations_rejected: int = 0
    attempted: int = 0
    emitted_by_qtype: dict[str, int] = field(
        default_factory=lambda: {q: 0 for q in QTYPE_ORDER}
    )
    drops_by_reason: dict[str, int] = field(default_factory=dict)
    train_samples: int = 0
    dev_samples: int = 0
    wall_time_s: float = 0.0
    config: dict = field(default_factory=dict)

    @property
    def emitted_total(self) -> int:
        return sum(self.emitted_by_qtype.values())

    @property
    def dropped_total(self) -> int:
        return sum(self.drops_by_reason.values())

    def to_dict(self) -> dict:
        out = asdict(self)
        out["emitted_total"] = self.emitted_total
        out["dropped_total"] = self.dropped_total
        return out


@dataclass
class _Resources:
    gazetteers: GazetteerSet
    units: tuple[str, ...]
    annotations: dict[str, list[EntityMention]] | None
    annotation_row_errors: int
    index: KnowledgeIndex | None
    embeddings: EmbeddingTable | None
    proper_nouns: frozenset[str]


def _load_resources(config: PipelineConfig) -> _Resources:
    try:
        gazetteers = (
            GazetteerSet.load(config.gazetteer_dir) if config.gazetteer_dir else GazetteerSet.empty()
        )
        if config.unit_lexicon_path:
            lines = Path(config.unit_lexicon_path).read_text(encoding="utf-8").splitlines()
            units = tuple(sorted({u.strip() for u in lines if u.strip()}))
        else:
            units = DEFAULT_UNITS
        annotations = None
        row_errors = 0
        if config.annotations_path:
            annotations, errors = load_annotations(config.annotations_path)
            row_errors = len(errors)
        index = None
        embeddings = None
        if config.strategy in ("kg", "kg-ne"):
            if config.kg_index_path:
                index = load_index(config.kg_index_path)
            else:
                index = build_index(config.kg_assertions_path, config.kg_language)
            embeddings = load_embeddings(config.embeddings_path)
    except OSError as exc:
        raise ResourceError(f"cannot read input resource: {exc}") from exc
    return _Resources(
        gazetteers=gazetteers,
        units=units,
        annotations=annotations,
        annotation_row_errors=row_errors,
        index=index,
        embeddings=embeddings,
        proper_nouns=gazetteers.all_surfaces(),
    )


def _select_mentions(
    passage: Passage,
    resources: _Resources,
    config: PipelineConfig,
    report: RunReport,
) -> list[EntityMention]:
    if resources.annotations is not None:
        mentions = []
        for mention in resources.annotations.get(passage.id, ()):
            try:
                validate_mention(passage, mention)
            except AnnotationError:
                report.annotations_rejected += 1
                continue
            mentions.append(mention)
    else:
        mentions = extract_entities(passage, resources.gazetteers, units=resources.units)
    cap = config.max_questions_per_passage
    if len(mentions) > cap:
        rng_seed = _stable_hash("select", str(config.master_seed), passage.id)
        picked = random.Random(rng_seed).sample(range(len(mentions)), cap)
        mentions = [mentions[i] for i in sorted(picked)]
    return mentions


def _make_distractors(
    question: str,
    qtype: QuestionType,
    gold: EntityMention,
    pool: AnswerPool,
    resources: _Resources,
    config: PipelineConfig,
    rng_seed: int,
) -> list[Distractor]:
    count = config.candidate_size - 1
    if config.strategy == "random":
        return random_distractors(pool, gold, count, rng_seed)
    if config.strategy == "ne":
        return ne_distractors(pool, gold, count, rng_seed)
    if config.strategy == "kg":
        return kg_distractors(
            question, gold, resources.index, resources.embeddings, count,
            hops=config.hops, topk_pool=config.topk_pool, max_ngram=config.max_ngram,
        )
    return hybrid_distractors(
        question, qtype, gold, pool, resources.index, resources.embeddings,
        count, rng_seed,
        hops=config.hops, topk_pool=config.topk_pool, max_ngram=config.max_ngram,
    )


def generate_dataset(config: PipelineConfig, out_dir: str) -> RunReport:
    """Run the full pipeline and write ``train.jsonl``, ``dev.jsonl`` and
    ``report.json`` under ``out_dir``.

    The first pass loads passages, selects up to
    ``max_questions_per_passage`` mentions per passage and builds the
    shared answer pool; the second pass realizes each selected mention
    into a sample or records a drop reason.  Passages containing the mask
    token are skipped whole.

    Returns:
        The run report (also serialized to ``report.json``).
    """
    started = time.perf_counter()
    config.validate()
    resources = _load_resources(config)
    report = RunReport(config=asdict(config))
    report.annotation_row_errors = resources.annotation_row_errors

    corpus_tally: Counter = Counter()
    passages: list[Passage] = []
    selected: list[list[EntityMention]] = []
    seen_ids: set[str] = set()
    try:
        stream = load_corpus(config.corpus_path, config.corpus_format, corpus_tally)
        for passage in stream:
            if passage.id in seen_ids:
                raise CorpusFormatError(f"duplicate passage id: {passage.id!r}")
            seen_ids.add(passage.id)
            passages.append(passage)
            if MASK_TOKEN in passage.text:
                report.skipped_masked_passages += 1
                selected.append([])
                continue
            selected.append(_select_mentions(passage, resources, config, report))
    except OSError as exc:
        raise ResourceError(f"cannot read corpus: {exc}") from exc

    report.passages_total = len(passages)
    report.skipped_corpus_records = dict(sorted(corpus_tally.items()))
    pool = AnswerPool.from_mentions(m for group in selected for m in group)

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    writers = {}
    try:
        writers["train"] = open(out / "train.jsonl", "w", encoding="utf-8")
        writers["dev"] = open(out / "dev.jsonl", "w", encoding="utf-8")
        for passage, mentions in zip(passages, selected):
            split = assign_split(passage.id, config.dev_fraction)
            if split == "dev":
                report.dev_passages += 1
            else:
                report.train_passages += 1
            for mention in mentions:
                report.attempted += 1
                rng_seed = derive_seed(config.master_seed, passage.id, mention.span)
                try:
                    cloze = make_cloze(passage, mention)
                    qtype = question_type_of(mention.etype)
                    question = realize_question(
                        cloze, qtype, config.realization_mode, resources.proper_nouns
                    )
                    distractors = _make_distractors(
                        question, qtype, mention, pool, resources, config, rng_seed
                    )
                except ClozeError:
                    reason = "cross-sentence-mention"
                    report.drops_by_reason[reason] = report.drops_by_reason.get(reason, 0) + 1
                    continue
                except GenerationFailure as exc:
                    report.drops_by_reason[exc.reason] = (
                        report.drops_by_reason.get(exc.reason, 0) + 1
                    )
                    continue
                candidate_set = assemble_candidates(
                    mention.surface, distractors, config.candidate_size, rng_seed
                )
                start, end = mention.span
                sample = McqaSample(
                    id=f"{passage.id}:{start}-{end}",
                    passage_id=passage.id,
                    context=passage.text,
                    question=question,
                    qtype=qtype.value,
                    choices=candidate_set.choices,
                    answer_index=candidate_set.answer_index,
                    strategy=config.strategy,
                    provenance=[d.to_provenance() for d in candidate_set.provenance],
                )
                writers[split].write(sample.to_json() + "\n")
                report.emitted_by_qtype[qtype.value] += 1
                if split == "dev":
                    report.dev_samples += 1
                else:
                    report.train_samples += 1
    finally:
        for fh in writers.values():
            fh.close()

    report.drops_by_reason = dict(sorted(report.drops_by_reason.items()))
    report.wall_time_s = round(time.perf_counter() - started, 3)
    with open(out / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    return report


def stats(dataset_path: str) -> dict:
    """Summarize a dataset file: totals, per-qtype and provenance counts.

    Unparseable lines are counted as ``malformed`` rather than raising.
    """
    by_qtype = {q: 0 for q in QTYPE_ORDER}
    by_strategy: Counter = Counter()
    provenance_by_strategy: Counter = Counter()
    fallback_distractors = 0
    total = 0
    malformed = 0
    try:
        fh = open(dataset_path, encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"cannot read dataset: {exc}") from exc
    with fh:
        for line in fh:
            if not line.strip():
                continue
            try:
                sample = parse_sample(line)
            except ValueError:
                malformed += 1
                continue
            total += 1
            by_qtype[sample.qtype] += 1
            by_strategy[sample.strategy] += 1
            for entry in sample.provenance:
                strategy = entry.get("strategy")
                if isinstance(strategy, str):
                    provenance_by_strategy[strategy] += 1
                if entry.get("fallback"):
                    fallback_distractors += 1
    return {
        "total": total,
        "malformed": malformed,
        "by_qtype": by_qtype,
        "by_strategy": dict(sorted(by_strategy.items())),
        "provenance_by_strategy": dict(sorted(provenance_by_strategy.items())),
        "fallback_distractors": fallback_distractors,
    }
