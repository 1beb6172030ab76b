"""Distractor selection and candidate-set assembly.

Wrong answers come from three sources: uniform draws from the global
answer pool, draws restricted to the gold answer's entity type, or
graph-retrieved terms ranked by embedding similarity.  The hybrid router
sends measurement-style questions to the graph with a typed-pool fallback.
Every returned distractor records where it came from.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .entity import EntityMention, EntityType
from .errors import GroundingFailed, PoolExhausted, SubgraphExhausted
from .kg import EmbeddingTable, KnowledgeIndex, ground, normalize_term, retrieve_subgraph, score_candidates
from .qgen import QuestionType


@dataclass(frozen=True)
class PoolEntry:
    """One answer surface available for reuse as a distractor."""

    surface: str
    etype: EntityType
    passage_id: str


class AnswerPool:
    """All generated answers, indexed by entity type.

    Entry order follows the order mentions were added, which makes pool
    indices stable identifiers for provenance.
    """

    def __init__(self, entries: Sequence[PoolEntry] = ()):
        self.entries: list[PoolEntry] = list(entries)
        self.by_type: dict[EntityType, list[int]] = {}
        for i, entry in enumerate(self.entries):
            self.by_type.setdefault(entry.etype, []).append(i)

    @classmethod
    def from_mentions(cls, mentions: Iterable[EntityMention]) -> "AnswerPool":
        return cls([PoolEntry(m.surface, m.etype, m.passage_id) for m in mentions])

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class Distractor:
    """A wrong answer plus the provenance of how it was chosen.

    ``pool_index`` is set for pool-sampled distractors; ``node`` and
    ``score`` for graph-ranked ones.  ``fallback`` marks typed-pool draws
    that stand in for a failed graph attempt.
    """

    surface: str
    strategy: str
    pool_index: int | None = None
    node: int | None = None
    score: float | None = None
    fallback: bool = False

    def to_provenance(self) -> dict:
        out: dict = {"strategy": self.strategy}
        if self.pool_index is not None:
            out["pool_index"] = self.pool_index
        if self.node is not None:
            out["node"] = self.node
            out["score"] = self.score
        if self.fallback:
            out["fallback"] = True
        return out


def _sample_pool(
    pool: AnswerPool,
    gold: EntityMention,
    count: int,
    rng_seed: int,
    strategy: str,
    indices: Iterable[int],
) -> list[Distractor]:
    # One representative index per case-folded surface; surfaces equal to
    # the gold answer or drawn from its own passage are ineligible.
    gold_folded = gold.surface.casefold()
    eligible: dict[str, int] = {}
    for i in indices:
        entry = pool.entries[i]
        if entry.passage_id == gold.passage_id:
            continue
        folded = entry.surface.casefold()
        if folded == gold_folded or folded in eligible:
            continue
        eligible[folded] = i
    if len(eligible) < count:
        raise PoolExhausted(
            f"{strategy} pool holds {len(eligible)} eligible surfaces, need {count}"
        )
    rng = random.Random(rng_seed)
    picked = rng.sample(list(eligible.values()), count)
    return [
        Distractor(pool.entries[i].surface, strategy, pool_index=i) for i in picked
    ]


def random_distractors(
    pool: AnswerPool, gold: EntityMention, count: int, rng_seed: int
) -> list[Distractor]:
    """Draw ``count`` distinct surfaces uniformly from the whole pool.

    Surfaces matching the gold answer (case-folded) or coming from the
    gold answer's passage are excluded; the draw is without replacement
    over distinct surfaces and deterministic in ``rng_seed``.

    Raises:
        PoolExhausted: if fewer than ``count`` surfaces are eligible.
    """
    return _sample_pool(pool, gold, count, rng_seed, "random", range(len(pool.entries)))


def ne_distractors(
    pool: AnswerPool, gold: EntityMention, count: int, rng_seed: int
) -> list[Distractor]:
    """Like :func:`random_distractors`, restricted to the gold entity type."""
    indices = pool.by_type.get(gold.etype, ())
    return _sample_pool(pool, gold, count, rng_seed, "ne", indices)


def kg_distractors(
    question: str,
    gold: EntityMention,
    index: KnowledgeIndex,
    embeddings: EmbeddingTable,
    count: int,
    *,
    hops: int = 2,
    topk_pool: int = 50,
    max_ngram: int = 3,
) -> list[Distractor]:
    """Pick the graph neighborhood terms most similar to the question.

    The question text plus the gold surface are grounded to seed nodes,
    the ``hops``-bounded neighborhood is retrieved, the gold term is
    excluded, and candidates are ranked by cosine similarity against the
    mean embedding of the seed terms.  The top ``count`` of the leading
    ``topk_pool`` candidates become distractors (underscores rendered as
    spaces).

    Raises:
        GroundingFailed: if nothing grounds, or no seed term is embeddable.
        SubgraphExhausted: if fewer than ``count`` candidates score.
    """
    seeds = ground(f"{question} {gold.surface}", index, max_ngram)
    if not seeds:
        raise GroundingFailed("no graph node matches the question or answer")
    neighborhood = retrieve_subgraph(seeds, index, hops)
    gold_term = normalize_term(gold.surface)
    candidates = [n for n in neighborhood if index.nodes[n] != gold_term]
    query_terms = [index.nodes[s] for s in seeds]
    ranked = score_candidates(candidates, query_terms, embeddings, index)[:topk_pool]
    if len(ranked) < count:
        raise SubgraphExhausted(
            f"subgraph offers {len(ranked)} scored candidates, need {count}"
        )
    return [
        Distractor(c.term.replace("_", " "), "kg", node=c.node, score=c.score)
        for c in ranked[:count]
    ]


def hybrid_distractors(
    question: str,
    qtype: QuestionType,
    gold: EntityMention,
    pool: AnswerPool,
    index: KnowledgeIndex,
    embeddings: EmbeddingTable,
    count: int,
    rng_seed: int,
    *,
    hops: int = 2,
    topk_pool: int = 50,
    max_ngram: int = 3,
) -> list[Distractor]:
    """Route HOW questions to the graph, everything else to the typed pool.

    A graph attempt that fails to ground or exhausts its subgraph falls
    back to the typed pool, with the fallback recorded on each distractor.
    :class:`PoolExhausted` from the pool route propagates.
    """
    if qtype == QuestionType.HOW:
        try:
            return kg_distractors(
                question, gold, index, embeddings, count,
                hops=hops, topk_pool=topk_pool, max_ngram=max_ngram,
            )
        except (GroundingFailed, SubgraphExhausted):
            picks = ne_distractors(pool, gold, count, rng_seed)
            return [
                Distractor(d.surface, d.strategy, pool_index=d.pool_index, fallback=True)
                for d in picks
            ]
    return ne_distractors(pool, gold, count, rng_seed)


@dataclass
class CandidateSet:
    """Shuffled answer choices for one question.

    ``provenance`` aligns with the non-gold choices in display order.
    """

    choices: list[str]
    answer_index: int
    provenance: list[Distractor]


def assemble_candidates(
    gold_surface: str,
    distractors: Sequence[Distractor],
    size: int,
    rng_seed: int,
) -> CandidateSet:
    """Shuffle the gold answer and its distractors into a candidate set.

    Requires exactly ``size - 1`` distractors, all case-fold distinct from
    each other and from the gold surface.  The permutation is a seeded
    Fisher-Yates shuffle, so equal seeds give equal layouts.
    """
    if len(distractors) != size - 1:
        raise ValueError(f"need {size - 1} distractors, got {len(distractors)}")
    folded = {gold_surface.casefold()}
    for d in distractors:
        if d.surface.casefold() in folded:
            raise ValueError(f"duplicate choice surface: {d.surface!r}")
        folded.add(d.surface.casefold())

    items: list[tuple[str, Distractor | None]] = [(gold_surface, None)]
    items.extend((d.surface, d) for d in distractors)
    random.Random(rng_seed).shuffle(items)
    answer_index = next(i for i, (_, d) in enumerate(items) if d is None)
    return CandidateSet(
        choices=[surface for surface, _ in items],
        answer_index=answer_index,
        provenance=[d for _, d in items if d is not None],
    )
