"""Question construction from entity mentions.

A mention becomes a cloze statement by masking its span within its host
sentence, then a question by rewriting the mask either in place or to the
front of the sentence.  The wh-word is fixed by the mention's entity type.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Collection

from .corpus import Passage
from .entity import EntityMention, EntityType
from .errors import ClozeError

MASK_TOKEN = "[MASK]"

#: Realization strategies accepted by :func:`realize_question`.
REALIZATION_MODES = ("replace", "front")


class QuestionType(str, Enum):
    WHO = "WHO"
    WHERE = "WHERE"
    WHAT = "WHAT"
    WHEN = "WHEN"
    HOW = "HOW"


_WH_BY_ETYPE = {
    EntityType.PERSON: QuestionType.WHO,
    EntityType.NORP: QuestionType.WHO,
    EntityType.GPE: QuestionType.WHERE,
    EntityType.LOC: QuestionType.WHERE,
    EntityType.FAC: QuestionType.WHERE,
    EntityType.DATE: QuestionType.WHEN,
    EntityType.TIME: QuestionType.WHEN,
    EntityType.PERCENT: QuestionType.HOW,
    EntityType.MONEY: QuestionType.HOW,
    EntityType.QUANTITY: QuestionType.HOW,
    EntityType.ORG: QuestionType.WHAT,
    EntityType.PRODUCT: QuestionType.WHAT,
    EntityType.EVENT: QuestionType.WHAT,
    EntityType.WORK_OF_ART: QuestionType.WHAT,
    EntityType.LAW: QuestionType.WHAT,
    EntityType.LANGUAGE: QuestionType.WHAT,
}
assert set(_WH_BY_ETYPE) == set(EntityType)


def question_type_of(etype: EntityType) -> QuestionType:
    """Map an entity type to the wh-question it answers."""
    return _WH_BY_ETYPE[etype]


@dataclass(frozen=True)
class GeneratedQuestion:
    """A realized question together with the mention it masks."""

    passage_id: str
    answer: EntityMention
    cloze: str
    question: str
    qtype: QuestionType


def make_cloze(passage: Passage, mention: EntityMention) -> str:
    """Mask ``mention`` inside its host sentence.

    The result is the sentence text with the mention span replaced by
    :data:`MASK_TOKEN`; replacing the token with the mention surface
    reconstructs the sentence exactly.

    Raises:
        ClozeError: if the mention is not contained in a single sentence,
            or the sentence already contains the mask token.
    """
    host = passage.sentence_at(mention.span)
    if host is None:
        raise ClozeError(
            f"mention span {mention.span} does not fit one sentence of "
            f"passage {passage.id!r}"
        )
    s, e = host
    sentence = passage.text[s:e]
    if MASK_TOKEN in sentence:
        raise ClozeError(f"sentence already contains {MASK_TOKEN}")
    ms, me = mention.span
    return passage.text[s:ms] + MASK_TOKEN + passage.text[me:e]


# Dropped when they immediately precede a fronted slot: "born in [MASK]"
# fronts as "Where ... born", not "Where ... born in".
_SLOT_PREPOSITIONS = frozenset(
    {"in", "on", "at", "of", "to", "from", "by", "with", "for", "as",
     "into", "near", "during"}
)

_TRAILING_WORD_RE = re.compile(r"(\w+)(\s*)$")


def _finish(question: str) -> str:
    question = question.rstrip()
    while question and question[-1] in ".!?":
        question = question[:-1].rstrip()
    return question + "?"


def _starts_with_proper(text: str, proper_nouns: Collection[str]) -> bool:
    for noun in proper_nouns:
        if not noun or not text.startswith(noun):
            continue
        if len(text) == len(noun) or not text[len(noun)].isalnum():
            return True
    return False


def realize_question(
    cloze: str,
    qtype: QuestionType,
    mode: str = "replace",
    proper_nouns: Collection[str] = (),
) -> str:
    """Rewrite a cloze statement as a wh-question.

    ``replace`` substitutes the wh-word for the mask in place.  ``front``
    removes the mask (together with a preposition immediately before it),
    lowercases the old sentence start unless it is a known proper noun,
    and prepends the capitalized wh-word.  Either way the sentence-final
    terminator becomes a single '?'.

    Args:
        cloze: statement containing exactly one mask token.
        qtype: decides the wh-word.
        mode: one of :data:`REALIZATION_MODES`.
        proper_nouns: surfaces that must keep their capitalization when
            they end up mid-question in ``front`` mode.
    """
    if cloze.count(MASK_TOKEN) != 1:
        raise ValueError(f"cloze must contain exactly one {MASK_TOKEN}")
    wh = qtype.value.lower()
    if mode == "replace":
        return _finish(cloze.replace(MASK_TOKEN, wh))
    if mode != "front":
        raise ValueError(f"unknown realization mode: {mode!r}")

    idx = cloze.index(MASK_TOKEN)
    before, after = cloze[:idx], cloze[idx + len(MASK_TOKEN):]
    trailing = _TRAILING_WORD_RE.search(before)
    if trailing and trailing.group(1).lower() in _SLOT_PREPOSITIONS:
        before = before[: trailing.start()]
    body = re.sub(r" {2,}", " ", before + after).strip()
    if body and not _starts_with_proper(body, proper_nouns):
        body = body[0].lower() + body[1:]
    question = wh.capitalize() + (" " + body if body else "")
    return _finish(question)


def generate_question(
    passage: Passage,
    mention: EntityMention,
    mode: str = "replace",
    proper_nouns: Collection[str] = (),
) -> GeneratedQuestion:
    """Build the full cloze-plus-question record for one mention."""
    cloze = make_cloze(passage, mention)
    qtype = question_type_of(mention.etype)
    question = realize_question(cloze, qtype, mode, proper_nouns)
    return GeneratedQuestion(
        passage_id=passage.id,
        answer=mention,
        cloze=cloze,
        question=question,
        qtype=qtype,
    )
