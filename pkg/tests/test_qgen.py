import random

import pytest

from mcqgen import (
    ClozeError,
    EntityMention,
    EntityType,
    GazetteerSet,
    MASK_TOKEN,
    Passage,
    QuestionType,
    extract_entities,
    generate_question,
    make_cloze,
    question_type_of,
    realize_question,
)

TURING = Passage.from_text("p1", "Alan Turing was born in London in 1912.")
LONDON = EntityMention("p1", (24, 30), "London", EntityType.GPE)


def test_question_type_examples():
    assert question_type_of(EntityType.PERSON) is QuestionType.WHO
    assert question_type_of(EntityType.QUANTITY) is QuestionType.HOW
    assert question_type_of(EntityType.LAW) is QuestionType.WHAT
    assert question_type_of(EntityType.FAC) is QuestionType.WHERE
    assert question_type_of(EntityType.TIME) is QuestionType.WHEN


def test_question_type_covers_every_entity_type():
    for etype in EntityType:
        assert isinstance(question_type_of(etype), QuestionType)


def test_make_cloze_masks_the_mention():
    assert make_cloze(TURING, LONDON) == "Alan Turing was born in [MASK] in 1912."


def test_make_cloze_uses_host_sentence_only():
    passage = Passage.from_text("p", "First part. Ada went to Oslo. Last part.")
    mention = EntityMention("p", (24, 28), "Oslo", EntityType.GPE)
    assert make_cloze(passage, mention) == "Ada went to [MASK]."


def test_make_cloze_round_trips_the_sentence():
    cloze = make_cloze(TURING, LONDON)
    assert cloze.replace(MASK_TOKEN, LONDON.surface) == TURING.text


def test_make_cloze_rejects_cross_sentence_mention():
    passage = Passage.from_text("p", "One two. Three four.")
    with pytest.raises(ClozeError):
        make_cloze(passage, EntityMention("p", (4, 14), "two. Three", EntityType.ORG))


def test_make_cloze_rejects_sentence_with_mask_token():
    passage = Passage.from_text("p", "The token [MASK] is reserved by Acme.")
    mention = EntityMention("p", (32, 36), "Acme", EntityType.ORG)
    with pytest.raises(ClozeError):
        make_cloze(passage, mention)


def test_make_cloze_whole_sentence_mention():
    passage = Passage.from_text("p", "Acme. More text.")
    mention = EntityMention("p", (0, 5), "Acme.", EntityType.ORG)
    assert make_cloze(passage, mention) == MASK_TOKEN


def test_realize_replace_examples():
    cloze = "Alan Turing was born in [MASK] in 1912."
    got = realize_question(cloze, QuestionType.WHERE, "replace")
    assert got == "Alan Turing was born in where in 1912?"
    assert realize_question("[MASK] is red.", QuestionType.WHAT, "replace") == "what is red?"


def test_realize_front_worked_example():
    cloze = "Alan Turing was born in [MASK] in 1912."
    got = realize_question(cloze, QuestionType.WHERE, "front", ["Alan Turing"])
    assert got == "Where Alan Turing was born in 1912?"


def test_realize_front_lowercases_unknown_start():
    got = realize_question("The cat chased [MASK].", QuestionType.WHO, "front")
    assert got == "Who the cat chased?"


def test_realize_front_drops_preposition_before_slot():
    got = realize_question("She flew to [MASK] yesterday.", QuestionType.WHERE, "front")
    assert got == "Where she flew yesterday?"


def test_realize_front_mask_at_start():
    assert realize_question("[MASK] is red.", QuestionType.WHAT, "front") == "What is red?"


def test_realize_normalizes_terminators_to_one_question_mark():
    for tail in (".", "!", "?", "?!", "...", ""):
        got = realize_question(f"Ada won [MASK]{tail}", QuestionType.WHAT, "replace")
        assert got.endswith("?")
        assert not got.endswith("??")


def test_realize_requires_exactly_one_mask():
    with pytest.raises(ValueError):
        realize_question("no slot here.", QuestionType.WHO)
    with pytest.raises(ValueError):
        realize_question("[MASK] and [MASK].", QuestionType.WHO)


def test_realize_rejects_unknown_mode():
    with pytest.raises(ValueError):
        realize_question("[MASK] is red.", QuestionType.WHAT, "append")


def test_realized_questions_never_leak_mask_fuzz():
    rng = random.Random(3)
    words = ["Ada", "saw", "the", "lake", "at", "dawn", "slowly"]
    for _ in range(300):
        body = [rng.choice(words) for _ in range(rng.randrange(1, 8))]
        body.insert(rng.randrange(len(body) + 1), MASK_TOKEN)
        cloze = " ".join(body) + rng.choice([".", "!", "?", ""])
        for mode in ("replace", "front"):
            got = realize_question(cloze, QuestionType.WHO, mode, ["Ada"])
            assert MASK_TOKEN not in got
            assert got.endswith("?")
            assert len(got) >= 2 and got[-2] != "?"


def test_generate_question_bundles_fields():
    gz = GazetteerSet({"PERSON": ["Alan Turing"], "GPE": ["London"]})
    mention = next(
        m for m in extract_entities(TURING, gz) if m.etype is EntityType.GPE
    )
    question = generate_question(TURING, mention, "front", ["Alan Turing"])
    assert question.passage_id == "p1"
    assert question.answer == mention
    assert question.cloze == "Alan Turing was born in [MASK] in 1912."
    assert question.question == "Where Alan Turing was born in 1912?"
    assert question.qtype is QuestionType.WHERE
