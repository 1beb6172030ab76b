"""From raw text to cloze questions.

Walks the front half of the pipeline on a single passage: sentence
splitting, rule-based entity extraction, cloze construction and both
question realization modes.

Run:  python3 demos/01_entities_to_questions.py
"""

import tempfile
from pathlib import Path

from mcqgen import (
    GazetteerSet,
    Passage,
    extract_entities,
    generate_question,
    make_cloze,
    question_type_of,
    realize_question,
)

TEXT = (
    "Alan Turing was born in London in 1912. "
    "He later studied at Princeton, finishing in 1938. "
    "The dissertation ran to 92 pages and cost 2 dollars to bind."
)

# ---------------------------------------------------------------------
# Sentences. Offsets index into the original string, so slices round-trip.
passage = Passage.from_text("demo", TEXT)
print("Sentences:")
for start, end in passage.sentence_spans:
    print(f"  [{start:3d},{end:3d}) {TEXT[start:end]!r}")

# ---------------------------------------------------------------------
# Entities. Dates, times, percentages, money and quantities come from
# built-in patterns; names and places come from gazetteer files, one
# file per type, one surface per line.
with tempfile.TemporaryDirectory() as scratch:
    gazdir = Path(scratch) / "gazetteers"
    gazdir.mkdir()
    (gazdir / "PERSON.txt").write_text("Alan Turing\n")
    (gazdir / "GPE.txt").write_text("London\nPrinceton\n")
    gazetteers = GazetteerSet.load(str(gazdir))

mentions = extract_entities(passage, gazetteers)
print("\nMentions (longest span wins, ties resolved left to right):")
for m in mentions:
    print(f"  {m.etype.value:9s} {m.surface!r} at {m.span}")

# ---------------------------------------------------------------------
# Each mention anchors one question. The mention's sentence becomes a
# cloze statement, and the entity type picks the wh-word.
print("\nQuestions:")
for m in mentions:
    cloze = make_cloze(passage, m)
    qtype = question_type_of(m.etype)
    replace = realize_question(cloze, qtype, "replace")
    front = realize_question(
        cloze, qtype, "front", proper_nouns=gazetteers.all_surfaces()
    )
    print(f"  answer {m.surface!r} ({qtype.value})")
    print(f"    cloze:   {cloze}")
    print(f"    replace: {replace}")
    print(f"    front:   {front}")

# generate_question bundles the same steps into one record.
bundle = generate_question(passage, mentions[0], "front", gazetteers.all_surfaces())
print(f"\nBundled: {bundle}")
