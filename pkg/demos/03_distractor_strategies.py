"""Comparing distractor strategies on one question.

Builds a small answer pool plus a toy knowledge graph, then shows how
the four strategies (random, ne, kg, kg-ne hybrid) fill the same
candidate set differently.

Run:  python3 demos/03_distractor_strategies.py
"""

import json
import tempfile
from pathlib import Path

from mcqgen import (
    AnswerPool,
    EntityMention,
    EntityType,
    QuestionType,
    assemble_candidates,
    build_index,
    hybrid_distractors,
    kg_distractors,
    load_embeddings,
    ne_distractors,
    random_distractors,
)

# A pool as the pipeline would collect it: every extracted mention from
# every passage, tagged with its type and home passage.
MENTIONS = [
    ("p1", "Marie Curie", EntityType.PERSON),
    ("p1", "Warsaw", EntityType.GPE),
    ("p2", "Niels Bohr", EntityType.PERSON),
    ("p2", "Copenhagen", EntityType.GPE),
    ("p3", "Lise Meitner", EntityType.PERSON),
    ("p3", "Vienna", EntityType.GPE),
    ("p4", "Enrico Fermi", EntityType.PERSON),
    ("p4", "Rome", EntityType.GPE),
    ("p5", "10 kg", EntityType.QUANTITY),
    ("p6", "25 kg", EntityType.QUANTITY),
    ("p7", "3 kg", EntityType.QUANTITY),
    ("p8", "40 kg", EntityType.QUANTITY),
]
pool = AnswerPool.from_mentions(
    EntityMention(pid, (0, len(surface)), surface, etype)
    for pid, surface, etype in MENTIONS
)

QUESTION = "Who discovered radium?"
GOLD = EntityMention("p0", (0, 11), "Marie Curie", EntityType.PERSON)

# ---------------------------------------------------------------------
# random: any pool surface, regardless of type.
picks = random_distractors(pool, GOLD, 3, rng_seed=1)
print("random:", [d.surface for d in picks])

# ne: only surfaces sharing the gold entity type.
picks = ne_distractors(pool, GOLD, 3, rng_seed=1)
print("ne:    ", [d.surface for d in picks])

# ---------------------------------------------------------------------
# kg: ground question+answer in a graph, rank the neighborhood.
ROWS = [
    f"/a/x\t/r/RelatedTo\t/c/en/radium\t/c/en/{t}\t{{}}"
    for t in ("polonium", "uranium", "barium", "actinium")
]
EMB = {
    "radium": [1.0, 0.0],
    "polonium": [0.9, 0.1],
    "uranium": [0.8, 0.2],
    "barium": [0.4, 0.6],
    "actinium": [0.7, 0.3],
}
with tempfile.TemporaryDirectory() as scratch:
    root = Path(scratch)
    (root / "kg.csv").write_text("".join(r + "\n" for r in ROWS))
    (root / "emb.txt").write_text(
        "".join(f"{t} {v[0]} {v[1]}\n" for t, v in EMB.items())
    )
    index = build_index(str(root / "kg.csv"))
    table = load_embeddings(str(root / "emb.txt"))

gold_quantity = EntityMention("p0", (0, 6), "radium", EntityType.QUANTITY)
picks = kg_distractors(QUESTION, gold_quantity, index, table, 3)
print("kg:    ", [(d.surface, round(d.score, 4)) for d in picks])

# hybrid: HOW questions try the graph first, everything else stays with
# the typed pool. Fallback draws are flagged in provenance.
for qtype, gold in ((QuestionType.HOW, gold_quantity), (QuestionType.WHO, GOLD)):
    picks = hybrid_distractors(
        QUESTION, qtype, gold, pool, index, table, 3, rng_seed=1
    )
    summary = [(d.surface, d.strategy, d.fallback) for d in picks]
    print(f"hybrid {qtype.value}:", summary)

# ---------------------------------------------------------------------
# Assembly shuffles gold into the candidate list with a seeded RNG and
# keeps provenance aligned with the distractor positions.
picks = ne_distractors(pool, GOLD, 3, rng_seed=1)
candidate_set = assemble_candidates(GOLD.surface, picks, 4, rng_seed=2)
print("\nChoices:", candidate_set.choices)
print("Answer index:", candidate_set.answer_index)
print("Provenance:", [d.to_provenance() for d in candidate_set.provenance])
