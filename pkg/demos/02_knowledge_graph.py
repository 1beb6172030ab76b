"""Building and querying the knowledge index.

Covers the graph half of distractor generation: parsing a tab-separated
assertion dump, grounding text to nodes, k-hop retrieval, embedding
ranking and binary persistence.

Run:  python3 demos/02_knowledge_graph.py
"""

import json
import tempfile
from collections import Counter
from pathlib import Path

from mcqgen import (
    build_index,
    ground,
    load_embeddings,
    load_index,
    retrieve_subgraph,
    save_index,
    score_candidates,
)


def assertion(rel, start, end, weight=None):
    meta = json.dumps({"weight": weight}) if weight is not None else "{}"
    return f"/a/x\t/r/{rel}\t/c/en/{start}\t/c/en/{end}\t{meta}"


ROWS = [
    assertion("IsA", "cat", "pet", 2.0),
    assertion("IsA", "dog", "pet"),
    assertion("RelatedTo", "pet", "animal"),
    assertion("RelatedTo", "animal", "zoo"),
    assertion("IsA", "black_cat", "cat"),
    # filtered out: wrong language on one endpoint
    "/a/x\t/r/IsA\t/c/de/katze\t/c/en/pet\t{}",
]

EMBEDDINGS = {
    "cat": [1.0, 0.0],
    "dog": [0.9, 0.1],
    "pet": [1.0, 0.0],
    "animal": [0.5, 0.5],
    "zoo": [0.0, 1.0],
}

with tempfile.TemporaryDirectory() as scratch:
    root = Path(scratch)
    (root / "assertions.csv").write_text("".join(r + "\n" for r in ROWS))
    (root / "emb.txt").write_text(
        "".join(f"{t} {v[0]} {v[1]}\n" for t, v in EMBEDDINGS.items())
    )

    # -----------------------------------------------------------------
    # Parse. Terms are normalized (lowercase, underscores), duplicate
    # edges keep the larger weight, and the adjacency is symmetric.
    skips = Counter()
    index = build_index(str(root / "assertions.csv"), skip_tally=skips)
    print(f"Nodes: {index.nodes}")
    print(f"Relations: {index.relations}")
    print(f"Edges: {index.edge_count}, skipped rows: {dict(skips)}")

    # -----------------------------------------------------------------
    # Ground a phrase: longest n-gram first, each token used once.
    seeds = ground("the black cat sat", index)
    print(f"\nGrounded 'the black cat sat' to: {[index.nodes[s] for s in seeds]}")

    # Everything within two hops of the seeds, seeds excluded.
    nearby = retrieve_subgraph(seeds, index, hops=2)
    print(f"Within 2 hops: {sorted(index.nodes[n] for n in nearby)}")

    # -----------------------------------------------------------------
    # Rank the neighborhood by cosine similarity against the mean seed
    # embedding. Unembedded terms drop out silently.
    table = load_embeddings(str(root / "emb.txt"))
    ranked = score_candidates(sorted(nearby), ["cat"], table, index)
    print("\nRanked by similarity to 'cat':")
    for cand in ranked:
        print(f"  {cand.term:8s} {cand.score:+.4f}")

    # -----------------------------------------------------------------
    # Persist and reload. The file format is stable byte for byte.
    save_index(index, str(root / "kg.bin"))
    reloaded = load_index(str(root / "kg.bin"))
    save_index(reloaded, str(root / "kg2.bin"))
    same = (root / "kg.bin").read_bytes() == (root / "kg2.bin").read_bytes()
    print(f"\nRound-trip byte-stable: {same}")
