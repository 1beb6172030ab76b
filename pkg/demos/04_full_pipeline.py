"""End to end: corpus in, evaluated dataset out.

Generates a dataset from a synthetic corpus with the hybrid strategy,
inspects the run report and the emitted records, then scores the result
with both training-free baselines.

The same flow is available from the command line:

    mcqgen generate --config config.json --out out/
    mcqgen stats --data out/train.jsonl
    mcqgen eval --data out/train.jsonl --method sw

Run:  python3 demos/04_full_pipeline.py
"""

import json
import tempfile
from pathlib import Path

from mcqgen import PipelineConfig, evaluate, generate_dataset, parse_sample, stats

with tempfile.TemporaryDirectory() as scratch:
    root = Path(scratch)

    # -----------------------------------------------------------------
    # A corpus with three entity families. Lines about masses feed the
    # graph route (HOW questions); the rest exercise the typed pool.
    lines = [f"Dr. Vasquez{i} met Chen{i} in Lima{i} in {1900 + i}." for i in range(30)]
    lines += [f"Sample{i} from Lima{i} weighed {i + 2} kg." for i in range(30)]
    (root / "corpus.txt").write_text("".join(line + "\n" for line in lines))

    gazdir = root / "gazetteers"
    gazdir.mkdir()
    people = [f"Vasquez{i}" for i in range(30)] + [f"Chen{i}" for i in range(30)]
    (gazdir / "PERSON.txt").write_text("".join(p + "\n" for p in people))
    (gazdir / "GPE.txt").write_text("".join(f"Lima{i}\n" for i in range(30)))

    # Toy graph so mass answers can pull unit distractors.
    units = ["gram", "tonne", "ounce", "milligram"]
    (root / "kg.csv").write_text(
        "".join(f"/a/x\t/r/RelatedTo\t/c/en/kg\t/c/en/{u}\t{{}}\n" for u in units)
    )
    (root / "emb.txt").write_text(
        "".join(f"{t} 1.0 {i}.0\n" for i, t in enumerate(["kg"] + units))
    )

    # -----------------------------------------------------------------
    # Configure and run. The config is plain JSON on disk for the CLI;
    # here we build it in memory.
    config = PipelineConfig(
        corpus_path=str(root / "corpus.txt"),
        gazetteer_dir=str(gazdir),
        strategy="kg-ne",
        candidate_size=4,
        max_questions_per_passage=2,
        realization_mode="front",
        master_seed=2024,
        dev_fraction=0.2,
        kg_assertions_path=str(root / "kg.csv"),
        embeddings_path=str(root / "emb.txt"),
    )
    report = generate_dataset(config, str(root / "out"))

    print("Run report:")
    print(f"  passages: {report.passages_total} "
          f"(train {report.train_passages} / dev {report.dev_passages})")
    print(f"  attempted {report.attempted} = "
          f"emitted {report.emitted_total} + dropped {report.dropped_total}")
    print(f"  emitted by type: {dict(report.emitted_by_qtype)}")
    print(f"  drops: {dict(report.drops_by_reason)}")

    # -----------------------------------------------------------------
    # The dataset is one JSON object per line.
    with open(root / "out" / "train.jsonl", encoding="utf-8") as handle:
        first = parse_sample(next(handle))
    print("\nFirst record:")
    print(f"  context:  {first.context}")
    print(f"  question: {first.question}")
    for i, choice in enumerate(first.choices):
        marker = "*" if i == first.answer_index else " "
        print(f"   {marker} {choice}")
    print(f"  provenance: {first.provenance}")

    print("\nDataset stats:",
          json.dumps(stats(str(root / "out" / "train.jsonl")), indent=2))

    # -----------------------------------------------------------------
    # Baselines. The sliding window reads the context; random guesses.
    for method in ("sw", "random"):
        result = evaluate(str(root / "out" / "train.jsonl"), method, seed=7)
        print(f"\n{method} baseline: {result.correct}/{result.total} "
              f"= {result.accuracy:.3f}")
        for qtype, tallies in sorted(result.by_qtype.items()):
            print(f"  {qtype}: {tallies['correct']}/{tallies['total']}")
