"""Shared builders for corpus, gazetteer, assertion and embedding fixtures."""

import json
from pathlib import Path


def random_undirected_edges(rng, node_count, edge_count):
    edges = set()
    while len(edges) < edge_count:
        a, b = rng.sample(range(node_count), 2)
        edges.add((min(a, b), max(a, b)))
    return sorted(edges)


def all_pairs_distances(node_count, edges):
    # Floyd-Warshall: a deliberately different algorithm from the
    # breadth-first retrieval under test.
    inf = float("inf")
    dist = [[inf] * node_count for _ in range(node_count)]
    for i in range(node_count):
        dist[i][i] = 0
    for a, b in edges:
        dist[a][b] = dist[b][a] = 1
    for k in range(node_count):
        row_k = dist[k]
        for i in range(node_count):
            d_ik = dist[i][k]
            if d_ik == inf:
                continue
            row_i = dist[i]
            for j in range(node_count):
                if d_ik + row_k[j] < row_i[j]:
                    row_i[j] = d_ik + row_k[j]
    return dist


def write_lines(path: Path, lines) -> Path:
    path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
    return path


def write_gazetteers(directory: Path, entries: dict) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    for type_name, surfaces in entries.items():
        write_lines(directory / f"{type_name}.txt", surfaces)
    return directory


def assertion_line(start, end, rel="RelatedTo", weight=None, start_lang="en",
                   end_lang="en", sense="") -> str:
    meta = "{}" if weight is None else json.dumps({"weight": weight})
    return (
        f"/a/[/r/{rel}/,/c/{start_lang}/{start}/,/c/{end_lang}/{end}/]"
        f"\t/r/{rel}\t/c/{start_lang}/{start}{sense}\t/c/{end_lang}/{end}\t{meta}"
    )


def write_assertions(path: Path, pairs, **kwargs) -> Path:
    return write_lines(path, [assertion_line(a, b, **kwargs) for a, b in pairs])


def write_embeddings(path: Path, vectors: dict, header: bool = False) -> Path:
    lines = []
    if header:
        dim = len(next(iter(vectors.values())))
        lines.append(f"{len(vectors)} {dim}")
    for term, vec in vectors.items():
        lines.append(term + " " + " ".join(str(float(x)) for x in vec))
    return write_lines(path, lines)


def write_visit_corpus(tmp_path: Path, count: int, name: str = "corpus.txt"):
    """Corpus of "Person<i> visited City<i> in <year>." lines plus gazetteers.

    Every passage carries one PERSON, one GPE and one DATE mention with
    surfaces unique to the passage, so typed pools stay deep and samples
    can be traced back to their family by surface shape.
    """
    corpus = write_lines(
        tmp_path / name,
        [f"Person{i} visited City{i} in {1000 + i}." for i in range(count)],
    )
    gazetteers = write_gazetteers(
        tmp_path / "gazetteers",
        {
            "PERSON": [f"Person{i}" for i in range(count)],
            "GPE": [f"City{i}" for i in range(count)],
        },
    )
    return corpus, gazetteers
