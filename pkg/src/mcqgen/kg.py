"""Knowledge graph indexing, grounding, retrieval and candidate scoring.

The graph comes from a ConceptNet-style assertion dump (tab-separated rows
with concept URIs and JSON metadata).  It is indexed as an undirected
adjacency structure over normalized terms, grounded against text by
longest-first n-gram lookup, expanded by bounded breadth-first search, and
ranked with cosine similarity over static word embeddings.
"""

from __future__ import annotations

import json
import re
import struct
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import GroundingFailed, KnowledgeBaseError

MAGIC = b"MCQAKGv1"

_EDGE_DTYPE = np.dtype([("a", "<u4"), ("b", "<u4"), ("rel", "<u4"), ("weight", "<f8")])

_TOKEN_RE = re.compile(r"[0-9a-z]+")


def normalize_term(term: str) -> str:
    """Normalize a surface or concept term: lowercase, spaces to underscores."""
    return term.strip().lower().replace(" ", "_")


@dataclass
class KnowledgeIndex:
    """Undirected term graph with typed, weighted edges.

    ``nodes[i]`` is the normalized term of node ``i``; ``adjacency[i]``
    lists ``(neighbor, relation, weight)`` triples sorted by neighbor then
    relation.  Every edge appears in the adjacency of both endpoints.
    """

    nodes: list[str]
    relations: list[str]
    adjacency: list[list[tuple[int, int, float]]]
    term_map: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.term_map:
            self.term_map = {term: i for i, term in enumerate(self.nodes)}

    @property
    def edge_count(self) -> int:
        return sum(len(adj) for adj in self.adjacency) // 2

    def term_id(self, term: str) -> int | None:
        return self.term_map.get(normalize_term(term))

    def neighbors(self, node: int) -> list[tuple[int, int, float]]:
        return self.adjacency[node]


def _parse_concept(uri: str, language: str) -> str | None:
    # "/c/en/black_cat/n" -> "black_cat"; wrong-language URIs return None
    # and malformed ones raise ValueError.
    parts = uri.split("/")
    if len(parts) < 4 or parts[0] != "" or parts[1] != "c" or not parts[3]:
        raise ValueError(f"bad concept uri: {uri!r}")
    if parts[2] != language:
        return None
    return normalize_term(parts[3])


def _parse_relation(uri: str) -> str:
    parts = uri.split("/")
    if len(parts) < 3 or parts[0] != "" or parts[1] != "r" or not parts[2]:
        raise ValueError(f"bad relation uri: {uri!r}")
    return parts[2]


def _parse_weight(metadata: str) -> float:
    meta = json.loads(metadata)
    if not isinstance(meta, dict):
        raise ValueError("metadata is not a JSON object")
    weight = meta.get("weight", 1.0)
    if isinstance(weight, bool) or not isinstance(weight, (int, float)):
        raise ValueError(f"bad weight: {weight!r}")
    weight = float(weight)
    if not np.isfinite(weight) or weight <= 0:
        raise ValueError(f"bad weight: {weight!r}")
    return weight


def build_index(
    assertions_path: str,
    language: str = "en",
    skip_tally: Counter | None = None,
) -> KnowledgeIndex:
    """Index an assertion dump as an undirected graph.

    Rows are tab-separated ``assertion_uri, relation_uri, start_uri,
    end_uri, metadata_json``.  Rows are dropped (and tallied) when they are
    malformed, carry an endpoint outside ``language``, or relate a term to
    itself.  Duplicate edges (same endpoints and relation, in either
    direction) merge by keeping the maximum weight.  Building twice from
    the same file yields an equal index.

    Raises:
        KnowledgeBaseError: if no usable rows remain.
    """
    tally = skip_tally if skip_tally is not None else Counter()
    nodes: list[str] = []
    term_map: dict[str, int] = {}
    relations: list[str] = []
    relation_map: dict[str, int] = {}
    edges: dict[tuple[int, int, int], float] = {}

    def intern(term: str) -> int:
        node = term_map.get(term)
        if node is None:
            node = len(nodes)
            term_map[term] = node
            nodes.append(term)
        return node

    with open(assertions_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n").rstrip("\r")
            if line == "":
                continue
            fields = line.split("\t")
            if len(fields) != 5:
                tally["malformed"] += 1
                continue
            try:
                relation = _parse_relation(fields[1])
                start = _parse_concept(fields[2], language)
                end = _parse_concept(fields[3], language)
                weight = _parse_weight(fields[4])
            except (ValueError, json.JSONDecodeError):
                tally["malformed"] += 1
                continue
            if start is None or end is None:
                tally["language-filtered"] += 1
                continue
            if start == end:
                tally["self-loop"] += 1
                continue
            rel = relation_map.get(relation)
            if rel is None:
                rel = len(relations)
                relation_map[relation] = rel
                relations.append(relation)
            a, b = intern(start), intern(end)
            if a > b:
                a, b = b, a
            key = (a, b, rel)
            if key in edges:
                tally["duplicate-merged"] += 1
                edges[key] = max(edges[key], weight)
            else:
                edges[key] = weight

    if not edges:
        raise KnowledgeBaseError(f"{assertions_path}: no usable assertions")

    adjacency: list[list[tuple[int, int, float]]] = [[] for _ in nodes]
    for (a, b, rel), weight in edges.items():
        adjacency[a].append((b, rel, weight))
        adjacency[b].append((a, rel, weight))
    for adj in adjacency:
        adj.sort(key=lambda t: (t[0], t[1]))
    return KnowledgeIndex(nodes=nodes, relations=relations, adjacency=adjacency, term_map=term_map)


def ground(text: str, index: KnowledgeIndex, max_ngram: int = 3) -> list[int]:
    """Map text onto graph nodes by longest-first n-gram lookup.

    The text is lowercased and tokenized on non-alphanumeric characters.
    At each position the longest n-gram (joined with underscores, up to
    ``max_ngram`` tokens) that names a node is taken and its tokens are
    consumed; otherwise the scan advances one token.  Node ids are
    returned in first-match order without duplicates.
    """
    if max_ngram < 1:
        raise ValueError("max_ngram must be >= 1")
    tokens = _TOKEN_RE.findall(text.lower())
    out: list[int] = []
    seen: set[int] = set()
    i = 0
    while i < len(tokens):
        for n in range(min(max_ngram, len(tokens) - i), 0, -1):
            node = index.term_map.get("_".join(tokens[i : i + n]))
            if node is not None:
                if node not in seen:
                    seen.add(node)
                    out.append(node)
                i += n
                break
        else:
            i += 1
    return out


def retrieve_subgraph(
    seeds: Iterable[int], index: KnowledgeIndex, hops: int = 2
) -> set[int]:
    """Collect every node within ``hops`` edges of any seed.

    Returns the reachable set excluding the seeds themselves.

    Raises:
        ValueError: if ``seeds`` is empty or ``hops`` < 1.
    """
    seed_set = set(seeds)
    if not seed_set:
        raise ValueError("seeds must be non-empty")
    if hops < 1:
        raise ValueError("hops must be >= 1")
    visited = set(seed_set)
    frontier = seed_set
    for _ in range(hops):
        nxt: set[int] = set()
        for node in frontier:
            for neighbor, _rel, _weight in index.adjacency[node]:
                if neighbor not in visited:
                    visited.add(neighbor)
                    nxt.add(neighbor)
        if not nxt:
            break
        frontier = nxt
    return visited - seed_set


@dataclass
class EmbeddingTable:
    """Static word vectors keyed by normalized term."""

    dim: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, term: str) -> bool:
        return term in self.vectors

    def get(self, term: str) -> np.ndarray | None:
        return self.vectors.get(term)


def load_embeddings(path: str) -> EmbeddingTable:
    """Load text-format embeddings: one ``term v1 v2 ...`` row per line.

    An optional first line ``<count> <dim>`` is treated as a header (its
    count is not enforced).  Dimensionality is fixed by the header or the
    first data row; disagreeing rows, non-numeric or non-finite values,
    and an empty table all raise :class:`KnowledgeBaseError`.  Terms are
    normalized; when a term repeats, the last row wins.
    """
    dim: int | None = None
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                dim = int(parts[1])
                if dim < 1:
                    raise KnowledgeBaseError(f"{path}:1: header dimensionality must be >= 1")
                continue
            if len(parts) < 2:
                raise KnowledgeBaseError(f"{path}:{lineno}: row has no vector values")
            term = normalize_term(parts[0])
            try:
                vec = np.array([float(p) for p in parts[1:]], dtype=np.float64)
            except ValueError:
                raise KnowledgeBaseError(f"{path}:{lineno}: non-numeric vector value") from None
            if dim is None:
                dim = len(vec)
            if len(vec) != dim:
                raise KnowledgeBaseError(
                    f"{path}:{lineno}: expected {dim} values, got {len(vec)}"
                )
            if not np.isfinite(vec).all():
                raise KnowledgeBaseError(f"{path}:{lineno}: non-finite vector value")
            vectors[term] = vec
    if not vectors:
        raise KnowledgeBaseError(f"{path}: no embedding rows")
    return EmbeddingTable(dim=dim, vectors=vectors)


@dataclass(frozen=True)
class ScoredCandidate:
    """A graph node ranked for distractor use."""

    node: int
    term: str
    score: float


def score_candidates(
    candidates: Iterable[int],
    query_terms: Sequence[str],
    embeddings: EmbeddingTable,
    index: KnowledgeIndex,
) -> list[ScoredCandidate]:
    """Rank candidate nodes by cosine similarity to the mean query vector.

    Query terms without an embedding are ignored; candidates without one
    (or with a zero vector) are dropped.  The result is sorted by score
    descending with ties broken by ascending term.

    Raises:
        GroundingFailed: if no query term is embeddable, or the mean query
            vector has zero norm.
    """
    query_vectors = [embeddings.vectors[t] for t in query_terms if t in embeddings.vectors]
    if not query_vectors:
        raise GroundingFailed("no query term has an embedding")
    query = np.mean(query_vectors, axis=0)
    query_norm = float(np.linalg.norm(query))
    if query_norm == 0.0:
        raise GroundingFailed("query embedding has zero norm")

    scored = []
    for node in sorted(set(candidates)):
        term = index.nodes[node]
        vec = embeddings.vectors.get(term)
        if vec is None:
            continue
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            continue
        score = float(np.dot(query, vec) / (query_norm * norm))
        scored.append(ScoredCandidate(node=node, term=term, score=score))
    scored.sort(key=lambda c: (-c.score, c.term))
    return scored


def _pack_str(value: str) -> bytes:
    data = value.encode("utf-8")
    if len(data) > 0xFFFF:
        raise KnowledgeBaseError(f"term too long to serialize: {value[:40]!r}...")
    return struct.pack("<H", len(data)) + data


def save_index(index: KnowledgeIndex, path: str) -> None:
    """Serialize an index to the binary format read by :func:`load_index`.

    The layout is deterministic, so saving an index twice (or saving,
    loading and saving again) produces identical bytes.
    """
    edges = []
    for a, adj in enumerate(index.adjacency):
        for b, rel, weight in adj:
            if a < b:
                edges.append((a, b, rel, weight))
    edges.sort()
    edge_block = np.array(edges, dtype=_EDGE_DTYPE)

    parts = [MAGIC, struct.pack("<I", len(index.relations))]
    parts.extend(_pack_str(r) for r in index.relations)
    parts.append(struct.pack("<I", len(index.nodes)))
    parts.extend(_pack_str(t) for t in index.nodes)
    parts.append(struct.pack("<Q", len(edges)))
    parts.append(edge_block.tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


class _Reader:
    def __init__(self, data: bytes, path: str):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, count: int) -> bytes:
        if self.pos + count > len(self.data):
            raise KnowledgeBaseError(f"{self.path}: truncated index file")
        chunk = self.data[self.pos : self.pos + count]
        self.pos += count
        return chunk

    def unpack(self, fmt: str) -> int:
        (value,) = struct.unpack(fmt, self.take(struct.calcsize(fmt)))
        return value

    def string(self) -> str:
        return self.take(self.unpack("<H")).decode("utf-8")


def load_index(path: str) -> KnowledgeIndex:
    """Load an index serialized by :func:`save_index`.

    Raises:
        KnowledgeBaseError: on a bad magic number or truncated data.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    reader = _Reader(data, path)
    if reader.take(len(MAGIC)) != MAGIC:
        raise KnowledgeBaseError(f"{path}: not a knowledge index file (bad magic)")
    relations = [reader.string() for _ in range(reader.unpack("<I"))]
    nodes = [reader.string() for _ in range(reader.unpack("<I"))]
    edge_count = reader.unpack("<Q")
    block = reader.take(edge_count * _EDGE_DTYPE.itemsize)
    edges = np.frombuffer(block, dtype=_EDGE_DTYPE)

    adjacency: list[list[tuple[int, int, float]]] = [[] for _ in nodes]
    for a, b, rel, weight in edges:
        a, b, rel = int(a), int(b), int(rel)
        if a >= len(nodes) or b >= len(nodes) or rel >= len(relations):
            raise KnowledgeBaseError(f"{path}: edge references unknown node or relation")
        adjacency[a].append((b, rel, float(weight)))
        adjacency[b].append((a, rel, float(weight)))
    for adj in adjacency:
        adj.sort(key=lambda t: (t[0], t[1]))
    return KnowledgeIndex(nodes=nodes, relations=relations, adjacency=adjacency)
