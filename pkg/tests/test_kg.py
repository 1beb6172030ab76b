import math
import random
from collections import Counter

import numpy as np
import pytest

from mcqgen import (
    GroundingFailed,
    KnowledgeBaseError,
    build_index,
    ground,
    load_embeddings,
    load_index,
    normalize_term,
    retrieve_subgraph,
    save_index,
    score_candidates,
)

from conftest import (
    all_pairs_distances,
    assertion_line,
    random_undirected_edges,
    write_assertions,
    write_embeddings,
    write_lines,
)


def _names(index, nodes):
    return sorted(index.nodes[n] for n in nodes)


def test_build_index_two_rows(tmp_path):
    path = write_lines(
        tmp_path / "a.csv",
        [
            assertion_line("cat", "pet", rel="IsA", weight=2.0),
            assertion_line("pet", "animal"),
        ],
    )
    index = build_index(str(path))
    assert index.nodes == ["cat", "pet", "animal"]
    assert index.relations == ["IsA", "RelatedTo"]
    assert index.edge_count == 2
    # symmetric adjacency with weights attached
    assert index.adjacency[index.term_map["cat"]] == [(1, 0, 2.0)]
    assert {n for n, _, _ in index.adjacency[index.term_map["pet"]]} == {0, 2}


def test_build_index_language_filter(tmp_path):
    path = write_lines(
        tmp_path / "a.csv",
        [
            assertion_line("cat", "pet"),
            assertion_line("chat", "cat", start_lang="fr"),
            assertion_line("cat", "gato", end_lang="es"),
        ],
    )
    tally = Counter()
    index = build_index(str(path), "en", tally)
    assert index.nodes == ["cat", "pet"]
    assert tally["language-filtered"] == 2


def test_build_index_strips_sense_suffix(tmp_path):
    path = write_lines(
        tmp_path / "a.csv",
        [
            assertion_line("cat", "pet", sense="/n"),
            assertion_line("cat", "whiskers", sense="/n/animal"),
        ],
    )
    index = build_index(str(path))
    assert index.nodes == ["cat", "pet", "whiskers"]
    assert len(index.adjacency[index.term_map["cat"]]) == 2


def test_build_index_merges_duplicates_by_max_weight(tmp_path):
    path = write_lines(
        tmp_path / "a.csv",
        [
            assertion_line("cat", "pet", weight=1.0),
            assertion_line("cat", "pet", weight=2.5),
            assertion_line("pet", "cat", weight=0.5),
        ],
    )
    tally = Counter()
    index = build_index(str(path), "en", tally)
    assert index.edge_count == 1
    assert index.adjacency[0] == [(1, 0, 2.5)]
    assert tally["duplicate-merged"] == 2


def test_build_index_tallies_malformed_and_self_loops(tmp_path):
    path = write_lines(
        tmp_path / "a.csv",
        [
            assertion_line("cat", "pet"),
            "only\tthree\tfields",
            "/a/x\t/r/IsA\tnot-a-concept\t/c/en/pet\t{}",
            "/a/x\tnot-a-relation\t/c/en/cat\t/c/en/pet\t{}",
            "/a/x\t/r/IsA\t/c/en/cat\t/c/en/pet\tnot json",
            assertion_line("cat", "pet", weight=-1.0),
            assertion_line("cat", "cat"),
        ],
    )
    tally = Counter()
    index = build_index(str(path), "en", tally)
    assert index.edge_count == 1
    assert tally["malformed"] == 5
    assert tally["self-loop"] == 1


def test_build_index_with_no_usable_rows_is_fatal(tmp_path):
    path = write_lines(tmp_path / "a.csv", ["bad row", ""])
    with pytest.raises(KnowledgeBaseError):
        build_index(str(path))


def test_build_index_twice_is_equal(tmp_path):
    path = write_assertions(
        tmp_path / "a.csv", [("cat", "pet"), ("pet", "dog"), ("dog", "bone")]
    )
    assert build_index(str(path)) == build_index(str(path))


def test_normalize_term():
    assert normalize_term("Black Cat") == "black_cat"
    assert normalize_term(" cat ") == "cat"


@pytest.fixture
def ngram_index(tmp_path):
    path = write_assertions(
        tmp_path / "ngram.csv",
        [("black_cat", "pet"), ("cat", "animal"), ("sat", "verb")],
    )
    return build_index(str(path))


def test_ground_prefers_longest_ngram(ngram_index):
    nodes = ground("The black cat sat.", ngram_index)
    assert [ngram_index.nodes[n] for n in nodes] == ["black_cat", "sat"]


def test_ground_unmatched_text_is_empty(ngram_index):
    assert ground("nothing matches here", ngram_index) == []


def test_ground_deduplicates_but_keeps_order(ngram_index):
    nodes = ground("cat sat cat sat", ngram_index)
    assert [ngram_index.nodes[n] for n in nodes] == ["cat", "sat"]


def test_ground_respects_max_ngram(ngram_index):
    nodes = ground("black cat", ngram_index, max_ngram=1)
    assert [ngram_index.nodes[n] for n in nodes] == ["cat"]
    with pytest.raises(ValueError):
        ground("black cat", ngram_index, max_ngram=0)


@pytest.fixture
def chain_index(tmp_path):
    path = write_assertions(
        tmp_path / "chain.csv", [("a", "b"), ("b", "c"), ("c", "d")]
    )
    return build_index(str(path))


def test_retrieve_subgraph_by_hops(chain_index):
    seed = [chain_index.term_map["a"]]
    assert _names(chain_index, retrieve_subgraph(seed, chain_index, 1)) == ["b"]
    assert _names(chain_index, retrieve_subgraph(seed, chain_index, 2)) == ["b", "c"]
    assert _names(chain_index, retrieve_subgraph(seed, chain_index, 3)) == ["b", "c", "d"]


def test_retrieve_subgraph_excludes_seeds(chain_index):
    seeds = [chain_index.term_map["a"], chain_index.term_map["b"]]
    got = retrieve_subgraph(seeds, chain_index, 2)
    assert not (got & set(seeds))
    assert _names(chain_index, got) == ["c", "d"]


def test_retrieve_subgraph_validates_arguments(chain_index):
    with pytest.raises(ValueError):
        retrieve_subgraph([], chain_index, 2)
    with pytest.raises(ValueError):
        retrieve_subgraph([0], chain_index, 0)


def test_retrieve_subgraph_matches_reachability_oracle(tmp_path):
    rng = random.Random(5)
    for round_no in range(20):
        node_count = rng.randrange(5, 30)
        max_edges = node_count * (node_count - 1) // 2
        edges = random_undirected_edges(rng, node_count, rng.randrange(4, min(40, max_edges + 1)))
        path = write_assertions(
            tmp_path / f"g{round_no}.csv",
            [(f"n{a}", f"n{b}") for a, b in edges],
        )
        index = build_index(str(path))
        id_of = index.term_map
        named = [(id_of[f"n{a}"], id_of[f"n{b}"]) for a, b in edges]

        seeds = set(rng.sample(range(len(index.nodes)), rng.randrange(1, 3)))
        hops = rng.randrange(1, 4)
        dist = all_pairs_distances(len(index.nodes), named)
        expected = {
            i
            for i in range(len(index.nodes))
            if min(dist[s][i] for s in seeds) <= hops
        } - seeds
        assert retrieve_subgraph(seeds, index, hops) == expected


def test_retrieve_subgraph_grows_with_hops(chain_index):
    seed = [chain_index.term_map["a"]]
    previous = set()
    for hops in range(1, 5):
        current = retrieve_subgraph(seed, chain_index, hops)
        assert previous <= current
        previous = current


def test_load_embeddings_plain_and_header(tmp_path):
    plain = write_embeddings(tmp_path / "plain.txt", {"cat": [1.0, 0.0], "dog": [0.5, 0.5]})
    headed = write_embeddings(
        tmp_path / "headed.txt", {"cat": [1.0, 0.0], "dog": [0.5, 0.5]}, header=True
    )
    for path in (plain, headed):
        table = load_embeddings(str(path))
        assert table.dim == 2
        assert set(table.vectors) == {"cat", "dog"}
        assert np.allclose(table.vectors["dog"], [0.5, 0.5])


def test_load_embeddings_normalizes_terms(tmp_path):
    path = write_lines(tmp_path / "e.txt", ["Black_Cat 1.0 2.0"])
    table = load_embeddings(str(path))
    assert "black_cat" in table


def test_load_embeddings_rejects_bad_rows(tmp_path):
    cases = [
        ["cat 1.0 2.0", "dog 1.0"],
        ["cat 1.0 two"],
        ["cat 1.0 nan"],
        ["cat"],
        [],
    ]
    for i, lines in enumerate(cases):
        path = write_lines(tmp_path / f"bad{i}.txt", lines)
        with pytest.raises(KnowledgeBaseError):
            load_embeddings(str(path))


def test_score_candidates_ranks_by_cosine(tmp_path, ngram_index):
    emb = load_embeddings(
        str(
            write_embeddings(
                tmp_path / "e.txt",
                {
                    "black_cat": [1.0, 0.0],
                    "cat": [0.0, 1.0],
                    "animal": [1.0, 1.0],
                    "sat": [1.0, 0.0],
                    "verb": [-1.0, 0.0],
                },
            )
        )
    )
    ids = ngram_index.term_map
    ranked = score_candidates(
        [ids["animal"], ids["verb"], ids["cat"]], ["black_cat"], emb, ngram_index
    )
    assert [c.term for c in ranked] == ["animal", "cat", "verb"]
    assert ranked[0].score == pytest.approx(math.sqrt(0.5), abs=1e-12)
    assert ranked[1].score == pytest.approx(0.0, abs=1e-12)
    assert ranked[2].score == pytest.approx(-1.0, abs=1e-12)


def test_score_candidates_mean_query_vector(tmp_path, ngram_index):
    emb = load_embeddings(
        str(
            write_embeddings(
                tmp_path / "e.txt",
                {"cat": [1.0, 0.0], "sat": [0.0, 1.0], "animal": [1.0, 1.0]},
            )
        )
    )
    (top,) = score_candidates(
        [ngram_index.term_map["animal"]], ["cat", "sat", "missing"], emb, ngram_index
    )
    assert top.score == pytest.approx(1.0, abs=1e-12)


def test_score_candidates_breaks_ties_lexicographically(tmp_path, ngram_index):
    emb = load_embeddings(
        str(
            write_embeddings(
                tmp_path / "e.txt",
                {"cat": [2.0, 0.0], "sat": [1.0, 0.0], "verb": [3.0, 0.0], "black_cat": [1.0, 0.0]},
            )
        )
    )
    ids = ngram_index.term_map
    ranked = score_candidates(
        [ids["verb"], ids["sat"], ids["cat"]], ["black_cat"], emb, ngram_index
    )
    assert [c.term for c in ranked] == ["cat", "sat", "verb"]


def test_score_candidates_requires_embeddable_query(tmp_path, ngram_index):
    emb = load_embeddings(str(write_embeddings(tmp_path / "e.txt", {"cat": [1.0, 0.0]})))
    with pytest.raises(GroundingFailed):
        score_candidates([0], ["unembedded"], emb, ngram_index)
    zero = load_embeddings(str(write_embeddings(tmp_path / "z.txt", {"cat": [0.0, 0.0]})))
    with pytest.raises(GroundingFailed):
        score_candidates([0], ["cat"], zero, ngram_index)


def test_score_candidates_skips_unembedded_candidates(tmp_path, ngram_index):
    emb = load_embeddings(
        str(write_embeddings(tmp_path / "e.txt", {"black_cat": [1.0, 0.0], "cat": [1.0, 0.0]}))
    )
    ids = ngram_index.term_map
    ranked = score_candidates([ids["cat"], ids["animal"]], ["black_cat"], emb, ngram_index)
    assert [c.term for c in ranked] == ["cat"]


def test_index_persistence_round_trip(tmp_path):
    path = write_lines(
        tmp_path / "a.csv",
        [
            assertion_line("cat", "pet", rel="IsA", weight=2.0),
            assertion_line("pet", "animal"),
            assertion_line("black_cat", "cat", rel="IsA"),
        ],
    )
    index = build_index(str(path))
    out = tmp_path / "kg.bin"
    save_index(index, str(out))
    loaded = load_index(str(out))
    assert loaded == index

    again = tmp_path / "kg2.bin"
    save_index(loaded, str(again))
    assert out.read_bytes() == again.read_bytes()


def test_index_file_starts_with_magic(tmp_path):
    path = write_assertions(tmp_path / "a.csv", [("cat", "pet")])
    out = tmp_path / "kg.bin"
    save_index(build_index(str(path)), str(out))
    assert out.read_bytes()[:8] == b"MCQAKGv1"


def test_load_index_rejects_bad_files(tmp_path):
    bad_magic = tmp_path / "bad.bin"
    bad_magic.write_bytes(b"NOTMAGIC" + b"\x00" * 32)
    with pytest.raises(KnowledgeBaseError):
        load_index(str(bad_magic))

    path = write_assertions(tmp_path / "a.csv", [("cat", "pet")])
    out = tmp_path / "kg.bin"
    save_index(build_index(str(path)), str(out))
    truncated = tmp_path / "trunc.bin"
    truncated.write_bytes(out.read_bytes()[:-4])
    with pytest.raises(KnowledgeBaseError):
        load_index(str(truncated))
