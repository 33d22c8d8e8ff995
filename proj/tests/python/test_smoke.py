"""Smoke tests for the pybind11 bindings."""

import math

import pytest

import keo


def test_canonicalize():
    assert keo.canonicalize("  engine   quit ") == "ENGINE QUIT"


def test_parse_triplets_and_build_graph():
    parsed = keo.parse_triplets(
        "<FIRST SUCCESSFUL AIRPLANE, DESIGNED BY, WRIGHT BROTHERS>\n"
        "<FIRST SUCCESSFUL AIRPLANE, TIME PERIOD, 1903>\n"
        "<A, FLIES OVER, B>"
    )
    assert len(parsed.accepted) == 2
    assert len(parsed.rejected) == 1
    assert "unknown relation" in parsed.rejected[0].reason

    g = keo.KnowledgeGraph()
    for t in parsed.accepted:
        g.merge(t)
    assert g.node_count() == 3
    assert g.edge_count() == 2


def test_graph_pipeline_traversal():
    g = keo.KnowledgeGraph()
    g.merge_triplet("ENGINE QUIT", "HAS CAUSE", "CARBURETOR ICE")
    g.merge_triplet("ENGINE QUIT", "HAS CAUSE", "CARBURETOR ICE")
    g.merge_triplet("ENGINE QUIT", "LOCATION", "RUNWAY 27")

    seed = g.find_node("ENGINE QUIT")
    sub = keo.expand_m_hop(g, [seed], 2)
    assert len(sub.node_ids) == 3

    ug = keo.to_undirected(sub)
    assert len(ug.edges) == 2

    forest = keo.max_spanning_forest(ug)
    assert forest.component_count() == 1

    text = keo.traverse_to_text(forest, g)
    assert "ENGINE QUIT -[HAS CAUSE (w=2)]- CARBURETOR ICE" in text


def test_duplicate_merge_increments_weight():
    g = keo.KnowledgeGraph()
    g.merge_triplet("A", "HAS CAUSE", "B")
    g.merge_triplet("A", "HAS CAUSE", "B")
    ((head, rel, tail, weight),) = g.edges()
    assert (head, rel, tail, weight) == ("A", "HAS CAUSE", "B", 2)


def test_embedding_and_top_k():
    provider = keo.HashedNgramProvider(dim=128)
    v = provider.embed("water in the fuel system")
    assert math.isclose(sum(x * x for x in v), 1.0, rel_tol=1e-9)
    assert math.isclose(keo.cosine(v, v), 1.0, rel_tol=1e-12)

    index = keo.VectorIndex()
    texts = ["engine quit", "carburetor ice", "fuel starvation"]
    for i, t in enumerate(texts):
        index.add(i, provider.embed(t))
    top = index.top_k(provider.embed("carburetor ice"), 2)
    assert top[0].target == 1
    assert top[0].score == pytest.approx(1.0)


def test_communities_on_two_cliques():
    g = keo.KnowledgeGraph()
    for base in ("L", "R"):
        for i in range(4):
            for j in range(i + 1, 4):
                g.merge_triplet(f"{base}{i}", "HAS CAUSE", f"{base}{j}")
    g.merge_triplet("L0", "FOLLOWED BY", "R0")

    ug = keo.to_undirected(keo.full_subgraph(g))
    h = keo.detect_communities(ug, resolution=1.0, rng_seed=0)
    assert len(h.levels[0]) == 2
    parts = [c.node_ids for c in h.levels[0]]
    singles = [{n} for n in ug.node_ids]
    assert keo.modularity(ug, parts) > keo.modularity(ug, singles)


def test_chunking():
    chunks = keo.chunk_corpus([("r", "x" * 250)], chunk_size=100, overlap=20)
    assert [len(c.text) for c in chunks] == [100, 100, 90]
    assert chunks[0].source_record_ids == ["r"]


def test_rouge():
    assert keo.rouge_f1("replace fuel pump", "replace the fuel pump") == pytest.approx(
        0.8571, abs=1e-4
    )
    assert keo.rouge_f1("a b", "a b", "rougeL") == 1.0


def test_judge_parsing():
    text = (
        "Correctness: 4 - a\nCompleteness: 4 - b\nPracticality: 5 - c\n"
        "Safety: 3 - d\nClarity: 4 - e\n"
    )
    report = keo.parse_judge_output(text, "k2a")
    assert report.overall() == 4.0
    with pytest.raises(keo.KeoError):
        keo.parse_judge_output("Correctness: 9 - way out of range", "k2a")
