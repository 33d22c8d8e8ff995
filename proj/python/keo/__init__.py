"""Knowledge-graph-augmented retrieval engine (C++ core bindings)."""

from keo._core import (  # noqa: F401
    Chunk,
    Community,
    CommunityHierarchy,
    CriterionScore,
    DirectedEdge,
    EntityNode,
    HashedNgramProvider,
    JudgeReport,
    KeoError,
    KnowledgeGraph,
    ParsedTriplets,
    RejectedLine,
    ScoredCandidate,
    SpanningForest,
    SpanningTree,
    Subgraph,
    Triplet,
    UndirectedMergedEdge,
    UndirectedMergedGraph,
    VectorIndex,
    canonicalize,
    chunk_corpus,
    connected_components,
    cosine,
    detect_communities,
    expand_m_hop,
    full_subgraph,
    max_spanning_forest,
    max_spanning_tree,
    modularity,
    parse_judge_output,
    parse_triplets,
    render_kg_prompt,
    rouge_f1,
    summarize_leaf,
    to_undirected,
    traverse_to_text,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
