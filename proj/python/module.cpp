#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "keo/community.hpp"
#include "keo/corpus.hpp"
#include "keo/embedding.hpp"
#include "keo/errors.hpp"
#include "keo/eval.hpp"
#include "keo/graph_context.hpp"
#include "keo/index.hpp"
#include "keo/kg.hpp"
#include "keo/rouge.hpp"
#include "keo/triplets.hpp"
#include "keo/util.hpp"

namespace py = pybind11;
using namespace keo;

namespace {

ParseMode parse_mode(const std::string& mode) {
  if (mode == "strict") return ParseMode::kStrict;
  if (mode == "loose") return ParseMode::kLoose;
  throw ValidationError("mode must be \"strict\" or \"loose\"");
}

RougeVariant rouge_variant(const std::string& v) {
  if (v == "rouge1") return RougeVariant::kRouge1;
  if (v == "rougeL") return RougeVariant::kRougeL;
  throw ValidationError("variant must be \"rouge1\" or \"rougeL\"");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "KG-augmented retrieval engine core";

  py::register_exception<Error>(m, "KeoError");

  m.def("canonicalize", [](const std::string& s) { return canonicalize(s); });

  py::class_<Triplet>(m, "Triplet")
      .def_readonly("head", &Triplet::head)
      .def_property_readonly("relation",
                             [](const Triplet& t) {
                               return std::string(relation_label(t.relation));
                             })
      .def_readonly("tail", &Triplet::tail)
      .def("__repr__", [](const Triplet& t) {
        return "<" + t.head + ", " + std::string(relation_label(t.relation)) + ", " + t.tail +
               ">";
      });

  py::class_<RejectedLine>(m, "RejectedLine")
      .def_readonly("line", &RejectedLine::line)
      .def_readonly("text", &RejectedLine::text)
      .def_readonly("reason", &RejectedLine::reason);

  py::class_<ParsedTriplets>(m, "ParsedTriplets")
      .def_readonly("accepted", &ParsedTriplets::accepted)
      .def_readonly("rejected", &ParsedTriplets::rejected);

  m.def(
      "parse_triplets",
      [](const std::string& text, const std::string& mode,
         const std::set<std::string>& known_nodes) {
        return parse_triplets(text, parse_mode(mode), known_nodes);
      },
      py::arg("text"), py::arg("mode") = "loose",
      py::arg("known_nodes") = std::set<std::string>{});

  m.def("render_kg_prompt", &render_kg_prompt, py::arg("record_text"),
        py::arg("current_nodes"), py::arg("hint_budget") = 500);

  py::class_<EntityNode>(m, "EntityNode")
      .def_readonly("id", &EntityNode::id)
      .def_readonly("surface", &EntityNode::surface)
      .def_readonly("provenance", &EntityNode::provenance);

  py::class_<KnowledgeGraph>(m, "KnowledgeGraph")
      .def(py::init<>())
      .def(
          "merge_triplet",
          [](KnowledgeGraph& g, const std::string& head, const std::string& relation,
             const std::string& tail, const std::optional<std::string>& record_id) {
            auto rel = relation_from_label(relation);
            if (!rel) throw ValidationError("unknown relation \"" + relation + "\"");
            g.merge_triplet(Triplet{head, *rel, tail}, record_id);
          },
          py::arg("head"), py::arg("relation"), py::arg("tail"),
          py::arg("record_id") = std::nullopt)
      .def("merge", [](KnowledgeGraph& g, const Triplet& t) { g.merge_triplet(t); })
      .def("find_node", [](const KnowledgeGraph& g, const std::string& s) {
        return g.find_node(s);
      })
      .def("node_count", &KnowledgeGraph::node_count)
      .def("edge_count", &KnowledgeGraph::edge_count)
      .def("total_weight", &KnowledgeGraph::total_weight)
      .def_property_readonly("nodes", [](const KnowledgeGraph& g) { return g.nodes(); })
      .def("edges",
           [](const KnowledgeGraph& g) {
             std::vector<std::tuple<std::string, std::string, std::string, std::uint64_t>> out;
             for (const auto& [key, w] : g.edges()) {
               out.emplace_back(g.node(key.head).surface,
                                std::string(relation_label(key.relation)),
                                g.node(key.tail).surface, w);
             }
             return out;
           })
      .def("save", [](const KnowledgeGraph& g, const std::string& path) { save_kg(g, path); })
      .def_static("load", [](const std::string& path) { return load_kg(path); });

  m.def("cosine", &cosine);

  py::class_<HashedNgramProvider>(m, "HashedNgramProvider")
      .def(py::init<std::size_t, std::size_t>(), py::arg("dim") = 256, py::arg("ngram") = 3)
      .def("embed", [](const HashedNgramProvider& p, const std::string& text) {
        return p.embed(text);
      })
      .def("dim", &HashedNgramProvider::dim);

  py::class_<ScoredCandidate>(m, "ScoredCandidate")
      .def_readonly("target", &ScoredCandidate::target)
      .def_readonly("score", &ScoredCandidate::score);

  py::class_<VectorIndex>(m, "VectorIndex")
      .def(py::init<>())
      .def("add", &VectorIndex::add)
      .def("top_k", &VectorIndex::top_k)
      .def("size", &VectorIndex::size);

  py::class_<Chunk>(m, "Chunk")
      .def_readonly("id", &Chunk::id)
      .def_readonly("text", &Chunk::text)
      .def_readonly("source_record_ids", &Chunk::source_record_ids);

  m.def(
      "chunk_corpus",
      [](const std::vector<std::pair<std::string, std::string>>& records,
         std::size_t chunk_size, std::size_t overlap) {
        std::vector<Record> rs;
        for (const auto& [id, text] : records) rs.push_back(Record{id, text, std::nullopt});
        return chunk_corpus(rs, chunk_size, overlap);
      },
      py::arg("records"), py::arg("chunk_size") = 600, py::arg("overlap") = 100);

  py::class_<DirectedEdge>(m, "DirectedEdge")
      .def_readonly("head", &DirectedEdge::head)
      .def_readonly("tail", &DirectedEdge::tail)
      .def_property_readonly("relation",
                             [](const DirectedEdge& e) {
                               return std::string(relation_label(e.relation));
                             })
      .def_readonly("weight", &DirectedEdge::weight);

  py::class_<Subgraph>(m, "Subgraph")
      .def_readonly("node_ids", &Subgraph::node_ids)
      .def_readonly("edges", &Subgraph::edges);

  py::class_<UndirectedMergedEdge>(m, "UndirectedMergedEdge")
      .def_readonly("u", &UndirectedMergedEdge::u)
      .def_readonly("v", &UndirectedMergedEdge::v)
      .def_readonly("weight", &UndirectedMergedEdge::weight)
      .def_readonly("relation_label", &UndirectedMergedEdge::relation_label);

  py::class_<UndirectedMergedGraph>(m, "UndirectedMergedGraph")
      .def_readonly("node_ids", &UndirectedMergedGraph::node_ids)
      .def_readonly("edges", &UndirectedMergedGraph::edges);

  py::class_<SpanningTree>(m, "SpanningTree")
      .def_readonly("node_ids", &SpanningTree::node_ids)
      .def_readonly("edges", &SpanningTree::edges);

  py::class_<SpanningForest>(m, "SpanningForest")
      .def_readonly("trees", &SpanningForest::trees)
      .def("component_count", &SpanningForest::component_count);

  m.def(
      "expand_m_hop",
      [](const KnowledgeGraph& g, const std::vector<std::int64_t>& seed_ids, std::size_t m) {
        SeedSet seeds;
        for (auto id : seed_ids) seeds.push_back(ScoredCandidate{id, 1.0});
        return expand_m_hop(g, seeds, m);
      },
      py::arg("graph"), py::arg("seed_ids"), py::arg("m"));
  m.def("full_subgraph", &full_subgraph);
  m.def("to_undirected", &to_undirected);
  m.def("connected_components", &connected_components);
  m.def("max_spanning_tree", &max_spanning_tree);
  m.def("max_spanning_forest", &max_spanning_forest);
  m.def("traverse_to_text", &traverse_to_text);

  py::class_<Community>(m, "Community")
      .def_readonly("node_ids", &Community::node_ids)
      .def_readonly("parent", &Community::parent)
      .def_readonly("summary", &Community::summary);

  py::class_<CommunityHierarchy>(m, "CommunityHierarchy")
      .def_readonly("levels", &CommunityHierarchy::levels)
      .def("depth", &CommunityHierarchy::depth);

  m.def("detect_communities", &detect_communities, py::arg("graph"),
        py::arg("resolution") = 1.0, py::arg("rng_seed") = 0);
  m.def("modularity", &modularity, py::arg("graph"), py::arg("partition"),
        py::arg("gamma") = 1.0);
  m.def(
      "summarize_leaf",
      [](const std::set<NodeId>& community, const UndirectedMergedGraph& ug,
         const KnowledgeGraph& kg, std::size_t budget) {
        return summarize_leaf(community, ug, kg, budget);
      },
      py::arg("community"), py::arg("graph"), py::arg("kg"), py::arg("budget") = 400);

  m.def(
      "rouge_f1",
      [](const std::string& pred, const std::string& ref, const std::string& variant) {
        return rouge_f1(pred, ref, rouge_variant(variant));
      },
      py::arg("prediction"), py::arg("reference"), py::arg("variant") = "rouge1");

  py::class_<CriterionScore>(m, "CriterionScore")
      .def_readonly("criterion", &CriterionScore::criterion)
      .def_readonly("score", &CriterionScore::score)
      .def_readonly("explanation", &CriterionScore::explanation);

  py::class_<JudgeReport>(m, "JudgeReport")
      .def_readonly("scores", &JudgeReport::scores)
      .def_readonly("computed_overall", &JudgeReport::computed_overall)
      .def_readonly("stated_overall", &JudgeReport::stated_overall)
      .def_readonly("discrepancy_flagged", &JudgeReport::discrepancy_flagged)
      .def("overall", &JudgeReport::overall);

  m.def(
      "parse_judge_output",
      [](const std::string& text, const std::string& family) {
        return parse_judge_output(text,
                                  family == "k2a" ? QaType::kK2a : QaType::kGsmComprehensive);
      },
      py::arg("text"), py::arg("family") = "gsm");
}
