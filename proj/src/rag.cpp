#include "keo/rag.hpp"

#include <algorithm>

#include "keo/errors.hpp"
#include "keo/util.hpp"

namespace keo {

using nlohmann::json;

Method method_from_string(const std::string& s) {
  if (s == "vn") return Method::kVanilla;
  if (s == "tc") return Method::kTextChunk;
  if (s == "kg") return Method::kKnowledgeGraph;
  throw ValidationError("method must be vn, tc, or kg (got \"" + s + "\")");
}

std::string method_tag(Method m) {
  switch (m) {
    case Method::kVanilla: return "VN";
    case Method::kTextChunk: return "TC";
    case Method::kKnowledgeGraph: return "KG";
  }
  return "?";
}

const std::vector<FewShot>& default_few_shots() {
  static const std::vector<FewShot> shots = {
      {"What action could be taken when the carburetor heat control is stuck?",
       "Free and lubricate the carburetor heat control linkage, verify full travel, and "
       "replace the cable if binding persists."},
      {"What recurring issues suggest gaps in preflight inspection procedures?",
       "Repeated fuel contamination and undetected control binding point to checklist gaps; "
       "add explicit sump draining and control sweep items."},
  };
  return shots;
}

json AnswerRecord::to_json() const {
  json j{{"question_id", question_id}, {"method", method_tag(method)},
         {"answer", answer},           {"context", context},
         {"prompt", prompt},           {"transcript_id", transcript_id}};
  if (!audit.is_null()) j["audit"] = audit;
  return j;
}

AnswerRecord AnswerRecord::from_json(const json& j) {
  AnswerRecord r;
  r.question_id = j.at("question_id").get<std::string>();
  const std::string tag = j.at("method").get<std::string>();
  if (tag == "VN") {
    r.method = Method::kVanilla;
  } else if (tag == "TC") {
    r.method = Method::kTextChunk;
  } else if (tag == "KG") {
    r.method = Method::kKnowledgeGraph;
  } else {
    throw ParseError("unknown method tag \"" + tag + "\"");
  }
  r.answer = j.at("answer").get<std::string>();
  r.context = j.at("context").get<std::string>();
  r.prompt = j.at("prompt").get<std::string>();
  r.transcript_id = j.at("transcript_id").get<std::string>();
  if (j.contains("audit")) r.audit = j["audit"];
  return r;
}

std::string render_vanilla_prompt(const std::string& question,
                                  const std::vector<FewShot>& few_shots) {
  std::string p =
      "You are an aviation maintenance assistant. Answer the question concisely and "
      "precisely.\n";
  for (const auto& shot : few_shots) {
    p += "\nQuestion: " + shot.question + "\nAnswer: " + shot.answer + "\n";
  }
  p += "\nQuestion: " + question + "\nAnswer:";
  return p;
}

std::string render_rag_prompt(const std::string& question, const std::string& context,
                              Method method, std::size_t prompt_budget) {
  const std::string instruction =
      method == Method::kTextChunk
          ? "You are an aviation maintenance assistant. Use the following maintenance "
            "records retrieved from the corpus to answer the question. Ground your answer "
            "in the records.\n\nContext:\n"
          : "You are an aviation maintenance assistant. Use the following knowledge-graph "
            "context (community summaries followed by relation paths) to answer the "
            "question. Ground your answer in the relations.\n\nContext:\n";
  const std::string tail = "\n\nQuestion: " + question + "\nAnswer:";
  std::string ctx = context;
  // The context, never the question, gives way when the budget is tight.
  const std::size_t fixed = instruction.size() + tail.size();
  if (fixed + ctx.size() > prompt_budget && prompt_budget > fixed) {
    utf8_truncate(ctx, prompt_budget - fixed);
  }
  return instruction + ctx + tail;
}

namespace {

std::string run_chat(ChatClient& llm, const std::string& prompt, const RetrievalConfig& cfg,
                     const std::string& question_id, std::string* transcript_id) {
  const std::vector<ChatMessage> messages{{"user", prompt}};
  const ChatParams params{cfg.chat_model, cfg.temperature};
  *transcript_id = ChatClient::request_hash(messages, params);
  try {
    return llm.complete(messages, params);
  } catch (const TransportError& e) {
    throw TransportError("question " + question_id + ": " + e.what(), e.retryable());
  }
}

}  // namespace

AnswerRecord answer_vanilla(const std::string& question_id, const std::string& question,
                            ChatClient& llm, const RetrievalConfig& cfg,
                            const std::vector<FewShot>& few_shots) {
  if (question.empty()) throw ValidationError("answer_vanilla: empty question");
  AnswerRecord r;
  r.question_id = question_id;
  r.method = Method::kVanilla;
  r.prompt = render_vanilla_prompt(question, few_shots);
  r.answer = run_chat(llm, r.prompt, cfg, question_id, &r.transcript_id);
  return r;
}

AnswerRecord answer_text_chunk(const std::string& question_id, const std::string& question,
                               const std::vector<Chunk>& chunks, const VectorIndex& chunk_index,
                               const EmbeddingProvider& provider, const RetrievalConfig& cfg,
                               ChatClient& llm) {
  if (chunk_index.size() == 0) throw ValidationError("answer_text_chunk: empty chunk index");
  const EmbeddingVector q = provider.embed(question);
  const SeedSet top = chunk_index.top_k(q, cfg.k_chunks);

  std::string context;
  for (const auto& c : top) {
    auto it = std::find_if(chunks.begin(), chunks.end(),
                           [&](const Chunk& ch) { return ch.id == c.target; });
    if (it == chunks.end()) {
      throw ValidationError("chunk index references unknown chunk id " +
                            std::to_string(c.target));
    }
    if (!context.empty()) context += "\n\n";
    context += it->text;
  }

  AnswerRecord r;
  r.question_id = question_id;
  r.method = Method::kTextChunk;
  r.context = context;
  r.prompt = render_rag_prompt(question, context, Method::kTextChunk, cfg.prompt_budget);
  r.answer = run_chat(llm, r.prompt, cfg, question_id, &r.transcript_id);
  return r;
}

AnswerRecord answer_kg(const std::string& question_id, const std::string& question,
                       const KnowledgeGraph& kg, const VectorIndex& node_index,
                       const CommunityHierarchy& hierarchy, const EmbeddingProvider& provider,
                       const RetrievalConfig& cfg, ChatClient& llm) {
  if (node_index.size() == 0) throw ValidationError("answer_kg: empty node index");
  const EmbeddingVector q = provider.embed(question);
  const SeedSet seeds = node_index.top_k(q, cfg.k_seeds);
  if (seeds.empty()) throw ValidationError("answer_kg: empty seed set");

  const Subgraph sub = expand_m_hop(kg, seeds, cfg.m_hops);
  const UndirectedMergedGraph ug = to_undirected(sub);
  const SpanningForest forest = max_spanning_forest(ug);
  const std::string traversal = traverse_to_text(forest, kg);
  const std::string context = assemble_context(
      traversal, hierarchy, {cfg.leaf_summary_budget, cfg.parent_summary_budget},
      cfg.context_budget);

  AnswerRecord r;
  r.question_id = question_id;
  r.method = Method::kKnowledgeGraph;
  r.context = context;
  r.prompt = render_rag_prompt(question, context, Method::kKnowledgeGraph, cfg.prompt_budget);

  // Audit trail: every intermediate, enough to replay the derivation.
  json seed_list = json::array();
  for (const auto& s : seeds) {
    seed_list.push_back(json{{"id", s.target}, {"surface", kg.node(s.target).surface},
                             {"score", s.score}});
  }
  json sub_edges = json::array();
  for (const auto& e : sub.edges) {
    sub_edges.push_back(json{{"head", e.head},
                             {"relation", std::string(relation_label(e.relation))},
                             {"tail", e.tail},
                             {"weight", e.weight}});
  }
  json trees = json::array();
  for (const auto& t : forest.trees) {
    json edges = json::array();
    for (const auto& e : t.edges) {
      edges.push_back(json{{"u", e.u}, {"v", e.v}, {"weight", e.weight},
                           {"label", e.relation_label}});
    }
    trees.push_back(json{{"nodes", std::vector<NodeId>(t.node_ids.begin(), t.node_ids.end())},
                         {"edges", std::move(edges)}});
  }
  r.audit = json{{"seeds", std::move(seed_list)},
                 {"subgraph_nodes",
                  std::vector<NodeId>(sub.node_ids.begin(), sub.node_ids.end())},
                 {"subgraph_edges", std::move(sub_edges)},
                 {"component_count", forest.component_count()},
                 {"forest", std::move(trees)},
                 {"traversal_text", traversal}};

  r.answer = run_chat(llm, r.prompt, cfg, question_id, &r.transcript_id);
  return r;
}

}  // namespace keo
