#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "keo/chat.hpp"
#include "keo/community.hpp"
#include "keo/config.hpp"
#include "keo/corpus.hpp"
#include "keo/graph_context.hpp"
#include "keo/index.hpp"
#include "keo/kg.hpp"

namespace keo {

enum class Method { kVanilla, kTextChunk, kKnowledgeGraph };

Method method_from_string(const std::string& s);  // vn | tc | kg
std::string method_tag(Method m);                 // VN | TC | KG

struct FewShot {
  std::string question;
  std::string answer;
};

// The two-example default few-shot block used by the vanilla method.
const std::vector<FewShot>& default_few_shots();

struct AnswerRecord {
  std::string question_id;
  Method method = Method::kVanilla;
  std::string answer;
  std::string context;        // empty iff method == VN
  std::string prompt;
  std::string transcript_id;  // request hash of the chat call
  nlohmann::json audit;       // KG-method intermediates; null otherwise

  nlohmann::json to_json() const;
  static AnswerRecord from_json(const nlohmann::json& j);
};

std::string render_vanilla_prompt(const std::string& question,
                                  const std::vector<FewShot>& few_shots);
std::string render_rag_prompt(const std::string& question, const std::string& context,
                              Method method, std::size_t prompt_budget);

AnswerRecord answer_vanilla(const std::string& question_id, const std::string& question,
                            ChatClient& llm, const RetrievalConfig& cfg,
                            const std::vector<FewShot>& few_shots = default_few_shots());

AnswerRecord answer_text_chunk(const std::string& question_id, const std::string& question,
                               const std::vector<Chunk>& chunks, const VectorIndex& chunk_index,
                               const EmbeddingProvider& provider, const RetrievalConfig& cfg,
                               ChatClient& llm);

// Seed retrieval -> m-hop expansion -> undirected merge -> components ->
// per-component maximum spanning tree -> traversal text -> community-summary
// context assembly. Intermediates land in AnswerRecord.audit.
AnswerRecord answer_kg(const std::string& question_id, const std::string& question,
                       const KnowledgeGraph& kg, const VectorIndex& node_index,
                       const CommunityHierarchy& hierarchy, const EmbeddingProvider& provider,
                       const RetrievalConfig& cfg, ChatClient& llm);

}  // namespace keo
