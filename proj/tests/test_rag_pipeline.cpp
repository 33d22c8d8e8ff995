#include <doctest.h>

#include "keo/chat.hpp"
#include "keo/community.hpp"
#include "keo/config.hpp"
#include "keo/corpus.hpp"
#include "keo/errors.hpp"
#include "keo/graph_context.hpp"
#include "keo/net.hpp"
#include "keo/rag.hpp"
#include "keo/stub_llm.hpp"
#include "support/helpers.hpp"

using namespace keo;

TEST_CASE("chunk_corpus window arithmetic") {
  SUBCASE("short record is one chunk") {
    const auto chunks = chunk_corpus({Record{"r", "short text", {}}}, 100, 20);
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0].text == "short text");
    CHECK(chunks[0].source_record_ids == std::vector<std::string>{"r"});
  }
  SUBCASE("250 chars at size 100 overlap 20 start at 0, 80, 160") {
    std::string text(250, 'x');
    for (std::size_t i = 0; i < text.size(); ++i) text[i] = static_cast<char>('a' + i % 26);
    const auto chunks = chunk_corpus({Record{"r", text, {}}}, 100, 20);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0].text == text.substr(0, 100));
    CHECK(chunks[1].text == text.substr(80, 100));
    CHECK(chunks[2].text == text.substr(160, 90));
  }
  SUBCASE("chunks minus overlap reconstruct the record") {
    Rng rng(5);
    for (int iter = 0; iter < 20; ++iter) {
      std::string text(50 + rng.bounded(400), ' ');
      for (auto& c : text) c = static_cast<char>('a' + rng.bounded(26));
      const std::size_t size = 40 + rng.bounded(80);
      const std::size_t overlap = rng.bounded(size - 1);
      const auto chunks = chunk_corpus({Record{"r", text, {}}}, size, overlap);
      std::string rebuilt = chunks[0].text;
      for (std::size_t i = 1; i < chunks.size(); ++i) {
        rebuilt += chunks[i].text.substr(overlap);
      }
      CHECK(rebuilt == text);
      for (const auto& c : chunks) CHECK(c.text.size() <= size);
    }
  }
  SUBCASE("records never merge across boundaries") {
    const auto chunks =
        chunk_corpus({Record{"a", std::string(150, 'a'), {}}, Record{"b", "tiny", {}}}, 100, 10);
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[2].text == "tiny");
    CHECK(chunks[2].source_record_ids == std::vector<std::string>{"b"});
  }
  SUBCASE("bad window parameters are rejected") {
    CHECK_THROWS_AS(chunk_corpus({}, 100, 100), ValidationError);
    CHECK_THROWS_AS(chunk_corpus({}, 0, 0), ValidationError);
  }
}

TEST_CASE("request hashing is canonical") {
  const std::vector<ChatMessage> messages{{"user", "hello"}, {"assistant", "hi"}};
  const ChatParams params{"m1", 0.0};
  const std::string h1 = ChatClient::request_hash(messages, params);
  const std::string h2 = ChatClient::request_hash(messages, params);
  CHECK(h1 == h2);

  // Field-order permutations of equal messages hash identically: build the
  // same request body with keys inserted in a different order.
  nlohmann::json a;
  a["messages"] = {{{"role", "user"}, {"content", "hello"}}};
  a["model"] = "m1";
  a["temperature"] = 0.0;
  nlohmann::json b;
  b["temperature"] = 0.0;
  b["model"] = "m1";
  b["messages"] = {{{"content", "hello"}, {"role", "user"}}};
  CHECK(a.dump() == b.dump());

  const std::string h3 = ChatClient::request_hash({{"user", "other"}}, params);
  CHECK(h1 != h3);
}

TEST_CASE("chat record then replay round trip") {
  test::TempDir tmp("chat");
  stub::StubLlmServer server;
  const std::vector<ChatMessage> messages{{"user", "What turns fuel to ice?"}};
  const ChatParams params{"test-model", 0.0};

  std::string live_text;
  {
    TranscriptStore store(tmp.file("t.jsonl"));
    ChatClient client(server.chat_url(), ChatMode::kRecord, &store);
    live_text = client.complete(messages, params);
    CHECK(!live_text.empty());
  }
  {
    TranscriptStore store(tmp.file("t.jsonl"));
    CHECK(store.size() == 1);
    ChatClient client(server.chat_url(), ChatMode::kReplay, &store);
    CHECK(client.complete(messages, params) == live_text);
  }
  SUBCASE("replay miss is a deterministic error naming the hash") {
    TranscriptStore store(tmp.file("t.jsonl"));
    ChatClient client(server.chat_url(), ChatMode::kReplay, &store);
    const std::vector<ChatMessage> unknown{{"user", "never recorded"}};
    const std::string expect_hash = ChatClient::request_hash(unknown, params);
    try {
      client.complete(unknown, params);
      FAIL("expected ReplayMissError");
    } catch (const ReplayMissError& e) {
      CHECK(e.request_hash() == expect_hash);
    }
  }
  SUBCASE("replay mode makes no network calls even under the guard") {
    TranscriptStore store(tmp.file("t.jsonl"));
    ChatClient client(server.chat_url(), ChatMode::kReplay, &store);
    net::forbid_network(true);
    CHECK(client.complete(messages, params) == live_text);
    net::forbid_network(false);
  }
}

TEST_CASE("network guard blocks live calls") {
  TranscriptStore store;
  ChatClient client("http://127.0.0.1:9/v1/chat/completions", ChatMode::kLive, nullptr);
  net::forbid_network(true);
  CHECK_THROWS_AS(client.complete({{"user", "x"}}, {"m", 0.0}), TransportError);
  net::forbid_network(false);
}

TEST_CASE("transport errors from unreachable hosts are retryable") {
  ChatClient client("http://127.0.0.1:1/v1/chat/completions", ChatMode::kLive, nullptr);
  try {
    client.complete({{"user", "x"}}, {"m", 0.0});
    FAIL("expected TransportError");
  } catch (const TransportError& e) {
    CHECK(e.retryable());
  }
}

namespace {

struct PipelineFixture {
  RetrievalConfig cfg;
  KnowledgeGraph kg;
  HashedNgramProvider provider{256};
  std::vector<Chunk> chunks;
  VectorIndex chunk_index;
  VectorIndex node_index;
  CommunityHierarchy hierarchy;

  PipelineFixture() {
    cfg.k_seeds = 3;
    cfg.k_chunks = 2;
    cfg.m_hops = 2;
    kg.merge_triplet(Triplet{"ENGINE QUIT", RelationType::kHasCause, "CARBURETOR ICE"}, {"r1"});
    kg.merge_triplet(Triplet{"ENGINE QUIT", RelationType::kHasCause, "CARBURETOR ICE"}, {"r1"});
    kg.merge_triplet(Triplet{"ENGINE QUIT", RelationType::kLocation, "RUNWAY 27"}, {"r2"});
    kg.merge_triplet(Triplet{"FUEL PUMP", RelationType::kPartOf, "FUEL SYSTEM"}, {"r3"});
    const std::vector<Record> records = {
        Record{"r1", "ENGINE QUIT AFTER CARBURETOR ICE FORMED.", {}},
        Record{"r2", "ENGINE QUIT ON RUNWAY 27.", {}},
        Record{"r3", "FUEL PUMP IS PART OF FUEL SYSTEM.", {}},
    };
    chunks = chunk_corpus(records, cfg.chunk_size, cfg.chunk_overlap);
    chunk_index = build_chunk_index(chunks, provider);
    node_index = build_node_index(kg, provider);
    const UndirectedMergedGraph ug = to_undirected(full_subgraph(kg));
    hierarchy = detect_communities(ug, 1.0, 0);
    summarize_hierarchy(hierarchy, ug, kg, 400, 600);
  }
};

}  // namespace

TEST_CASE("answer methods against the stub endpoint") {
  PipelineFixture fx;
  stub::StubLlmServer server;
  TranscriptStore store;
  ChatClient llm(server.chat_url(), ChatMode::kLive, nullptr);

  SUBCASE("vanilla method keeps context empty and question verbatim") {
    const AnswerRecord r = answer_vanilla("q1", "Why do engines quit?", llm, fx.cfg, {});
    CHECK(r.method == Method::kVanilla);
    CHECK(r.context.empty());
    CHECK(r.prompt.find("Why do engines quit?") != std::string::npos);
    CHECK(r.prompt.size() <= fx.cfg.prompt_budget);
    CHECK(!r.answer.empty());
    CHECK(!r.transcript_id.empty());
  }

  SUBCASE("few shots render into the vanilla prompt") {
    const AnswerRecord r = answer_vanilla("q1", "Why?", llm, fx.cfg);
    for (const auto& shot : default_few_shots()) {
      CHECK(r.prompt.find(shot.question) != std::string::npos);
    }
  }

  SUBCASE("text-chunk method retrieves top chunks in score order") {
    const AnswerRecord r = answer_text_chunk("q2", "ENGINE QUIT ON RUNWAY 27.", fx.chunks,
                                             fx.chunk_index, fx.provider, fx.cfg, llm);
    CHECK(r.method == Method::kTextChunk);
    // Query equals chunk r2's text, so that chunk leads the context.
    CHECK(r.context.rfind("ENGINE QUIT ON RUNWAY 27.", 0) == 0);
    CHECK(!r.context.empty());
    // k_chunks = 2 -> exactly one blank-line separator.
    CHECK(r.context.find("\n\n") != std::string::npos);

    // Oracle: ids from an exhaustive scan.
    const auto q = fx.provider.embed("ENGINE QUIT ON RUNWAY 27.");
    const auto expect = fx.chunk_index.top_k(q, fx.cfg.k_chunks);
    std::size_t pos = 0;
    for (const auto& sc : expect) {
      const auto& chunk = fx.chunks[static_cast<std::size_t>(sc.target)];
      const std::size_t at = r.context.find(chunk.text, pos);
      CHECK(at != std::string::npos);
      pos = at;
    }
  }

  SUBCASE("kg method composes the graph pipeline and audits intermediates") {
    const AnswerRecord r = answer_kg("q3", "WHAT CAUSED ENGINE QUIT?", fx.kg, fx.node_index,
                                     fx.hierarchy, fx.provider, fx.cfg, llm);
    CHECK(r.method == Method::kKnowledgeGraph);
    CHECK(r.context.find("ENGINE QUIT -[HAS CAUSE (w=2)]- CARBURETOR ICE") !=
          std::string::npos);
    REQUIRE(!r.audit.is_null());

    // Compositionality: the audited intermediates equal direct calls.
    const auto q = fx.provider.embed("WHAT CAUSED ENGINE QUIT?");
    const SeedSet seeds = fx.node_index.top_k(q, fx.cfg.k_seeds);
    const Subgraph sub = expand_m_hop(fx.kg, seeds, fx.cfg.m_hops);
    const SpanningForest forest = max_spanning_forest(to_undirected(sub));
    CHECK(r.audit["subgraph_nodes"].size() == sub.node_ids.size());
    CHECK(r.audit["subgraph_edges"].size() == sub.edges.size());
    CHECK(r.audit["component_count"].get<std::size_t>() == forest.component_count());
    CHECK(r.audit["traversal_text"].get<std::string>() == traverse_to_text(forest, fx.kg));
  }

  SUBCASE("2-node KG query surfaces its only edge") {
    KnowledgeGraph small;
    small.merge_triplet(Triplet{"ENGINE QUIT", RelationType::kHasCause, "CARBURETOR ICE"});
    const VectorIndex idx = build_node_index(small, fx.provider);
    const UndirectedMergedGraph ug = to_undirected(full_subgraph(small));
    CommunityHierarchy h = detect_communities(ug, 1.0, 0);
    summarize_hierarchy(h, ug, small, 400, 600);
    const AnswerRecord r =
        answer_kg("q4", "engine quit", small, idx, h, fx.provider, fx.cfg, llm);
    CHECK(r.context.find("ENGINE QUIT -[HAS CAUSE (w=1)]- CARBURETOR ICE") !=
          std::string::npos);
  }

  SUBCASE("all-isolated seeds degrade to community summaries only") {
    KnowledgeGraph isolated;
    isolated.intern_node("ALPHA COMPONENT");
    isolated.intern_node("BETA COMPONENT");
    isolated.intern_node("GAMMA COMPONENT");
    const VectorIndex idx = build_node_index(isolated, fx.provider);
    const UndirectedMergedGraph ug = to_undirected(full_subgraph(isolated));
    CommunityHierarchy h = detect_communities(ug, 1.0, 0);
    summarize_hierarchy(h, ug, isolated, 400, 600);
    const AnswerRecord r =
        answer_kg("q5", "alpha component", isolated, idx, h, fx.provider, fx.cfg, llm);
    // No edges anywhere: traversal text is empty, summaries carry the context.
    CHECK(r.audit["traversal_text"].get<std::string>().empty());
    CHECK(r.context.find("ALPHA COMPONENT") != std::string::npos);
    CHECK(r.context.find("---") != std::string::npos);
  }

  SUBCASE("empty indexes are errors") {
    VectorIndex empty;
    CHECK_THROWS_AS(answer_text_chunk("q", "x", fx.chunks, empty, fx.provider, fx.cfg, llm),
                    ValidationError);
    CHECK_THROWS_AS(
        answer_kg("q", "x", fx.kg, empty, fx.hierarchy, fx.provider, fx.cfg, llm),
        ValidationError);
  }
}

TEST_CASE("replayed answers are byte-identical across runs") {
  PipelineFixture fx;
  test::TempDir tmp("replay");
  stub::StubLlmServer server;
  const std::string question = "WHAT CAUSED ENGINE QUIT?";

  nlohmann::json first;
  {
    TranscriptStore store(tmp.file("t.jsonl"));
    ChatClient llm(server.chat_url(), ChatMode::kRecord, &store);
    first = answer_kg("q", question, fx.kg, fx.node_index, fx.hierarchy, fx.provider, fx.cfg,
                      llm)
                .to_json();
  }
  net::forbid_network(true);
  for (int run = 0; run < 2; ++run) {
    TranscriptStore store(tmp.file("t.jsonl"));
    ChatClient llm(server.chat_url(), ChatMode::kReplay, &store);
    const nlohmann::json again = answer_kg("q", question, fx.kg, fx.node_index, fx.hierarchy,
                                           fx.provider, fx.cfg, llm)
                                     .to_json();
    CHECK(again.dump() == first.dump());
  }
  net::forbid_network(false);
}

TEST_CASE("remote embedding provider speaks the wire format") {
  stub::StubLlmServer server;
  RemoteEmbeddingProvider remote(server.embed_url(), "stub-embed");
  const auto v = remote.embed("water in the fuel system");
  CHECK(v.size() == 256);
  // The stub backs /v1/embeddings with the same hashed provider.
  HashedNgramProvider local(256);
  CHECK(cosine(v, local.embed("water in the fuel system")) ==
        doctest::Approx(1.0).epsilon(1e-12));

  net::forbid_network(true);
  CHECK_THROWS_AS(remote.embed("anything"), TransportError);
  net::forbid_network(false);
}

TEST_CASE("config precedence, validation, and env overrides") {
  test::TempDir tmp("cfg");
  SUBCASE("round trip and unknown keys") {
    RetrievalConfig cfg;
    cfg.k_seeds = 7;
    write_file(tmp.file("c.json"), cfg.to_json().dump());
    CHECK(RetrievalConfig::load(tmp.file("c.json")).k_seeds == 7);
    write_file(tmp.file("bad.json"), R"({"no_such_key": 1})");
    CHECK_THROWS_AS(RetrievalConfig::load(tmp.file("bad.json")), ValidationError);
  }
  SUBCASE("invalid values are rejected") {
    RetrievalConfig cfg;
    cfg.chunk_overlap = cfg.chunk_size;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = RetrievalConfig{};
    cfg.k_seeds = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
  }
  SUBCASE("env vars override endpoints") {
    RetrievalConfig cfg;
    setenv("KEO_CHAT_URL", "http://example:1/chat", 1);
    setenv("KEO_EMBED_URL", "http://example:2/embed", 1);
    cfg.apply_env();
    CHECK(cfg.chat_url == "http://example:1/chat");
    CHECK(cfg.embed_url == "http://example:2/embed");
    unsetenv("KEO_CHAT_URL");
    unsetenv("KEO_EMBED_URL");
  }
}
