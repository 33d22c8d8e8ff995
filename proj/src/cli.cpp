#include "keo/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "keo/benchmark.hpp"
#include "keo/chat.hpp"
#include "keo/community.hpp"
#include "keo/corpus.hpp"
#include "keo/errors.hpp"
#include "keo/eval.hpp"
#include "keo/fixture.hpp"
#include "keo/graph_context.hpp"
#include "keo/index.hpp"
#include "keo/kg.hpp"
#include "keo/manifest.hpp"
#include "keo/rag.hpp"
#include "keo/rouge.hpp"
#include "keo/stub_llm.hpp"
#include "keo/triplets.hpp"
#include "keo/util.hpp"

namespace keo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw ValidationError("missing required path for " + what);
  if (!fs::exists(path)) throw ValidationError("missing artifact for " + what + ": " + path);
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw ValidationError("output directory not given");
  fs::create_directories(dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

struct ChatSetup {
  std::unique_ptr<TranscriptStore> store;
  std::unique_ptr<ChatClient> client;
  ChatMode mode = ChatMode::kLive;
};

ChatSetup make_chat(const RetrievalConfig& cfg, const CommonOpts& opts) {
  ChatSetup setup;
  setup.mode = chat_mode_from_string(opts.mode);
  if (setup.mode != ChatMode::kLive) {
    if (opts.transcripts.empty()) {
      throw ValidationError("--transcripts is required in record/replay mode");
    }
    setup.store = std::make_unique<TranscriptStore>(opts.transcripts);
  }
  setup.client = std::make_unique<ChatClient>(cfg.chat_url, setup.mode, setup.store.get());
  return setup;
}

SummarizeFn make_summarizer(const RetrievalConfig& cfg, ChatClient& chat) {
  if (cfg.summarizer != "llm") return nullptr;
  return [&chat, &cfg](const std::string& material, std::size_t budget) {
    const std::string prompt =
        "Summarize the following maintenance knowledge in at most " + std::to_string(budget) +
        " characters, keeping component names and causal links:\n" + material;
    return chat.complete({{"user", prompt}}, {cfg.chat_model, cfg.temperature});
  };
}

// Index-time work for the KG method, done once per run.
struct KgRuntime {
  KnowledgeGraph kg;
  VectorIndex node_index;
  CommunityHierarchy hierarchy;
};

KgRuntime load_kg_runtime(const std::string& kg_path, const std::string& index_dir,
                          const RetrievalConfig& cfg, ChatClient& chat) {
  require_file(kg_path, "method kg (--kg)");
  require_file(join_path(index_dir, "node_index.json"), "method kg (node index)");
  KgRuntime rt;
  rt.kg = load_kg(kg_path);
  rt.node_index = VectorIndex::load(join_path(index_dir, "node_index.json"));
  const UndirectedMergedGraph ug = to_undirected(full_subgraph(rt.kg));
  if (!ug.node_ids.empty()) {
    rt.hierarchy = detect_communities(ug, cfg.leiden_resolution, cfg.rng_seed);
    summarize_hierarchy(rt.hierarchy, ug, rt.kg, cfg.leaf_summary_budget,
                        cfg.parent_summary_budget, make_summarizer(cfg, chat));
  }
  return rt;
}

void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const std::size_t count = std::min(jobs, n);
  workers.reserve(count);
  for (std::size_t w = 0; w < count; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : workers) t.join();
}

std::string answer_file(const std::string& dir, const std::string& qid, const std::string& tag) {
  return join_path(dir, qid + "." + tag + ".json");
}

}  // namespace

RetrievalConfig resolve_config(const CommonOpts& opts) {
  RetrievalConfig cfg;
  if (!opts.config_path.empty()) cfg = RetrievalConfig::load(opts.config_path);
  if (opts.seed) cfg.rng_seed = *opts.seed;
  if (opts.jobs) cfg.jobs = *opts.jobs;
  cfg.apply_env();
  cfg.validate();
  return cfg;
}

int cmd_make_fixture(const std::string& out_dir, std::size_t records, std::size_t pairs,
                     std::uint64_t seed) {
  ensure_dir(out_dir);
  const auto corpus = make_fixture_corpus(records, seed);
  const auto pa = make_fixture_pairs(pairs, seed + 1);
  save_corpus_jsonl(corpus, join_path(out_dir, "corpus.jsonl"));
  {
    std::ostringstream out;
    for (const auto& p : pa) {
      out << json{{"problem", p.problem}, {"action", p.action}}.dump() << "\n";
    }
    write_file(join_path(out_dir, "pairs.jsonl"), out.str());
  }
  std::cout << "wrote " << corpus.size() << " records and " << pa.size() << " problem-action "
            << "pairs to " << out_dir << "\n";
  return kExitOk;
}

int cmd_stub_llm(int port) {
  stub::StubLlmServer server(port);
  std::cout << "stub llm listening on 127.0.0.1:" << server.port() << "\n"
            << "chat:  " << server.chat_url() << "\n"
            << "embed: " << server.embed_url() << "\n";
  server.serve_forever();
  return kExitOk;
}

int cmd_build_kg(const std::string& corpus_path, const std::string& out_dir,
                 const std::vector<std::size_t>& batch_sizes, const CommonOpts& opts) {
  const RetrievalConfig cfg = resolve_config(opts);
  require_file(corpus_path, "--corpus");
  ensure_dir(out_dir);
  const auto records = load_corpus_jsonl(corpus_path);
  if (records.empty()) throw ValidationError("corpus is empty: " + corpus_path);

  std::vector<std::size_t> batches = batch_sizes;
  if (batches.empty()) {
    for (std::size_t b = 100; b <= records.size() && b <= 500; b += 100) batches.push_back(b);
    if (batches.empty()) batches.push_back(records.size());  // small corpus: one full batch
  }
  std::sort(batches.begin(), batches.end());
  batches.erase(std::unique(batches.begin(), batches.end()), batches.end());
  if (batches.empty()) throw ValidationError("no batch sizes to build");
  if (batches.back() > records.size()) {
    throw ValidationError("batch size " + std::to_string(batches.back()) +
                          " exceeds corpus size " + std::to_string(records.size()));
  }

  ChatSetup chat = make_chat(cfg, opts);
  RunManifest manifest;
  manifest.command = "build-kg";
  manifest.base_dir = out_dir;
  manifest.mode = opts.mode;
  manifest.config = cfg.to_json();
  manifest.add_input(corpus_path);

  KnowledgeGraph graph;
  std::size_t done = 0;
  std::size_t rejected_total = 0;
  json batch_notes = json::array();
  for (const std::size_t target : batches) {
    // Weights accumulate across batches; each record is ingested once.
    try {
      for (; done < target; ++done) {
        const Record& rec = records[done];
        const std::string prompt =
            render_kg_prompt(rec.text, graph.surfaces_by_recency(), cfg.node_hint_budget);
        const std::string response =
            chat.client->complete({{"user", prompt}}, {cfg.chat_model, cfg.temperature});
        const ParsedTriplets parsed = parse_triplets(response, ParseMode::kLoose);
        for (const auto& t : parsed.accepted) graph.merge_triplet(t, rec.id);
        rejected_total += parsed.rejected.size();
      }
    } catch (const Error&) {
      // Partial batch state is discarded; files for finished batches stay.
      std::cerr << "build-kg: batch " << target << " failed after " << done
                << " records; prior batches retained\n";
      throw;
    }
    graph.set_record_count(target);
    const std::string path = join_path(out_dir, "kg_" + std::to_string(target) + ".kg");
    save_kg(graph, path);
    manifest.add_artifact(path);
    batch_notes.push_back(json{{"records", target},
                               {"nodes", graph.node_count()},
                               {"edges", graph.edge_count()},
                               {"total_weight", graph.total_weight()}});
    std::cout << "kg(" << target << "): " << graph.node_count() << " nodes, "
              << graph.edge_count() << " edges, total weight " << graph.total_weight() << "\n";
  }
  manifest.notes = json{{"batches", std::move(batch_notes)}, {"rejected_lines", rejected_total}};
  if (chat.store) manifest.set_transcripts(opts.transcripts);
  manifest.save(join_path(out_dir, "manifest.json"));
  return kExitOk;
}

int cmd_index(const std::string& kg_path, const std::string& corpus_path,
              const std::string& out_dir, const CommonOpts& opts) {
  const RetrievalConfig cfg = resolve_config(opts);
  require_file(kg_path, "--kg");
  require_file(corpus_path, "--corpus");
  ensure_dir(out_dir);

  const KnowledgeGraph kg = load_kg(kg_path);
  const auto records = load_corpus_jsonl(corpus_path);
  const auto chunks = chunk_corpus(records, cfg.chunk_size, cfg.chunk_overlap);
  const auto provider =
      make_provider(cfg.embed_provider, cfg.embed_url, cfg.embed_model, cfg.embed_dim);

  RunManifest manifest;
  manifest.command = "index";
  manifest.base_dir = out_dir;
  manifest.mode = opts.mode;  // no chat calls, but replay runs must pin timestamps
  manifest.config = cfg.to_json();
  manifest.add_input(kg_path);
  manifest.add_input(corpus_path);

  const VectorIndex node_index = build_node_index(kg, *provider);
  node_index.save(join_path(out_dir, "node_index.json"));
  const VectorIndex chunk_index = build_chunk_index(chunks, *provider);
  chunk_index.save(join_path(out_dir, "chunk_index.json"));
  save_chunks_jsonl(chunks, join_path(out_dir, "chunks.jsonl"));

  manifest.add_artifact(join_path(out_dir, "node_index.json"));
  manifest.add_artifact(join_path(out_dir, "chunk_index.json"));
  manifest.add_artifact(join_path(out_dir, "chunks.jsonl"));
  manifest.notes = json{{"nodes", node_index.size()}, {"chunks", chunk_index.size()}};
  manifest.save(join_path(out_dir, "manifest.json"));
  std::cout << "indexed " << node_index.size() << " nodes and " << chunk_index.size()
            << " chunks\n";
  return kExitOk;
}

int cmd_ask(const std::string& question, const std::string& method, const std::string& kg_path,
            const std::string& index_dir, const std::string& out_dir, const CommonOpts& opts) {
  if (question.empty()) throw ValidationError("--question must not be empty");
  const RetrievalConfig cfg = resolve_config(opts);
  const Method m = method_from_string(method);
  ensure_dir(out_dir);

  ChatSetup chat = make_chat(cfg, opts);
  const auto provider =
      make_provider(cfg.embed_provider, cfg.embed_url, cfg.embed_model, cfg.embed_dim);
  const std::string qid = "q-" + to_hex(fnv1a64(question)).substr(0, 12);

  AnswerRecord record;
  if (m == Method::kVanilla) {
    record = answer_vanilla(qid, question, *chat.client, cfg);
  } else if (m == Method::kTextChunk) {
    require_file(join_path(index_dir, "chunk_index.json"), "method tc (chunk index)");
    require_file(join_path(index_dir, "chunks.jsonl"), "method tc (chunks)");
    const auto chunks = load_chunks_jsonl(join_path(index_dir, "chunks.jsonl"));
    const auto chunk_index = VectorIndex::load(join_path(index_dir, "chunk_index.json"));
    record = answer_text_chunk(qid, question, chunks, chunk_index, *provider, cfg, *chat.client);
  } else {
    const KgRuntime rt = load_kg_runtime(kg_path, index_dir, cfg, *chat.client);
    record = answer_kg(qid, question, rt.kg, rt.node_index, rt.hierarchy, *provider, cfg,
                       *chat.client);
  }

  const std::string path = answer_file(out_dir, qid, method_tag(m));
  write_file(path, record.to_json().dump(2) + "\n");

  RunManifest manifest;
  manifest.command = "ask";
  manifest.base_dir = out_dir;
  manifest.mode = opts.mode;
  manifest.config = cfg.to_json();
  if (!kg_path.empty() && fs::exists(kg_path)) manifest.add_input(kg_path);
  manifest.add_artifact(path);
  if (chat.store) manifest.set_transcripts(opts.transcripts);
  manifest.save(join_path(out_dir, qid + ".manifest.json"));

  std::cout << record.answer << "\n";
  return kExitOk;
}

int cmd_gen_benchmark(const std::string& corpus_path, const std::string& pairs_path,
                      const std::string& out_dir, std::size_t n_kg, std::size_t gsm_count,
                      std::size_t k2a_count, const std::string& categories_path,
                      const CommonOpts& opts) {
  const RetrievalConfig cfg = resolve_config(opts);
  require_file(corpus_path, "--corpus");
  require_file(pairs_path, "--pairs");
  ensure_dir(out_dir);

  const auto records = load_corpus_jsonl(corpus_path);
  auto [kg_records, insight_records] = split_corpus(records, n_kg, cfg.rng_seed);
  const InsightSummary insights = extract_insights(insight_records);

  std::vector<GsmCategory> categories;
  if (!categories_path.empty()) {
    categories = load_gsm_categories(categories_path);
  } else {
    categories.push_back(GsmCategory{
        "failure mode analysis",
        "Questions about recurring component failure modes and their operational impact.",
        "\"Which failure modes...\", \"What distinguishes...\"", ""});
  }

  ChatSetup chat = make_chat(cfg, opts);
  Benchmark bench;
  json flags = json::array();

  if (gsm_count > 0) {
    const std::size_t n_context = gsm_count / 3;
    const std::size_t n_category = gsm_count / 3;
    const std::size_t n_comprehensive = gsm_count - n_context - n_category;

    auto run_batch = [&](QaType subtype, std::size_t n, const std::string& prompt,
                         const std::string& prefix) {
      if (n == 0) return;
      GsmBatch batch = gen_gsm_questions(prompt, subtype, n, *chat.client, cfg, prefix);
      if (batch.flag != BatchFlag::kOk) {
        flags.push_back(json{{"batch", prefix},
                             {"flag", batch.flag == BatchFlag::kShort ? "SHORT" : "LONG"},
                             {"requested", batch.requested},
                             {"received", batch.items.size()}});
      }
      for (auto& item : batch.items) bench.items.push_back(std::move(item));
    };

    run_batch(QaType::kGsmComprehensive, n_comprehensive,
              render_gsm_comprehensive_prompt(n_comprehensive, insights.digest), "gsm-comp");
    if (n_context > 0) {
      std::string samples;
      for (std::size_t i = 0; i < std::min<std::size_t>(5, insight_records.size()); ++i) {
        if (i) samples += " | ";
        samples += insight_records[i].text;
      }
      run_batch(QaType::kGsmContext, n_context,
                render_gsm_context_prompt(n_context, "recurring powerplant failure", samples),
                "gsm-ctx");
    }
    if (n_category > 0) {
      run_batch(QaType::kGsmCategory, n_category,
                render_gsm_category_prompt(n_category, categories[0]), "gsm-cat");
    }
  }

  auto pairs = load_problem_actions_jsonl(pairs_path);
  if (pairs.size() > k2a_count) pairs.resize(k2a_count);
  for (auto& item : gen_k2a_questions(pairs)) bench.items.push_back(std::move(item));

  // The KG split is the retrievable corpus; gold answers must not leak into it.
  const auto leaks = find_gold_leaks(kg_records, bench.items);
  if (!leaks.empty()) {
    throw ValidationError("gold answer leakage: record " + leaks[0].first +
                          " contains the gold answer of item " + leaks[0].second + " (" +
                          std::to_string(leaks.size()) + " leak(s) total)");
  }

  const std::string bench_path = join_path(out_dir, "benchmark.json");
  bench.save(bench_path);
  save_corpus_jsonl(kg_records, join_path(out_dir, "kg_corpus.jsonl"));
  save_corpus_jsonl(insight_records, join_path(out_dir, "insight_corpus.jsonl"));
  write_file(join_path(out_dir, "insights.json"), insights.to_json().dump(2) + "\n");

  RunManifest manifest;
  manifest.command = "gen-benchmark";
  manifest.base_dir = out_dir;
  manifest.mode = opts.mode;
  manifest.config = cfg.to_json();
  manifest.add_input(corpus_path);
  manifest.add_input(pairs_path);
  manifest.add_artifact(bench_path);
  manifest.add_artifact(join_path(out_dir, "kg_corpus.jsonl"));
  manifest.add_artifact(join_path(out_dir, "insight_corpus.jsonl"));
  manifest.notes = json{{"gsm", bench.gsm_count()},
                        {"k2a", bench.k2a_count()},
                        {"flagged_batches", std::move(flags)}};
  if (chat.store) manifest.set_transcripts(opts.transcripts);
  manifest.save(join_path(out_dir, "manifest.json"));

  std::cout << "benchmark: " << bench.gsm_count() << " GSM + " << bench.k2a_count()
            << " K2A items -> " << bench_path << "\n";
  return kExitOk;
}

int cmd_run_benchmark(const std::string& benchmark_path, const std::string& corpus_path,
                      const std::string& kg_path, const std::string& index_dir,
                      const std::vector<std::string>& methods, const std::string& out_dir,
                      const CommonOpts& opts) {
  const RetrievalConfig cfg = resolve_config(opts);
  require_file(benchmark_path, "--benchmark");
  ensure_dir(out_dir);
  const std::string answers_dir = join_path(out_dir, "answers");
  ensure_dir(answers_dir);

  const Benchmark bench = Benchmark::load(benchmark_path);

  std::vector<Method> wanted;
  for (const auto& m : methods) wanted.push_back(method_from_string(m));
  if (wanted.empty()) throw ValidationError("no methods requested");

  const bool needs_tc =
      std::count(wanted.begin(), wanted.end(), Method::kTextChunk) > 0;
  const bool needs_kg =
      std::count(wanted.begin(), wanted.end(), Method::kKnowledgeGraph) > 0;

  // Ingest-time leakage guard over the retrievable corpus.
  if ((needs_tc || needs_kg)) {
    require_file(corpus_path, "--corpus");
    const auto corpus = load_corpus_jsonl(corpus_path);
    const auto leaks = find_gold_leaks(corpus, bench.items);
    if (!leaks.empty()) {
      throw ValidationError("retrievable corpus is contaminated: record " + leaks[0].first +
                            " contains the gold answer of item " + leaks[0].second);
    }
  }

  ChatSetup chat = make_chat(cfg, opts);
  const auto provider =
      make_provider(cfg.embed_provider, cfg.embed_url, cfg.embed_model, cfg.embed_dim);

  std::vector<Chunk> chunks;
  VectorIndex chunk_index;
  if (needs_tc) {
    require_file(join_path(index_dir, "chunk_index.json"), "method tc (chunk index)");
    require_file(join_path(index_dir, "chunks.jsonl"), "method tc (chunks)");
    chunks = load_chunks_jsonl(join_path(index_dir, "chunks.jsonl"));
    chunk_index = VectorIndex::load(join_path(index_dir, "chunk_index.json"));
  }
  KgRuntime kg_rt;
  if (needs_kg) kg_rt = load_kg_runtime(kg_path, index_dir, cfg, *chat.client);

  struct Task {
    const QaItem* item;
    Method method;
  };
  std::vector<Task> tasks;
  for (const auto& item : bench.items) {
    for (Method m : wanted) tasks.push_back(Task{&item, m});
  }

  std::mutex mu;
  json failures = json::array();
  std::size_t produced = 0;
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
    const Task& task = tasks[i];
    try {
      AnswerRecord rec;
      switch (task.method) {
        case Method::kVanilla:
          rec = answer_vanilla(task.item->id, task.item->question, *chat.client, cfg);
          break;
        case Method::kTextChunk:
          rec = answer_text_chunk(task.item->id, task.item->question, chunks, chunk_index,
                                  *provider, cfg, *chat.client);
          break;
        case Method::kKnowledgeGraph:
          rec = answer_kg(task.item->id, task.item->question, kg_rt.kg, kg_rt.node_index,
                          kg_rt.hierarchy, *provider, cfg, *chat.client);
          break;
      }
      const std::string path = answer_file(answers_dir, rec.question_id, method_tag(rec.method));
      std::lock_guard<std::mutex> lock(mu);
      write_file(path, rec.to_json().dump(2) + "\n");
      ++produced;
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mu);
      failures.push_back(json{{"question_id", task.item->id},
                              {"method", method_tag(task.method)},
                              {"error", e.what()}});
    }
  });

  RunManifest manifest;
  manifest.command = "run-benchmark";
  manifest.base_dir = out_dir;
  manifest.mode = opts.mode;
  manifest.config = cfg.to_json();
  manifest.add_input(benchmark_path);
  if (!corpus_path.empty() && fs::exists(corpus_path)) manifest.add_input(corpus_path);
  if (!kg_path.empty() && fs::exists(kg_path)) manifest.add_input(kg_path);
  for (const auto& entry : fs::directory_iterator(answers_dir)) {
    if (entry.is_regular_file()) manifest.add_artifact(entry.path().string());
  }
  manifest.notes = json{{"answers", produced}, {"failures", failures}};
  if (chat.store) manifest.set_transcripts(opts.transcripts);
  manifest.save(join_path(out_dir, "manifest.json"));

  std::cout << "answered " << produced << "/" << tasks.size() << " (item, method) pairs\n";
  if (!failures.empty()) {
    std::cerr << failures.size() << " failures:\n";
    for (const auto& f : failures) {
      std::cerr << "  " << f["question_id"].get<std::string>() << " ["
                << f["method"].get<std::string>() << "]: " << f["error"].get<std::string>()
                << "\n";
    }
  }
  return kExitOk;
}

int cmd_judge(const std::string& benchmark_path, const std::string& answers_dir,
              const std::string& out_dir, const CommonOpts& opts) {
  const RetrievalConfig cfg = resolve_config(opts);
  require_file(benchmark_path, "--benchmark");
  if (!fs::is_directory(answers_dir)) {
    throw ValidationError("missing answers directory: " + answers_dir);
  }
  ensure_dir(out_dir);
  const std::string judgements_dir = join_path(out_dir, "judgements");
  ensure_dir(judgements_dir);

  const Benchmark bench = Benchmark::load(benchmark_path);
  ChatSetup chat = make_chat(cfg, opts);

  static const std::array<const char*, 3> kTags = {"TC", "VN", "KG"};
  struct Loaded {
    const QaItem* item;
    std::map<std::string, AnswerRecord> answers;  // tag -> record
  };
  std::vector<Loaded> loaded;
  for (const auto& item : bench.items) {
    Loaded l{&item, {}};
    for (const char* tag : kTags) {
      const std::string path = answer_file(answers_dir, item.id, tag);
      if (!fs::exists(path)) continue;
      l.answers[tag] = AnswerRecord::from_json(json::parse(read_file(path)));
    }
    if (!l.answers.empty()) loaded.push_back(std::move(l));
  }

  // Absolute scoring tasks followed by pairwise tasks.
  struct JudgeTask {
    const Loaded* entry;
    std::string tag_a;
    std::string tag_b;  // empty -> absolute
  };
  std::vector<JudgeTask> tasks;
  for (const auto& l : loaded) {
    for (const auto& [tag, rec] : l.answers) tasks.push_back(JudgeTask{&l, tag, ""});
    for (std::size_t i = 0; i < kTags.size(); ++i) {
      for (std::size_t j = i + 1; j < kTags.size(); ++j) {
        if (l.answers.count(kTags[i]) && l.answers.count(kTags[j])) {
          tasks.push_back(JudgeTask{&l, kTags[i], kTags[j]});
        }
      }
    }
  }

  std::mutex mu;
  json failures = json::array();
  std::vector<PairwiseResult> pairwise;
  std::size_t absolute_count = 0;
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t i) {
    const JudgeTask& task = tasks[i];
    const QaItem& item = *task.entry->item;
    try {
      if (task.tag_b.empty()) {
        const AnswerRecord& rec = task.entry->answers.at(task.tag_a);
        const std::string prompt = render_judge_prompt(item, rec);
        const std::vector<ChatMessage> messages{{"user", prompt}};
        const std::string out =
            chat.client->complete(messages, {cfg.chat_model, cfg.temperature});
        JudgeReport report = parse_judge_output(out, item.qtype);
        report.question_id = item.id;
        report.method = task.tag_a;
        const std::string path = answer_file(judgements_dir, item.id, task.tag_a);
        std::lock_guard<std::mutex> lock(mu);
        write_file(path, report.to_json().dump(2) + "\n");
        ++absolute_count;
      } else {
        const PairwiseResult result =
            judge_pairwise(item, task.entry->answers.at(task.tag_a),
                           task.entry->answers.at(task.tag_b), *chat.client, cfg, cfg.rng_seed);
        std::lock_guard<std::mutex> lock(mu);
        pairwise.push_back(result);
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mu);
      failures.push_back(json{{"question_id", item.id},
                              {"pair", task.tag_a + (task.tag_b.empty() ? "" : "/" + task.tag_b)},
                              {"error", e.what()}});
    }
  });

  // Deterministic pairwise file order regardless of worker interleaving.
  std::sort(pairwise.begin(), pairwise.end(),
            [](const PairwiseResult& a, const PairwiseResult& b) {
              return std::tie(a.question_id, a.method_a, a.method_b) <
                     std::tie(b.question_id, b.method_a, b.method_b);
            });
  {
    std::ostringstream out;
    for (const auto& p : pairwise) out << p.to_json().dump() << "\n";
    write_file(join_path(out_dir, "pairwise.jsonl"), out.str());
  }

  RunManifest manifest;
  manifest.command = "judge";
  manifest.base_dir = out_dir;
  manifest.mode = opts.mode;
  manifest.config = cfg.to_json();
  manifest.add_input(benchmark_path);
  for (const auto& entry : fs::directory_iterator(judgements_dir)) {
    if (entry.is_regular_file()) manifest.add_artifact(entry.path().string());
  }
  manifest.add_artifact(join_path(out_dir, "pairwise.jsonl"));
  manifest.notes =
      json{{"absolute", absolute_count}, {"pairwise", pairwise.size()}, {"failures", failures}};
  if (chat.store) manifest.set_transcripts(opts.transcripts);
  manifest.save(join_path(out_dir, "manifest.json"));

  std::cout << "judged " << absolute_count << " answers absolutely, " << pairwise.size()
            << " pairwise comparisons\n";
  if (!failures.empty()) std::cerr << failures.size() << " judging failures\n";
  return kExitOk;
}

namespace {

struct Stats {
  std::vector<double> values;
  double mean() const {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }
  double stddev() const {
    if (values.size() < 2) return 0.0;
    const double m = mean();
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return std::sqrt(s / static_cast<double>(values.size()));
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace

int cmd_report(const std::string& benchmark_path, const std::string& answers_dir,
               const std::string& judgements_dir, const std::string& out_dir) {
  require_file(benchmark_path, "--benchmark");
  ensure_dir(out_dir);
  const Benchmark bench = Benchmark::load(benchmark_path);

  static const std::array<const char*, 3> kTags = {"TC", "VN", "KG"};

  // family ("GSM"/"K2A") -> method -> overall scores
  std::map<std::string, std::map<std::string, Stats>> overall;
  std::map<std::string, std::map<std::string, std::map<std::string, Stats>>> per_criterion;
  std::map<std::string, std::map<std::string, Stats>> rouge1, rougeL;

  for (const auto& item : bench.items) {
    const std::string family = is_gsm(item.qtype) ? "GSM" : "K2A";
    for (const char* tag : kTags) {
      const std::string jpath = answer_file(judgements_dir, item.id, tag);
      if (fs::exists(jpath)) {
        const JudgeReport report = JudgeReport::from_json(json::parse(read_file(jpath)));
        overall[family][tag].values.push_back(report.overall());
        for (const auto& s : report.scores) {
          per_criterion[family][tag][s.criterion].values.push_back(s.score);
        }
      }
      if (item.qtype == QaType::kK2a && item.gold_answer) {
        const std::string apath = answer_file(answers_dir, item.id, tag);
        if (fs::exists(apath)) {
          const AnswerRecord rec = AnswerRecord::from_json(json::parse(read_file(apath)));
          rouge1[family][tag].values.push_back(
              rouge_f1(rec.answer, *item.gold_answer, RougeVariant::kRouge1));
          rougeL[family][tag].values.push_back(
              rouge_f1(rec.answer, *item.gold_answer, RougeVariant::kRougeL));
        }
      }
    }
  }

  // Pairwise matrices per family; pairwise.jsonl sits next to judgements/.
  std::map<std::string, WinRateMatrix> matrices;
  std::map<std::string, std::vector<PairwiseResult>> by_family;
  {
    const std::string use_path =
        join_path(fs::path(judgements_dir).parent_path().string(), "pairwise.jsonl");
    if (fs::exists(use_path)) {
      std::istringstream in(read_file(use_path));
      std::string line;
      std::map<std::string, const QaItem*> items_by_id;
      for (const auto& item : bench.items) items_by_id[item.id] = &item;
      while (std::getline(in, line)) {
        if (is_blank(line)) continue;
        const PairwiseResult r = PairwiseResult::from_json(json::parse(line));
        auto it = items_by_id.find(r.question_id);
        if (it == items_by_id.end()) continue;
        by_family[is_gsm(it->second->qtype) ? "GSM" : "K2A"].push_back(r);
      }
      for (const auto& [family, results] : by_family) {
        matrices[family] = win_rate_matrix(results);
      }
    }
  }

  json report;
  std::ostringstream text;
  text << "== Absolute scores (overall, 1-5) ==\n";
  for (const auto& [family, methods] : overall) {
    for (const auto& [tag, stats] : methods) {
      report["absolute"][family][tag] = json{{"n", stats.values.size()},
                                             {"mean", stats.mean()},
                                             {"std", stats.stddev()}};
      text << family << " " << tag << ": " << fmt(stats.mean()) << " +/- "
           << fmt(stats.stddev()) << " (n=" << stats.values.size() << ")\n";
    }
  }
  for (const auto& [family, methods] : per_criterion) {
    for (const auto& [tag, crits] : methods) {
      for (const auto& [crit, stats] : crits) {
        report["criteria"][family][tag][crit] =
            json{{"mean", stats.mean()}, {"std", stats.stddev()}};
      }
    }
  }

  text << "\n== Pairwise win rates (row over column) ==\n";
  for (const auto& [family, matrix] : matrices) {
    report["win_rates"][family] = matrix.to_json();
    text << "[" << family << "] Overall dimension:\n";
    text << "      ";
    for (const char* col : kTags) text << col << "      ";
    text << "\n";
    for (const char* row : kTags) {
      text << row << "  ";
      for (const char* col : kTags) {
        if (std::string(row) == col) {
          text << "  -    ";
          continue;
        }
        const WinRateCell* cell = matrix.find("Overall", row, col);
        text << " " << (cell ? fmt(cell->win_rate()) : "  n/a ") << " ";
      }
      text << "\n";
    }
  }

  text << "\n== ROUGE F1 (K2A) ==\n";
  for (const auto& [family, methods] : rouge1) {
    for (const auto& [tag, stats] : methods) {
      const Stats& l = rougeL[family][tag];
      report["rouge"][tag] = json{{"rouge1_mean", stats.mean()},
                                  {"rouge1_std", stats.stddev()},
                                  {"rougeL_mean", l.mean()},
                                  {"rougeL_std", l.stddev()},
                                  {"n", stats.values.size()}};
      text << tag << ": ROUGE-1 " << fmt(stats.mean()) << " +/- " << fmt(stats.stddev())
           << ", ROUGE-L " << fmt(l.mean()) << " +/- " << fmt(l.stddev())
           << " (n=" << stats.values.size() << ")\n";
    }
  }

  write_file(join_path(out_dir, "report.json"), report.dump(2) + "\n");
  write_file(join_path(out_dir, "report.txt"), text.str());
  std::cout << text.str();
  return kExitOk;
}

}  // namespace keo::cli
