#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "keo/cli.hpp"
#include "keo/errors.hpp"

namespace {

void add_common(CLI::App* cmd, keo::cli::CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "flat key-value JSON config file");
  cmd->add_option("--mode", opts.mode, "chat mode: live, record, or replay")
      ->check(CLI::IsMember({"live", "record", "replay"}));
  cmd->add_option("--transcripts", opts.transcripts, "transcript store (JSONL)");
  cmd->add_option("--seed", opts.seed, "RNG seed for every random step");
  cmd->add_option("--jobs", opts.jobs, "max concurrent LLM calls");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"keo - knowledge-graph-augmented retrieval engine"};
  app.require_subcommand(1);

  // make-fixture
  std::string fx_out = "fixture";
  std::size_t fx_records = 100, fx_pairs = 10;
  std::uint64_t fx_seed = 0;
  auto* fx = app.add_subcommand("make-fixture", "write a synthetic corpus and problem-action pairs");
  fx->add_option("--out", fx_out, "output directory");
  fx->add_option("--records", fx_records, "number of corpus records");
  fx->add_option("--pairs", fx_pairs, "number of problem-action pairs");
  fx->add_option("--seed", fx_seed, "RNG seed");

  // stub-llm
  int stub_port = 8089;
  auto* stub = app.add_subcommand("stub-llm", "serve a deterministic local chat/embedding endpoint");
  stub->add_option("--port", stub_port, "port to bind on 127.0.0.1");

  // build-kg
  std::string bk_corpus, bk_out = "kg";
  std::vector<std::size_t> bk_batches;
  keo::cli::CommonOpts bk_opts;
  auto* bk = app.add_subcommand("build-kg", "extract triplets per record and write cumulative KG files");
  bk->add_option("--corpus", bk_corpus, "corpus JSONL")->required();
  bk->add_option("--out", bk_out, "output directory");
  bk->add_option("--batches", bk_batches, "cumulative batch sizes (default 100..500 step 100)");
  add_common(bk, bk_opts);

  // index
  std::string ix_kg, ix_corpus, ix_out = "index";
  keo::cli::CommonOpts ix_opts;
  auto* ix = app.add_subcommand("index", "build node and chunk embedding indexes");
  ix->add_option("--kg", ix_kg, "KG file")->required();
  ix->add_option("--corpus", ix_corpus, "corpus JSONL")->required();
  ix->add_option("--out", ix_out, "output directory");
  add_common(ix, ix_opts);

  // ask
  std::string ask_question, ask_method = "kg", ask_kg, ask_index, ask_out = "answers";
  keo::cli::CommonOpts ask_opts;
  auto* ask = app.add_subcommand("ask", "answer a single question");
  ask->add_option("--question", ask_question, "question text")->required();
  ask->add_option("--method", ask_method, "vn, tc, or kg")
      ->check(CLI::IsMember({"vn", "tc", "kg"}));
  ask->add_option("--kg", ask_kg, "KG file (method kg)");
  ask->add_option("--index", ask_index, "index directory (methods tc and kg)");
  ask->add_option("--out", ask_out, "output directory");
  add_common(ask, ask_opts);

  // gen-benchmark
  std::string gb_corpus, gb_pairs, gb_out = "benchmark", gb_categories;
  std::size_t gb_nkg = 100, gb_gsm = 9, gb_k2a = 10;
  keo::cli::CommonOpts gb_opts;
  auto* gb = app.add_subcommand("gen-benchmark", "split the corpus and generate benchmark questions");
  gb->add_option("--corpus", gb_corpus, "corpus JSONL")->required();
  gb->add_option("--pairs", gb_pairs, "problem-action JSONL")->required();
  gb->add_option("--out", gb_out, "output directory");
  gb->add_option("--n-kg", gb_nkg, "records reserved for KG construction");
  gb->add_option("--gsm", gb_gsm, "global sensemaking questions to generate");
  gb->add_option("--k2a", gb_k2a, "knowledge-to-action questions to template");
  gb->add_option("--categories", gb_categories, "GSM category data file (JSON)");
  add_common(gb, gb_opts);

  // run-benchmark
  std::string rb_bench, rb_corpus, rb_kg, rb_index, rb_out = "run";
  std::vector<std::string> rb_methods = {"vn", "tc", "kg"};
  keo::cli::CommonOpts rb_opts;
  auto* rb = app.add_subcommand("run-benchmark", "answer every benchmark item with each method");
  rb->add_option("--benchmark", rb_bench, "benchmark JSON")->required();
  rb->add_option("--corpus", rb_corpus, "retrievable corpus JSONL");
  rb->add_option("--kg", rb_kg, "KG file");
  rb->add_option("--index", rb_index, "index directory");
  rb->add_option("--methods", rb_methods, "subset of vn,tc,kg");
  rb->add_option("--out", rb_out, "output directory");
  add_common(rb, rb_opts);

  // judge
  std::string jd_bench, jd_answers, jd_out = "eval";
  keo::cli::CommonOpts jd_opts;
  auto* jd = app.add_subcommand("judge", "score answers absolutely and pairwise");
  jd->add_option("--benchmark", jd_bench, "benchmark JSON")->required();
  jd->add_option("--answers", jd_answers, "answers directory")->required();
  jd->add_option("--out", jd_out, "output directory");
  add_common(jd, jd_opts);

  // report
  std::string rp_bench, rp_answers, rp_judgements, rp_out = "report";
  auto* rp = app.add_subcommand("report", "aggregate judgements into JSON and text reports");
  rp->add_option("--benchmark", rp_bench, "benchmark JSON")->required();
  rp->add_option("--answers", rp_answers, "answers directory")->required();
  rp->add_option("--judgements", rp_judgements, "judgements directory")->required();
  rp->add_option("--out", rp_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? keo::cli::kExitOk : keo::cli::kExitUsage;
  }

  try {
    if (fx->parsed()) return keo::cli::cmd_make_fixture(fx_out, fx_records, fx_pairs, fx_seed);
    if (stub->parsed()) return keo::cli::cmd_stub_llm(stub_port);
    if (bk->parsed()) return keo::cli::cmd_build_kg(bk_corpus, bk_out, bk_batches, bk_opts);
    if (ix->parsed()) return keo::cli::cmd_index(ix_kg, ix_corpus, ix_out, ix_opts);
    if (ask->parsed()) {
      return keo::cli::cmd_ask(ask_question, ask_method, ask_kg, ask_index, ask_out, ask_opts);
    }
    if (gb->parsed()) {
      return keo::cli::cmd_gen_benchmark(gb_corpus, gb_pairs, gb_out, gb_nkg, gb_gsm, gb_k2a,
                                         gb_categories, gb_opts);
    }
    if (rb->parsed()) {
      return keo::cli::cmd_run_benchmark(rb_bench, rb_corpus, rb_kg, rb_index, rb_methods,
                                         rb_out, rb_opts);
    }
    if (jd->parsed()) return keo::cli::cmd_judge(jd_bench, jd_answers, jd_out, jd_opts);
    if (rp->parsed()) return keo::cli::cmd_report(rp_bench, rp_answers, rp_judgements, rp_out);
  } catch (const keo::TransportError& e) {
    std::cerr << "transport error: " << e.what() << "\n";
    return keo::cli::kExitTransport;
  } catch (const keo::ReplayMissError& e) {
    std::cerr << "replay miss: " << e.what() << "\n";
    return keo::cli::kExitTransport;
  } catch (const keo::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return keo::cli::kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return keo::cli::kExitInput;
  }
  return keo::cli::kExitUsage;
}
