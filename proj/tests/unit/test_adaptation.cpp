#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "pathmine/adaptation.hpp"
#include "pathmine/errors.hpp"
#include "test_support.hpp"

using namespace pathmine;
using test_support::log_of;

namespace {

// five traces inserting x and five inserting y into the known a->b flow
EventLog two_pattern_batch() {
  std::vector<std::vector<std::string>> seqs;
  for (int i = 0; i < 5; ++i) seqs.push_back({"a", "x", "b"});
  for (int i = 0; i < 5; ++i) seqs.push_back({"a", "y", "b"});
  return log_of(std::move(seqs));
}

EventLog baseline_log() {
  std::vector<std::vector<std::string>> seqs(10, {"a", "b"});
  return log_of(std::move(seqs));
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name) {
    path = std::filesystem::temp_directory_path() / ("pathmine_test_" + name);
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("train_phase mines a single baseline model") {
  AdaptationConfig config;
  SUBCASE("inductive miner gives every training trace fitness 1") {
    const KnowledgeBase kb = train_phase(baseline_log(), config);
    REQUIRE(kb.size() == 1);
    CHECK(kb.provenance()[0].source == ModelProvenance::Source::BaselineTraining);
    const Aligner aligner(kb.models()[0]);
    for (const auto& trace : baseline_log().traces)
      CHECK(aligner.align(trace).fitness == 1.0);
  }
  SUBCASE("heuristics miner yields a net with reachable final marking") {
    config.miner = MinerKind::Heuristics;
    const KnowledgeBase kb = train_phase(baseline_log(), config);
    REQUIRE(kb.size() == 1);
    CHECK(min_model_cost(kb.models()[0]) >= 0.0);
  }
  SUBCASE("empty log rejected") {
    CHECK_THROWS_AS(train_phase(EventLog{}, config), EmptyLog);
  }
}

TEST_CASE("adapt_iteration leaves the kb alone when everything conforms") {
  AdaptationConfig config;
  KnowledgeBase kb = train_phase(baseline_log(), config);
  const AdaptationOutcome outcome = adapt_iteration(kb, baseline_log(), config);
  CHECK(kb.size() == 1);
  CHECK(outcome.new_models.empty());
  CHECK(outcome.conformant_traces.size() == 10);
  CHECK(outcome.nonconformant_traces.empty());
  CHECK(outcome.wall_time_ms > 0.0);
}

TEST_CASE("adapt_iteration mines one model per deviation pattern and stabilizes") {
  AdaptationConfig config;
  KnowledgeBase kb = train_phase(baseline_log(), config);

  const EventLog batch = two_pattern_batch();
  const AdaptationOutcome first = adapt_iteration(kb, batch, config);
  CHECK(first.conformant_traces.empty());  // fitness 0.8 < 0.9 for all
  CHECK(first.nonconformant_traces.size() == 10);
  CHECK(first.new_models.size() == 2);
  CHECK(kb.size() == 3);

  // the second pass over the same batch is fully conformant
  const AdaptationOutcome second = adapt_iteration(kb, batch, config);
  CHECK(second.new_models.empty());
  CHECK(second.conformant_traces.size() == 10);
  CHECK(second.nonconformant_traces.empty());
  CHECK(kb.size() == 3);
}

TEST_CASE("adapt_iteration respects the minimum sublog size") {
  AdaptationConfig config;
  config.cluster_params.min_pts = 1;
  KnowledgeBase kb = train_phase(baseline_log(), config);
  const EventLog batch = log_of({{"a", "x", "b"}, {"a", "x", "b"}});
  const AdaptationOutcome outcome = adapt_iteration(kb, batch, config);
  CHECK(outcome.nonconformant_traces.size() == 2);
  CHECK(outcome.new_models.empty());  // 2 < min_sublog_size of 3
  CHECK(kb.size() == 1);
}

TEST_CASE("adapt_iteration gate matches the threshold exactly") {
  AdaptationConfig config;
  KnowledgeBase kb = train_phase(baseline_log(), config);
  const EventLog batch = two_pattern_batch();
  const AdaptationOutcome outcome = adapt_iteration(kb, batch, config);
  for (std::size_t i = 0; i < outcome.diagnoses.rows.size(); ++i) {
    const double fitness = outcome.diagnoses.rows[i].fitness;
    const std::string& id = batch.traces[i].case_id;
    const bool conformant =
        std::find(outcome.conformant_traces.begin(), outcome.conformant_traces.end(), id) !=
        outcome.conformant_traces.end();
    CHECK(conformant == (fitness >= config.fitness_threshold));
  }
  CHECK(outcome.conformant_traces.size() + outcome.nonconformant_traces.size() == batch.size());
}

TEST_CASE("knowledge base only ever grows in adaptive mode") {
  AdaptationConfig config;
  KnowledgeBase kb = train_phase(baseline_log(), config);
  std::vector<std::string> ids;
  for (const auto& model : kb.models()) ids.push_back(model.model_id());
  for (int round = 0; round < 3; ++round) {
    adapt_iteration(kb, two_pattern_batch(), config);
    REQUIRE(kb.size() >= ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) CHECK(kb.models()[i].model_id() == ids[i]);
    ids.clear();
    for (const auto& model : kb.models()) ids.push_back(model.model_id());
  }
}

TEST_CASE("baseline_iteration rebuilds a single cumulative model") {
  AdaptationConfig config;
  SUBCASE("first iteration uses the batch alone") {
    const auto [cumulative, model] = baseline_iteration(std::nullopt, baseline_log(), config);
    CHECK(cumulative.size() == 10);
    CHECK(min_model_cost(model) >= 0.0);
  }
  SUBCASE("identical batches give identical models") {
    const auto [c1, m1] = baseline_iteration(std::nullopt, baseline_log(), config);
    const auto [c2, m2] = baseline_iteration(c1, baseline_log(), config);
    CHECK(c2.size() == 20);
    CHECK(m1 == m2);  // same variants, deterministic miner
  }
  SUBCASE("top-k filter applies to the merged log") {
    // 25 variants of one trace each; k = 20 keeps the smallest 20
    std::vector<std::vector<std::string>> seqs;
    for (int i = 0; i < 25; ++i)
      seqs.push_back({"v" + std::string(1, static_cast<char>('a' + i))});
    config.top_k = 20;
    const auto [cumulative, model] = baseline_iteration(std::nullopt, log_of(std::move(seqs)),
                                                        config);
    CHECK(cumulative.size() == 25);
    CHECK(model.visible_labels().size() == 20);
  }
}

TEST_CASE("knowledge base round-trips through a directory") {
  TempDir dir("kb_roundtrip");
  AdaptationConfig config;
  KnowledgeBase kb = train_phase(baseline_log(), config);
  adapt_iteration(kb, two_pattern_batch(), config);
  REQUIRE(kb.size() == 3);

  save_knowledge_base(kb, dir.path.string());
  const KnowledgeBase loaded = load_knowledge_base(dir.path.string());
  REQUIRE(loaded.size() == kb.size());
  CHECK(loaded.iterations_run() == kb.iterations_run());
  for (std::size_t i = 0; i < kb.size(); ++i) {
    CHECK(loaded.models()[i] == kb.models()[i]);
    CHECK(loaded.provenance()[i].source == kb.provenance()[i].source);
    CHECK(loaded.provenance()[i].iteration_added == kb.provenance()[i].iteration_added);
    CHECK(loaded.provenance()[i].trace_count == kb.provenance()[i].trace_count);
  }
}

TEST_CASE("loading an empty or missing kb directory fails cleanly") {
  TempDir dir("kb_missing");
  CHECK_THROWS_AS(load_knowledge_base(dir.path.string()), EmptyKnowledgeBase);
  std::filesystem::create_directories(dir.path);
  CHECK_THROWS_AS(load_knowledge_base(dir.path.string()), EmptyKnowledgeBase);
}

TEST_CASE("outcome json carries the diagnosis matrix") {
  AdaptationConfig config;
  KnowledgeBase kb = train_phase(baseline_log(), config);
  const AdaptationOutcome outcome = adapt_iteration(kb, two_pattern_batch(), config);
  const std::string json_text = outcome_to_json(outcome);
  CHECK(json_text.find("\"new_models\"") != std::string::npos);
  CHECK(json_text.find("\"wall_time_ms\"") != std::string::npos);
  CHECK(json_text.find("\"columns\"") != std::string::npos);
}
