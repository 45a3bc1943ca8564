#include <doctest.h>

#include <set>
#include <sstream>

#include "pathmine/errors.hpp"
#include "pathmine/evaluation.hpp"
#include "test_support.hpp"

using namespace pathmine;
using test_support::pairwise_auc;

namespace {

LabeledScore pos(double score) { return {"p", score, LabeledScore::Label::Positive}; }
LabeledScore neg(double score) { return {"n", score, LabeledScore::Label::Negative}; }

// |places| + |transitions| = 4, |arcs| = 6 -> mean degree 3
PetriNet mean_degree_three_net() {
  return PetriNet("deg3", {"p0", "p1"}, {{"t0", std::string("a")}, {"t1", std::string("b")}},
                  {{"p0", "t0"}, {"t0", "p1"}, {"p1", "t1"}, {"t1", "p0"},
                   {"p0", "t1"}, {"t1", "p1"}},
                  {{"p0", 1}}, {{"p1", 1}});
}

}  // namespace

TEST_CASE("arc_degree_simplicity") {
  SUBCASE("every node at degree two gives 1") {
    CHECK(arc_degree_simplicity(test_support::sequence_net({"a", "b", "c"})) == 1.0);
  }
  SUBCASE("mean degree three gives 0.5") {
    CHECK(arc_degree_simplicity(mean_degree_three_net()) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("sparse nets clamp at 1") {
    // degree below two: a single transition between two places, extra place chain
    const PetriNet net("sparse", {"p0", "p1"}, {{"t0", std::string("a")}},
                       {{"p0", "t0"}, {"t0", "p1"}}, {{"p0", 1}}, {{"p1", 1}});
    // mean degree = 4/3 < 2
    CHECK(arc_degree_simplicity(net) == 1.0);
  }
  SUBCASE("monotone non-increasing in the mean degree") {
    double previous = 2.0;
    // growing parallel bundles of arcs between the same pair of fan places
    for (int width = 1; width <= 6; ++width) {
      std::vector<std::string> places{"p0", "p1"};
      std::vector<TransitionDef> transitions;
      std::vector<Arc> arcs;
      for (int i = 0; i < width; ++i) {
        const std::string t = "t" + std::to_string(i);
        transitions.push_back({t, std::string("a") + std::to_string(i)});
        arcs.push_back({"p0", t});
        arcs.push_back({t, "p1"});
      }
      const PetriNet net("fan", places, transitions, arcs, {{"p0", 1}}, {{"p1", 1}});
      const double s = arc_degree_simplicity(net);
      CHECK(s <= previous);
      previous = s;
    }
  }
}

TEST_CASE("auc") {
  SUBCASE("perfect separation") {
    CHECK(auc({pos(0.9), pos(0.8), neg(0.2), neg(0.1)}) == 1.0);
  }
  SUBCASE("all ties give one half") {
    CHECK(auc({pos(0.5), pos(0.5), neg(0.5), neg(0.5)}) == 0.5);
  }
  SUBCASE("worked 3/4 example") {
    CHECK(auc({pos(0.9), pos(0.4), neg(0.8), neg(0.2)}) == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("single class rejected") {
    CHECK_THROWS_AS(auc({pos(0.9)}), SingleClass);
    CHECK_THROWS_AS(auc({pos(0.9), pos(0.1)}), SingleClass);
  }
  SUBCASE("matches the pairwise oracle on random score sets") {
    test_support::TestRng rng(616);
    for (int round = 0; round < 50; ++round) {
      std::vector<LabeledScore> scores;
      const std::size_t n_pos = 1 + rng.below(25);
      const std::size_t n_neg = 1 + rng.below(25);
      for (std::size_t i = 0; i < n_pos; ++i)
        scores.push_back(pos(static_cast<double>(rng.below(20)) / 19.0));
      for (std::size_t i = 0; i < n_neg; ++i)
        scores.push_back(neg(static_cast<double>(rng.below(20)) / 19.0));
      CHECK(auc(scores) == doctest::Approx(pairwise_auc(scores)).epsilon(1e-12));
    }
  }
}

TEST_CASE("generate_benchmark") {
  GeneratorSpec spec;
  spec.n_diseases = 2;
  spec.traces_per_disease = 10;
  spec.seed = 5;
  SUBCASE("zero overlap keeps alphabets disjoint") {
    spec.label_overlap_fraction = 0.0;
    const Benchmark bench = generate_benchmark(spec);
    REQUIRE(bench.negative_logs.size() == 1);
    for (const auto& a : bench.negative_logs[0].alphabet)
      CHECK(bench.positive_log.alphabet.count(a) == 0);
  }
  SUBCASE("same spec and seed reproduce the same logs") {
    const Benchmark a = generate_benchmark(spec);
    const Benchmark b = generate_benchmark(spec);
    REQUIRE(a.negative_logs.size() == b.negative_logs.size());
    for (std::size_t i = 0; i < a.negative_logs.size(); ++i)
      CHECK(a.negative_logs[i].traces == b.negative_logs[i].traces);
    CHECK(a.positive_log.traces == b.positive_log.traces);
  }
  SUBCASE("own-disease models fit their log perfectly") {
    spec.n_diseases = 3;
    const Benchmark bench = generate_benchmark(spec);
    for (const auto& log : bench.negative_logs) {
      const PetriNet model = discover_inductive(log);
      const Aligner aligner(model);
      for (const auto& trace : log.traces) CHECK(aligner.align(trace).fitness == 1.0);
    }
  }
  SUBCASE("overlap shares labels with the first disease") {
    spec.label_overlap_fraction = 0.5;
    spec.n_diseases = 3;
    const Benchmark bench = generate_benchmark(spec);
    const auto& first = bench.negative_logs[0].alphabet;
    std::size_t shared = 0;
    for (const auto& a : bench.positive_log.alphabet) shared += first.count(a);
    CHECK(shared > 0);
  }
  SUBCASE("bad specs rejected") {
    spec.n_diseases = 1;
    CHECK_THROWS_AS(generate_benchmark(spec), InvalidSpec);
    spec.n_diseases = 2;
    spec.label_overlap_fraction = 1.5;
    CHECK_THROWS_AS(generate_benchmark(spec), InvalidSpec);
    spec.label_overlap_fraction = 0.3;
    spec.weight_seq = spec.weight_xor = spec.weight_and = spec.weight_loop = 0.0;
    CHECK_THROWS_AS(generate_benchmark(spec), InvalidSpec);
  }
}

TEST_CASE("run_experiment on a small benchmark") {
  GeneratorSpec spec;
  spec.n_diseases = 3;
  spec.min_activities = 4;
  spec.max_activities = 6;
  spec.traces_per_disease = 16;
  spec.seed = 11;
  AdaptationConfig config;
  config.seed = 13;
  config.cluster_params.min_pts = 2;
  config.min_sublog_size = 2;

  SUBCASE("adaptive mode produces one report per iteration with live timing") {
    const auto reports = run_experiment(spec, config, ExperimentMode::Adaptive, 2);
    REQUIRE(reports.size() == 2);  // 2 repeats x 1 iteration
    for (const auto& r : reports) {
      CHECK(r.model_count >= 1);
      CHECK(r.auc >= 0.0);
      CHECK(r.auc <= 1.0);
      CHECK(r.mean_simplicity > 0.0);
      CHECK(r.mean_simplicity <= 1.0);
      CHECK(r.wall_time_ms > 0.0);
      REQUIRE(r.models.size() == static_cast<std::size_t>(r.model_count));
      CHECK(r.models.front().source == "baseline_training");
    }
  }
  SUBCASE("baseline mode always reports exactly one model") {
    const auto reports = run_experiment(spec, config, ExperimentMode::Baseline, 1);
    for (const auto& r : reports) CHECK(r.model_count == 1);
  }
  SUBCASE("needs two negative diseases") {
    spec.n_diseases = 2;
    CHECK_THROWS_AS(run_experiment(spec, config, ExperimentMode::Adaptive, 1), InvalidSpec);
  }
}

TEST_CASE("report serialization") {
  IterationReport report;
  report.repeat = 0;
  report.iteration = 1;
  report.auc = 0.875;
  report.mean_simplicity = 0.75;
  report.model_count = 2;
  report.mean_fitness_negatives = 0.9;
  report.wall_time_ms = 12.5;
  report.models = {{"model_0", "baseline_training", 0, 10, 0.7},
                   {"model_1", "cluster", 1, 4, 0.8}};

  std::ostringstream out;
  write_reports_csv({report}, out);
  CHECK(out.str() ==
        "repeat,iteration,mode,miner,clusterer,auc,mean_simplicity,model_count,"
        "mean_fitness_neg,wall_time_ms\n"
        "0,1,adaptive,im,dbscan,0.875000,0.750000,2,0.900000,12.500\n");

  const std::string json_text = reports_to_json({report}, GeneratorSpec{}, AdaptationConfig{});
  CHECK(json_text.find("\"auc\": 0.875") != std::string::npos);
  CHECK(json_text.find("\"source\": \"cluster\"") != std::string::npos);
  CHECK(json_text.find("\"simplicity\": 0.8") != std::string::npos);
  CHECK(json_text.find("\"generator\"") != std::string::npos);
  CHECK(json_text.find("\"config\"") != std::string::npos);
}
