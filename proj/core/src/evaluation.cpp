#include "pathmine/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include <json.hpp>

#include "csv_util.hpp"
#include "indexed_net.hpp"
#include "pathmine/discovery.hpp"
#include "pathmine/errors.hpp"

namespace pathmine {

using nlohmann::json;

double arc_degree_simplicity(const PetriNet& net) {
  const double nodes = static_cast<double>(net.places().size() + net.transitions().size());
  const double mean_degree = 2.0 * static_cast<double>(net.arcs().size()) / nodes;
  return 1.0 / (1.0 + std::max(0.0, mean_degree - 2.0));
}

double auc(const std::vector<LabeledScore>& scores) {
  std::vector<double> positives, negatives;
  for (const auto& s : scores)
    (s.label == LabeledScore::Label::Positive ? positives : negatives).push_back(s.anomaly_score);
  if (positives.empty() || negatives.empty()) throw SingleClass();

  // rank-sum with midranks for ties
  struct Entry {
    double score;
    bool positive;
  };
  std::vector<Entry> all;
  all.reserve(scores.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Entry& a, const Entry& b) { return a.score < b.score; });

  double rank_sum_positive = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].positive) rank_sum_positive += midrank;
    i = j;
  }
  const double p = static_cast<double>(positives.size());
  const double n = static_cast<double>(negatives.size());
  return (rank_sum_positive - p * (p + 1.0) / 2.0) / (p * n);
}

// ---- synthetic benchmark ------------------------------------------------------

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t below(std::uint64_t bound) { return gen_() % bound; }
  double real01() {
    return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0);
  }

 private:
  std::mt19937_64 gen_;
};

ProcessTree random_tree(std::vector<std::string> activities, int depth_left,
                        const GeneratorSpec& spec, Rng& rng) {
  if (activities.size() == 1) return ProcessTree::leaf(activities.front());
  if (depth_left <= 0) {
    std::vector<ProcessTree> leaves;
    for (auto& a : activities) leaves.push_back(ProcessTree::leaf(std::move(a)));
    return ProcessTree::node(ProcessTree::Kind::Seq, std::move(leaves));
  }

  const double total = spec.weight_seq + spec.weight_xor + spec.weight_and + spec.weight_loop;
  const double draw = rng.real01() * total;
  ProcessTree::Kind kind;
  if (draw < spec.weight_seq) kind = ProcessTree::Kind::Seq;
  else if (draw < spec.weight_seq + spec.weight_xor) kind = ProcessTree::Kind::Xor;
  else if (draw < spec.weight_seq + spec.weight_xor + spec.weight_and) kind = ProcessTree::Kind::And;
  else kind = ProcessTree::Kind::Loop;

  // shuffle, then split into consecutive non-empty chunks
  for (std::size_t i = activities.size() - 1; i > 0; --i)
    std::swap(activities[i], activities[rng.below(i + 1)]);

  const std::size_t max_children = kind == ProcessTree::Kind::Loop
                                       ? 2
                                       : std::min<std::size_t>(4, activities.size());
  const std::size_t n_children =
      kind == ProcessTree::Kind::Loop ? 2 : 2 + rng.below(max_children - 1);

  std::vector<std::vector<std::string>> chunks(n_children);
  for (std::size_t i = 0; i < n_children; ++i)
    chunks[i].push_back(activities[i]);  // each chunk gets one activity up front
  for (std::size_t i = n_children; i < activities.size(); ++i)
    chunks[rng.below(n_children)].push_back(activities[i]);

  std::vector<ProcessTree> children;
  children.reserve(n_children);
  for (auto& chunk : chunks)
    children.push_back(random_tree(std::move(chunk), depth_left - 1, spec, rng));
  return ProcessTree::node(kind, std::move(children));
}

Trace play_out(const detail::IndexedNet& net, const std::set<std::string>& redo_transitions,
               std::string case_id, Rng& rng) {
  constexpr int kRedoCap = 3;
  std::vector<int> marking = net.initial;
  std::map<std::string, int> redo_fired;
  Trace trace;
  trace.case_id = std::move(case_id);
  while (marking != net.final) {
    std::vector<int> enabled;
    std::vector<int> uncapped;
    for (int i = 0; i < static_cast<int>(net.transitions.size()); ++i) {
      const auto& t = net.transitions[static_cast<std::size_t>(i)];
      if (!net.enabled(marking, t)) continue;
      enabled.push_back(i);
      if (!redo_transitions.count(t.id) || redo_fired[t.id] < kRedoCap) uncapped.push_back(i);
    }
    const auto& pool = uncapped.empty() ? enabled : uncapped;
    const auto& t = net.transitions[static_cast<std::size_t>(pool[rng.below(pool.size())])];
    if (redo_transitions.count(t.id)) ++redo_fired[t.id];
    net.fire_in_place(marking, t);
    if (!t.silent) trace.activities.push_back(t.label);
  }
  return trace;
}

void validate(const GeneratorSpec& spec) {
  if (spec.n_diseases < 2) throw InvalidSpec("need at least 2 diseases");
  if (spec.min_activities < 1 || spec.max_activities < spec.min_activities)
    throw InvalidSpec("bad activities_per_disease range");
  if (spec.min_depth < 0 || spec.max_depth < spec.min_depth) throw InvalidSpec("bad depth range");
  if (spec.weight_seq < 0 || spec.weight_xor < 0 || spec.weight_and < 0 || spec.weight_loop < 0 ||
      spec.weight_seq + spec.weight_xor + spec.weight_and + spec.weight_loop <= 0)
    throw InvalidSpec("operator weights must be non-negative with positive sum");
  if (spec.traces_per_disease < 1) throw InvalidSpec("traces_per_disease must be >= 1");
  if (spec.label_overlap_fraction < 0.0 || spec.label_overlap_fraction > 1.0)
    throw InvalidSpec("label_overlap_fraction must lie in [0,1]");
}

}  // namespace

Benchmark generate_benchmark(const GeneratorSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  Benchmark bench;
  std::vector<std::string> first_alphabet;
  int fresh = 0;

  for (int d = 0; d < spec.n_diseases; ++d) {
    const int n_acts =
        spec.min_activities +
        static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_activities -
                                                              spec.min_activities + 1)));
    std::vector<std::string> alphabet;
    if (d == 0) {
      for (int j = 0; j < n_acts; ++j) alphabet.push_back("act" + std::to_string(fresh++));
      first_alphabet = alphabet;
    } else {
      std::size_t n_shared = static_cast<std::size_t>(
          std::floor(spec.label_overlap_fraction * static_cast<double>(n_acts)));
      n_shared = std::min(n_shared, first_alphabet.size());
      std::vector<std::string> pool = first_alphabet;
      for (std::size_t j = 0; j < n_shared; ++j) {
        const std::size_t pick = rng.below(pool.size());
        alphabet.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
      while (alphabet.size() < static_cast<std::size_t>(n_acts))
        alphabet.push_back("act" + std::to_string(fresh++));
    }

    const int depth =
        spec.min_depth +
        static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.max_depth - spec.min_depth + 1)));
    const ProcessTree tree = random_tree(alphabet, depth, spec, rng);
    CompiledTree compiled = compile_tree(tree, "gen_d" + std::to_string(d));
    const detail::IndexedNet indexed(compiled.net);

    std::vector<Trace> traces;
    for (int c = 0; c < spec.traces_per_disease; ++c)
      traces.push_back(play_out(indexed, compiled.loop_redo_transitions,
                                "d" + std::to_string(d) + "_c" + std::to_string(c), rng));
    EventLog log = make_log(std::move(traces));
    if (d + 1 == spec.n_diseases) bench.positive_log = std::move(log);
    else bench.negative_logs.push_back(std::move(log));
    bench.ground_truth.push_back(std::move(compiled.net));
  }
  return bench;
}

// ---- experiment runner --------------------------------------------------------

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t repeat, std::uint64_t index) {
  std::uint64_t z = seed ^ (0x9E3779B97F4A7C15ull * (repeat + 1) + 0xBF58476D1CE4E5B9ull * index);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double best_fitness(const Trace& trace, const std::vector<Aligner>& aligners) {
  double best = 0.0;
  bool first = true;
  for (const auto& aligner : aligners) {
    const double fitness = aligner.align(trace).fitness;
    if (first || fitness > best) {
      best = fitness;
      first = false;
    }
  }
  return best;
}

}  // namespace

std::vector<IterationReport> run_experiment(const GeneratorSpec& spec,
                                            const AdaptationConfig& config, ExperimentMode mode,
                                            int repeats) {
  if (repeats < 1) throw InvalidArgument("repeats must be >= 1");
  if (spec.n_diseases < 3) throw InvalidSpec("experiment needs at least 2 negative diseases");
  const Benchmark bench = generate_benchmark(spec);
  const std::size_t n_negatives = bench.negative_logs.size();

  std::vector<IterationReport> reports;
  for (int repeat = 0; repeat < repeats; ++repeat) {
    std::vector<EventLog> train_parts, test_parts;
    for (std::size_t i = 0; i < n_negatives; ++i) {
      auto [train, test] = split_log(bench.negative_logs[i], 0.75,
                                     mix_seed(config.seed, static_cast<std::uint64_t>(repeat), i));
      train_parts.push_back(std::move(train));
      test_parts.push_back(std::move(test));
    }

    KnowledgeBase kb;
    std::optional<EventLog> cumulative;
    if (mode == ExperimentMode::Adaptive) {
      kb = train_phase(train_parts[0], config);
    } else {
      auto [merged, model] = baseline_iteration(std::nullopt, train_parts[0], config);
      cumulative = std::move(merged);
      ModelProvenance provenance;
      provenance.trace_count = static_cast<int>(train_parts[0].size());
      kb.add(std::move(model), provenance);
    }

    for (std::size_t iteration = 1; iteration < n_negatives; ++iteration) {
      IterationReport report;
      report.repeat = repeat;
      report.iteration = static_cast<int>(iteration);
      report.mode = mode;
      report.miner = config.miner;
      report.clusterer = config.clusterer;

      if (mode == ExperimentMode::Adaptive) {
        const AdaptationOutcome outcome = adapt_iteration(kb, train_parts[iteration], config);
        report.wall_time_ms = outcome.wall_time_ms;
      } else {
        const auto started = std::chrono::steady_clock::now();
        auto [merged, model] = baseline_iteration(cumulative, train_parts[iteration], config);
        cumulative = std::move(merged);
        KnowledgeBase fresh_kb;
        ModelProvenance provenance;
        provenance.iteration_added = static_cast<int>(iteration);
        provenance.trace_count = static_cast<int>(cumulative->size());
        fresh_kb.add(std::move(model), provenance);
        kb = std::move(fresh_kb);
        report.wall_time_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - started)
                                  .count();
      }

      std::vector<Aligner> aligners;
      aligners.reserve(kb.size());
      for (const auto& model : kb.models())
        aligners.emplace_back(model, config.cost, config.state_budget);

      std::vector<LabeledScore> scores;
      double fitness_sum = 0.0;
      std::size_t n_negative_traces = 0;
      for (std::size_t i = 0; i <= iteration; ++i) {
        for (const auto& trace : test_parts[i].traces) {
          const double fitness = best_fitness(trace, aligners);
          scores.push_back({trace.case_id, 1.0 - fitness, LabeledScore::Label::Negative});
          fitness_sum += fitness;
          ++n_negative_traces;
        }
      }
      for (const auto& trace : bench.positive_log.traces) {
        const double fitness = best_fitness(trace, aligners);
        scores.push_back({trace.case_id, 1.0 - fitness, LabeledScore::Label::Positive});
      }

      report.auc = auc(scores);
      report.model_count = static_cast<int>(kb.size());
      report.mean_fitness_negatives = fitness_sum / static_cast<double>(n_negative_traces);
      double simplicity_sum = 0.0;
      for (std::size_t m = 0; m < kb.size(); ++m) {
        const PetriNet& model = kb.models()[m];
        const ModelProvenance& provenance = kb.provenance()[m];
        ModelReportEntry entry;
        entry.model_id = model.model_id();
        entry.source = provenance.source == ModelProvenance::Source::Cluster ? "cluster"
                       : provenance.source == ModelProvenance::Source::Residual
                           ? "residual"
                           : "baseline_training";
        entry.iteration_added = provenance.iteration_added;
        entry.trace_count = provenance.trace_count;
        entry.simplicity = arc_degree_simplicity(model);
        simplicity_sum += entry.simplicity;
        report.models.push_back(std::move(entry));
      }
      report.mean_simplicity = simplicity_sum / static_cast<double>(kb.size());
      reports.push_back(std::move(report));
    }
  }
  return reports;
}

const char* mode_name(ExperimentMode mode) {
  return mode == ExperimentMode::Adaptive ? "adaptive" : "baseline";
}
const char* miner_name(MinerKind miner) {
  return miner == MinerKind::Inductive ? "im" : "hm";
}
const char* clusterer_name(ClustererKind clusterer) {
  return clusterer == ClustererKind::Dbscan ? "dbscan" : "optics";
}

void write_reports_csv(const std::vector<IterationReport>& reports, std::ostream& out) {
  out << "repeat,iteration,mode,miner,clusterer,auc,mean_simplicity,model_count,"
         "mean_fitness_neg,wall_time_ms\n";
  char buf[64];
  for (const auto& r : reports) {
    out << r.repeat << ',' << r.iteration << ',' << mode_name(r.mode) << ','
        << miner_name(r.miner) << ',' << clusterer_name(r.clusterer) << ',';
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%d,%.6f,%.3f", r.auc, r.mean_simplicity,
                  r.model_count, r.mean_fitness_negatives, r.wall_time_ms);
    out << buf << '\n';
  }
}

std::string reports_to_json(const std::vector<IterationReport>& reports,
                            const GeneratorSpec& spec, const AdaptationConfig& config) {
  json doc;
  doc["generator"] = {{"n_diseases", spec.n_diseases},
                      {"min_activities", spec.min_activities},
                      {"max_activities", spec.max_activities},
                      {"min_depth", spec.min_depth},
                      {"max_depth", spec.max_depth},
                      {"weight_seq", spec.weight_seq},
                      {"weight_xor", spec.weight_xor},
                      {"weight_and", spec.weight_and},
                      {"weight_loop", spec.weight_loop},
                      {"traces_per_disease", spec.traces_per_disease},
                      {"label_overlap_fraction", spec.label_overlap_fraction},
                      {"seed", spec.seed}};
  doc["config"] = {{"fitness_threshold", config.fitness_threshold},
                   {"top_k", config.top_k},
                   {"miner", miner_name(config.miner)},
                   {"clusterer", clusterer_name(config.clusterer)},
                   {"eps", config.cluster_params.eps},
                   {"min_pts", config.cluster_params.min_pts},
                   {"eps_extract", config.cluster_params.eps_extract},
                   {"min_sublog_size", config.min_sublog_size},
                   {"log_move_cost", config.cost.log_move},
                   {"model_move_cost", config.cost.model_move_visible},
                   {"state_budget", config.state_budget},
                   {"seed", config.seed}};
  doc["reports"] = json::array();
  for (const auto& r : reports) {
    json models = json::array();
    for (const auto& m : r.models) {
      models.push_back({{"model_id", m.model_id},
                        {"source", m.source},
                        {"iteration_added", m.iteration_added},
                        {"trace_count", m.trace_count},
                        {"simplicity", m.simplicity}});
    }
    doc["reports"].push_back({{"repeat", r.repeat},
                              {"iteration", r.iteration},
                              {"mode", mode_name(r.mode)},
                              {"miner", miner_name(r.miner)},
                              {"clusterer", clusterer_name(r.clusterer)},
                              {"auc", r.auc},
                              {"mean_simplicity", r.mean_simplicity},
                              {"model_count", r.model_count},
                              {"mean_fitness_neg", r.mean_fitness_negatives},
                              {"wall_time_ms", r.wall_time_ms},
                              {"models", models}});
  }
  return doc.dump(2);
}

}  // namespace pathmine
