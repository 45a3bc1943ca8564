#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pathmine/adaptation.hpp"
#include "pathmine/event_log.hpp"
#include "pathmine/petri_net.hpp"

namespace pathmine {

struct LabeledScore {
  enum class Label { Positive, Negative };
  std::string trace_ref;
  double anomaly_score = 0.0;  // 1 - best fitness over the knowledge base
  Label label = Label::Negative;
};

/// Mean node degree folded into [0,1]: 1 at degree <= 2, falling as
/// 1 / (1 + (mean_degree - 2)) above that.
double arc_degree_simplicity(const PetriNet& net);

/// Rank-based (Mann-Whitney) AUC of anomaly scores: the probability that a
/// random positive outranks a random negative, ties counting half.
double auc(const std::vector<LabeledScore>& scores);

struct GeneratorSpec {
  int n_diseases = 5;  // the last one plays the anomalous pathway
  int min_activities = 10;
  int max_activities = 14;
  int min_depth = 3;
  int max_depth = 4;
  double weight_seq = 0.35;
  double weight_xor = 0.3;
  double weight_and = 0.2;
  double weight_loop = 0.15;
  int traces_per_disease = 80;
  double label_overlap_fraction = 0.3;
  std::uint64_t seed = 7;
};

struct Benchmark {
  std::vector<EventLog> negative_logs;  // one per legitimate disease
  EventLog positive_log;                // the anomalous pathway
  std::vector<PetriNet> ground_truth;   // generating nets, negatives then positive
};

/// Samples one random process tree per disease, compiles it and plays out
/// traces by random enabled-transition choice (each loop redo fires at most
/// three times per trace). Later disease alphabets share
/// label_overlap_fraction of their activities with the first disease and are
/// otherwise fresh. Fully determined by spec.seed.
Benchmark generate_benchmark(const GeneratorSpec& spec);

enum class ExperimentMode { Adaptive, Baseline };

struct ModelReportEntry {
  std::string model_id;
  std::string source;  // baseline_training | cluster | residual
  int iteration_added = 0;
  int trace_count = 0;
  double simplicity = 0.0;
};

struct IterationReport {
  int repeat = 0;
  int iteration = 0;
  ExperimentMode mode = ExperimentMode::Adaptive;
  MinerKind miner = MinerKind::Inductive;
  ClustererKind clusterer = ClustererKind::Dbscan;
  double auc = 0.0;
  double mean_simplicity = 0.0;
  int model_count = 0;
  double mean_fitness_negatives = 0.0;
  double wall_time_ms = 0.0;
  std::vector<ModelReportEntry> models;  // provenance and per-model simplicity
};

/// The iterative protocol: disease 1 trains the baseline model from its 75%
/// share; every following negative disease feeds one online iteration with
/// its own 75% share; the test set of an iteration is the 25% holdout of
/// every disease seen so far plus the whole positive log. Scores are
/// 1 - best fitness over the current knowledge base.
std::vector<IterationReport> run_experiment(const GeneratorSpec& spec,
                                            const AdaptationConfig& config, ExperimentMode mode,
                                            int repeats);

/// columns: repeat,iteration,mode,miner,clusterer,auc,mean_simplicity,
/// model_count,mean_fitness_neg,wall_time_ms
void write_reports_csv(const std::vector<IterationReport>& reports, std::ostream& out);
std::string reports_to_json(const std::vector<IterationReport>& reports,
                            const GeneratorSpec& spec, const AdaptationConfig& config);

const char* mode_name(ExperimentMode mode);
const char* miner_name(MinerKind miner);
const char* clusterer_name(ClustererKind clusterer);

}  // namespace pathmine
