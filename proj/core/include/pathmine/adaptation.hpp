#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pathmine/alignment.hpp"
#include "pathmine/clustering.hpp"
#include "pathmine/event_log.hpp"
#include "pathmine/petri_net.hpp"

namespace pathmine {

enum class MinerKind { Inductive, Heuristics };
enum class ClustererKind { Dbscan, Optics };

struct ModelProvenance {
  enum class Source { BaselineTraining, Cluster, Residual };
  Source source = Source::BaselineTraining;
  int iteration_added = 0;
  int cluster_id = -1;  // >= 0 for Source::Cluster
  int trace_count = 0;
};

/// Insertion-ordered collection of discovered models. Models are only ever
/// appended.
class KnowledgeBase {
 public:
  void add(PetriNet model, ModelProvenance provenance);

  const std::vector<PetriNet>& models() const { return models_; }
  const std::vector<ModelProvenance>& provenance() const { return provenance_; }
  std::size_t size() const { return models_.size(); }
  bool empty() const { return models_.empty(); }

  int iterations_run() const { return iterations_run_; }
  void set_iterations_run(int n) { iterations_run_ = n; }

  /// Next free `model_<n>` id.
  std::string next_model_id() const;

 private:
  std::vector<PetriNet> models_;
  std::vector<ModelProvenance> provenance_;
  int iterations_run_ = 0;
};

struct ClusterParams {
  double eps = 0.0;          // <= 0: median pairwise distance * 0.5
  int min_pts = 5;
  double eps_extract = 0.0;  // <= 0: same as eps
};

struct AdaptationConfig {
  double fitness_threshold = 0.9;
  std::size_t top_k = 20;
  MinerKind miner = MinerKind::Inductive;
  ClustererKind clusterer = ClustererKind::Dbscan;
  ClusterParams cluster_params;
  double hm_dependency_threshold = 0.9;
  double hm_and_threshold = 0.65;
  int hm_min_edge_count = 1;
  int min_sublog_size = 3;
  MoveCostSchedule cost;
  std::size_t state_budget = 2'000'000;
  std::uint64_t seed = 42;
};

struct AdaptationOutcome {
  std::vector<std::string> conformant_traces;
  std::vector<std::string> nonconformant_traces;
  std::vector<std::string> new_models;
  DiagnosisMatrix diagnoses;
  double wall_time_ms = 0.0;
  int iteration = 0;
};

/// Phase 1: top-k variant filtering followed by discovery of the single
/// baseline model.
KnowledgeBase train_phase(const EventLog& historical, const AdaptationConfig& config);

/// One online round: filter the batch, diagnose it against the knowledge
/// base, gate traces on the fitness threshold, cluster the non-conformant
/// diagnosis rows, and mine one new model per sufficiently large sublog.
AdaptationOutcome adapt_iteration(KnowledgeBase& kb, const EventLog& batch,
                                  const AdaptationConfig& config);

/// Non-adaptive reference: merge the batch into the cumulative log and mine
/// a single fresh model from its top-k variants.
std::pair<EventLog, PetriNet> baseline_iteration(const std::optional<EventLog>& cumulative,
                                                 const EventLog& batch,
                                                 const AdaptationConfig& config);

/// Knowledge-base directory layout: `<model_id>.pnml` per model plus a
/// `manifest.json` with provenance.
void save_knowledge_base(const KnowledgeBase& kb, const std::string& directory);
KnowledgeBase load_knowledge_base(const std::string& directory);

std::string outcome_to_json(const AdaptationOutcome& outcome);

PetriNet discover_with(MinerKind miner, const EventLog& log, const AdaptationConfig& config,
                       const std::string& model_id);

}  // namespace pathmine
