#include "pathmine/adaptation.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pathmine/discovery.hpp"
#include "pathmine/errors.hpp"

namespace pathmine {

namespace fs = std::filesystem;
using nlohmann::json;

void KnowledgeBase::add(PetriNet model, ModelProvenance provenance) {
  for (const auto& existing : models_)
    if (existing.model_id() == model.model_id())
      throw InvalidArgument("duplicate model id " + model.model_id());
  models_.push_back(std::move(model));
  provenance_.push_back(provenance);
}

std::string KnowledgeBase::next_model_id() const {
  std::size_t n = models_.size();
  while (true) {
    std::string candidate = "model_" + std::to_string(n);
    const bool taken = std::any_of(models_.begin(), models_.end(), [&](const PetriNet& m) {
      return m.model_id() == candidate;
    });
    if (!taken) return candidate;
    ++n;
  }
}

PetriNet discover_with(MinerKind miner, const EventLog& log, const AdaptationConfig& config,
                       const std::string& model_id) {
  if (miner == MinerKind::Inductive) return discover_inductive(log, model_id);
  HeuristicsParams params;
  params.dependency_threshold = config.hm_dependency_threshold;
  params.and_threshold = config.hm_and_threshold;
  params.min_edge_count = config.hm_min_edge_count;
  return discover_heuristics(log, params, model_id);
}

KnowledgeBase train_phase(const EventLog& historical, const AdaptationConfig& config) {
  if (historical.empty()) throw EmptyLog();
  const EventLog filtered = filter_top_k_variants(historical, config.top_k);
  KnowledgeBase kb;
  ModelProvenance provenance;
  provenance.source = ModelProvenance::Source::BaselineTraining;
  provenance.iteration_added = 0;
  provenance.trace_count = static_cast<int>(filtered.size());
  kb.add(discover_with(config.miner, filtered, config, "model_0"), provenance);
  return kb;
}

namespace {

double auto_eps(const PointSet& points) {
  std::vector<double> distances;
  for (std::size_t i = 0; i < points.vectors.size(); ++i)
    for (std::size_t j = i + 1; j < points.vectors.size(); ++j)
      distances.push_back(euclidean_distance(points.vectors[i], points.vectors[j]));
  if (distances.empty()) return 1.0;
  std::sort(distances.begin(), distances.end());
  const double median = distances[distances.size() / 2];
  return std::max(median * 0.5, 1e-9);
}

ClusterLabels run_clusterer(const PointSet& points, const AdaptationConfig& config) {
  const double eps =
      config.cluster_params.eps > 0.0 ? config.cluster_params.eps : auto_eps(points);
  if (config.clusterer == ClustererKind::Dbscan)
    return dbscan(points, eps, config.cluster_params.min_pts);
  const double eps_extract =
      config.cluster_params.eps_extract > 0.0 ? config.cluster_params.eps_extract : eps;
  return optics(points, config.cluster_params.min_pts, eps_extract);
}

}  // namespace

AdaptationOutcome adapt_iteration(KnowledgeBase& kb, const EventLog& batch,
                                  const AdaptationConfig& config) {
  if (kb.empty()) throw EmptyKnowledgeBase();
  if (batch.empty()) throw EmptyLog();
  const auto started = std::chrono::steady_clock::now();

  AdaptationOutcome outcome;
  outcome.iteration = kb.iterations_run() + 1;

  const EventLog filtered = filter_top_k_variants(batch, config.top_k);
  outcome.diagnoses = compute_diagnoses(filtered, kb, config.cost, config.state_budget);

  std::vector<Trace> nonconformant_traces;
  std::vector<std::vector<double>> nonconformant_rows;
  for (std::size_t i = 0; i < filtered.traces.size(); ++i) {
    const DiagnosisRow& row = outcome.diagnoses.rows[i];
    if (row.fitness >= config.fitness_threshold) {
      outcome.conformant_traces.push_back(filtered.traces[i].case_id);
    } else {
      outcome.nonconformant_traces.push_back(filtered.traces[i].case_id);
      nonconformant_traces.push_back(filtered.traces[i]);
      nonconformant_rows.emplace_back(row.counts.begin(), row.counts.end());
    }
  }

  if (!nonconformant_traces.empty()) {
    const PointSet points = make_point_set(std::move(nonconformant_rows));
    const ClusterLabels labels = run_clusterer(points, config);
    const EventLog nonconformant_log = make_log(std::move(nonconformant_traces));
    const std::vector<EventLog> sublogs = split_into_sublogs(nonconformant_log, labels);
    const bool has_residual = sublogs.size() > static_cast<std::size_t>(labels.gamma);

    for (std::size_t s = 0; s < sublogs.size(); ++s) {
      if (static_cast<int>(sublogs[s].size()) < config.min_sublog_size) continue;
      const bool residual = has_residual && s + 1 == sublogs.size();
      ModelProvenance provenance;
      provenance.source =
          residual ? ModelProvenance::Source::Residual : ModelProvenance::Source::Cluster;
      provenance.iteration_added = outcome.iteration;
      provenance.cluster_id = residual ? -1 : static_cast<int>(s);
      provenance.trace_count = static_cast<int>(sublogs[s].size());
      const std::string model_id = kb.next_model_id();
      kb.add(discover_with(config.miner, sublogs[s], config, model_id), provenance);
      outcome.new_models.push_back(model_id);
    }
  }

  kb.set_iterations_run(outcome.iteration);
  outcome.wall_time_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
          .count();
  return outcome;
}

std::pair<EventLog, PetriNet> baseline_iteration(const std::optional<EventLog>& cumulative,
                                                 const EventLog& batch,
                                                 const AdaptationConfig& config) {
  if (batch.empty()) throw EmptyLog();
  EventLog merged = cumulative ? merge_logs(*cumulative, batch) : batch;
  const EventLog filtered = filter_top_k_variants(merged, config.top_k);
  PetriNet model = discover_with(config.miner, filtered, config, "model_0");
  return {std::move(merged), std::move(model)};
}

// ---- persistence -------------------------------------------------------------

namespace {

const char* source_name(ModelProvenance::Source source) {
  switch (source) {
    case ModelProvenance::Source::BaselineTraining: return "baseline_training";
    case ModelProvenance::Source::Cluster: return "cluster";
    case ModelProvenance::Source::Residual: return "residual";
  }
  return "baseline_training";
}

ModelProvenance::Source source_from_name(const std::string& name) {
  if (name == "cluster") return ModelProvenance::Source::Cluster;
  if (name == "residual") return ModelProvenance::Source::Residual;
  return ModelProvenance::Source::BaselineTraining;
}

}  // namespace

void save_knowledge_base(const KnowledgeBase& kb, const std::string& directory) {
  fs::create_directories(directory);
  json manifest;
  manifest["iterations_run"] = kb.iterations_run();
  manifest["models"] = json::array();
  for (std::size_t i = 0; i < kb.size(); ++i) {
    const PetriNet& model = kb.models()[i];
    const ModelProvenance& provenance = kb.provenance()[i];
    const std::string file = model.model_id() + ".pnml";
    std::ofstream out(fs::path(directory) / file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file + " in " + directory);
    out << serialize(model, NetFormat::Pnml);
    manifest["models"].push_back({{"model_id", model.model_id()},
                                  {"file", file},
                                  {"source", source_name(provenance.source)},
                                  {"iteration_added", provenance.iteration_added},
                                  {"cluster_id", provenance.cluster_id},
                                  {"trace_count", provenance.trace_count}});
  }
  std::ofstream out(fs::path(directory) / "manifest.json", std::ios::binary);
  if (!out) throw IoError("cannot write manifest.json in " + directory);
  out << manifest.dump(2) << '\n';
}

KnowledgeBase load_knowledge_base(const std::string& directory) {
  const fs::path manifest_path = fs::path(directory) / "manifest.json";
  if (!fs::exists(manifest_path)) throw EmptyKnowledgeBase();
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw IoError("cannot read " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw IoError("bad manifest.json: " + std::string(e.what()));
  }

  KnowledgeBase kb;
  kb.set_iterations_run(manifest.value("iterations_run", 0));
  for (const auto& entry : manifest.value("models", json::array())) {
    const std::string file = entry.at("file").get<std::string>();
    std::ifstream net_in(fs::path(directory) / file, std::ios::binary);
    if (!net_in) throw IoError("cannot read model file " + file);
    PetriNet net = parse_pnml(net_in);
    ModelProvenance provenance;
    provenance.source = source_from_name(entry.value("source", "baseline_training"));
    provenance.iteration_added = entry.value("iteration_added", 0);
    provenance.cluster_id = entry.value("cluster_id", -1);
    provenance.trace_count = entry.value("trace_count", 0);
    kb.add(std::move(net), provenance);
  }
  if (kb.empty()) throw EmptyKnowledgeBase();
  return kb;
}

std::string outcome_to_json(const AdaptationOutcome& outcome) {
  json doc;
  doc["iteration"] = outcome.iteration;
  doc["conformant_traces"] = outcome.conformant_traces;
  doc["nonconformant_traces"] = outcome.nonconformant_traces;
  doc["new_models"] = outcome.new_models;
  doc["wall_time_ms"] = outcome.wall_time_ms;
  doc["diagnoses"]["columns"] = outcome.diagnoses.column_alphabet;
  doc["diagnoses"]["rows"] = json::array();
  for (const auto& row : outcome.diagnoses.rows) {
    doc["diagnoses"]["rows"].push_back({{"trace", row.trace_ref},
                                        {"counts", row.counts},
                                        {"fitness", row.fitness},
                                        {"model_ref", row.model_ref}});
  }
  return doc.dump(2);
}

}  // namespace pathmine
