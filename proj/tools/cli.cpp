#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pathmine/adaptation.hpp"
#include "pathmine/alignment.hpp"
#include "pathmine/discovery.hpp"
#include "pathmine/errors.hpp"
#include "pathmine/evaluation.hpp"
#include "pathmine/event_log.hpp"
#include "pathmine/petri_net.hpp"

namespace pathmine::cli {

namespace fs = std::filesystem;

namespace {

struct InputOptions {
  std::string path;
  std::string format = "auto";  // auto | csv | xes
  CsvMapping mapping;
  std::string delimiter = ",";
};

void add_input_flags(CLI::App& cmd, InputOptions& in) {
  cmd.add_option("--input", in.path, "Event log file")->required();
  cmd.add_option("--format", in.format, "Input format: auto, csv or xes")
      ->check(CLI::IsMember({"auto", "csv", "xes"}))
      ->capture_default_str();
  cmd.add_option("--case-col", in.mapping.case_col, "CSV case id column")->capture_default_str();
  cmd.add_option("--activity-col", in.mapping.activity_col, "CSV activity column")
      ->capture_default_str();
  cmd.add_option("--timestamp-col", in.mapping.timestamp_col, "CSV timestamp column")
      ->capture_default_str();
  cmd.add_option("--timestamp-format", in.mapping.timestamp_format, "CSV timestamp format")
      ->capture_default_str();
  cmd.add_option("--delimiter", in.delimiter, "CSV field delimiter")->capture_default_str();
}

EventLog load_log(const InputOptions& in) {
  std::ifstream file(in.path, std::ios::binary);
  if (!file) throw IoError("cannot open " + in.path);
  std::string format = in.format;
  if (format == "auto")
    format = fs::path(in.path).extension() == ".xes" ? "xes" : "csv";
  if (format == "xes") return parse_xes(file);
  CsvMapping mapping = in.mapping;
  if (in.delimiter.size() != 1) throw InvalidArgument("delimiter must be a single character");
  mapping.delimiter = in.delimiter[0];
  return parse_csv(file, mapping);
}

struct ConfigOptions {
  AdaptationConfig config;
  std::string miner = "im";
  std::string clusterer = "dbscan";
};

void add_config_flags(CLI::App& cmd, ConfigOptions& opts) {
  auto& c = opts.config;
  cmd.add_option("--threshold", c.fitness_threshold, "Conformance fitness threshold")
      ->capture_default_str();
  cmd.add_option("--top-k", c.top_k, "Variants kept by frequency filtering")
      ->capture_default_str();
  cmd.add_option("--miner", opts.miner, "Discovery algorithm: im or hm")
      ->check(CLI::IsMember({"im", "hm"}))
      ->capture_default_str();
  cmd.add_option("--clusterer", opts.clusterer, "Clustering algorithm: dbscan or optics")
      ->check(CLI::IsMember({"dbscan", "optics"}))
      ->capture_default_str();
  cmd.add_option("--eps", c.cluster_params.eps,
                 "Clustering radius; 0 = half the median pairwise distance")
      ->capture_default_str();
  cmd.add_option("--min-pts", c.cluster_params.min_pts, "Density threshold for core points")
      ->capture_default_str();
  cmd.add_option("--eps-extract", c.cluster_params.eps_extract,
                 "OPTICS extraction radius; 0 = same as eps")
      ->capture_default_str();
  cmd.add_option("--min-sublog-size", c.min_sublog_size,
                 "Smallest sublog that still yields a model")
      ->capture_default_str();
  cmd.add_option("--dependency-threshold", c.hm_dependency_threshold,
                 "Heuristics-miner dependency threshold")
      ->capture_default_str();
  cmd.add_option("--and-threshold", c.hm_and_threshold, "Heuristics-miner AND threshold")
      ->capture_default_str();
  cmd.add_option("--min-edge-count", c.hm_min_edge_count,
                 "Heuristics-miner minimum directly-follows count")
      ->capture_default_str();
  cmd.add_option("--log-cost", c.cost.log_move, "Cost of a log move")->capture_default_str();
  cmd.add_option("--model-cost", c.cost.model_move_visible, "Cost of a visible model move")
      ->capture_default_str();
  cmd.add_option("--state-budget", c.state_budget, "Alignment search state budget")
      ->capture_default_str();
  cmd.add_option("--seed", c.seed, "Seed for all randomized steps")->capture_default_str();
}

void finish_config(ConfigOptions& opts) {
  opts.config.miner = opts.miner == "hm" ? MinerKind::Heuristics : MinerKind::Inductive;
  opts.config.clusterer =
      opts.clusterer == "optics" ? ClustererKind::Optics : ClustererKind::Dbscan;
}

void add_generator_flags(CLI::App& cmd, GeneratorSpec& spec) {
  cmd.add_option("--n-diseases", spec.n_diseases, "Diseases to simulate; the last is anomalous")
      ->capture_default_str();
  cmd.add_option("--acts-min", spec.min_activities, "Minimum activities per disease")
      ->capture_default_str();
  cmd.add_option("--acts-max", spec.max_activities, "Maximum activities per disease")
      ->capture_default_str();
  cmd.add_option("--depth-min", spec.min_depth, "Minimum process-tree depth")
      ->capture_default_str();
  cmd.add_option("--depth-max", spec.max_depth, "Maximum process-tree depth")
      ->capture_default_str();
  cmd.add_option("--w-seq", spec.weight_seq, "Sequence operator weight")->capture_default_str();
  cmd.add_option("--w-xor", spec.weight_xor, "Choice operator weight")->capture_default_str();
  cmd.add_option("--w-and", spec.weight_and, "Concurrency operator weight")
      ->capture_default_str();
  cmd.add_option("--w-loop", spec.weight_loop, "Loop operator weight")->capture_default_str();
  cmd.add_option("--traces-per-disease", spec.traces_per_disease, "Traces played out per disease")
      ->capture_default_str();
  cmd.add_option("--overlap", spec.label_overlap_fraction,
                 "Fraction of activities shared with the first disease")
      ->capture_default_str();
  cmd.add_option("--gen-seed", spec.seed, "Benchmark generator seed")->capture_default_str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Clinical-pathway process mining: discovery, conformance and online adaptation"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "quiet or info")
      ->check(CLI::IsMember({"quiet", "info"}))
      ->capture_default_str();
  auto info = [&](const std::string& line) {
    if (log_level != "quiet") err << line << '\n';
  };

  // discover
  auto* discover_cmd = app.add_subcommand("discover", "Mine a Petri net from an event log");
  InputOptions discover_in;
  ConfigOptions discover_cfg;
  std::string discover_out;
  std::size_t discover_top_k = 0;
  add_input_flags(*discover_cmd, discover_in);
  add_config_flags(*discover_cmd, discover_cfg);
  discover_cmd->add_option("--out", discover_out, "Output directory for net.pnml and net.dot")
      ->required();
  discover_cmd->add_option("--filter-top-k", discover_top_k,
                           "Keep only the k most frequent variants first; 0 = no filtering")
      ->capture_default_str();

  // check
  auto* check_cmd = app.add_subcommand("check", "Diagnose a log against a knowledge base");
  InputOptions check_in;
  ConfigOptions check_cfg;
  std::string check_kb;
  std::string check_out = "-";
  add_input_flags(*check_cmd, check_in);
  add_config_flags(*check_cmd, check_cfg);
  check_cmd->add_option("--kb", check_kb, "Knowledge-base directory")->required();
  check_cmd->add_option("--out", check_out, "Diagnoses CSV path; - for stdout")
      ->capture_default_str();

  // adapt
  auto* adapt_cmd = app.add_subcommand("adapt", "Run one online adaptation iteration");
  InputOptions adapt_in;
  ConfigOptions adapt_cfg;
  std::string adapt_kb, adapt_out_kb, adapt_outcome;
  add_input_flags(*adapt_cmd, adapt_in);
  add_config_flags(*adapt_cmd, adapt_cfg);
  adapt_cmd->add_option("--kb", adapt_kb, "Knowledge-base directory (read only)")->required();
  adapt_cmd->add_option("--out-kb", adapt_out_kb, "Directory for the updated knowledge base")
      ->required();
  adapt_cmd->add_option("--outcome", adapt_outcome,
                        "Outcome JSON path; defaults to <out-kb>/outcome.json");

  // generate
  auto* generate_cmd = app.add_subcommand("generate", "Write a synthetic drift benchmark");
  GeneratorSpec generate_spec;
  std::string generate_out;
  add_generator_flags(*generate_cmd, generate_spec);
  generate_cmd->add_option("--out", generate_out, "Output directory for the log CSV files")
      ->required();

  // evaluate
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run the iterative drift experiment");
  GeneratorSpec evaluate_spec;
  ConfigOptions evaluate_cfg;
  std::string evaluate_mode = "adaptive";
  int evaluate_repeats = 3;
  std::string evaluate_csv = "report.csv";
  std::string evaluate_json;
  add_generator_flags(*evaluate_cmd, evaluate_spec);
  add_config_flags(*evaluate_cmd, evaluate_cfg);
  evaluate_cmd->add_option("--mode", evaluate_mode, "adaptive or baseline")
      ->check(CLI::IsMember({"adaptive", "baseline"}))
      ->capture_default_str();
  evaluate_cmd->add_option("--repeats", evaluate_repeats, "Independent repetitions")
      ->capture_default_str();
  evaluate_cmd->add_option("--out-csv", evaluate_csv, "Report CSV path")->capture_default_str();
  evaluate_cmd->add_option("--out-json", evaluate_json, "Report JSON path (optional)");

  // let --log-level appear after the subcommand name too
  for (CLI::App* sub : {discover_cmd, check_cmd, adapt_cmd, generate_cmd, evaluate_cmd})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*discover_cmd) {
      finish_config(discover_cfg);
      EventLog log = load_log(discover_in);
      if (discover_top_k > 0) log = filter_top_k_variants(log, discover_top_k);
      const PetriNet net =
          discover_with(discover_cfg.config.miner, log, discover_cfg.config, "model_0");
      write_file(fs::path(discover_out) / "net.pnml", serialize(net, NetFormat::Pnml));
      write_file(fs::path(discover_out) / "net.dot", serialize(net, NetFormat::Dot));
      // a manifest makes the output directory usable as a one-model knowledge
      // base for `check` and `adapt`
      write_file(fs::path(discover_out) / "manifest.json",
                 std::string("{\n  \"iterations_run\": 0,\n  \"models\": [\n    {\n") +
                     "      \"model_id\": \"model_0\",\n      \"file\": \"net.pnml\",\n" +
                     "      \"source\": \"baseline_training\",\n      \"iteration_added\": 0,\n" +
                     "      \"cluster_id\": -1,\n      \"trace_count\": " +
                     std::to_string(log.size()) + "\n    }\n  ]\n}\n");
      info("discovered " + std::string(miner_name(discover_cfg.config.miner)) + " model: " +
           std::to_string(net.transitions().size()) + " transitions, " +
           std::to_string(net.places().size()) + " places");
    } else if (*check_cmd) {
      finish_config(check_cfg);
      const EventLog log = load_log(check_in);
      const KnowledgeBase kb = load_knowledge_base(check_kb);
      const DiagnosisMatrix matrix =
          compute_diagnoses(log, kb, check_cfg.config.cost, check_cfg.config.state_budget);
      std::ostringstream csv;
      write_diagnoses_csv(matrix, csv);
      if (check_out == "-") out << csv.str();
      else write_file(check_out, csv.str());
      std::size_t conformant = 0;
      for (const auto& row : matrix.rows)
        if (row.fitness >= check_cfg.config.fitness_threshold) ++conformant;
      info("checked " + std::to_string(matrix.rows.size()) + " traces against " +
           std::to_string(kb.size()) + " models; " + std::to_string(conformant) +
           " conformant at threshold");
    } else if (*adapt_cmd) {
      finish_config(adapt_cfg);
      const EventLog batch = load_log(adapt_in);
      KnowledgeBase kb = load_knowledge_base(adapt_kb);
      const AdaptationOutcome outcome = adapt_iteration(kb, batch, adapt_cfg.config);
      save_knowledge_base(kb, adapt_out_kb);
      const fs::path outcome_path =
          adapt_outcome.empty() ? fs::path(adapt_out_kb) / "outcome.json" : fs::path(adapt_outcome);
      write_file(outcome_path, outcome_to_json(outcome) + "\n");
      info("iteration " + std::to_string(outcome.iteration) + ": " +
           std::to_string(outcome.nonconformant_traces.size()) + " non-conformant traces, " +
           std::to_string(outcome.new_models.size()) + " new models");
    } else if (*generate_cmd) {
      const Benchmark bench = generate_benchmark(generate_spec);
      fs::create_directories(generate_out);
      for (std::size_t i = 0; i < bench.negative_logs.size(); ++i) {
        std::ostringstream csv;
        write_csv(bench.negative_logs[i], csv);
        write_file(fs::path(generate_out) / ("disease_" + std::to_string(i + 1) + ".csv"),
                   csv.str());
      }
      std::ostringstream csv;
      write_csv(bench.positive_log, csv);
      write_file(fs::path(generate_out) / "positive.csv", csv.str());
      info("wrote " + std::to_string(bench.negative_logs.size()) +
           " negative logs and 1 positive log to " + generate_out);
    } else if (*evaluate_cmd) {
      finish_config(evaluate_cfg);
      const ExperimentMode mode =
          evaluate_mode == "baseline" ? ExperimentMode::Baseline : ExperimentMode::Adaptive;
      const auto reports =
          run_experiment(evaluate_spec, evaluate_cfg.config, mode, evaluate_repeats);
      std::ostringstream csv;
      write_reports_csv(reports, csv);
      write_file(evaluate_csv, csv.str());
      if (!evaluate_json.empty())
        write_file(evaluate_json,
                   reports_to_json(reports, evaluate_spec, evaluate_cfg.config) + "\n");
      info("wrote " + std::to_string(reports.size()) + " iteration reports to " + evaluate_csv);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace pathmine::cli
