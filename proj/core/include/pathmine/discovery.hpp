#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pathmine/event_log.hpp"
#include "pathmine/petri_net.hpp"

namespace pathmine {

struct DirectlyFollowsGraph {
  std::set<std::string> nodes;
  std::map<std::pair<std::string, std::string>, int> edge_counts;
  std::map<std::string, int> start_counts;
  std::map<std::string, int> end_counts;

  int edges(const std::string& a, const std::string& b) const {
    const auto it = edge_counts.find({a, b});
    return it == edge_counts.end() ? 0 : it->second;
  }
};

DirectlyFollowsGraph build_dfg(const EventLog& log);

/// Block-structured process model: activity and silent leaves under
/// SEQ / XOR / AND / LOOP operators. LOOP has exactly two children
/// (do-part, redo-part).
struct ProcessTree {
  enum class Kind { Activity, Silent, Seq, Xor, And, Loop };

  Kind kind = Kind::Silent;
  std::string activity;
  std::vector<ProcessTree> children;

  static ProcessTree leaf(std::string activity);
  static ProcessTree silent();
  static ProcessTree node(Kind kind, std::vector<ProcessTree> children);
};

/// Renders e.g. `seq(a, xor(b, c))`; canonical form used in tests.
std::string to_string(const ProcessTree& tree);

struct CompiledTree {
  PetriNet net;
  std::set<std::string> loop_redo_transitions;  // silent entries into redo parts
};

/// Standard block-wise translation with silent routing transitions.
CompiledTree compile_tree(const ProcessTree& tree, const std::string& model_id);

/// Inductive miner (base variant): recursive DFG cut detection in the order
/// exclusive-choice, sequence, parallel, loop, with a flower-model fallback.
/// Every trace of the input log replays on the result at cost zero.
ProcessTree inductive_tree(const EventLog& log);
PetriNet discover_inductive(const EventLog& log, const std::string& model_id = "im");

struct HeuristicsParams {
  double dependency_threshold = 0.9;
  double and_threshold = 0.65;
  int min_edge_count = 1;
};

/// Dependency graph of a heuristics-miner run: arcs kept by the dependency
/// measure plus the all-activities-connected rescue arcs.
struct DependencyGraph {
  std::set<std::string> nodes;
  std::set<std::pair<std::string, std::string>> arcs;
  std::set<std::string> start_nodes;  // entered from the artificial start
  std::set<std::string> end_nodes;    // exit to the artificial end
};

double dependency_measure(const DirectlyFollowsGraph& dfg, const std::string& a,
                          const std::string& b);

DependencyGraph build_dependency_graph(const DirectlyFollowsGraph& dfg,
                                       const HeuristicsParams& params);

PetriNet discover_heuristics(const EventLog& log, const HeuristicsParams& params = {},
                             const std::string& model_id = "hm");

}  // namespace pathmine
