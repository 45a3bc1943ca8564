#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "pathmine/discovery.hpp"
#include "pathmine/errors.hpp"

namespace pathmine {

double dependency_measure(const DirectlyFollowsGraph& dfg, const std::string& a,
                          const std::string& b) {
  const double ab = dfg.edges(a, b);
  const double ba = dfg.edges(b, a);
  return (ab - ba) / (ab + ba + 1.0);
}

namespace {

std::set<std::pair<std::string, std::string>> threshold_arcs(const DirectlyFollowsGraph& dfg,
                                                             const HeuristicsParams& params) {
  std::set<std::pair<std::string, std::string>> arcs;
  for (const auto& [edge, count] : dfg.edge_counts) {
    if (count < params.min_edge_count) continue;
    if (dependency_measure(dfg, edge.first, edge.second) >= params.dependency_threshold)
      arcs.insert(edge);
  }
  return arcs;
}

std::set<std::string> reachable(const std::set<std::string>& seeds,
                                const std::set<std::pair<std::string, std::string>>& arcs,
                                bool forward) {
  std::set<std::string> seen = seeds;
  std::vector<std::string> frontier(seeds.begin(), seeds.end());
  while (!frontier.empty()) {
    const std::string node = std::move(frontier.back());
    frontier.pop_back();
    for (const auto& [a, b] : arcs) {
      const std::string& from = forward ? a : b;
      const std::string& to = forward ? b : a;
      if (from == node && seen.insert(to).second) frontier.push_back(to);
    }
  }
  return seen;
}

}  // namespace

DependencyGraph build_dependency_graph(const DirectlyFollowsGraph& dfg,
                                       const HeuristicsParams& params) {
  DependencyGraph graph;
  graph.nodes = dfg.nodes;
  graph.arcs = threshold_arcs(dfg, params);
  for (const auto& [a, count] : dfg.start_counts)
    if (count > 0) graph.start_nodes.insert(a);
  for (const auto& [a, count] : dfg.end_counts)
    if (count > 0) graph.end_nodes.insert(a);

  // all-activities-connected: every non-start node keeps its best incoming
  // arc, every non-end node its best outgoing arc
  for (const auto& node : graph.nodes) {
    if (!graph.start_nodes.count(node)) {
      std::optional<std::string> best;
      double best_dep = 0.0;
      for (const auto& [edge, count] : dfg.edge_counts) {
        if (edge.second != node || edge.first == node) continue;
        const double dep = dependency_measure(dfg, edge.first, node);
        if (!best || dep > best_dep || (dep == best_dep && edge.first < *best)) {
          best = edge.first;
          best_dep = dep;
        }
      }
      if (best) graph.arcs.insert({*best, node});
    }
    if (!graph.end_nodes.count(node)) {
      std::optional<std::string> best;
      double best_dep = 0.0;
      for (const auto& [edge, count] : dfg.edge_counts) {
        if (edge.first != node || edge.second == node) continue;
        const double dep = dependency_measure(dfg, node, edge.second);
        if (!best || dep > best_dep || (dep == best_dep && edge.second < *best)) {
          best = edge.second;
          best_dep = dep;
        }
      }
      if (best) graph.arcs.insert({node, *best});
    }
  }

  // nodes the pruning left unreachable from a start (or unable to reach an
  // end) are wired to the artificial start/end transitions
  const auto from_start = reachable(graph.start_nodes, graph.arcs, true);
  for (const auto& node : graph.nodes)
    if (!from_start.count(node)) graph.start_nodes.insert(node);
  const auto to_end = reachable(graph.end_nodes, graph.arcs, false);
  for (const auto& node : graph.nodes)
    if (!to_end.count(node)) graph.end_nodes.insert(node);
  return graph;
}

namespace {

double and_split_measure(const DirectlyFollowsGraph& dfg, const std::string& source,
                         const std::string& x, const std::string& y) {
  const double xy = dfg.edges(x, y);
  const double yx = dfg.edges(y, x);
  const double sx = dfg.edges(source, x);
  const double sy = dfg.edges(source, y);
  return (xy + yx) / (sx + sy + 1.0);
}

double and_join_measure(const DirectlyFollowsGraph& dfg, const std::string& target,
                        const std::string& x, const std::string& y) {
  const double xy = dfg.edges(x, y);
  const double yx = dfg.edges(y, x);
  const double xt = dfg.edges(x, target);
  const double yt = dfg.edges(y, target);
  return (xy + yx) / (xt + yt + 1.0);
}

// partitions `partners` into groups whose pairwise measure clears the
// threshold (transitive merge); with use_and=false everything is a singleton
std::vector<std::vector<std::string>> and_groups(
    const std::vector<std::string>& partners, bool use_and,
    const std::function<double(const std::string&, const std::string&)>& measure,
    double threshold) {
  std::vector<std::vector<std::string>> groups;
  std::vector<int> group_of(partners.size(), -1);
  for (std::size_t i = 0; i < partners.size(); ++i) {
    if (group_of[i] >= 0) continue;
    const int id = static_cast<int>(groups.size());
    groups.push_back({partners[i]});
    group_of[i] = id;
    if (!use_and) continue;
    for (std::size_t j = i + 1; j < partners.size(); ++j) {
      if (group_of[j] >= 0) continue;
      const bool joins = std::any_of(groups[static_cast<std::size_t>(id)].begin(),
                                     groups[static_cast<std::size_t>(id)].end(),
                                     [&](const std::string& member) {
                                       return measure(member, partners[j]) >= threshold;
                                     });
      if (joins) {
        groups[static_cast<std::size_t>(id)].push_back(partners[j]);
        group_of[j] = id;
      }
    }
  }
  return groups;
}

PetriNet compile_dependency_graph(const DependencyGraph& graph, const DirectlyFollowsGraph& dfg,
                                  const HeuristicsParams& params, bool use_and,
                                  const std::string& model_id) {
  std::vector<std::string> places;
  std::vector<TransitionDef> transitions;
  std::vector<Arc> arcs;
  int silent_no = 0;

  auto add_place = [&](const std::string& id) {
    places.push_back(id);
    return id;
  };
  auto add_silent = [&]() {
    std::string id = "s" + std::to_string(silent_no++);
    transitions.push_back({id, std::nullopt});
    return id;
  };

  const std::string p_initial = add_place("p_initial");
  const std::string p_final = add_place("p_final");
  const std::string p_start_hub = add_place("p_start");
  const std::string p_end_hub = add_place("p_end");
  {
    transitions.push_back({"t_start", std::nullopt});
    arcs.push_back({p_initial, "t_start"});
    arcs.push_back({"t_start", p_start_hub});
    transitions.push_back({"t_end", std::nullopt});
    arcs.push_back({p_end_hub, "t_end"});
    arcs.push_back({"t_end", p_final});
  }

  // one place per dependency arc
  std::map<std::pair<std::string, std::string>, std::string> arc_place;
  int arc_no = 0;
  for (const auto& arc : graph.arcs)
    arc_place[arc] = add_place("q" + std::to_string(arc_no++));

  std::map<std::string, std::string> activity_transition;
  int act_no = 0;
  for (const auto& node : graph.nodes) {
    std::string id = "a" + std::to_string(act_no++);
    transitions.push_back({id, node});
    activity_transition[node] = id;
  }

  for (const auto& node : graph.nodes) {
    const std::string& t_act = activity_transition.at(node);

    std::vector<std::string> predecessors, successors;
    for (const auto& [a, b] : graph.arcs) {
      if (b == node) predecessors.push_back(a);
      if (a == node) successors.push_back(b);
    }

    auto join_measure = [&](const std::string& x, const std::string& y) {
      return and_join_measure(dfg, node, x, y);
    };
    auto split_measure = [&](const std::string& x, const std::string& y) {
      return and_split_measure(dfg, node, x, y);
    };

    // input side: one silent join per predecessor group, plus the start hub
    std::vector<std::vector<std::string>> pred_groups =
        and_groups(predecessors, use_and, join_measure, params.and_threshold);
    std::vector<std::vector<std::string>> input_options = pred_groups;
    if (graph.start_nodes.count(node)) input_options.push_back({});  // {} = start hub

    if (input_options.size() == 1 && input_options[0].size() <= 1) {
      const std::string& source = input_options[0].empty()
                                      ? p_start_hub
                                      : arc_place.at({input_options[0][0], node});
      arcs.push_back({source, t_act});
    } else {
      const std::string in_place = add_place("i_" + t_act);
      arcs.push_back({in_place, t_act});
      for (const auto& group : input_options) {
        const std::string join = add_silent();
        arcs.push_back({join, in_place});
        if (group.empty()) {
          arcs.push_back({p_start_hub, join});
        } else {
          for (const auto& pred : group) arcs.push_back({arc_place.at({pred, node}), join});
        }
      }
    }

    // output side, mirrored
    std::vector<std::vector<std::string>> succ_groups =
        and_groups(successors, use_and, split_measure, params.and_threshold);
    std::vector<std::vector<std::string>> output_options = succ_groups;
    if (graph.end_nodes.count(node)) output_options.push_back({});  // {} = end hub

    if (output_options.size() == 1 && output_options[0].size() <= 1) {
      const std::string& target = output_options[0].empty()
                                      ? p_end_hub
                                      : arc_place.at({node, output_options[0][0]});
      arcs.push_back({t_act, target});
    } else {
      const std::string out_place = add_place("o_" + t_act);
      arcs.push_back({t_act, out_place});
      for (const auto& group : output_options) {
        const std::string split = add_silent();
        arcs.push_back({out_place, split});
        if (group.empty()) {
          arcs.push_back({split, p_end_hub});
        } else {
          for (const auto& succ : group) arcs.push_back({split, arc_place.at({node, succ})});
        }
      }
    }
  }

  return PetriNet(model_id, std::move(places), std::move(transitions), std::move(arcs),
                  Marking{{p_initial, 1}}, Marking{{p_final, 1}});
}

}  // namespace

PetriNet discover_heuristics(const EventLog& log, const HeuristicsParams& params,
                             const std::string& model_id) {
  const DirectlyFollowsGraph dfg = build_dfg(log);
  const DependencyGraph graph = build_dependency_graph(dfg, params);

  PetriNet net = compile_dependency_graph(graph, dfg, params, true, model_id);
  try {
    min_model_cost(net, 1.0, 200'000);
    return net;
  } catch (const Error&) {
    // concurrent splits that never reconverge leave tokens behind; the
    // choice-only compilation is a single-token state machine and always
    // reaches the final marking
    return compile_dependency_graph(graph, dfg, params, false, model_id);
  }
}

}  // namespace pathmine
