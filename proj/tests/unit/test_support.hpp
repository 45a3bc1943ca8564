#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pathmine/alignment.hpp"
#include "pathmine/clustering.hpp"
#include "pathmine/discovery.hpp"
#include "pathmine/event_log.hpp"
#include "pathmine/evaluation.hpp"
#include "pathmine/petri_net.hpp"

namespace test_support {

inline pathmine::Trace make_trace(std::string case_id, std::vector<std::string> activities) {
  return {std::move(case_id), std::move(activities)};
}

inline pathmine::EventLog log_of(std::vector<std::vector<std::string>> sequences) {
  std::vector<pathmine::Trace> traces;
  for (std::size_t i = 0; i < sequences.size(); ++i)
    traces.push_back({"c" + std::to_string(i + 1), std::move(sequences[i])});
  return pathmine::make_log(std::move(traces));
}

/// p0 -> a -> p1 -> b -> p2 ... , initial {p0}, final {p_n}
inline pathmine::PetriNet sequence_net(const std::vector<std::string>& labels,
                                       const std::string& model_id = "seq") {
  std::vector<std::string> places;
  std::vector<pathmine::TransitionDef> transitions;
  std::vector<pathmine::Arc> arcs;
  places.push_back("p0");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string t = "t" + std::to_string(i);
    const std::string next = "p" + std::to_string(i + 1);
    places.push_back(next);
    transitions.push_back({t, labels[i]});
    arcs.push_back({places[i], t});
    arcs.push_back({t, next});
  }
  return pathmine::PetriNet(model_id, places, transitions, arcs, {{"p0", 1}},
                            {{places.back(), 1}});
}

// ---- independent alignment oracle -------------------------------------------
// Branch-and-bound over all move sequences; never revisits a (position,
// marking) state on the current path. Deliberately unrelated to the search
// the library uses.

class ExhaustiveAligner {
 public:
  ExhaustiveAligner(const pathmine::PetriNet& net, pathmine::MoveCostSchedule cost = {})
      : cost_(cost) {
    for (const auto& p : net.places()) place_index_[p] = static_cast<int>(places_.size()),
                                       places_.push_back(p);
    for (const auto& t : net.transitions()) {
      TransRec rec;
      rec.silent = t.silent();
      if (t.label) rec.label = *t.label;
      trans_.push_back(rec);
      trans_index_[t.id] = static_cast<int>(trans_.size()) - 1;
    }
    for (const auto& arc : net.arcs()) {
      if (place_index_.count(arc.source))
        trans_[static_cast<std::size_t>(trans_index_.at(arc.target))].pre.push_back(
            place_index_.at(arc.source));
      else
        trans_[static_cast<std::size_t>(trans_index_.at(arc.source))].post.push_back(
            place_index_.at(arc.target));
    }
    initial_.assign(places_.size(), 0);
    final_.assign(places_.size(), 0);
    for (const auto& [p, c] : net.initial_marking()) initial_[static_cast<std::size_t>(place_index_.at(p))] = c;
    for (const auto& [p, c] : net.final_marking()) final_[static_cast<std::size_t>(place_index_.at(p))] = c;
  }

  /// Minimum alignment cost, or +inf when no alignment exists.
  double min_cost(const std::vector<std::string>& trace) {
    best_ = std::numeric_limits<double>::infinity();
    trace_ = &trace;
    std::set<std::pair<std::size_t, std::vector<int>>> on_path;
    explore(0, initial_, 0.0, on_path);
    return best_;
  }

 private:
  struct TransRec {
    bool silent = false;
    std::string label;
    std::vector<int> pre, post;
  };

  void explore(std::size_t pos, const std::vector<int>& marking, double cost,
               std::set<std::pair<std::size_t, std::vector<int>>>& on_path) {
    if (cost >= best_) return;
    if (pos == trace_->size() && marking == final_) {
      best_ = cost;
      return;
    }
    const auto key = std::make_pair(pos, marking);
    if (!on_path.insert(key).second) return;

    for (const auto& t : trans_) {
      bool enabled = true;
      for (int p : t.pre)
        if (marking[static_cast<std::size_t>(p)] < 1) enabled = false;
      if (!enabled) continue;
      std::vector<int> next = marking;
      for (int p : t.pre) --next[static_cast<std::size_t>(p)];
      for (int p : t.post) ++next[static_cast<std::size_t>(p)];
      // synchronous
      if (pos < trace_->size() && !t.silent && t.label == (*trace_)[pos])
        explore(pos + 1, next, cost, on_path);
      // model move
      explore(pos, next, cost + (t.silent ? 0.0 : cost_.model_move_visible), on_path);
    }
    // log move
    if (pos < trace_->size()) explore(pos + 1, marking, cost + cost_.log_move, on_path);

    on_path.erase(key);
  }

  pathmine::MoveCostSchedule cost_;
  std::vector<std::string> places_;
  std::map<std::string, int> place_index_;
  std::vector<TransRec> trans_;
  std::map<std::string, int> trans_index_;
  std::vector<int> initial_, final_;
  const std::vector<std::string>* trace_ = nullptr;
  double best_ = 0.0;
};

// ---- brute-force dbscan reference --------------------------------------------
// Direct transitive closure of density reachability; border points attach to
// their nearest core, exact distance ties resolved by smaller coordinates.

inline pathmine::ClusterLabels brute_force_dbscan(const pathmine::PointSet& points, double eps,
                                                  int min_pts) {
  const std::size_t n = points.vectors.size();
  auto d = [&](std::size_t i, std::size_t j) {
    return pathmine::euclidean_distance(points.vectors[i], points.vectors[j]);
  };
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    int close = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (d(i, j) <= eps) ++close;
    core[i] = close >= min_pts;
  }
  // transitive closure over cores
  std::vector<int> labels(n, -1);
  int gamma = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || labels[i] != -1) continue;
    const int cluster = gamma++;
    std::vector<std::size_t> todo{i};
    labels[i] = cluster;
    while (!todo.empty()) {
      const std::size_t at = todo.back();
      todo.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (core[j] && labels[j] == -1 && d(at, j) <= eps) {
          labels[j] = cluster;
          todo.push_back(j);
        }
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    double best = std::numeric_limits<double>::infinity();
    int cluster = -1;
    const std::vector<double>* coords = nullptr;
    for (std::size_t j = 0; j < n; ++j) {
      if (!core[j] || d(i, j) > eps) continue;
      const bool better = d(i, j) < best ||
                          (d(i, j) == best && coords && points.vectors[j] < *coords);
      if (cluster == -1 || better) {
        best = d(i, j);
        cluster = labels[j];
        coords = &points.vectors[j];
      }
    }
    labels[i] = cluster;
  }
  return {labels, gamma};
}

/// Partition comparison, insensitive to cluster numbering (noise stays -1).
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> a_to_b, b_to_a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    const auto [ita, fresh_a] = a_to_b.try_emplace(a[i], b[i]);
    if (!fresh_a && ita->second != b[i]) return false;
    const auto [itb, fresh_b] = b_to_a.try_emplace(b[i], a[i]);
    if (!fresh_b && itb->second != a[i]) return false;
  }
  return true;
}

// ---- pairwise auc oracle ------------------------------------------------------

inline double pairwise_auc(const std::vector<pathmine::LabeledScore>& scores) {
  std::vector<double> pos, neg;
  for (const auto& s : scores)
    (s.label == pathmine::LabeledScore::Label::Positive ? pos : neg).push_back(s.anomaly_score);
  double wins = 0.0;
  for (double p : pos)
    for (double q : neg) {
      if (p > q) wins += 1.0;
      else if (p == q) wins += 0.5;
    }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// ---- random structures for property tests -------------------------------------

class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }
  double real01() { return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0); }

 private:
  std::mt19937_64 gen_;
};

inline pathmine::ProcessTree random_process_tree(std::vector<std::string> activities,
                                                 TestRng& rng, int depth = 3) {
  using pathmine::ProcessTree;
  if (activities.size() == 1) return ProcessTree::leaf(activities.front());
  if (depth <= 0) {
    std::vector<ProcessTree> leaves;
    for (auto& a : activities) leaves.push_back(ProcessTree::leaf(std::move(a)));
    return ProcessTree::node(ProcessTree::Kind::Seq, std::move(leaves));
  }
  const auto kinds = {ProcessTree::Kind::Seq, ProcessTree::Kind::Xor, ProcessTree::Kind::And,
                      ProcessTree::Kind::Loop};
  const auto kind = *(kinds.begin() + static_cast<std::ptrdiff_t>(rng.below(4)));
  for (std::size_t i = activities.size() - 1; i > 0; --i)
    std::swap(activities[i], activities[rng.below(i + 1)]);
  const std::size_t n_children =
      kind == ProcessTree::Kind::Loop ? 2 : 2 + rng.below(std::min<std::size_t>(3, activities.size() - 1));
  std::vector<std::vector<std::string>> chunks(n_children);
  for (std::size_t i = 0; i < n_children; ++i) chunks[i].push_back(activities[i]);
  for (std::size_t i = n_children; i < activities.size(); ++i)
    chunks[rng.below(n_children)].push_back(activities[i]);
  std::vector<ProcessTree> children;
  for (auto& chunk : chunks)
    children.push_back(random_process_tree(std::move(chunk), rng, depth - 1));
  return ProcessTree::node(kind, std::move(children));
}

inline std::vector<std::string> activity_names(int n, const std::string& prefix = "a") {
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

/// Random walk over the net until the final marking; redo transitions capped
/// so loops terminate.
inline pathmine::Trace random_playout(const pathmine::CompiledTree& compiled,
                                      const std::string& case_id, TestRng& rng) {
  using namespace pathmine;
  Marking marking = compiled.net.initial_marking();
  Trace trace;
  trace.case_id = case_id;
  std::map<std::string, int> redo_fired;
  while (marking != compiled.net.final_marking()) {
    const auto enabled = enabled_transitions(compiled.net, marking);
    std::vector<std::string> pool;
    for (const auto& t : enabled)
      if (!compiled.loop_redo_transitions.count(t) || redo_fired[t] < 3) pool.push_back(t);
    if (pool.empty()) pool.assign(enabled.begin(), enabled.end());
    const std::string chosen = pool[rng.below(pool.size())];
    if (compiled.loop_redo_transitions.count(chosen)) ++redo_fired[chosen];
    marking = fire(compiled.net, marking, chosen);
    const auto* def = compiled.net.find_transition(chosen);
    if (def->label) trace.activities.push_back(*def->label);
  }
  return trace;
}

}  // namespace test_support
