#include "pathmine/alignment.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <queue>
#include <unordered_map>

#include "csv_util.hpp"
#include "indexed_net.hpp"
#include "pathmine/adaptation.hpp"
#include "pathmine/errors.hpp"

namespace pathmine {

struct Aligner::Impl {
  detail::IndexedNet net;
  MoveCostSchedule cost;
  std::size_t state_budget;
  double min_cost;
  std::string model_ref;
  std::map<std::string, std::vector<int>> transitions_by_label;

  Impl(const PetriNet& source, MoveCostSchedule cost_schedule, std::size_t budget)
      : net(source), cost(cost_schedule), state_budget(budget), model_ref(source.model_id()) {
    if (!(cost.log_move > 0.0) || !(cost.model_move_visible > 0.0))
      throw InvalidArgument("log and visible-model move costs must be positive");
    min_cost = pathmine::min_model_cost(source, cost.model_move_visible);
    for (int i = 0; i < static_cast<int>(net.transitions.size()); ++i) {
      const auto& t = net.transitions[static_cast<std::size_t>(i)];
      if (!t.silent) transitions_by_label[t.label].push_back(i);
    }
  }
};

Aligner::Aligner(const PetriNet& net, MoveCostSchedule cost, std::size_t state_budget)
    : impl_(std::make_unique<Impl>(net, cost, state_budget)) {}

Aligner::~Aligner() = default;
Aligner::Aligner(Aligner&&) noexcept = default;
Aligner& Aligner::operator=(Aligner&&) noexcept = default;

double Aligner::min_model_cost() const { return impl_->min_cost; }
const std::string& Aligner::model_ref() const { return impl_->model_ref; }

namespace {

enum class MoveKind : std::uint8_t { Sync, Model, Log };

struct StateKey {
  int pos;
  std::vector<int> marking;
  bool operator==(const StateKey& other) const {
    return pos == other.pos && marking == other.marking;
  }
};

struct StateKeyHash {
  std::size_t operator()(const StateKey& key) const {
    return detail::MarkingHash{}(key.marking) * 1000003u + static_cast<std::size_t>(key.pos);
  }
};

struct StateRec {
  double cost = 0.0;
  int parent = -1;
  MoveKind kind = MoveKind::Sync;
  int transition = -1;  // for sync/model moves
  bool closed = false;
};

}  // namespace

Alignment Aligner::align(const Trace& trace) const {
  const auto& net = impl_->net;
  const auto& cost = impl_->cost;
  const int n = static_cast<int>(trace.activities.size());

  // admissible lower bound: every remaining trace activity whose label has
  // no transition at all must be consumed by a log move
  std::vector<double> remaining_foreign(static_cast<std::size_t>(n) + 1, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    const bool foreign = impl_->transitions_by_label.find(trace.activities[static_cast<std::size_t>(i)]) ==
                         impl_->transitions_by_label.end();
    remaining_foreign[static_cast<std::size_t>(i)] =
        remaining_foreign[static_cast<std::size_t>(i) + 1] + (foreign ? cost.log_move : 0.0);
  }

  std::unordered_map<StateKey, int, StateKeyHash> state_ids;
  std::vector<StateKey> keys;
  std::vector<StateRec> states;

  auto intern = [&](StateKey key) {
    const auto it = state_ids.find(key);
    if (it != state_ids.end()) return std::pair{it->second, false};
    const int id = static_cast<int>(states.size());
    state_ids.emplace(key, id);
    keys.push_back(std::move(key));
    states.emplace_back();
    return std::pair{id, true};
  };

  // priority = g + h; among equal priorities the newest entry pops first, so
  // the search dives along synchronous paths instead of sweeping whole
  // zero-cost layers of concurrent markings
  struct QueueEntry {
    double priority;
    double cost;  // g alone, without the heuristic
    std::uint64_t seq;
    int state;
    bool operator>(const QueueEntry& other) const {
      return priority != other.priority ? priority > other.priority : seq < other.seq;
    }
  };
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> open;
  std::uint64_t seq = 0;

  const auto [start_id, inserted] = intern({0, net.initial});
  (void)inserted;
  states[static_cast<std::size_t>(start_id)].cost = 0.0;
  open.push({remaining_foreign[0], 0.0, seq++, start_id});

  std::size_t explored = 0;
  int goal = -1;

  auto relax = [&](int from, double move_cost, StateKey next_key, MoveKind kind, int transition) {
    const double next_cost = states[static_cast<std::size_t>(from)].cost + move_cost;
    const double heuristic = remaining_foreign[static_cast<std::size_t>(next_key.pos)];
    const auto [id, fresh] = intern(std::move(next_key));
    auto& rec = states[static_cast<std::size_t>(id)];
    if (fresh || next_cost < rec.cost) {
      if (!fresh && rec.closed) return;  // consistent heuristic: closed states are settled
      rec.cost = next_cost;
      rec.parent = from;
      rec.kind = kind;
      rec.transition = transition;
      open.push({next_cost + heuristic, next_cost, seq++, id});
    }
  };

  while (!open.empty()) {
    const QueueEntry entry = open.top();
    open.pop();
    auto& rec = states[static_cast<std::size_t>(entry.state)];
    if (rec.closed || entry.cost > rec.cost) continue;
    rec.closed = true;
    const StateKey key = keys[static_cast<std::size_t>(entry.state)];

    if (key.pos == n && key.marking == net.final) {
      goal = entry.state;
      break;
    }
    if (++explored > impl_->state_budget) throw StateBudgetExceeded(impl_->state_budget);

    // successors pushed from least to most preferred; the newest-first tie
    // rule then pops synchronous moves before silent, visible and log moves
    if (key.pos < n)
      relax(entry.state, cost.log_move, {key.pos + 1, key.marking}, MoveKind::Log, -1);
    for (int pass = 0; pass < 2; ++pass) {
      const bool want_silent = pass == 1;
      for (int ti = 0; ti < static_cast<int>(net.transitions.size()); ++ti) {
        const auto& t = net.transitions[static_cast<std::size_t>(ti)];
        if (t.silent != want_silent) continue;
        if (!net.enabled(key.marking, t)) continue;
        StateKey next{key.pos, key.marking};
        net.fire_in_place(next.marking, t);
        relax(entry.state, t.silent ? MoveCostSchedule::model_move_silent : cost.model_move_visible,
              std::move(next), MoveKind::Model, ti);
      }
    }
    if (key.pos < n) {
      const auto it = impl_->transitions_by_label.find(trace.activities[static_cast<std::size_t>(key.pos)]);
      if (it != impl_->transitions_by_label.end()) {
        for (int ti : it->second) {
          const auto& t = net.transitions[static_cast<std::size_t>(ti)];
          if (!net.enabled(key.marking, t)) continue;
          StateKey next{key.pos + 1, key.marking};
          net.fire_in_place(next.marking, t);
          relax(entry.state, MoveCostSchedule::synchronous, std::move(next), MoveKind::Sync, ti);
        }
      }
    }
  }

  if (goal < 0) throw FinalMarkingUnreachable();

  Alignment result;
  result.trace_ref = trace.case_id;
  result.model_ref = impl_->model_ref;
  result.cost = states[static_cast<std::size_t>(goal)].cost;
  const double denominator =
      cost.log_move * static_cast<double>(n) + impl_->min_cost;
  result.fitness = 1.0 - result.cost / denominator;

  std::vector<AlignmentMove> moves;
  for (int at = goal; states[static_cast<std::size_t>(at)].parent >= 0;) {
    const auto& rec = states[static_cast<std::size_t>(at)];
    const int parent = rec.parent;
    const int parent_pos = keys[static_cast<std::size_t>(parent)].pos;
    AlignmentMove move;
    if (rec.kind == MoveKind::Sync || rec.kind == MoveKind::Log)
      move.log_activity = trace.activities[static_cast<std::size_t>(parent_pos)];
    if (rec.kind == MoveKind::Sync || rec.kind == MoveKind::Model) {
      const auto& t = net.transitions[static_cast<std::size_t>(rec.transition)];
      move.transition_id = t.id;
      if (!t.silent) move.transition_label = t.label;
    }
    moves.push_back(std::move(move));
    at = parent;
  }
  std::reverse(moves.begin(), moves.end());
  result.moves = std::move(moves);
  return result;
}

Alignment align(const Trace& trace, const PetriNet& net, MoveCostSchedule cost,
                std::size_t state_budget) {
  return Aligner(net, cost, state_budget).align(trace);
}

DiagnosisRow diagnosis_row(const Alignment& alignment,
                           const std::vector<std::string>& column_alphabet) {
  std::map<std::string, std::size_t> column_of;
  for (std::size_t i = 0; i < column_alphabet.size(); ++i) column_of[column_alphabet[i]] = i;

  DiagnosisRow row;
  row.counts.assign(column_alphabet.size(), 0);
  row.fitness = alignment.fitness;
  row.trace_ref = alignment.trace_ref;
  row.model_ref = alignment.model_ref;
  auto bump = [&](const std::string& activity) {
    const auto it = column_of.find(activity);
    if (it == column_of.end()) throw UnknownActivity(activity);
    ++row.counts[it->second];
  };
  for (const auto& move : alignment.moves) {
    if (move.is_log_move()) bump(*move.log_activity);
    else if (move.is_model_move() && move.transition_label) bump(*move.transition_label);
  }
  return row;
}

DiagnosisMatrix compute_diagnoses(const EventLog& log, const KnowledgeBase& kb,
                                  MoveCostSchedule cost, std::size_t state_budget) {
  if (kb.models().empty()) throw EmptyKnowledgeBase();
  if (log.empty()) throw EmptyLog();

  std::set<std::string> columns(log.alphabet.begin(), log.alphabet.end());
  for (const auto& model : kb.models()) {
    const auto labels = model.visible_labels();
    columns.insert(labels.begin(), labels.end());
  }

  DiagnosisMatrix matrix;
  matrix.column_alphabet.assign(columns.begin(), columns.end());

  std::vector<Aligner> aligners;
  aligners.reserve(kb.models().size());
  for (const auto& model : kb.models()) aligners.emplace_back(model, cost, state_budget);

  for (const auto& trace : log.traces) {
    std::optional<Alignment> best;
    for (const auto& aligner : aligners) {
      Alignment candidate;
      try {
        candidate = aligner.align(trace);
      } catch (const Error& e) {
        throw Error(std::string(e.what()) + " (trace '" + trace.case_id + "' vs model '" +
                    aligner.model_ref() + "')");
      }
      if (!best || candidate.fitness > best->fitness) best = std::move(candidate);
    }
    matrix.rows.push_back(diagnosis_row(*best, matrix.column_alphabet));
  }
  return matrix;
}

void write_diagnoses_csv(const DiagnosisMatrix& matrix, std::ostream& out) {
  using detail::csv_escape;
  for (std::size_t i = 0; i < matrix.column_alphabet.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(matrix.column_alphabet[i]);
  }
  if (!matrix.column_alphabet.empty()) out << ',';
  out << "fitness,model_ref\n";
  char buf[32];
  for (const auto& row : matrix.rows) {
    for (int count : row.counts) out << count << ',';
    std::snprintf(buf, sizeof buf, "%.6f", row.fitness);
    out << buf << ',' << csv_escape(row.model_ref) << '\n';
  }
}

}  // namespace pathmine
