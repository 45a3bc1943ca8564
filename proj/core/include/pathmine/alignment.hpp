#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pathmine/event_log.hpp"
#include "pathmine/petri_net.hpp"

namespace pathmine {

/// Move costs for alignment search. Synchronous and silent-model moves are
/// free by definition; log and visible-model moves must cost more than zero.
struct MoveCostSchedule {
  double log_move = 1.0;
  double model_move_visible = 1.0;

  static constexpr double model_move_silent = 0.0;
  static constexpr double synchronous = 0.0;
};

/// One row of an alignment: a log activity, a model transition, or both
/// (synchronous). Never both absent.
struct AlignmentMove {
  std::optional<std::string> log_activity;       // nullopt = gap
  std::optional<std::string> transition_id;      // nullopt = gap
  std::optional<std::string> transition_label;   // nullopt when silent or gap

  bool is_synchronous() const { return log_activity && transition_id; }
  bool is_log_move() const { return log_activity && !transition_id; }
  bool is_model_move() const { return !log_activity && transition_id; }
  bool is_silent_model_move() const { return is_model_move() && !transition_label; }
};

struct Alignment {
  std::vector<AlignmentMove> moves;
  double cost = 0.0;
  double fitness = 0.0;
  std::string trace_ref;
  std::string model_ref;
};

/// Reusable aligner for one net: the net is indexed and its minimum model
/// cost computed once, then traces can be aligned against it repeatedly.
/// Safe to share across threads once constructed.
class Aligner {
 public:
  Aligner(const PetriNet& net, MoveCostSchedule cost = {},
          std::size_t state_budget = 2'000'000);
  ~Aligner();
  Aligner(Aligner&&) noexcept;
  Aligner& operator=(Aligner&&) noexcept;

  /// Cost-optimal alignment via A* over the synchronous product. The
  /// admissible heuristic counts remaining trace activities the net cannot
  /// mirror; equal-cost paths prefer synchronous, then silent-model, then
  /// visible-model, then log moves.
  Alignment align(const Trace& trace) const;

  double min_model_cost() const;
  const std::string& model_ref() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot convenience wrapper around Aligner.
Alignment align(const Trace& trace, const PetriNet& net, MoveCostSchedule cost = {},
                std::size_t state_budget = 2'000'000);

/// Per-activity mismatch counts of one trace against one model, over a fixed
/// column alphabet, plus the fitness of the underlying alignment.
struct DiagnosisRow {
  std::vector<int> counts;  // parallel to the matrix column alphabet
  double fitness = 0.0;
  std::string trace_ref;
  std::string model_ref;
};

struct DiagnosisMatrix {
  std::vector<std::string> column_alphabet;  // sorted
  std::vector<DiagnosisRow> rows;            // one per trace, input order
};

/// counts[a] = log moves on a + visible model moves on a; synchronous and
/// silent moves contribute nothing.
DiagnosisRow diagnosis_row(const Alignment& alignment,
                           const std::vector<std::string>& column_alphabet);

class KnowledgeBase;  // adaptation module

/// Aligns every trace against every model and keeps, per trace, the
/// diagnosis with the strictly greatest fitness; on ties the model inserted
/// earlier wins. Columns are the sorted union of the log alphabet and all
/// model labels.
DiagnosisMatrix compute_diagnoses(const EventLog& log, const KnowledgeBase& kb,
                                  MoveCostSchedule cost = {},
                                  std::size_t state_budget = 2'000'000);

/// Header row is the column alphabet plus `fitness` and `model_ref`.
void write_diagnoses_csv(const DiagnosisMatrix& matrix, std::ostream& out);

}  // namespace pathmine
