#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pathmine {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InvalidArgument final : Error {
  explicit InvalidArgument(const std::string& what) : Error("invalid argument: " + what) {}
};

// ---- event log -------------------------------------------------------------

struct MissingColumn final : Error {
  explicit MissingColumn(const std::string& column)
      : Error("missing column: " + column), column(column) {}
  std::string column;
};

struct UnparseableTimestamp final : Error {
  UnparseableTimestamp(std::size_t row, const std::string& text)
      : Error("unparseable timestamp at row " + std::to_string(row) + ": '" + text + "'"),
        row(row) {}
  std::size_t row;
};

struct EmptyLog final : Error {
  EmptyLog() : Error("event log contains no traces") {}
};

struct MalformedXml final : Error {
  MalformedXml(std::size_t position, const std::string& detail)
      : Error("malformed xml at offset " + std::to_string(position) + ": " + detail),
        position(position) {}
  std::size_t position;
};

struct MissingConceptName final : Error {
  explicit MissingConceptName(std::size_t event_index)
      : Error("event " + std::to_string(event_index) + " has no concept:name"),
        event_index(event_index) {}
  std::size_t event_index;
};

struct DegenerateSplit final : Error {
  DegenerateSplit() : Error("split would leave one side empty") {}
};

// ---- petri net -------------------------------------------------------------

struct InvalidNet final : Error {
  explicit InvalidNet(const std::string& what) : Error("invalid net: " + what) {}
};

struct UnknownPlace final : Error {
  explicit UnknownPlace(const std::string& place)
      : Error("unknown place: " + place), place(place) {}
  std::string place;
};

struct NotEnabled final : Error {
  explicit NotEnabled(const std::string& transition)
      : Error("transition not enabled: " + transition), transition(transition) {}
  std::string transition;
};

struct FinalMarkingUnreachable final : Error {
  FinalMarkingUnreachable() : Error("final marking is not reachable from the initial marking") {}
};

struct MalformedPnml final : Error {
  explicit MalformedPnml(const std::string& detail) : Error("malformed pnml: " + detail) {}
};

struct MissingMarking final : Error {
  explicit MissingMarking(const std::string& which)
      : Error("pnml is missing the " + which + " marking") {}
};

// ---- alignment -------------------------------------------------------------

struct StateBudgetExceeded final : Error {
  explicit StateBudgetExceeded(std::size_t limit)
      : Error("alignment search exceeded the state budget of " + std::to_string(limit)),
        limit(limit) {}
  std::size_t limit;
};

struct UnknownActivity final : Error {
  explicit UnknownActivity(const std::string& activity)
      : Error("activity not in column alphabet: " + activity), activity(activity) {}
  std::string activity;
};

struct EmptyKnowledgeBase final : Error {
  EmptyKnowledgeBase() : Error("empty knowledge base") {}
};

// ---- clustering ------------------------------------------------------------

struct EmptyPointSet final : Error {
  EmptyPointSet() : Error("point set is empty") {}
};

struct LengthMismatch final : Error {
  LengthMismatch(std::size_t labels, std::size_t traces)
      : Error("label count " + std::to_string(labels) + " does not match trace count " +
              std::to_string(traces)) {}
};

// ---- evaluation ------------------------------------------------------------

struct SingleClass final : Error {
  SingleClass() : Error("auc needs at least one positive and one negative score") {}
};

struct InvalidSpec final : Error {
  explicit InvalidSpec(const std::string& what) : Error("invalid generator spec: " + what) {}
};

// ---- io --------------------------------------------------------------------

struct IoError final : Error {
  explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

}  // namespace pathmine
