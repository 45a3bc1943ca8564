#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace pathmine {

/// Token counts per place id; absent means zero.
using Marking = std::map<std::string, int>;

struct TransitionDef {
  std::string id;
  std::optional<std::string> label;  // nullopt = silent

  bool silent() const { return !label.has_value(); }
};

struct Arc {
  std::string source;
  std::string target;

  friend bool operator<(const Arc& a, const Arc& b) {
    return a.source != b.source ? a.source < b.source : a.target < b.target;
  }
  friend bool operator==(const Arc& a, const Arc& b) {
    return a.source == b.source && a.target == b.target;
  }
};

/// Labeled Petri net with initial and final markings. Arc weights are 1.
/// Immutable after construction; the constructor validates that arcs connect
/// a place with a transition, markings reference existing places, at least
/// one transition exists, and every node lies on a directed path from an
/// initially marked place to a finally marked place.
class PetriNet {
 public:
  PetriNet(std::string model_id, std::vector<std::string> places,
           std::vector<TransitionDef> transitions, std::vector<Arc> arcs, Marking initial_marking,
           Marking final_marking);

  const std::string& model_id() const { return model_id_; }
  const std::vector<std::string>& places() const { return places_; }
  const std::vector<TransitionDef>& transitions() const { return transitions_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const Marking& initial_marking() const { return initial_marking_; }
  const Marking& final_marking() const { return final_marking_; }

  const TransitionDef* find_transition(const std::string& id) const;
  bool has_place(const std::string& id) const;

  /// Visible labels, sorted.
  std::set<std::string> visible_labels() const;

  /// Structural equality, insensitive to declaration order.
  friend bool operator==(const PetriNet& a, const PetriNet& b);

  /// Same structure with a different id.
  PetriNet with_model_id(std::string id) const;

 private:
  std::string model_id_;
  std::vector<std::string> places_;
  std::vector<TransitionDef> transitions_;
  std::vector<Arc> arcs_;
  Marking initial_marking_;
  Marking final_marking_;
};

/// Transitions whose every input place holds a token under m, sorted by id.
std::set<std::string> enabled_transitions(const PetriNet& net, const Marking& m);

/// Fires t, returning the successor marking; m itself is untouched.
Marking fire(const PetriNet& net, const Marking& m, const std::string& transition_id);

/// Minimum total cost of a firing sequence from the initial to the final
/// marking, charging visible_move_cost per visible transition and nothing
/// for silent ones. Uniform-cost search with visited-state deduplication;
/// exploring more than state_budget markings raises StateBudgetExceeded.
double min_model_cost(const PetriNet& net, double visible_move_cost = 1.0,
                      std::size_t state_budget = 5'000'000);

enum class NetFormat { Pnml, Dot };

/// Deterministic serialization: equal nets produce identical bytes. The
/// final marking is embedded in PNML as a pathmine toolspecific block; DOT
/// draws places as circles, transitions as boxes and silent transitions as
/// black-filled boxes.
std::string serialize(const PetriNet& net, NetFormat format);

PetriNet parse_pnml(std::istream& source);
PetriNet parse_pnml(const std::string& source);

}  // namespace pathmine
