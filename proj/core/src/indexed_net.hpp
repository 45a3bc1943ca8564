#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pathmine/petri_net.hpp"

namespace pathmine::detail {

/// Dense-index view of a PetriNet for state-space search. Place and
/// transition order is the sorted id order, so anything derived from it is
/// deterministic.
struct IndexedNet {
  struct Trans {
    std::string id;
    std::string label;  // empty = silent
    bool silent = false;
    std::vector<int> pre;   // input place indices, sorted
    std::vector<int> post;  // output place indices, sorted
  };

  std::vector<std::string> place_ids;
  std::map<std::string, int> place_index;
  std::vector<Trans> transitions;
  std::vector<int> initial;
  std::vector<int> final;

  explicit IndexedNet(const PetriNet& net);

  bool enabled(const std::vector<int>& marking, const Trans& t) const {
    for (int p : t.pre)
      if (marking[static_cast<std::size_t>(p)] < 1) return false;
    return true;
  }

  void fire_in_place(std::vector<int>& marking, const Trans& t) const {
    for (int p : t.pre) --marking[static_cast<std::size_t>(p)];
    for (int p : t.post) ++marking[static_cast<std::size_t>(p)];
  }
};

struct MarkingHash {
  std::size_t operator()(const std::vector<int>& m) const {
    std::uint64_t h = 14695981039346656037ull;
    for (int v : m) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace pathmine::detail
