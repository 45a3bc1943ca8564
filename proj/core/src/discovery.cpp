#include "pathmine/discovery.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "pathmine/errors.hpp"

namespace pathmine {

DirectlyFollowsGraph build_dfg(const EventLog& log) {
  if (log.empty()) throw EmptyLog();
  DirectlyFollowsGraph dfg;
  for (const auto& trace : log.traces) {
    const auto& acts = trace.activities;
    for (const auto& a : acts) dfg.nodes.insert(a);
    ++dfg.start_counts[acts.front()];
    ++dfg.end_counts[acts.back()];
    for (std::size_t i = 0; i + 1 < acts.size(); ++i) ++dfg.edge_counts[{acts[i], acts[i + 1]}];
  }
  return dfg;
}

ProcessTree ProcessTree::leaf(std::string activity) {
  ProcessTree t;
  t.kind = Kind::Activity;
  t.activity = std::move(activity);
  return t;
}

ProcessTree ProcessTree::silent() {
  ProcessTree t;
  t.kind = Kind::Silent;
  return t;
}

ProcessTree ProcessTree::node(Kind kind, std::vector<ProcessTree> children) {
  ProcessTree t;
  t.kind = kind;
  t.children = std::move(children);
  return t;
}

std::string to_string(const ProcessTree& tree) {
  switch (tree.kind) {
    case ProcessTree::Kind::Activity: return tree.activity;
    case ProcessTree::Kind::Silent: return "tau";
    default: break;
  }
  const char* name = tree.kind == ProcessTree::Kind::Seq   ? "seq"
                     : tree.kind == ProcessTree::Kind::Xor ? "xor"
                     : tree.kind == ProcessTree::Kind::And ? "and"
                                                           : "loop";
  std::ostringstream out;
  out << name << '(';
  for (std::size_t i = 0; i < tree.children.size(); ++i) {
    if (i) out << ", ";
    out << to_string(tree.children[i]);
  }
  out << ')';
  return out.str();
}

// ---- tree -> net -------------------------------------------------------------

namespace {

class TreeCompiler {
 public:
  CompiledTree run(const ProcessTree& tree, const std::string& model_id) {
    const std::string source = new_place();
    const std::string sink = new_place();
    compile(tree, source, sink);
    Marking initial{{source, 1}};
    Marking final_marking{{sink, 1}};
    PetriNet net(model_id, std::move(places_), std::move(transitions_), std::move(arcs_),
                 std::move(initial), std::move(final_marking));
    return {std::move(net), std::move(redo_entries_)};
  }

 private:
  std::vector<std::string> places_;
  std::vector<TransitionDef> transitions_;
  std::vector<Arc> arcs_;
  std::set<std::string> redo_entries_;
  int place_no_ = 0;
  int trans_no_ = 0;

  std::string new_place() {
    std::string id = "p" + std::to_string(place_no_++);
    places_.push_back(id);
    return id;
  }

  std::string new_transition(std::optional<std::string> label) {
    std::string id = "t" + std::to_string(trans_no_++);
    transitions_.push_back({id, std::move(label)});
    return id;
  }

  void connect(const std::string& in, const std::string& transition, const std::string& out) {
    arcs_.push_back({in, transition});
    arcs_.push_back({transition, out});
  }

  void compile(const ProcessTree& node, const std::string& in, const std::string& out) {
    using Kind = ProcessTree::Kind;
    switch (node.kind) {
      case Kind::Activity:
        connect(in, new_transition(node.activity), out);
        return;
      case Kind::Silent:
        connect(in, new_transition(std::nullopt), out);
        return;
      case Kind::Seq: {
        std::string prev = in;
        for (std::size_t i = 0; i < node.children.size(); ++i) {
          const std::string next = i + 1 == node.children.size() ? out : new_place();
          compile(node.children[i], prev, next);
          prev = next;
        }
        return;
      }
      case Kind::Xor:
        for (const auto& child : node.children) compile(child, in, out);
        return;
      case Kind::And: {
        const std::string split = new_transition(std::nullopt);
        const std::string join = new_transition(std::nullopt);
        arcs_.push_back({in, split});
        arcs_.push_back({join, out});
        for (const auto& child : node.children) {
          const std::string child_in = new_place();
          const std::string child_out = new_place();
          arcs_.push_back({split, child_in});
          compile(child, child_in, child_out);
          arcs_.push_back({child_out, join});
        }
        return;
      }
      case Kind::Loop: {
        const std::string body_in = new_place();
        const std::string body_out = new_place();
        connect(in, new_transition(std::nullopt), body_in);    // enter
        connect(body_out, new_transition(std::nullopt), out);  // exit
        compile(node.children[0], body_in, body_out);
        const std::string redo_in = new_place();
        const std::string redo_enter = new_transition(std::nullopt);
        redo_entries_.insert(redo_enter);
        connect(body_out, redo_enter, redo_in);
        compile(node.children[1], redo_in, body_in);
        return;
      }
    }
  }
};

}  // namespace

CompiledTree compile_tree(const ProcessTree& tree, const std::string& model_id) {
  TreeCompiler compiler;
  return compiler.run(tree, model_id);
}

// ---- inductive miner ---------------------------------------------------------

namespace {

using Seq = std::vector<std::string>;
using Groups = std::vector<std::set<std::string>>;

struct CutGraph {
  std::set<std::string> alphabet;
  std::set<std::pair<std::string, std::string>> edges;
  std::set<std::string> starts;
  std::set<std::string> ends;
};

CutGraph cut_graph(const std::vector<Seq>& traces) {
  CutGraph g;
  for (const auto& t : traces) {
    for (const auto& a : t) g.alphabet.insert(a);
    g.starts.insert(t.front());
    g.ends.insert(t.back());
    for (std::size_t i = 0; i + 1 < t.size(); ++i) g.edges.insert({t[i], t[i + 1]});
  }
  return g;
}

Groups sort_groups(Groups groups) {
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return *a.begin() < *b.begin(); });
  return groups;
}

// connected components of an undirected adjacency relation
Groups components(const std::set<std::string>& nodes,
                  const std::function<bool(const std::string&, const std::string&)>& adjacent) {
  Groups groups;
  std::set<std::string> assigned;
  for (const auto& seed : nodes) {
    if (assigned.count(seed)) continue;
    std::set<std::string> comp{seed};
    std::vector<std::string> frontier{seed};
    assigned.insert(seed);
    while (!frontier.empty()) {
      const std::string cur = std::move(frontier.back());
      frontier.pop_back();
      for (const auto& other : nodes) {
        if (assigned.count(other)) continue;
        if (adjacent(cur, other) || adjacent(other, cur)) {
          assigned.insert(other);
          comp.insert(other);
          frontier.push_back(other);
        }
      }
    }
    groups.push_back(std::move(comp));
  }
  return sort_groups(std::move(groups));
}

std::optional<Groups> xor_cut(const CutGraph& g) {
  auto groups = components(g.alphabet, [&](const std::string& a, const std::string& b) {
    return g.edges.count({a, b}) > 0;
  });
  if (groups.size() < 2) return std::nullopt;
  return groups;
}

// strongly connected components, Tarjan
Groups sccs(const CutGraph& g) {
  std::map<std::string, int> index, lowlink;
  std::vector<std::string> stack;
  std::set<std::string> on_stack;
  Groups result;
  int counter = 0;

  std::function<void(const std::string&)> strongconnect = [&](const std::string& v) {
    index[v] = lowlink[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& w : g.alphabet) {
      if (!g.edges.count({v, w})) continue;
      if (!index.count(w)) {
        strongconnect(w);
        lowlink[v] = std::min(lowlink[v], lowlink[w]);
      } else if (on_stack.count(w)) {
        lowlink[v] = std::min(lowlink[v], index[w]);
      }
    }
    if (lowlink[v] == index[v]) {
      std::set<std::string> comp;
      while (true) {
        const std::string w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.insert(w);
        if (w == v) break;
      }
      result.push_back(std::move(comp));
    }
  };
  for (const auto& v : g.alphabet)
    if (!index.count(v)) strongconnect(v);
  return result;
}

std::optional<Groups> sequence_cut(const CutGraph& g) {
  Groups groups = sccs(g);
  const auto n0 = groups.size();
  if (n0 < 2) return std::nullopt;

  // reachability between groups, rebuilt after every merge
  while (true) {
    const std::size_t n = groups.size();
    std::map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& a : groups[i]) group_of[a] = i;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (const auto& [a, b] : g.edges) {
      const auto i = group_of.at(a), j = group_of.at(b);
      if (i != j) reach[i][j] = true;
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;

    // merge pairs that are unordered (neither reaches the other) or mutually
    // reachable (a cycle introduced by an earlier merge)
    bool merged = false;
    for (std::size_t i = 0; i < n && !merged; ++i) {
      for (std::size_t j = i + 1; j < n && !merged; ++j) {
        if (reach[i][j] == reach[j][i]) {
          groups[i].insert(groups[j].begin(), groups[j].end());
          groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(j));
          merged = true;
        }
      }
    }
    if (!merged) {
      if (n < 2) return std::nullopt;
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return reach[a][b]; });
      Groups sorted;
      for (auto i : order) sorted.push_back(std::move(groups[i]));
      return sorted;
    }
    if (groups.size() < 2) return std::nullopt;
  }
}

std::optional<Groups> parallel_cut(const CutGraph& g) {
  if (g.alphabet.size() < 2) return std::nullopt;
  // components of the negated relation: activities stay together unless they
  // follow each other in both directions
  Groups groups = components(g.alphabet, [&](const std::string& a, const std::string& b) {
    return !(g.edges.count({a, b}) && g.edges.count({b, a}));
  });
  if (groups.size() < 2) return std::nullopt;

  auto sufficient = [&](const std::set<std::string>& group) {
    const bool has_start = std::any_of(group.begin(), group.end(),
                                       [&](const std::string& a) { return g.starts.count(a); });
    const bool has_end = std::any_of(group.begin(), group.end(),
                                     [&](const std::string& a) { return g.ends.count(a); });
    return has_start && has_end;
  };

  // every group needs a start and an end activity; deficient groups are
  // folded into the first group that has both
  Groups kept;
  std::vector<std::set<std::string>> deficient;
  for (auto& group : groups)
    (sufficient(group) ? kept : deficient).push_back(std::move(group));
  if (kept.empty() || (kept.size() < 2 && deficient.empty())) return std::nullopt;
  for (auto& group : deficient) kept.front().insert(group.begin(), group.end());
  if (kept.size() < 2) return std::nullopt;
  return sort_groups(std::move(kept));
}

struct LoopCut {
  std::set<std::string> do_part;
  Groups redo_parts;
};

std::optional<LoopCut> loop_cut(const CutGraph& g) {
  std::set<std::string> do_part;
  do_part.insert(g.starts.begin(), g.starts.end());
  do_part.insert(g.ends.begin(), g.ends.end());
  if (do_part.size() == g.alphabet.size()) return std::nullopt;

  while (true) {
    std::set<std::string> rest;
    for (const auto& a : g.alphabet)
      if (!do_part.count(a)) rest.insert(a);
    if (rest.empty()) return std::nullopt;
    Groups comps = components(rest, [&](const std::string& a, const std::string& b) {
      return g.edges.count({a, b}) > 0;
    });
    // a redo component must re-enter the do-part at start activities and be
    // entered from end activities only
    auto valid = [&](const std::set<std::string>& comp) {
      for (const auto& [a, b] : g.edges) {
        if (comp.count(a) && do_part.count(b) && !g.starts.count(b)) return false;
        if (do_part.count(a) && comp.count(b) && !g.ends.count(a)) return false;
      }
      return true;
    };
    bool changed = false;
    for (const auto& comp : comps) {
      if (!valid(comp)) {
        do_part.insert(comp.begin(), comp.end());
        changed = true;
        break;
      }
    }
    if (!changed) {
      if (comps.empty()) return std::nullopt;
      return LoopCut{std::move(do_part), std::move(comps)};
    }
  }
}

std::vector<std::vector<Seq>> project_split(const std::vector<Seq>& traces, const Groups& groups) {
  std::map<std::string, std::size_t> group_of;
  for (std::size_t i = 0; i < groups.size(); ++i)
    for (const auto& a : groups[i]) group_of[a] = i;
  std::vector<std::vector<Seq>> sublogs(groups.size());
  for (const auto& trace : traces) {
    std::vector<Seq> parts(groups.size());
    for (const auto& a : trace) parts[group_of.at(a)].push_back(a);
    for (std::size_t i = 0; i < groups.size(); ++i) sublogs[i].push_back(std::move(parts[i]));
  }
  return sublogs;
}

ProcessTree inductive(const std::vector<Seq>& traces);

ProcessTree recurse_groups(ProcessTree::Kind kind, const std::vector<std::vector<Seq>>& sublogs) {
  std::vector<ProcessTree> children;
  children.reserve(sublogs.size());
  for (const auto& sublog : sublogs) children.push_back(inductive(sublog));
  return ProcessTree::node(kind, std::move(children));
}

ProcessTree inductive(const std::vector<Seq>& traces) {
  std::vector<Seq> nonempty;
  bool has_empty = false;
  for (const auto& t : traces) {
    if (t.empty()) has_empty = true;
    else nonempty.push_back(t);
  }
  if (nonempty.empty()) return ProcessTree::silent();
  if (has_empty)
    return ProcessTree::node(ProcessTree::Kind::Xor,
                             {ProcessTree::silent(), inductive(nonempty)});

  const CutGraph g = cut_graph(nonempty);
  if (g.alphabet.size() == 1) {
    const bool all_single = std::all_of(nonempty.begin(), nonempty.end(),
                                        [](const Seq& t) { return t.size() == 1; });
    if (all_single) return ProcessTree::leaf(*g.alphabet.begin());
  }

  if (const auto groups = xor_cut(g)) {
    std::map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < groups->size(); ++i)
      for (const auto& a : (*groups)[i]) group_of[a] = i;
    std::vector<std::vector<Seq>> sublogs(groups->size());
    for (const auto& t : nonempty) sublogs[group_of.at(t.front())].push_back(t);
    return recurse_groups(ProcessTree::Kind::Xor, sublogs);
  }
  if (const auto groups = sequence_cut(g))
    return recurse_groups(ProcessTree::Kind::Seq, project_split(nonempty, *groups));
  if (const auto groups = parallel_cut(g))
    return recurse_groups(ProcessTree::Kind::And, project_split(nonempty, *groups));
  if (const auto cut = loop_cut(g)) {
    Groups all_groups;
    all_groups.push_back(cut->do_part);
    for (const auto& r : cut->redo_parts) all_groups.push_back(r);

    std::map<std::string, std::size_t> group_of;
    for (std::size_t i = 0; i < all_groups.size(); ++i)
      for (const auto& a : all_groups[i]) group_of[a] = i;

    std::vector<std::vector<Seq>> sublogs(all_groups.size());
    for (const auto& trace : nonempty) {
      Seq segment;
      std::size_t segment_group = 0;
      for (const auto& a : trace) {
        const std::size_t ga = group_of.at(a);
        if (segment.empty() || ga == segment_group) {
          segment_group = ga;
          segment.push_back(a);
        } else {
          sublogs[segment_group].push_back(std::move(segment));
          segment = {a};
          segment_group = ga;
        }
      }
      sublogs[segment_group].push_back(std::move(segment));
    }

    ProcessTree do_tree = inductive(sublogs[0]);
    std::vector<ProcessTree> redo_trees;
    for (std::size_t i = 1; i < all_groups.size(); ++i)
      redo_trees.push_back(inductive(sublogs[i]));
    ProcessTree redo = redo_trees.size() == 1
                           ? std::move(redo_trees.front())
                           : ProcessTree::node(ProcessTree::Kind::Xor, std::move(redo_trees));
    return ProcessTree::node(ProcessTree::Kind::Loop,
                             {std::move(do_tree), std::move(redo)});
  }

  // fall through: flower model over the alphabet
  ProcessTree body;
  if (g.alphabet.size() == 1) {
    body = ProcessTree::leaf(*g.alphabet.begin());
  } else {
    std::vector<ProcessTree> leaves;
    for (const auto& a : g.alphabet) leaves.push_back(ProcessTree::leaf(a));
    body = ProcessTree::node(ProcessTree::Kind::Xor, std::move(leaves));
  }
  return ProcessTree::node(ProcessTree::Kind::Loop, {ProcessTree::silent(), std::move(body)});
}

// ---- language-preserving simplification ---------------------------------------
// Dense unstructured logs mine to parallel compositions of optional flowers,
// whose synchronous product blows up exponentially during alignment. Every
// rewrite below keeps the language identical: absorbing tau branches that are
// already optional, dropping silent filler from seq/and, and merging sibling
// flowers of an and-node (the shuffle of A* and B* is exactly (A u B)*).

bool accepts_empty(const ProcessTree& t) {
  switch (t.kind) {
    case ProcessTree::Kind::Activity: return false;
    case ProcessTree::Kind::Silent: return true;
    case ProcessTree::Kind::Xor:
      return std::any_of(t.children.begin(), t.children.end(),
                         [](const ProcessTree& c) { return accepts_empty(c); });
    case ProcessTree::Kind::Seq:
    case ProcessTree::Kind::And:
      return std::all_of(t.children.begin(), t.children.end(),
                         [](const ProcessTree& c) { return accepts_empty(c); });
    case ProcessTree::Kind::Loop: return accepts_empty(t.children[0]);
  }
  return false;
}

// loop(tau, a) or loop(tau, xor(a, b, ...)) recognizes any word over its leaves
std::optional<std::set<std::string>> flower_alphabet(const ProcessTree& t) {
  if (t.kind != ProcessTree::Kind::Loop) return std::nullopt;
  if (t.children[0].kind != ProcessTree::Kind::Silent) return std::nullopt;
  const ProcessTree& redo = t.children[1];
  if (redo.kind == ProcessTree::Kind::Activity) return std::set<std::string>{redo.activity};
  if (redo.kind != ProcessTree::Kind::Xor) return std::nullopt;
  std::set<std::string> alphabet;
  for (const auto& c : redo.children) {
    if (c.kind != ProcessTree::Kind::Activity) return std::nullopt;
    alphabet.insert(c.activity);
  }
  return alphabet;
}

ProcessTree make_flower(const std::set<std::string>& alphabet) {
  ProcessTree body;
  if (alphabet.size() == 1) {
    body = ProcessTree::leaf(*alphabet.begin());
  } else {
    std::vector<ProcessTree> leaves;
    for (const auto& a : alphabet) leaves.push_back(ProcessTree::leaf(a));
    body = ProcessTree::node(ProcessTree::Kind::Xor, std::move(leaves));
  }
  return ProcessTree::node(ProcessTree::Kind::Loop, {ProcessTree::silent(), std::move(body)});
}

ProcessTree simplify(ProcessTree t) {
  using Kind = ProcessTree::Kind;
  for (auto& c : t.children) c = simplify(std::move(c));
  if (t.kind == Kind::Activity || t.kind == Kind::Silent) return t;

  if (t.kind == Kind::Loop) {
    if (t.children[0].kind == Kind::Silent && t.children[1].kind == Kind::Silent)
      return ProcessTree::silent();
    return t;
  }

  // seq/xor/and are associative
  std::vector<ProcessTree> flat;
  for (auto& c : t.children) {
    if (c.kind == t.kind) {
      for (auto& grandchild : c.children) flat.push_back(std::move(grandchild));
    } else {
      flat.push_back(std::move(c));
    }
  }

  if (t.kind == Kind::Seq || t.kind == Kind::And) {
    std::vector<ProcessTree> kept;
    for (auto& c : flat)
      if (c.kind != Kind::Silent) kept.push_back(std::move(c));
    flat = std::move(kept);
    if (t.kind == Kind::And) {
      std::size_t flowers = 0;
      for (const auto& c : flat)
        if (flower_alphabet(c)) ++flowers;
      if (flowers >= 2) {
        std::set<std::string> merged;
        std::vector<ProcessTree> rest;
        for (auto& c : flat) {
          if (const auto alphabet = flower_alphabet(c))
            merged.insert(alphabet->begin(), alphabet->end());
          else
            rest.push_back(std::move(c));
        }
        rest.push_back(make_flower(merged));
        flat = std::move(rest);
      }
    }
  } else {  // xor: at most one tau, and none when another branch accepts empty
    bool saw_tau = false;
    std::vector<ProcessTree> kept;
    bool other_accepts_empty = false;
    for (const auto& c : flat)
      if (c.kind != Kind::Silent && accepts_empty(c)) other_accepts_empty = true;
    for (auto& c : flat) {
      if (c.kind == Kind::Silent) {
        if (saw_tau || other_accepts_empty) continue;
        saw_tau = true;
      }
      kept.push_back(std::move(c));
    }
    flat = std::move(kept);
  }

  if (flat.empty()) return ProcessTree::silent();
  if (flat.size() == 1) return std::move(flat.front());
  return ProcessTree::node(t.kind, std::move(flat));
}

}  // namespace

ProcessTree inductive_tree(const EventLog& log) {
  if (log.empty()) throw EmptyLog();
  std::vector<Seq> traces;
  traces.reserve(log.size());
  for (const auto& t : log.traces) traces.push_back(t.activities);
  return simplify(inductive(traces));
}

PetriNet discover_inductive(const EventLog& log, const std::string& model_id) {
  return compile_tree(inductive_tree(log), model_id).net;
}

}  // namespace pathmine
