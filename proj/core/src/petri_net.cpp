#include "pathmine/petri_net.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <queue>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "indexed_net.hpp"
#include "pathmine/errors.hpp"
#include "xml_reader.hpp"

namespace pathmine {

namespace {

Marking normalized(Marking m) {
  for (auto it = m.begin(); it != m.end();)
    it = it->second == 0 ? m.erase(it) : std::next(it);
  return m;
}

}  // namespace

PetriNet::PetriNet(std::string model_id, std::vector<std::string> places,
                   std::vector<TransitionDef> transitions, std::vector<Arc> arcs,
                   Marking initial_marking, Marking final_marking)
    : model_id_(std::move(model_id)),
      places_(std::move(places)),
      transitions_(std::move(transitions)),
      arcs_(std::move(arcs)),
      initial_marking_(normalized(std::move(initial_marking))),
      final_marking_(normalized(std::move(final_marking))) {
  if (transitions_.empty()) throw InvalidNet("no transitions");

  std::set<std::string> place_set(places_.begin(), places_.end());
  if (place_set.size() != places_.size()) throw InvalidNet("duplicate place id");
  std::set<std::string> transition_set;
  for (const auto& t : transitions_) {
    if (t.label && t.label->empty()) throw InvalidNet("empty label on transition " + t.id);
    if (!transition_set.insert(t.id).second) throw InvalidNet("duplicate transition id " + t.id);
    if (place_set.count(t.id)) throw InvalidNet("id used for both place and transition: " + t.id);
  }

  for (const auto& arc : arcs_) {
    const bool ps = place_set.count(arc.source) > 0;
    const bool ts = transition_set.count(arc.source) > 0;
    const bool pt = place_set.count(arc.target) > 0;
    const bool tt = transition_set.count(arc.target) > 0;
    if (!((ps && tt) || (ts && pt)))
      throw InvalidNet("arc " + arc.source + " -> " + arc.target +
                       " does not connect a place with a transition");
  }

  for (const auto& [place, count] : initial_marking_) {
    if (!place_set.count(place)) throw InvalidNet("initial marking references " + place);
    if (count < 0) throw InvalidNet("negative token count");
  }
  for (const auto& [place, count] : final_marking_) {
    if (!place_set.count(place)) throw InvalidNet("final marking references " + place);
    if (count < 0) throw InvalidNet("negative token count");
  }
  if (initial_marking_.empty()) throw InvalidNet("no initially marked place");
  if (final_marking_.empty()) throw InvalidNet("no finally marked place");

  // connectedness: every node forward-reachable from a marked-initial place
  // and backward-reachable from a marked-final place
  std::map<std::string, std::vector<std::string>> succ, pred;
  for (const auto& arc : arcs_) {
    succ[arc.source].push_back(arc.target);
    pred[arc.target].push_back(arc.source);
  }
  auto closure = [](const std::map<std::string, std::vector<std::string>>& edges,
                    std::vector<std::string> frontier) {
    std::set<std::string> seen(frontier.begin(), frontier.end());
    while (!frontier.empty()) {
      const std::string node = std::move(frontier.back());
      frontier.pop_back();
      const auto it = edges.find(node);
      if (it == edges.end()) continue;
      for (const auto& next : it->second)
        if (seen.insert(next).second) frontier.push_back(next);
    }
    return seen;
  };
  std::vector<std::string> initial_places, final_places;
  for (const auto& [p, c] : initial_marking_) initial_places.push_back(p);
  for (const auto& [p, c] : final_marking_) final_places.push_back(p);
  const auto forward = closure(succ, initial_places);
  const auto backward = closure(pred, final_places);
  auto check = [&](const std::string& id) {
    if (!forward.count(id) || !backward.count(id))
      throw InvalidNet("node " + id + " is not on a path from the initial to the final marking");
  };
  for (const auto& p : places_) check(p);
  for (const auto& t : transitions_) check(t.id);
}

const TransitionDef* PetriNet::find_transition(const std::string& id) const {
  for (const auto& t : transitions_)
    if (t.id == id) return &t;
  return nullptr;
}

bool PetriNet::has_place(const std::string& id) const {
  return std::find(places_.begin(), places_.end(), id) != places_.end();
}

std::set<std::string> PetriNet::visible_labels() const {
  std::set<std::string> labels;
  for (const auto& t : transitions_)
    if (t.label) labels.insert(*t.label);
  return labels;
}

bool operator==(const PetriNet& a, const PetriNet& b) {
  auto sorted_places = [](const PetriNet& n) {
    auto p = n.places_;
    std::sort(p.begin(), p.end());
    return p;
  };
  auto sorted_transitions = [](const PetriNet& n) {
    std::vector<std::pair<std::string, std::optional<std::string>>> t;
    for (const auto& tr : n.transitions_) t.emplace_back(tr.id, tr.label);
    std::sort(t.begin(), t.end());
    return t;
  };
  auto sorted_arcs = [](const PetriNet& n) {
    auto a2 = n.arcs_;
    std::sort(a2.begin(), a2.end());
    return a2;
  };
  return a.model_id_ == b.model_id_ && sorted_places(a) == sorted_places(b) &&
         sorted_transitions(a) == sorted_transitions(b) && sorted_arcs(a) == sorted_arcs(b) &&
         a.initial_marking_ == b.initial_marking_ && a.final_marking_ == b.final_marking_;
}

PetriNet PetriNet::with_model_id(std::string id) const {
  return PetriNet(std::move(id), places_, transitions_, arcs_, initial_marking_, final_marking_);
}

std::set<std::string> enabled_transitions(const PetriNet& net, const Marking& m) {
  for (const auto& [place, count] : m)
    if (!net.has_place(place)) throw UnknownPlace(place);
  auto tokens = [&m](const std::string& place) {
    const auto it = m.find(place);
    return it == m.end() ? 0 : it->second;
  };
  std::set<std::string> enabled;
  for (const auto& t : net.transitions()) {
    bool ok = true;
    for (const auto& arc : net.arcs()) {
      if (arc.target == t.id && tokens(arc.source) < 1) {
        ok = false;
        break;
      }
    }
    if (ok) enabled.insert(t.id);
  }
  return enabled;
}

Marking fire(const PetriNet& net, const Marking& m, const std::string& transition_id) {
  if (!enabled_transitions(net, m).count(transition_id)) throw NotEnabled(transition_id);
  Marking next = m;
  for (const auto& arc : net.arcs()) {
    if (arc.target == transition_id) --next[arc.source];
    if (arc.source == transition_id) ++next[arc.target];
  }
  return normalized(std::move(next));
}

namespace detail {

IndexedNet::IndexedNet(const PetriNet& net) {
  place_ids = net.places();
  std::sort(place_ids.begin(), place_ids.end());
  for (std::size_t i = 0; i < place_ids.size(); ++i)
    place_index[place_ids[i]] = static_cast<int>(i);

  std::vector<TransitionDef> defs = net.transitions();
  std::sort(defs.begin(), defs.end(),
            [](const TransitionDef& a, const TransitionDef& b) { return a.id < b.id; });
  std::map<std::string, int> transition_index;
  transitions.reserve(defs.size());
  for (const auto& def : defs) {
    Trans t;
    t.id = def.id;
    t.silent = def.silent();
    if (def.label) t.label = *def.label;
    transition_index[def.id] = static_cast<int>(transitions.size());
    transitions.push_back(std::move(t));
  }
  for (const auto& arc : net.arcs()) {
    const auto src_place = place_index.find(arc.source);
    if (src_place != place_index.end()) {
      transitions[static_cast<std::size_t>(transition_index.at(arc.target))].pre.push_back(
          src_place->second);
    } else {
      transitions[static_cast<std::size_t>(transition_index.at(arc.source))].post.push_back(
          place_index.at(arc.target));
    }
  }
  for (auto& t : transitions) {
    std::sort(t.pre.begin(), t.pre.end());
    std::sort(t.post.begin(), t.post.end());
  }
  initial.assign(place_ids.size(), 0);
  final.assign(place_ids.size(), 0);
  for (const auto& [p, c] : net.initial_marking()) initial[static_cast<std::size_t>(place_index.at(p))] = c;
  for (const auto& [p, c] : net.final_marking()) final[static_cast<std::size_t>(place_index.at(p))] = c;
}

}  // namespace detail

double min_model_cost(const PetriNet& net, double visible_move_cost, std::size_t state_budget) {
  const detail::IndexedNet indexed(net);

  using State = std::vector<int>;
  struct QueueEntry {
    double cost;
    std::size_t seq;
    State marking;
    bool operator>(const QueueEntry& other) const {
      return cost != other.cost ? cost > other.cost : seq > other.seq;
    }
  };
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> open;
  std::unordered_map<State, double, detail::MarkingHash> best;
  std::size_t seq = 0;
  open.push({0.0, seq++, indexed.initial});
  best[indexed.initial] = 0.0;
  std::size_t explored = 0;

  while (!open.empty()) {
    QueueEntry entry = open.top();
    open.pop();
    const double cost = entry.cost;
    const State& marking = entry.marking;
    const auto it = best.find(marking);
    if (it != best.end() && cost > it->second) continue;
    if (marking == indexed.final) return cost;
    if (++explored > state_budget) throw StateBudgetExceeded(state_budget);
    for (const auto& t : indexed.transitions) {
      if (!indexed.enabled(marking, t)) continue;
      State next = marking;
      indexed.fire_in_place(next, t);
      const double next_cost = cost + (t.silent ? 0.0 : visible_move_cost);
      const auto found = best.find(next);
      if (found == best.end() || next_cost < found->second) {
        best[next] = next_cost;
        open.push({next_cost, seq++, std::move(next)});
      }
    }
  }
  throw FinalMarkingUnreachable();
}

// ---- serialization ----------------------------------------------------------

namespace {

std::string to_pnml(const PetriNet& net) {
  using detail::xml_escape;
  auto places = net.places();
  std::sort(places.begin(), places.end());
  auto transitions = net.transitions();
  std::sort(transitions.begin(), transitions.end(),
            [](const TransitionDef& a, const TransitionDef& b) { return a.id < b.id; });
  auto arcs = net.arcs();
  std::sort(arcs.begin(), arcs.end());

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<pnml>\n";
  out << "  <net id=\"" << xml_escape(net.model_id())
      << "\" type=\"http://www.pnml.org/version-2009/grammar/ptnet\">\n";
  out << "    <page id=\"page0\">\n";
  for (const auto& p : places) {
    out << "      <place id=\"" << xml_escape(p) << "\">";
    const auto it = net.initial_marking().find(p);
    if (it != net.initial_marking().end())
      out << "<initialMarking><text>" << it->second << "</text></initialMarking>";
    out << "</place>\n";
  }
  for (const auto& t : transitions) {
    out << "      <transition id=\"" << xml_escape(t.id) << "\">";
    if (t.label) out << "<name><text>" << xml_escape(*t.label) << "</text></name>";
    out << "</transition>\n";
  }
  std::size_t arc_no = 0;
  for (const auto& a : arcs) {
    out << "      <arc id=\"a" << arc_no++ << "\" source=\"" << xml_escape(a.source)
        << "\" target=\"" << xml_escape(a.target) << "\"/>\n";
  }
  out << "    </page>\n";
  out << "    <toolspecific tool=\"pathmine\" version=\"1.0\">\n";
  out << "      <finalMarking>\n";
  for (const auto& [p, c] : net.final_marking())
    out << "        <place idref=\"" << xml_escape(p) << "\"><text>" << c << "</text></place>\n";
  out << "      </finalMarking>\n";
  out << "    </toolspecific>\n";
  out << "  </net>\n";
  out << "</pnml>\n";
  return out.str();
}

std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string to_dot(const PetriNet& net) {
  auto places = net.places();
  std::sort(places.begin(), places.end());
  auto transitions = net.transitions();
  std::sort(transitions.begin(), transitions.end(),
            [](const TransitionDef& a, const TransitionDef& b) { return a.id < b.id; });
  auto arcs = net.arcs();
  std::sort(arcs.begin(), arcs.end());

  std::ostringstream out;
  out << "digraph " << dot_quote(net.model_id()) << " {\n";
  out << "  rankdir=LR;\n";
  for (const auto& p : places) {
    out << "  " << dot_quote(p) << " [shape=circle, label=" << dot_quote("") << "];\n";
  }
  for (const auto& t : transitions) {
    if (t.label) {
      out << "  " << dot_quote(t.id) << " [shape=box, label=" << dot_quote(*t.label) << "];\n";
    } else {
      out << "  " << dot_quote(t.id)
          << " [shape=box, style=filled, fillcolor=black, label=\"\"];\n";
    }
  }
  for (const auto& a : arcs)
    out << "  " << dot_quote(a.source) << " -> " << dot_quote(a.target) << ";\n";
  out << "}\n";
  return out.str();
}

}  // namespace

std::string serialize(const PetriNet& net, NetFormat format) {
  return format == NetFormat::Pnml ? to_pnml(net) : to_dot(net);
}

PetriNet parse_pnml(std::istream& source) {
  std::ostringstream buffer;
  buffer << source.rdbuf();
  return parse_pnml(buffer.str());
}

PetriNet parse_pnml(const std::string& source) {
  const detail::XmlNode root = detail::parse_xml(source);
  if (root.name != "pnml") throw MalformedPnml("root element is '" + root.name + "'");
  const detail::XmlNode* net_node = nullptr;
  for (const auto& child : root.children) {
    if (child.name != "net") continue;
    if (net_node) throw MalformedPnml("more than one net element");
    net_node = &child;
  }
  if (!net_node) throw MalformedPnml("no net element");
  const auto* id_attr = net_node->attribute("id");
  std::string model_id = id_attr ? *id_attr : "net0";

  std::vector<std::string> places;
  std::vector<TransitionDef> transitions;
  std::vector<Arc> arcs;
  Marking initial, final_marking;
  bool saw_final_block = false;

  auto parse_count = [](const detail::XmlNode& text_holder, const char* where) {
    const auto* text = text_holder.first_child("text");
    if (!text) throw MalformedPnml(std::string("missing <text> in ") + where);
    try {
      return std::stoi(text->text);
    } catch (const std::exception&) {
      throw MalformedPnml(std::string("non-numeric token count in ") + where);
    }
  };

  // places, transitions and arcs may sit at net level or inside pages
  auto walk = [&](const detail::XmlNode& node, auto&& self) -> void {
    for (const auto& child : node.children) {
      if (child.name == "page") {
        self(child, self);
      } else if (child.name == "place") {
        const auto* id = child.attribute("id");
        if (!id) throw MalformedPnml("place without id");
        places.push_back(*id);
        if (const auto* im = child.first_child("initialMarking"))
          initial[*id] = parse_count(*im, "initialMarking");
      } else if (child.name == "transition") {
        const auto* id = child.attribute("id");
        if (!id) throw MalformedPnml("transition without id");
        TransitionDef t;
        t.id = *id;
        if (const auto* name = child.first_child("name")) {
          const auto* text = name->first_child("text");
          if (text && !text->text.empty()) t.label = text->text;
        }
        transitions.push_back(std::move(t));
      } else if (child.name == "arc") {
        const auto* src = child.attribute("source");
        const auto* dst = child.attribute("target");
        if (!src || !dst) throw MalformedPnml("arc without source/target");
        arcs.push_back({*src, *dst});
      } else if (child.name == "toolspecific") {
        if (const auto* fm = child.first_child("finalMarking")) {
          saw_final_block = true;
          for (const auto& pl : fm->children) {
            if (pl.name != "place") continue;
            const auto* ref = pl.attribute("idref");
            if (!ref) throw MalformedPnml("final marking place without idref");
            final_marking[*ref] = parse_count(pl, "finalMarking");
          }
        }
      }
    }
  };
  walk(*net_node, walk);

  if (initial.empty()) throw MissingMarking("initial");
  if (!saw_final_block || final_marking.empty()) throw MissingMarking("final");
  try {
    return PetriNet(std::move(model_id), std::move(places), std::move(transitions),
                    std::move(arcs), std::move(initial), std::move(final_marking));
  } catch (const InvalidNet& e) {
    throw MalformedPnml(e.what());
  }
}

}  // namespace pathmine
