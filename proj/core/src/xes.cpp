#include <algorithm>
#include <istream>
#include <sstream>

#include "pathmine/errors.hpp"
#include "pathmine/event_log.hpp"
#include "xml_reader.hpp"

namespace pathmine {

EventLog parse_xes(std::istream& source) {
  std::ostringstream buffer;
  buffer << source.rdbuf();
  const detail::XmlNode root = detail::parse_xml(buffer.str());
  if (root.name != "log") throw MalformedXml(0, "root element is '" + root.name + "', not 'log'");

  std::vector<Trace> traces;
  std::size_t event_index = 0;  // running index across the whole document
  std::size_t trace_index = 0;
  for (const auto& trace_node : root.children) {
    if (trace_node.name != "trace") continue;
    ++trace_index;
    std::string case_id = "t" + std::to_string(trace_index);
    std::vector<Event> events;
    TimestampMs last_seen = 0;
    for (const auto& child : trace_node.children) {
      if (child.name == "string") {
        const auto* key = child.attribute("key");
        const auto* value = child.attribute("value");
        if (key && value && *key == "concept:name") case_id = *value;
        continue;
      }
      if (child.name != "event") continue;
      ++event_index;
      Event e;
      e.event_id = "e" + std::to_string(event_index);
      bool has_name = false;
      bool has_ts = false;
      for (const auto& attr : child.children) {
        const auto* key = attr.attribute("key");
        const auto* value = attr.attribute("value");
        if (!key || !value) continue;
        if (attr.name == "string" && *key == "concept:name") {
          e.activity = *value;
          has_name = true;
        } else if (attr.name == "date" && *key == "time:timestamp") {
          const auto ts = parse_iso8601(*value);
          if (!ts) throw UnparseableTimestamp(event_index, *value);
          e.timestamp = *ts;
          has_ts = true;
        } else {
          e.extra_attributes[*key] = *value;
        }
      }
      if (!has_name || e.activity.empty()) throw MissingConceptName(event_index);
      // events without a time:timestamp inherit their predecessor's, so the
      // stable sort keeps them in document order
      if (!has_ts) e.timestamp = last_seen;
      last_seen = e.timestamp;
      events.push_back(std::move(e));
    }
    if (events.empty()) continue;  // empty cases are rejected at parse time

    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
    Trace t;
    t.case_id = case_id;
    for (const auto& e : events) t.activities.push_back(e.activity);
    traces.push_back(std::move(t));
  }
  if (traces.empty()) throw EmptyLog();
  return make_log(std::move(traces));
}

}  // namespace pathmine
