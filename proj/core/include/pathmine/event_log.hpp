#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace pathmine {

/// Milliseconds since the Unix epoch, UTC.
using TimestampMs = std::int64_t;

struct Event {
  std::string case_id;
  std::string activity;
  TimestampMs timestamp = 0;
  std::string event_id;
  std::map<std::string, std::string> extra_attributes;
};

/// Time-ordered activity sequence of one case. Never empty.
struct Trace {
  std::string case_id;
  std::vector<std::string> activities;

  friend bool operator==(const Trace& a, const Trace& b) {
    return a.case_id == b.case_id && a.activities == b.activities;
  }
};

/// Multiset of traces. Duplicate traces are kept with their multiplicity;
/// the alphabet is always the union of labels over all traces.
struct EventLog {
  std::vector<Trace> traces;
  std::set<std::string> alphabet;

  bool empty() const { return traces.empty(); }
  std::size_t size() const { return traces.size(); }
};

/// Builds a log from traces, computing the alphabet. Rejects empty traces.
EventLog make_log(std::vector<Trace> traces);

/// Multiset union; trace order is a's traces followed by b's.
EventLog merge_logs(const EventLog& a, const EventLog& b);

struct Variant {
  std::vector<std::string> sequence;
  std::size_t count = 0;
  std::size_t rank = 0;  // 1-based, ordered by (count desc, sequence asc)
};

struct CsvMapping {
  std::string case_col = "case";
  std::string activity_col = "activity";
  std::string timestamp_col = "timestamp";
  std::string timestamp_format = "%Y-%m-%d %H:%M:%S";
  char delimiter = ',';
};

/// Parses a CSV event stream into a log: one trace per distinct case id,
/// events ordered by timestamp with file order breaking ties. Rows with an
/// empty case or activity cell are skipped; a log with no surviving rows is
/// an error.
EventLog parse_csv(std::istream& source, const CsvMapping& mapping);

/// Parses the XES subset: `trace` elements holding `event` elements with a
/// string attribute `concept:name` and a date attribute `time:timestamp`.
/// Other event attributes land in extra_attributes; namespace prefixes on
/// element names are ignored. Events without a timestamp keep document order.
EventLog parse_xes(std::istream& source);

/// Writes `case,activity,timestamp` rows, one event per row, with synthetic
/// ascending timestamps. Duplicate case ids are suffixed (`#2`, `#3`, ...)
/// so reparsing reconstructs the same trace multiset.
void write_csv(const EventLog& log, std::ostream& out, char delimiter = ',');

/// Distinct activity sequences with their frequencies, ranked by
/// (count desc, sequence lexicographic asc).
std::vector<Variant> extract_variants(const EventLog& log);

/// Keeps exactly the traces whose variant rank is <= k, multiplicities and
/// input order preserved; the alphabet is recomputed.
EventLog filter_top_k_variants(const EventLog& log, std::size_t k);

/// Seeded trace-level random partition into (train, test) with
/// |train| = round(train_fraction * |traces|). Relative trace order is kept
/// on both sides.
std::pair<EventLog, EventLog> split_log(const EventLog& log, double train_fraction,
                                        std::uint64_t seed);

/// strptime-like subset: %Y %m %d %H %M %S, %f (fractional seconds),
/// %z (Z or +-HH[:]MM), %%; everything else matches literally.
std::optional<TimestampMs> parse_timestamp(const std::string& text, const std::string& format);

/// ISO-8601 date-time with optional fractional seconds and UTC offset.
std::optional<TimestampMs> parse_iso8601(const std::string& text);

/// `%Y-%m-%d %H:%M:%S` (UTC); a `.mmm` suffix appears when the value has
/// sub-second precision.
std::string format_timestamp(TimestampMs t);

}  // namespace pathmine
