#include "pathmine/event_log.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <random>

#include "csv_util.hpp"
#include "pathmine/errors.hpp"

namespace pathmine {

namespace {

// days since 1970-01-01 for a proleptic Gregorian date
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool read_digits(const std::string& s, std::size_t& pos, int min_digits, int max_digits,
                 std::int64_t& out) {
  std::int64_t value = 0;
  int n = 0;
  while (pos < s.size() && n < max_digits && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    value = value * 10 + (s[pos] - '0');
    ++pos;
    ++n;
  }
  if (n < min_digits) return false;
  out = value;
  return true;
}

struct DateTimeFields {
  std::int64_t year = 1970;
  std::int64_t month = 1, day = 1, hour = 0, minute = 0, second = 0, millis = 0;
  std::int64_t offset_minutes = 0;

  std::optional<TimestampMs> to_ms() const {
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
      return std::nullopt;
    const std::int64_t days = days_from_civil(year, static_cast<int>(month), static_cast<int>(day));
    return days * 86400000 + hour * 3600000 + minute * 60000 + second * 1000 + millis -
           offset_minutes * 60000;
  }
};

// parses fractional seconds, keeping millisecond precision
bool read_fraction(const std::string& s, std::size_t& pos, std::int64_t& millis) {
  std::size_t start = pos;
  std::int64_t scaled = 0;
  int n = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    if (n < 3) scaled = scaled * 10 + (s[pos] - '0');
    ++pos;
    ++n;
  }
  if (pos == start) return false;
  while (n < 3) {
    scaled *= 10;
    ++n;
  }
  millis = scaled;
  return true;
}

bool read_offset(const std::string& s, std::size_t& pos, std::int64_t& offset_minutes) {
  if (pos < s.size() && (s[pos] == 'Z' || s[pos] == 'z')) {
    ++pos;
    offset_minutes = 0;
    return true;
  }
  if (pos >= s.size() || (s[pos] != '+' && s[pos] != '-')) return false;
  const int sign = s[pos] == '-' ? -1 : 1;
  ++pos;
  std::int64_t hh = 0, mm = 0;
  if (!read_digits(s, pos, 2, 2, hh)) return false;
  if (pos < s.size() && s[pos] == ':') ++pos;
  if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    if (!read_digits(s, pos, 2, 2, mm)) return false;
  }
  offset_minutes = sign * (hh * 60 + mm);
  return true;
}

}  // namespace

std::optional<TimestampMs> parse_timestamp(const std::string& text, const std::string& format) {
  DateTimeFields f;
  std::size_t pos = 0;
  std::size_t i = 0;
  while (i < format.size()) {
    if (format[i] != '%') {
      if (pos >= text.size() || text[pos] != format[i]) return std::nullopt;
      ++pos;
      ++i;
      continue;
    }
    if (i + 1 >= format.size()) return std::nullopt;
    const char spec = format[i + 1];
    i += 2;
    switch (spec) {
      case 'Y':
        if (!read_digits(text, pos, 4, 4, f.year)) return std::nullopt;
        break;
      case 'm':
        if (!read_digits(text, pos, 1, 2, f.month)) return std::nullopt;
        break;
      case 'd':
        if (!read_digits(text, pos, 1, 2, f.day)) return std::nullopt;
        break;
      case 'H':
        if (!read_digits(text, pos, 1, 2, f.hour)) return std::nullopt;
        break;
      case 'M':
        if (!read_digits(text, pos, 1, 2, f.minute)) return std::nullopt;
        break;
      case 'S':
        if (!read_digits(text, pos, 1, 2, f.second)) return std::nullopt;
        break;
      case 'f':
        if (!read_fraction(text, pos, f.millis)) return std::nullopt;
        break;
      case 'z':
        if (!read_offset(text, pos, f.offset_minutes)) return std::nullopt;
        break;
      case '%':
        if (pos >= text.size() || text[pos] != '%') return std::nullopt;
        ++pos;
        break;
      default:
        return std::nullopt;
    }
  }
  if (pos != text.size()) return std::nullopt;
  return f.to_ms();
}

std::optional<TimestampMs> parse_iso8601(const std::string& text) {
  DateTimeFields f;
  std::size_t pos = 0;
  if (!read_digits(text, pos, 4, 4, f.year)) return std::nullopt;
  if (pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  if (!read_digits(text, pos, 2, 2, f.month)) return std::nullopt;
  if (pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  if (!read_digits(text, pos, 2, 2, f.day)) return std::nullopt;
  if (pos < text.size() && (text[pos] == 'T' || text[pos] == ' ')) {
    ++pos;
    if (!read_digits(text, pos, 2, 2, f.hour)) return std::nullopt;
    if (pos >= text.size() || text[pos] != ':') return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, 2, f.minute)) return std::nullopt;
    if (pos >= text.size() || text[pos] != ':') return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, 2, f.second)) return std::nullopt;
    if (pos < text.size() && (text[pos] == '.' || text[pos] == ',')) {
      ++pos;
      if (!read_fraction(text, pos, f.millis)) return std::nullopt;
    }
    if (pos < text.size()) {
      if (!read_offset(text, pos, f.offset_minutes)) return std::nullopt;
    }
  }
  if (pos != text.size()) return std::nullopt;
  return f.to_ms();
}

std::string format_timestamp(TimestampMs t) {
  std::int64_t days = t / 86400000;
  std::int64_t rem = t % 86400000;
  if (rem < 0) {
    rem += 86400000;
    --days;
  }
  // civil_from_days, inverse of days_from_civil
  std::int64_t z = days + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  const std::int64_t year = y + (m <= 2);

  const int hh = static_cast<int>(rem / 3600000);
  const int mi = static_cast<int>(rem / 60000 % 60);
  const int ss = static_cast<int>(rem / 1000 % 60);
  const int ms = static_cast<int>(rem % 1000);
  char buf[40];
  if (ms != 0) {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u %02d:%02d:%02d.%03d",
                  static_cast<long long>(year), m, d, hh, mi, ss, ms);
  } else {
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u %02d:%02d:%02d",
                  static_cast<long long>(year), m, d, hh, mi, ss);
  }
  return buf;
}

EventLog make_log(std::vector<Trace> traces) {
  EventLog log;
  for (auto& t : traces) {
    if (t.activities.empty()) throw InvalidArgument("trace '" + t.case_id + "' has no events");
    for (const auto& a : t.activities) log.alphabet.insert(a);
  }
  log.traces = std::move(traces);
  return log;
}

EventLog merge_logs(const EventLog& a, const EventLog& b) {
  EventLog out = a;
  out.traces.insert(out.traces.end(), b.traces.begin(), b.traces.end());
  out.alphabet.insert(b.alphabet.begin(), b.alphabet.end());
  return out;
}

namespace {

// one CSV record, quotes honoured (embedded delimiters/newlines allowed)
bool read_csv_record(std::istream& in, char delimiter, std::vector<std::string>& fields) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;
  std::string field;
  bool quoted = false;
  bool any = false;
  while (true) {
    if (c == EOF) {
      fields.push_back(field);
      return true;
    }
    any = true;
    const char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      fields.push_back(field);
      return true;
    } else if (ch == '\n') {
      fields.push_back(field);
      return true;
    } else {
      field.push_back(ch);
    }
    c = in.get();
  }
  (void)any;
}

EventLog log_from_events(std::vector<std::vector<Event>> per_case_events,
                         const std::vector<std::string>& case_order) {
  std::vector<Trace> traces;
  traces.reserve(case_order.size());
  for (std::size_t i = 0; i < case_order.size(); ++i) {
    auto& events = per_case_events[i];
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
    Trace t;
    t.case_id = case_order[i];
    t.activities.reserve(events.size());
    for (const auto& e : events) t.activities.push_back(e.activity);
    traces.push_back(std::move(t));
  }
  return make_log(std::move(traces));
}

}  // namespace

EventLog parse_csv(std::istream& source, const CsvMapping& mapping) {
  std::vector<std::string> header;
  if (!read_csv_record(source, mapping.delimiter, header)) throw EmptyLog();

  auto find_col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw MissingColumn(name);
  };
  const std::size_t case_idx = find_col(mapping.case_col);
  const std::size_t act_idx = find_col(mapping.activity_col);
  const std::size_t ts_idx = find_col(mapping.timestamp_col);

  std::map<std::string, std::size_t> case_slot;
  std::vector<std::string> case_order;
  std::vector<std::vector<Event>> per_case;

  std::vector<std::string> fields;
  std::size_t row = 0;
  std::size_t valid_rows = 0;
  while (read_csv_record(source, mapping.delimiter, fields)) {
    ++row;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    auto get = [&](std::size_t i) { return i < fields.size() ? fields[i] : std::string(); };
    Event e;
    e.case_id = get(case_idx);
    e.activity = get(act_idx);
    if (e.case_id.empty() || e.activity.empty()) continue;
    const std::string ts_text = get(ts_idx);
    const auto ts = parse_timestamp(ts_text, mapping.timestamp_format);
    if (!ts) throw UnparseableTimestamp(row, ts_text);
    e.timestamp = *ts;
    e.event_id = "e" + std::to_string(row);
    auto [it, inserted] = case_slot.try_emplace(e.case_id, per_case.size());
    if (inserted) {
      case_order.push_back(e.case_id);
      per_case.emplace_back();
    }
    per_case[it->second].push_back(std::move(e));
    ++valid_rows;
  }
  if (valid_rows == 0) throw EmptyLog();
  return log_from_events(std::move(per_case), case_order);
}

void write_csv(const EventLog& log, std::ostream& out, char delimiter) {
  auto escape = [&](const std::string& s) { return detail::csv_escape(s, delimiter); };
  out << "case" << delimiter << "activity" << delimiter << "timestamp" << '\n';
  std::map<std::string, int> seen;
  const TimestampMs base = 1577836800000;  // 2020-01-01 00:00:00 UTC
  for (const auto& trace : log.traces) {
    std::string case_id = trace.case_id;
    int n = ++seen[case_id];
    if (n > 1) case_id += "#" + std::to_string(n);
    TimestampMs t = base;
    for (const auto& act : trace.activities) {
      out << escape(case_id) << delimiter << escape(act) << delimiter << format_timestamp(t)
          << '\n';
      t += 1000;
    }
  }
}

std::vector<Variant> extract_variants(const EventLog& log) {
  std::map<std::vector<std::string>, std::size_t> counts;
  for (const auto& t : log.traces) ++counts[t.activities];
  std::vector<Variant> variants;
  variants.reserve(counts.size());
  for (auto& [seq, count] : counts) variants.push_back({seq, count, 0});
  std::sort(variants.begin(), variants.end(), [](const Variant& a, const Variant& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.sequence < b.sequence;
  });
  for (std::size_t i = 0; i < variants.size(); ++i) variants[i].rank = i + 1;
  return variants;
}

EventLog filter_top_k_variants(const EventLog& log, std::size_t k) {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  const auto variants = extract_variants(log);
  std::map<std::vector<std::string>, std::size_t> rank_of;
  for (const auto& v : variants) rank_of[v.sequence] = v.rank;
  std::vector<Trace> kept;
  for (const auto& t : log.traces)
    if (rank_of.at(t.activities) <= k) kept.push_back(t);
  EventLog out;
  for (const auto& t : kept)
    for (const auto& a : t.activities) out.alphabet.insert(a);
  out.traces = std::move(kept);
  return out;
}

std::pair<EventLog, EventLog> split_log(const EventLog& log, double train_fraction,
                                        std::uint64_t seed) {
  if (log.empty()) throw EmptyLog();
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw InvalidArgument("train_fraction must lie in (0,1)");
  const std::size_t n = log.size();
  const std::size_t n_train =
      static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) throw DegenerateSplit();

  std::mt19937_64 gen(seed);
  auto draw_below = [&gen](std::uint64_t bound) { return gen() % bound; };
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(idx[i], idx[draw_below(static_cast<std::uint64_t>(i) + 1)]);

  std::vector<bool> in_train(n, false);
  for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = true;

  std::vector<Trace> train, test;
  for (std::size_t i = 0; i < n; ++i)
    (in_train[i] ? train : test).push_back(log.traces[i]);
  return {make_log(std::move(train)), make_log(std::move(test))};
}

}  // namespace pathmine
