#pragma once

#include <string>

namespace pathmine::detail {

inline std::string csv_escape(const std::string& s, char delimiter = ',') {
  if (s.find_first_of("\"\r\n") == std::string::npos && s.find(delimiter) == std::string::npos)
    return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += "\"\"";
    else quoted.push_back(c);
  }
  quoted.push_back('"');
  return quoted;
}

}  // namespace pathmine::detail
