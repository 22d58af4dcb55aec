#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "vinecop/error.hpp"

namespace vinecop::detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

/// Minimal comma-separated reader: no embedded separators, blank lines skipped.
class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      if (line_ == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
      if (trim(line).empty()) continue;
      fields.clear();
      std::size_t start = 0;
      while (true) {
        const auto pos = line.find(',', start);
        fields.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
      return true;
    }
    return false;
  }

  std::size_t line() const noexcept { return line_; }
  const std::string& source() const noexcept { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_ = 0;
};

inline double parse_double(const std::string& field, const std::string& source, std::size_t line,
                           const std::string& column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = first + field.size();
  if (!field.empty() && *first == '+') ++first;
  const auto r = std::from_chars(first, last, value);
  if (field.empty() || r.ec != std::errc() || r.ptr != last) {
    std::ostringstream os;
    os << source << ":" << line << ": column '" << column << "': cannot parse '" << field
       << "' as a number";
    throw ParseError(os.str());
  }
  return value;
}

}  // namespace vinecop::detail
