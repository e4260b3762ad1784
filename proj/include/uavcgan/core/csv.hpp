#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "uavcgan/core/error.hpp"

namespace uavcgan::csv {

/// Shortest decimal representation that parses back to the identical double.
inline std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) fail(ErrorKind::IoError, "cannot format double");
  return std::string(buffer, end);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    fail(ErrorKind::IoError, "not a number: '" + std::string(text) + "'");
  return value;
}

inline std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    fail(ErrorKind::IoError, "not an integer: '" + std::string(text) + "'");
  return value;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

/// Small row builder: `Row{} << 1 << 2.5 << "x"` joins with commas.
class Row {
 public:
  Row& operator<<(double v) { return append(format_double(v)); }
  Row& operator<<(int v) { return append(std::to_string(v)); }
  Row& operator<<(long v) { return append(std::to_string(v)); }
  Row& operator<<(long long v) { return append(std::to_string(v)); }
  Row& operator<<(unsigned v) { return append(std::to_string(v)); }
  Row& operator<<(unsigned long v) { return append(std::to_string(v)); }
  Row& operator<<(unsigned long long v) { return append(std::to_string(v)); }
  Row& operator<<(std::string_view v) { return append(std::string(v)); }
  Row& operator<<(const char* v) { return append(v); }
  const std::string& str() const { return text_; }

 private:
  Row& append(const std::string& field) {
    if (!first_) text_.push_back(',');
    text_ += field;
    first_ = false;
    return *this;
  }
  std::string text_;
  bool first_ = true;
};

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot open for writing: " + path);
  out << contents;
  if (!out) fail(ErrorKind::IoError, "write failed: " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses a CSV with a mandatory header; returns data rows as field lists.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline Table parse_table(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    for (auto f : split(line)) fields.emplace_back(f);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
    } else {
      if (fields.size() != table.header.size())
        fail(ErrorKind::IoError, "row has " + std::to_string(fields.size()) + " fields, header has " +
                                     std::to_string(table.header.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  if (!have_header) fail(ErrorKind::IoError, "missing CSV header");
  return table;
}

}  // namespace uavcgan::csv
