#pragma once

#include <charconv>
#include <istream>
#include <string>
#include <vector>

#include "cagecap/errors.hpp"

namespace cagecap::detail {

inline std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline double to_double(const std::string& tok, std::size_t line = 0) {
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ValidationError("expected a number, got '" + tok + "'", line);
  }
  return v;
}

inline long long to_int(const std::string& tok, std::size_t line = 0) {
  long long v = 0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (tok.empty() || res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
    throw ValidationError("expected an integer, got '" + tok + "'", line);
  }
  return v;
}

// Reads a CSV with a header row; returns the data rows split into fields.
inline std::vector<std::vector<std::string>> read_csv_rows(std::istream& is,
                                                           std::size_t expected_fields) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header = true;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto fields = split(line, ',');
    if (fields.size() != expected_fields) {
      throw ValidationError("expected " + std::to_string(expected_fields) + " fields", line_no);
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace cagecap::detail
