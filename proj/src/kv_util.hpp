#pragma once

// Shared helpers for the plain-text artifact files (over-approximation,
// policy): `[section]` headers with `key = value` lines, vectors as
// comma-separated decimal doubles at 17 significant digits.

#include <Eigen/Dense>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "oactl/errors.hpp"

namespace oactl::detail {

inline std::string kv_trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& text) {
  const std::string t = kv_trim(text);
  if (t.empty()) throw InputError("empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size())
    throw InputError("malformed number '" + t + "'");
  return v;
}

inline double parse_double(const std::string& text, const std::string& context) {
  try {
    return parse_double(text);
  } catch (const InputError& e) {
    throw InputError(context + ": " + e.what());
  }
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_double(v[i]);
  }
  return out;
}

inline std::string format_matrix_row_major(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (r || c) out += ", ";
      out += format_double(m(r, c));
    }
  return out;
}

struct KvFile {
  std::string origin;
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    return s != sections.end() && s->second.count(key) > 0;
  }

  const std::string& get(const std::string& section, const std::string& key) const {
    auto s = sections.find(section);
    if (s == sections.end())
      throw InputError(origin + ": missing section [" + section + "]");
    auto k = s->second.find(key);
    if (k == s->second.end())
      throw InputError(origin + ": missing key '" + key + "' in [" + section + "]");
    return k->second;
  }

  double get_scalar(const std::string& section, const std::string& key) const {
    return parse_double(get(section, key));
  }

  long get_int(const std::string& section, const std::string& key) const {
    const double v = get_scalar(section, key);
    const long n = static_cast<long>(v);
    if (static_cast<double>(n) != v)
      throw InputError(origin + ": key '" + key + "' must be an integer");
    return n;
  }

  Eigen::VectorXd get_vector(const std::string& section, const std::string& key,
                             Eigen::Index expected = -1) const {
    const std::string& text = get(section, key);
    if (expected == 0 && kv_trim(text).empty()) return Eigen::VectorXd();
    std::vector<double> vals;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = text.find(',', start);
      const std::string piece = comma == std::string::npos
                                    ? text.substr(start)
                                    : text.substr(start, comma - start);
      vals.push_back(parse_double(piece));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (expected >= 0 && static_cast<Eigen::Index>(vals.size()) != expected)
      throw InputError(origin + ": key '" + key + "' expected " +
                       std::to_string(expected) + " entries, got " +
                       std::to_string(vals.size()));
    return Eigen::Map<Eigen::VectorXd>(vals.data(),
                                       static_cast<Eigen::Index>(vals.size()));
  }
};

inline KvFile read_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file '" + path + "'");
  KvFile kv;
  kv.origin = path;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = kv_trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InputError(path + ":" + std::to_string(line_no) +
                         ": malformed section header");
      section = kv_trim(line.substr(1, line.size() - 2));
      kv.sections[section];
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos || section.empty())
      throw InputError(path + ":" + std::to_string(line_no) +
                       ": expected 'key = value' inside a section");
    const std::string key = kv_trim(line.substr(0, eq));
    const std::string value = kv_trim(line.substr(eq + 1));
    if (!kv.sections[section].emplace(key, value).second)
      throw InputError(path + ":" + std::to_string(line_no) + ": duplicate key '" +
                       key + "'");
  }
  return kv;
}

}  // namespace oactl::detail
