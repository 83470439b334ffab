// SPDX-License-Identifier: Apache-2.0
#pragma once

// Manifold spec files: a sectioned key = value format, grammar in docs/grammar.md.

#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <fstream>
#include <sstream>
#include <variant>

#include "framebundle/catalog.hpp"

namespace fb {

class SpecError : public std::runtime_error {
 public:
  SpecError(const std::string& where, int line, const std::string& msg)
      : std::runtime_error(where + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

struct SpecOptions {
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

struct ManifoldSpec {
  std::string name = "custom";
  std::optional<std::string> builtin;  // set when the spec references the catalog
  double kappa = kDefaultKappa;
  int ambient_dim = 0;
  std::string ambient_metric;                         // "euclidean" / "sphere(R)", or empty for a grid
  std::vector<std::vector<std::string>> metric_grid;  // when ambient_metric is empty
  int dim = 0;
  ChartBox domain;
  std::vector<std::string> map;
  SpecOptions options;

  ImmersedSubmanifold submanifold() const {
    if (builtin) return builtin_submanifold(*builtin, kappa);
    AmbientSpace a = ambient_metric.empty() ? AmbientSpace::custom(metric_grid) : *builtin_ambient(ambient_metric, ambient_dim);
    return ImmersedSubmanifold(std::move(a), map, domain, name);
  }
};

namespace spec_detail {

struct Value {
  std::variant<std::string, double, std::vector<Value>> v;
  bool quoted = false;
};

class ValueParser {
 public:
  ValueParser(std::string_view s, std::function<void(const std::string&)> fail) : s_(s), fail_(std::move(fail)) {}

  Value parse_all() {
    Value v = value();
    skip();
    if (i_ != s_.size()) fail_("unexpected '" + std::string(1, s_[i_]) + "' after value");
    return v;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  Value value() {
    skip();
    if (i_ >= s_.size()) fail_("missing value");
    const char c = s_[i_];
    if (c == '"') {
      const std::size_t end = s_.find('"', i_ + 1);
      if (end == std::string_view::npos) fail_("unterminated string");
      Value v{std::string(s_.substr(i_ + 1, end - i_ - 1)), true};
      i_ = end + 1;
      return v;
    }
    if (c == '[') {
      ++i_;
      std::vector<Value> items;
      skip();
      if (i_ < s_.size() && s_[i_] == ']') {
        ++i_;
        return {items, false};
      }
      for (;;) {
        items.push_back(value());
        skip();
        if (i_ >= s_.size()) fail_("unterminated list");
        if (s_[i_] == ',') {
          ++i_;
          continue;
        }
        if (s_[i_] == ']') {
          ++i_;
          return {items, false};
        }
        fail_("expected ',' or ']' in list");
      }
    }
    std::size_t j = i_;
    while (j < s_.size() && !std::isspace(static_cast<unsigned char>(s_[j])) && s_[j] != ',' && s_[j] != ']') ++j;
    const std::string tok(s_.substr(i_, j - i_));
    double d = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), d);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) fail_("expected a number, string or list, got '" + tok + "'");
    i_ = j;
    return {d, false};
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::function<void(const std::string&)> fail_;
};

inline int bracket_depth(std::string_view s) {
  int d = 0;
  bool in_str = false;
  for (char c : s) {
    if (c == '"') in_str = !in_str;
    if (in_str) continue;
    if (c == '[') ++d;
    if (c == ']') --d;
  }
  return d;
}

inline std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

}  // namespace spec_detail

/// Parses spec text; `where` names the source in error messages.
inline ManifoldSpec parse_spec(const std::string& text, const std::string& where = "<spec>") {
  using namespace spec_detail;
  ManifoldSpec spec;
  std::istringstream in(text);
  std::string raw, section;
  int lineno = 0;
  std::set<std::string> seen;
  int builtin_line = 0, map_line = 0, domain_line = 0, metric_line = 0;
  bool have_ambient_dim = false, have_dim = false;

  while (std::getline(in, raw)) {
    ++lineno;
    const int start = lineno;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    auto fail = [&](const std::string& m) -> void { throw SpecError(where, start, m); };
    if (line.front() == '[' && line.find('=') == std::string::npos) {
      if (line.back() != ']') fail("malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "ambient" && section != "submanifold" && section != "options")
        fail("unknown section [" + section + "]");
      if (!seen.insert("[" + section + "]").second) fail("duplicate section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    std::string rhs = trim(line.substr(eq + 1));
    while (bracket_depth(rhs) > 0) {
      if (!std::getline(in, raw)) fail("unterminated list");
      ++lineno;
      rhs += " " + trim(strip_comment(raw));
    }
    if (!seen.insert(section + "." + key).second) fail("duplicate key '" + key + "'");
    const Value v = ValueParser(rhs, fail).parse_all();

    auto as_string = [&]() -> std::string {
      if (!v.quoted) fail("'" + key + "' expects a quoted string");
      return std::get<std::string>(v.v);
    };
    auto as_number = [&]() -> double {
      if (!std::holds_alternative<double>(v.v)) fail("'" + key + "' expects a number");
      return std::get<double>(v.v);
    };
    auto as_count = [&](int lo) -> int {
      const double d = as_number();
      if (d != std::floor(d) || d < lo || d > 1e9) fail("'" + key + "' expects an integer >= " + std::to_string(lo));
      return static_cast<int>(d);
    };
    auto as_list = [&](const Value& x) -> const std::vector<Value>& {
      if (!std::holds_alternative<std::vector<Value>>(x.v)) fail("'" + key + "' expects a list");
      return std::get<std::vector<Value>>(x.v);
    };
    auto as_strings = [&](const Value& x) {
      std::vector<std::string> out;
      for (const auto& e : as_list(x)) {
        if (!e.quoted) fail("'" + key + "' expects a list of quoted expressions");
        out.push_back(std::get<std::string>(e.v));
      }
      return out;
    };

    if (section.empty()) {
      if (key == "submanifold") {
        const std::string n = as_string();
        if (!is_builtin(n)) fail("unknown builtin '" + n + "'");
        spec.builtin = lowercase(n);
        spec.name = *spec.builtin;
        builtin_line = start;
      } else if (key == "kappa") {
        spec.kappa = as_number();
        if (!(spec.kappa > 0.0)) fail("kappa must be positive");
      } else {
        fail("unknown top-level key '" + key + "'");
      }
    } else if (section == "ambient") {
      if (key == "dim") {
        spec.ambient_dim = as_count(1);
        have_ambient_dim = true;
      } else if (key == "metric") {
        metric_line = start;
        if (v.quoted) {
          spec.ambient_metric = as_string();
        } else {
          for (const auto& row : as_list(v)) spec.metric_grid.push_back(as_strings(row));
        }
      } else {
        fail("unknown key '" + key + "' in [ambient]");
      }
    } else if (section == "submanifold") {
      if (key == "dim") {
        spec.dim = as_count(1);
        have_dim = true;
      } else if (key == "name") {
        spec.name = as_string();
      } else if (key == "map") {
        spec.map = as_strings(v);
        map_line = start;
      } else if (key == "domain" || key == "chart_domain") {
        domain_line = start;
        for (const auto& iv : as_list(v)) {
          const auto& p = as_list(iv);
          if (p.size() != 2 || !std::holds_alternative<double>(p[0].v) || !std::holds_alternative<double>(p[1].v))
            fail("domain entries must be [lo, hi]");
          const double lo = std::get<double>(p[0].v), hi = std::get<double>(p[1].v);
          if (!(lo < hi)) fail("domain interval needs lo < hi");
          spec.domain.bounds.emplace_back(lo, hi);
        }
      } else {
        fail("unknown key '" + key + "' in [submanifold]");
      }
    } else {
      if (key == "samples")
        spec.options.samples = as_count(1);
      else if (key == "seed")
        spec.options.seed = static_cast<std::uint64_t>(as_count(0));
      else if (key == "tol") {
        spec.options.tol = as_number();
        if (!(*spec.options.tol > 0.0)) fail("tol must be positive");
      } else
        fail("unknown key '" + key + "' in [options]");
    }
  }

  auto fail_at = [&](int line, const std::string& m) { throw SpecError(where, line, m); };
  const int end = std::max(lineno, 1);
  if (spec.builtin) {
    if (seen.count("[ambient]") || seen.count("[submanifold]"))
      fail_at(builtin_line, "a builtin reference cannot be combined with [ambient] or [submanifold]");
    return spec;
  }
  if (!seen.count("[ambient]")) fail_at(end, "missing [ambient] section");
  if (!seen.count("[submanifold]")) fail_at(end, "missing [submanifold] section");
  if (!have_ambient_dim) fail_at(end, "[ambient] needs dim");
  if (!metric_line) fail_at(end, "[ambient] needs metric");
  if (!have_dim) fail_at(end, "[submanifold] needs dim");
  if (!map_line) fail_at(end, "[submanifold] needs map");
  if (!domain_line) fail_at(end, "[submanifold] needs domain");
  if (spec.dim >= spec.ambient_dim)
    fail_at(end, "submanifold dim " + std::to_string(spec.dim) + " must be below ambient dim " +
                     std::to_string(spec.ambient_dim));
  if (static_cast<int>(spec.map.size()) != spec.ambient_dim)
    fail_at(map_line, "dimension mismatch: map has " + std::to_string(spec.map.size()) + " entries, ambient dim is " +
                          std::to_string(spec.ambient_dim));
  if (spec.domain.dim() != spec.dim)
    fail_at(domain_line, "dimension mismatch: domain has " + std::to_string(spec.domain.dim()) +
                             " intervals, submanifold dim is " + std::to_string(spec.dim));
  if (spec.ambient_metric.empty()) {
    if (static_cast<int>(spec.metric_grid.size()) != spec.ambient_dim)
      fail_at(metric_line, "dimension mismatch: metric grid has " + std::to_string(spec.metric_grid.size()) +
                               " rows, ambient dim is " + std::to_string(spec.ambient_dim));
    for (const auto& row : spec.metric_grid)
      if (static_cast<int>(row.size()) != spec.ambient_dim) fail_at(metric_line, "metric grid must be square");
  }
  // expressions are checked here so that errors carry the spec line
  try {
    if (spec.ambient_metric.empty()) {
      AmbientSpace::custom(spec.metric_grid);
    } else if (!builtin_ambient(spec.ambient_metric, spec.ambient_dim)) {
      fail_at(metric_line, "unknown ambient metric '" + spec.ambient_metric + "'");
    }
  } catch (const SpecError&) {
    throw;
  } catch (const std::exception& e) {
    fail_at(metric_line, e.what());
  }
  for (const auto& m : spec.map) {
    try {
      Expression::parse(m, spec.dim, "u");
    } catch (const std::exception& e) {
      fail_at(map_line, "in '" + m + "': " + e.what());
    }
  }
  return spec;
}

inline ManifoldSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError(path, 0, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str(), path);
}

}  // namespace fb
