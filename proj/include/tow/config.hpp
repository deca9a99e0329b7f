#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tow/expr.hpp"
#include "tow/exact.hpp"
#include "tow/solver.hpp"

namespace tow {

// Sectioned key-value config. Values stay strings until a subcommand asks for
// them, so a markov-only file does not need a valid [domain].
class RunConfig {
 public:
  static RunConfig parse(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::string t = trim(line);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
        section = trim(t.substr(1, t.size() - 2));
        if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
      cfg.sections_[section][key] = value;
    }
    return cfg;
  }

  static RunConfig load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
  }

  bool has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  const std::string& get(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) throw ConfigError("missing section [" + section + "]");
    auto k = s->second.find(key);
    if (k == s->second.end())
      throw ConfigError("missing key '" + key + "' in section [" + section + "]");
    return k->second;
  }

  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
  }

  double number(const std::string& section, const std::string& key) const {
    return to_number(get(section, key), section, key);
  }

  double number_or(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
  }

  std::vector<double> numbers(const std::string& section, const std::string& key) const {
    std::istringstream in(get(section, key));
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(to_number(tok, section, key));
    if (out.empty()) throw ConfigError("key '" + key + "' in [" + section + "] holds no numbers");
    return out;
  }

  // ---- typed assembly; each piece validates through its owning module ----

  DomainSpec domain() const {
    std::string kind = get("domain", "kind");
    DomainSpec d;
    if (kind == "interval") {
      d = DomainSpec::make_interval(number("domain", "a"), number("domain", "b"));
    } else if (kind == "ball") {
      d = DomainSpec::make_ball(vec("domain", "center"), number("domain", "radius"));
    } else if (kind == "box") {
      d = DomainSpec::make_box(vec("domain", "lo"), vec("domain", "hi"));
    } else if (kind == "polygon2d") {
      auto flat = numbers("domain", "vertices");
      if (flat.size() % 2 != 0) throw ConfigError("polygon vertices need an even number count");
      std::vector<Vec> vs;
      for (std::size_t i = 0; i + 1 < flat.size(); i += 2) vs.push_back(Vec{flat[i], flat[i + 1]});
      d = DomainSpec::make_polygon(vs);
    } else {
      throw ConfigError("unknown domain kind '" + kind + "'");
    }
    validate_domain(d);
    return d;
  }

  GeneratorMatrix generator() const {
    int m = static_cast<int>(number("generator", "m"));
    auto rows = numbers("generator", "rows");
    return validate_generator(m, rows);
  }

  std::vector<std::string> boundary_sources(int m) const {
    std::vector<std::string> out;
    for (int i = 1; i <= m; ++i) out.push_back(get("boundary", "g" + std::to_string(i)));
    return out;
  }

  ProblemSpec problem() const {
    ProblemSpec spec;
    spec.domain = domain();
    spec.generator = generator();
    for (const std::string& src : boundary_sources(spec.generator.m)) {
      BoundaryExpr e = parse_boundary_expr(src);
      spec.g.push_back([e](const Vec& x) { return e.eval(x); });
    }
    spec.eps = number_or("solver", "eps", spec.eps);
    spec.h = number_or("solver", "h", spec.h);
    spec.D = static_cast<int>(number_or("solver", "directions", spec.D));
    spec.tol = number_or("solver", "tol", spec.tol);
    spec.max_iters = static_cast<long>(number_or("solver", "max_iters", 0));
    spec.theta = number_or("solver", "theta", spec.theta);
    validate_problem(spec);
    return spec;
  }

  ConePair cone() const {
    ConePair p;
    p.C1 = number("cones", "c1");
    p.C2 = number("cones", "c2");
    p.a = number("cones", "a");
    p.b = number("cones", "b");
    p.vertex = has("cones", "vertex") ? vec("cones", "vertex") : Vec{0.0, 0.0};
    return p;
  }

  Vec vec(const std::string& section, const std::string& key) const {
    auto xs = numbers(section, key);
    if (xs.size() < 1 || xs.size() > 2)
      throw ConfigError("key '" + key + "' in [" + section + "] must hold 1 or 2 numbers");
    Vec v = Vec::zero(static_cast<int>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<int>(i)] = xs[i];
    return v;
  }

  std::uint64_t seed() const {
    return static_cast<std::uint64_t>(number_or("game", "seed", 0));
  }

  std::string out_dir() const { return get_or("output", "dir", "out"); }
  bool write_pgm_images() const { return number_or("output", "pgm", 1) != 0; }

 private:
  static std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  }

  static double to_number(const std::string& tok, const std::string& section,
                          const std::string& key) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "' in [" + section + "]: '" + tok + "' is not a number");
    }
    if (used != tok.size())
      throw ConfigError("key '" + key + "' in [" + section + "]: '" + tok + "' is not a number");
    return v;
  }

  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace tow
