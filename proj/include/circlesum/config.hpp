#pragma once

// Experiment configuration: a small sectioned key-value text format.
// Keys are addressed as "section.key"; values keep their source line for
// diagnostics. Example:
//
//   command = verify-dichotomy
//
//   [system]
//   n = 1
//   block2 = x1^2
//
//   [params]
//   P = 64
//   delta = 0.5
//   omega = 0.05
//   resolution = 4096
//
//   [run]
//   output = out/dichotomy
//   workers = 4

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "circlesum/system.hpp"

namespace circlesum {

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds = {
      "eval-sum",       "scan-alpha",        "count-variety",
      "estimate-g",     "compute-b1",        "thresholds",
      "verify-dichotomy", "singular-integral", "partial-summation-check"};
  return cmds;
}

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyValueConfig {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static KeyValueConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str());
  }

  static KeyValueConfig parse_text(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::string t = trim(strip_comment(line));
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']')
          throw ConfigError("line " + std::to_string(lineno) +
                            ": unterminated section header");
        section = trim(t.substr(1, t.size() - 2));
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("line " + std::to_string(lineno) +
                          ": expected key = value");
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (key.empty())
        throw ConfigError("line " + std::to_string(lineno) + ": empty key");
      std::string full = section.empty() ? key : section + "." + key;
      if (cfg.entries_.count(full))
        throw ConfigError("line " + std::to_string(lineno) +
                          ": duplicate key " + full);
      cfg.entries_[full] = {value, lineno};
    }
    return cfg;
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  const Entry& at(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw ConfigError("missing required config key '" + key + "'");
    return it->second;
  }

  std::string get_string(const std::string& key) const { return at(key).value; }

  std::string get_string_or(const std::string& key,
                            const std::string& fallback) const {
    return has(key) ? at(key).value : fallback;
  }

  long long get_int(const std::string& key) const {
    const Entry& e = at(key);
    try {
      std::size_t pos = 0;
      long long v = std::stoll(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                        "' expects an integer, got '" + e.value + "'");
    }
  }

  long long get_int_or(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
  }

  double get_double(const std::string& key) const {
    const Entry& e = at(key);
    try {
      std::size_t pos = 0;
      double v = std::stod(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw ConfigError("line " + std::to_string(e.line) + ": key '" + key +
                        "' expects a number, got '" + e.value + "'");
    }
  }

  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  std::vector<std::string> get_list(const std::string& key) const {
    const Entry& e = at(key);
    std::vector<std::string> out;
    std::string cur;
    for (char c : e.value) {
      if (c == ',') {
        out.push_back(trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    out.push_back(trim(cur));
    return out;
  }

  std::vector<double> get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : get_list(key)) {
      try {
        out.push_back(std::stod(s));
      } catch (...) {
        throw ConfigError("line " + std::to_string(at(key).line) + ": key '" +
                          key + "' has a non-numeric element '" + s + "'");
      }
    }
    return out;
  }

  std::vector<long long> get_int_list(const std::string& key) const {
    std::vector<long long> out;
    for (const auto& s : get_list(key)) {
      try {
        out.push_back(std::stoll(s));
      } catch (...) {
        throw ConfigError("line " + std::to_string(at(key).line) + ": key '" +
                          key + "' has a non-integer element '" + s + "'");
      }
    }
    return out;
  }

  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  static std::string strip_comment(const std::string& s) {
    auto pos = s.find('#');
    return pos == std::string::npos ? s : s.substr(0, pos);
  }
  static std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  std::map<std::string, Entry> entries_;
};

struct ExperimentConfig {
  std::string command;
  GradedSystem system;
  KeyValueConfig raw;
  std::string out_prefix = "run";
  unsigned workers = 1;
};

// Builds and validates the run configuration. `cli_command` must agree with
// any `command` key in the file. Overrides beat config values.
inline ExperimentConfig load_experiment(
    const KeyValueConfig& cfg, const std::string& cli_command,
    const std::optional<std::string>& out_override,
    const std::optional<unsigned>& workers_override) {
  ExperimentConfig ex;
  ex.raw = cfg;

  std::string file_command = cfg.get_string_or("command", cli_command);
  if (!cli_command.empty() && file_command != cli_command)
    throw ConfigError("config command '" + file_command +
                      "' conflicts with requested command '" + cli_command +
                      "'");
  ex.command = file_command;
  bool known = false;
  for (const auto& c : known_commands()) known = known || c == ex.command;
  if (!known) throw ConfigError("unknown command '" + ex.command + "'");

  // system section (optional for partial-summation-check)
  if (cfg.has("system.n")) {
    long long n = cfg.get_int("system.n");
    if (n < 1 || n > 32) throw ConfigError("system.n must lie in [1, 32]");
    ex.system.n = static_cast<int>(n);
    int d = 0;
    for (int ell = 1; ell <= 16; ++ell)
      if (cfg.has("system.block" + std::to_string(ell))) d = ell;
    ex.system.blocks.assign(d, {});
    for (int ell = 1; ell <= d; ++ell) {
      std::string key = "system.block" + std::to_string(ell);
      if (!cfg.has(key)) continue;
      for (const auto& text : cfg.get_list(key)) {
        if (text.empty()) continue;
        try {
          ex.system.blocks[ell - 1].push_back(
              parse_polynomial(text, ex.system.n));
        } catch (const std::invalid_argument& e) {
          throw ConfigError("line " + std::to_string(cfg.at(key).line) +
                            ": " + e.what());
        }
      }
    }
    auto violations = validate_system(ex.system);
    if (!violations.empty()) {
      std::string msg = "invalid system:";
      for (const auto& v : violations) msg += "\n  " + v.message;
      throw ConfigError(msg);
    }
  }

  ex.out_prefix = out_override.value_or(cfg.get_string_or("run.output", "run"));
  long long w = workers_override.has_value()
                    ? static_cast<long long>(*workers_override)
                    : cfg.get_int_or("run.workers", 1);
  if (w < 1 || w > 512) throw ConfigError("workers must lie in [1, 512]");
  ex.workers = static_cast<unsigned>(w);
  return ex;
}

}  // namespace circlesum
