#pragma once

// Run configuration as flat dotted keys, read from a TOML subset that covers
// what the shipped config files need: [section] headers, key = value pairs,
// strings, bools, integers, floats, nested inline arrays, and # comments.
// The canonical writer emits sorted keys so a resolved-config snapshot is
// byte-stable and hashable.

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace skirmish {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigValue;
using ConfigArray = std::vector<ConfigValue>;

struct ConfigValue {
  std::variant<bool, std::int64_t, double, std::string, ConfigArray> v;

  bool is_array() const { return std::holds_alternative<ConfigArray>(v); }

  bool as_bool() const {
    if (auto* b = std::get_if<bool>(&v)) return *b;
    throw ConfigError("config value is not a bool");
  }
  std::int64_t as_int() const {
    if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
    throw ConfigError("config value is not an integer");
  }
  double as_double() const {
    if (auto* d = std::get_if<double>(&v)) return *d;
    if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    throw ConfigError("config value is not a number");
  }
  const std::string& as_string() const {
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    throw ConfigError("config value is not a string");
  }
  const ConfigArray& as_array() const {
    if (auto* a = std::get_if<ConfigArray>(&v)) return *a;
    throw ConfigError("config value is not an array");
  }
};

namespace detail {

struct ValueParser {
  const std::string& s;
  std::size_t pos = 0;
  int line;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
  }

  void skip_ws() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  ConfigValue parse() {
    skip_ws();
    if (pos >= s.size()) fail("missing value");
    char c = s[pos];
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    return parse_scalar();
  }

  ConfigValue parse_string() {
    ++pos;  // opening quote
    std::string out;
    while (pos < s.size() && s[pos] != '"') {
      if (s[pos] == '\\' && pos + 1 < s.size()) {
        ++pos;
        switch (s[pos]) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail("unknown escape");
        }
      } else {
        out.push_back(s[pos]);
      }
      ++pos;
    }
    if (pos >= s.size()) fail("unterminated string");
    ++pos;  // closing quote
    return {out};
  }

  ConfigValue parse_array() {
    ++pos;  // '['
    ConfigArray arr;
    skip_ws();
    while (true) {
      skip_ws();
      if (pos >= s.size()) fail("unterminated array");
      if (s[pos] == ']') {
        ++pos;
        break;
      }
      arr.push_back(parse());
      skip_ws();
      if (pos < s.size() && s[pos] == ',') {
        ++pos;
        continue;
      }
      if (pos < s.size() && s[pos] == ']') {
        ++pos;
        break;
      }
      fail("expected ',' or ']' in array");
    }
    return {arr};
  }

  ConfigValue parse_scalar() {
    std::size_t start = pos;
    while (pos < s.size() && s[pos] != ',' && s[pos] != ']' && s[pos] != '#' && s[pos] != ' ' &&
           s[pos] != '\t') {
      ++pos;
    }
    std::string tok = s.substr(start, pos - start);
    if (tok == "true") return {true};
    if (tok == "false") return {false};
    // Integer if it parses fully without . e E
    if (tok.find_first_of(".eE") == std::string::npos ||
        (tok.size() > 1 && tok.find_first_of(".eE", 2) == std::string::npos &&
         tok[0] == '0' && tok[1] == 'x')) {
      try {
        std::size_t used = 0;
        long long i = std::stoll(tok, &used, 0);
        if (used == tok.size()) return {static_cast<std::int64_t>(i)};
      } catch (...) {
      }
    }
    try {
      std::size_t used = 0;
      double d = std::stod(tok, &used);
      if (used == tok.size()) return {d};
    } catch (...) {
    }
    fail("malformed value '" + tok + "'");
  }
};

inline void format_value(std::ostream& os, const ConfigValue& v) {
  if (auto* b = std::get_if<bool>(&v.v)) {
    os << (*b ? "true" : "false");
  } else if (auto* i = std::get_if<std::int64_t>(&v.v)) {
    os << *i;
  } else if (auto* d = std::get_if<double>(&v.v)) {
    std::ostringstream tmp;
    tmp.precision(17);
    tmp << *d;
    std::string t = tmp.str();
    if (t.find_first_of(".eEn") == std::string::npos) t += ".0";
    os << t;
  } else if (auto* s = std::get_if<std::string>(&v.v)) {
    os << '"';
    for (char c : *s) {
      if (c == '"' || c == '\\') os << '\\';
      os << c;
    }
    os << '"';
  } else {
    const auto& arr = std::get<ConfigArray>(v.v);
    os << '[';
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (i) os << ", ";
      format_value(os, arr[i]);
    }
    os << ']';
  }
}

}  // namespace detail

// Flat map of dotted keys to values. Later sources override earlier ones.
class ConfigMap {
 public:
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  void set(const std::string& key, ConfigValue v) { values_[key] = std::move(v); }

  const ConfigValue& at(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
  }

  bool get_bool(const std::string& key, bool dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second.as_bool();
  }
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second.as_int();
  }
  double get_double(const std::string& key, double dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second.as_double();
  }
  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second.as_string();
  }

  // Parses `text` in the TOML subset and merges it over existing entries.
  void merge_toml(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = strip_comment(raw);
      std::size_t b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos) continue;
      std::size_t e = line.find_last_not_of(" \t\r");
      line = line.substr(b, e - b + 1);
      if (line.front() == '[') {
        if (line.back() != ']' || line.size() < 3) {
          throw ConfigError("config line " + std::to_string(line_no) + ": malformed section");
        }
        section = line.substr(1, line.size() - 2);
        continue;
      }
      std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
      }
      std::string key = trim(line.substr(0, eq));
      if (key.empty()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
      }
      std::string rhs = line.substr(eq + 1);
      detail::ValueParser vp{rhs, 0, line_no};
      ConfigValue v = vp.parse();
      vp.skip_ws();
      if (vp.pos != rhs.size()) {
        throw ConfigError("config line " + std::to_string(line_no) + ": trailing characters");
      }
      set(section.empty() ? key : section + "." + key, std::move(v));
    }
  }

  void merge_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    merge_toml(ss.str());
  }

  // `key=value` command-line override; value parsed with the same grammar.
  void merge_override(const std::string& assignment) {
    std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override must look like key=value: '" + assignment + "'");
    }
    std::string rhs = assignment.substr(eq + 1);
    detail::ValueParser vp{rhs, 0, 0};
    ConfigValue v = vp.parse();
    set(trim(assignment.substr(0, eq)), std::move(v));
  }

  // Canonical TOML: sections sorted, keys sorted within a section.
  std::string to_toml() const {
    std::map<std::string, std::map<std::string, const ConfigValue*>> grouped;
    for (const auto& [key, value] : values_) {
      std::size_t dot = key.rfind('.');
      std::string section = dot == std::string::npos ? "" : key.substr(0, dot);
      std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
      grouped[section][name] = &value;
    }
    std::ostringstream os;
    for (const auto& [section, entries] : grouped) {
      if (!section.empty()) os << '[' << section << "]\n";
      for (const auto& [name, value] : entries) {
        os << name << " = ";
        detail::format_value(os, *value);
        os << '\n';
      }
    }
    return os.str();
  }

  const std::map<std::string, ConfigValue>& entries() const { return values_; }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  // Strips a # comment that is not inside a quoted string.
  static std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
      if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
  }

  std::map<std::string, ConfigValue> values_;
};

// FNV-1a over bytes; the determinism hashes in traces and checkpoints use it.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t h = 0xcbf29ce484222325ull) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) {
  return fnv1a(s.data(), s.size(), h);
}

inline std::uint64_t config_hash(const ConfigMap& cfg) { return fnv1a(cfg.to_toml()); }

}  // namespace skirmish
