#pragma once

#include <fstream>
#include <map>
#include <sstream>

#include "itw/common.hpp"

namespace itw {

// Flat sectioned key/value configuration:
//   [system]
//   name = H2
//   # comment
// Keys are addressed as "section.key".
class Config {
 public:
  static Config parse(std::istream& in) {
    Config c;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::string t = trim(line);
      if (t.empty()) continue;
      if (t.front() == '[') {
        if (t.back() != ']') throw ParseError("unterminated section header", lineno);
        section = trim(t.substr(1, t.size() - 2));
        continue;
      }
      auto eq = t.find('=');
      if (eq == std::string::npos) throw ParseError("expected key = value", lineno);
      std::string key = trim(t.substr(0, eq));
      std::string val = trim(t.substr(eq + 1));
      if (key.empty()) throw ParseError("empty key", lineno);
      c.kv_[section.empty() ? key : section + "." + key] = val;
    }
    return c;
  }

  static Config load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    return parse(f);
  }

  bool has(const std::string& key) const { return kv_.count(key) > 0; }
  void set(const std::string& key, const std::string& value) { kv_[key] = value; }

  std::string get(const std::string& key, const std::string& def = "") const {
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
  }
  std::string require(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw std::invalid_argument("missing config key: " + key);
    return it->second;
  }
  double get_double(const std::string& key, double def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("");
      return v;
    } catch (...) {
      throw std::invalid_argument("config key " + key + " is not a number: " + it->second);
    }
  }
  int get_int(const std::string& key, int def) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    try {
      return std::stoi(it->second);
    } catch (...) {
      throw std::invalid_argument("config key " + key + " is not an integer: " + it->second);
    }
  }
  std::vector<double> get_doubles(const std::string& key) const {
    std::vector<double> out;
    auto it = kv_.find(key);
    if (it == kv_.end()) return out;
    std::istringstream ss(it->second);
    double v;
    while (ss >> v) out.push_back(v);
    return out;
  }

  // canonical listing, re-parseable by parse()
  std::string echo() const {
    std::map<std::string, std::map<std::string, std::string>> by_section;
    for (const auto& [k, v] : kv_) {
      auto dotpos = k.find('.');
      if (dotpos == std::string::npos) by_section[""][k] = v;
      else by_section[k.substr(0, dotpos)][k.substr(dotpos + 1)] = v;
    }
    std::ostringstream os;
    for (const auto& [sec, kv] : by_section) {
      if (!sec.empty()) os << '[' << sec << "]\n";
      for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
    }
    return os.str();
  }

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  static std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }
  std::map<std::string, std::string> kv_;
};

}  // namespace itw
