#include "motionauth/run/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "motionauth/errors.hpp"
#include "motionauth/rng.hpp"

namespace motionauth {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig RunConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                          ": unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": empty key");
    cfg.set(section.empty() ? key : section + "." + key, value);
  }
  return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

bool RunConfig::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string RunConfig::get_str(const std::string& key,
                               const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

int RunConfig::get_int(const std::string& key, int fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + it->second +
                      "'");
  }
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + it->second + "'");
  }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), ::tolower);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + it->second + "'");
}

std::uint64_t RunConfig::get_u64(const std::string& key,
                                 std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const std::uint64_t v = std::stoull(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an unsigned integer, got '" +
                      it->second + "'");
  }
}

void RunConfig::validate_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_)
    if (!allowed.count(key))
      throw ConfigError(key + ": unknown config key");
}

std::string RunConfig::digest() const {
  std::string canon;
  // out.dir does not influence any computed value; identical runs into
  // different directories must report the same digest.
  for (const auto& [key, value] : values_)
    if (key != "out.dir") canon += key + "=" + value + "\n";
  const std::uint64_t h = fnv1a(canon.data(), canon.size());
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace motionauth
