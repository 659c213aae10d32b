#include "hybrid/config.hpp"

#include "hybrid/types.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hybrid {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::string normalized = value;
  for (char& ch : normalized)
    if (ch == ',' || ch == ';' || ch == '[' || ch == ']') ch = ' ';
  std::istringstream in(normalized);
  std::vector<std::string> out;
  std::string token;
  while (in >> token) out.push_back(token);
  return out;
}

bool parse_number(const std::string& token, double& out) {
  if (token.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(token, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == token.size();
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ScenarioConfig ScenarioConfig::parse(const std::string& text) {
  ScenarioConfig config;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (config.has(key)) throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    config.entries_[key] = value;
  }
  return config;
}

ScenarioConfig ScenarioConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void ScenarioConfig::set(const std::string& key, const std::string& value) { entries_[key] = value; }

void ScenarioConfig::set(const std::string& key, double value) { entries_[key] = format_double(value); }

bool ScenarioConfig::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string ScenarioConfig::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string ScenarioConfig::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double ScenarioConfig::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  double value = 0.0;
  if (!parse_number(raw, value)) throw ConfigError("config key '" + key + "' is not a number: '" + raw + "'");
  return value;
}

double ScenarioConfig::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::optional<double> ScenarioConfig::get_optional(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_double(key);
}

int ScenarioConfig::get_int(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double value = get_double(key);
  if (value != static_cast<double>(static_cast<int>(value)))
    throw ConfigError("config key '" + key + "' must be an integer");
  return static_cast<int>(value);
}

std::vector<double> ScenarioConfig::get_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& token : split_list(get_string(key))) {
    double value = 0.0;
    if (!parse_number(token, value)) throw ConfigError("config key '" + key + "' has non-numeric entry '" + token + "'");
    out.push_back(value);
  }
  return out;
}

std::string ScenarioConfig::canonical_text() const {
  std::string out;
  for (const auto& [key, raw] : entries_) {
    const auto tokens = split_list(raw);
    std::string value;
    bool numeric = !tokens.empty();
    std::vector<double> numbers;
    for (const auto& token : tokens) {
      double x = 0.0;
      if (!parse_number(token, x)) {
        numeric = false;
        break;
      }
      numbers.push_back(x);
    }
    if (numeric) {
      for (std::size_t i = 0; i < numbers.size(); ++i) {
        if (i) value += ' ';
        value += format_double(numbers[i]);
      }
    } else {
      value = raw;
    }
    out += key + '=' + value + '\n';
  }
  return out;
}

std::string ScenarioConfig::digest() const {
  std::uint64_t hash = 14695981039346656037ull;
  for (const unsigned char ch : canonical_text()) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace hybrid
