#include "bsip/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bsip/error.hpp"

namespace bsip {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t.empty()) throw InputError("empty numeric field");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw InputError("not a number: '" + t + "'");
  }
  if (used != t.size()) throw InputError("not a number: '" + t + "'");
  if (!std::isfinite(v)) throw InputError("non-finite value: '" + t + "'");
  return v;
}

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError(origin, line, "expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    if (key.empty()) throw ParseError(origin, line, "empty key");
    if (cfg.entries_.count(key)) throw ParseError(origin, line, "duplicate key '" + key + "'");
    cfg.entries_[key] = ConfigEntry{trim(body.substr(eq + 1)), line};
  }
  return cfg;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  return parse(read_text_file(path), path);
}

std::vector<std::string> KeyValueConfig::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

const ConfigEntry& KeyValueConfig::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ParseError(origin_, 0, "missing key '" + key + "'");
  return it->second;
}

std::string KeyValueConfig::string(const std::string& key) const { return entry(key).value; }

std::string KeyValueConfig::string_or(const std::string& key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

double KeyValueConfig::number(const std::string& key) const {
  const auto& e = entry(key);
  try {
    return parse_double(e.value);
  } catch (const InputError& err) {
    throw ParseError(origin_, e.line, key + ": " + err.what());
  }
}

double KeyValueConfig::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

long KeyValueConfig::integer_or(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const double v = number(key);
  if (v != std::floor(v)) throw ParseError(origin_, entry(key).line, key + ": expected an integer");
  return static_cast<long>(v);
}

std::vector<double> KeyValueConfig::numbers(const std::string& key, std::size_t count) const {
  const auto& e = entry(key);
  std::string v = e.value;
  for (char& c : v) {
    if (c == ',') c = ' ';
  }
  std::istringstream in(v);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) {
    try {
      out.push_back(parse_double(tok));
    } catch (const InputError& err) {
      throw ParseError(origin_, e.line, key + ": " + err.what());
    }
  }
  if (out.size() != count) {
    throw ParseError(origin_, e.line,
                     key + ": expected " + std::to_string(count) + " values, got " +
                         std::to_string(out.size()));
  }
  return out;
}

}  // namespace bsip
