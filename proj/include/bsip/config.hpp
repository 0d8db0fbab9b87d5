#pragma once

#include <map>
#include <string>
#include <vector>

namespace bsip {

// Line-oriented `key = value` files with `#` comments. Keys are unique.
struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};

class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text, const std::string& origin);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  const std::string& origin() const { return origin_; }
  std::vector<std::string> keys() const;

  std::string string(const std::string& key) const;
  std::string string_or(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  long integer_or(const std::string& key, long fallback) const;
  // Comma- or whitespace-separated list of exactly `count` numbers.
  std::vector<double> numbers(const std::string& key, std::size_t count) const;

 private:
  const ConfigEntry& entry(const std::string& key) const;

  std::string origin_;
  std::map<std::string, ConfigEntry> entries_;
};

std::string read_text_file(const std::string& path);

// Strict full-string conversion; throws InputError on trailing garbage or non-finite values.
double parse_double(const std::string& s);

}  // namespace bsip
