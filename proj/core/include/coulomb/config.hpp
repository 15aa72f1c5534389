#pragma once

#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace coulomb::config {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scalar value of the flat TOML subset: strings, integers, floats, booleans.
struct Value {
  enum class Type { string, integer, real, boolean };

  Type type = Type::string;
  std::string text;
  long long integer = 0;
  double real = 0.0;
  bool boolean = false;
};

// Keys are stored fully qualified, "table.key". Arrays and inline tables
// are rejected.
class Document {
 public:
  static Document parse(std::istream& in);
  static Document parse_string(const std::string& text);
  static Document load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const Value* find(const std::string& key) const;
  // Keys directly under a table, without the prefix.
  std::vector<std::string> keys_in(const std::string& table) const;

  std::string get_string(const std::string& key, const std::optional<std::string>& fallback = {}) const;
  long long get_int(const std::string& key, const std::optional<long long>& fallback = {}) const;
  // Integers are accepted where reals are expected.
  double get_double(const std::string& key, const std::optional<double>& fallback = {}) const;
  bool get_bool(const std::string& key, const std::optional<bool>& fallback = {}) const;

  void set(const std::string& key, Value v) { values_[key] = std::move(v); }
  const std::map<std::string, Value>& values() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

}  // namespace coulomb::config
