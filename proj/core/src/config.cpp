#include "coulomb/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace coulomb::config {

namespace {

std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + what);
}

bool bare_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

// Parses a dotted key made of bare or quoted parts.
std::string parse_key(const std::string& raw, int line) {
  std::string out;
  size_t i = 0;
  const std::string s = trim(raw);
  if (s.empty()) fail(line, "empty key");
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    std::string part;
    if (s[i] == '"' || s[i] == '\'') {
      const char q = s[i++];
      while (i < s.size() && s[i] != q) part += s[i++];
      if (i == s.size()) fail(line, "unterminated quoted key");
      ++i;
    } else {
      while (i < s.size() && bare_key_char(s[i])) part += s[i++];
      if (part.empty()) fail(line, "invalid key '" + s + "'");
    }
    while (i < s.size() && s[i] == ' ') ++i;
    out += part;
    if (i < s.size()) {
      if (s[i] != '.') fail(line, "invalid key '" + s + "'");
      out += '.';
      ++i;
    }
  }
  return out;
}

// Index of the first '#' outside a string, or npos.
size_t comment_start(const std::string& s) {
  char quote = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == '\\' && quote == '"') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return i;
    }
  }
  return std::string::npos;
}

Value parse_value(const std::string& raw, int line) {
  const std::string s = trim(raw);
  if (s.empty()) fail(line, "missing value");
  Value v;
  if (s.front() == '"') {
    v.type = Value::Type::string;
    size_t i = 1;
    for (; i < s.size() && s[i] != '"'; ++i) {
      if (s[i] == '\\') {
        if (++i == s.size()) fail(line, "dangling escape");
        switch (s[i]) {
          case 'n': v.text += '\n'; break;
          case 't': v.text += '\t'; break;
          case '"': v.text += '"'; break;
          case '\\': v.text += '\\'; break;
          default: fail(line, std::string("unsupported escape \\") + s[i]);
        }
      } else {
        v.text += s[i];
      }
    }
    if (i != s.size() - 1) fail(line, "malformed string");
    return v;
  }
  if (s.front() == '\'') {
    if (s.size() < 2 || s.back() != '\'' || s.find('\'', 1) != s.size() - 1) fail(line, "malformed literal string");
    v.type = Value::Type::string;
    v.text = s.substr(1, s.size() - 2);
    return v;
  }
  if (s.front() == '[' || s.front() == '{') fail(line, "arrays and inline tables are not supported");
  if (s == "true" || s == "false") {
    v.type = Value::Type::boolean;
    v.boolean = s == "true";
    return v;
  }
  std::string num;
  for (char c : s)
    if (c != '_') num += c;
  const std::string body = (num.front() == '+' || num.front() == '-') ? num.substr(1) : num;
  if (body == "inf" || body == "nan") {
    v.type = Value::Type::real;
    v.real = body == "inf" ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
    if (num.front() == '-') v.real = -v.real;
    return v;
  }
  const bool is_real = num.find_first_of(".eE") != std::string::npos;
  size_t used = 0;
  try {
    if (is_real) {
      v.type = Value::Type::real;
      v.real = std::stod(num, &used);
    } else {
      v.type = Value::Type::integer;
      v.integer = std::stoll(num, &used);
      v.real = static_cast<double>(v.integer);
    }
  } catch (const std::exception&) {
    fail(line, "invalid value '" + s + "'");
  }
  if (used != num.size()) fail(line, "invalid value '" + s + "'");
  return v;
}

const char* type_name(Value::Type t) {
  switch (t) {
    case Value::Type::string: return "string";
    case Value::Type::integer: return "integer";
    case Value::Type::real: return "real";
    case Value::Type::boolean: return "boolean";
  }
  return "?";
}

}  // namespace

Document Document::parse(std::istream& in) {
  Document doc;
  std::string table;
  std::string line_text;
  int line = 0;
  while (std::getline(in, line_text)) {
    ++line;
    const size_t c = comment_start(line_text);
    const std::string s = trim(c == std::string::npos ? line_text : line_text.substr(0, c));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.size() < 3 || s.back() != ']' || s[1] == '[') fail(line, "malformed table header");
      table = parse_key(s.substr(1, s.size() - 2), line);
      continue;
    }
    const size_t eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected key = value");
    const std::string key = parse_key(s.substr(0, eq), line);
    const std::string full = table.empty() ? key : table + "." + key;
    if (doc.values_.count(full)) fail(line, "duplicate key '" + full + "'");
    doc.values_[full] = parse_value(s.substr(eq + 1), line);
  }
  return doc;
}

Document Document::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

Document Document::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in);
}

const Value* Document::find(const std::string& key) const {
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::vector<std::string> Document::keys_in(const std::string& table) const {
  std::vector<std::string> out;
  const std::string prefix = table.empty() ? "" : table + ".";
  for (const auto& [k, v] : values_) {
    if (k.compare(0, prefix.size(), prefix) != 0) continue;
    const std::string rest = k.substr(prefix.size());
    if (rest.find('.') == std::string::npos) out.push_back(rest);
  }
  return out;
}

std::string Document::get_string(const std::string& key, const std::optional<std::string>& fallback) const {
  const Value* v = find(key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "'");
  }
  if (v->type != Value::Type::string)
    throw ConfigError("key '" + key + "' must be a string, got " + type_name(v->type));
  return v->text;
}

long long Document::get_int(const std::string& key, const std::optional<long long>& fallback) const {
  const Value* v = find(key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "'");
  }
  if (v->type != Value::Type::integer)
    throw ConfigError("key '" + key + "' must be an integer, got " + type_name(v->type));
  return v->integer;
}

double Document::get_double(const std::string& key, const std::optional<double>& fallback) const {
  const Value* v = find(key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "'");
  }
  if (v->type != Value::Type::real && v->type != Value::Type::integer)
    throw ConfigError("key '" + key + "' must be a number, got " + type_name(v->type));
  return v->real;
}

bool Document::get_bool(const std::string& key, const std::optional<bool>& fallback) const {
  const Value* v = find(key);
  if (!v) {
    if (fallback) return *fallback;
    throw ConfigError("missing key '" + key + "'");
  }
  if (v->type != Value::Type::boolean)
    throw ConfigError("key '" + key + "' must be a boolean, got " + type_name(v->type));
  return v->boolean;
}

}  // namespace coulomb::config
