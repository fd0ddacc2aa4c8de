#include "ddmpc/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ddmpc {
namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& what) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError("expected a number for " + what + ", got '" + s + "'");
  return v;
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key=value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.set(section.empty() ? key : section + "." + key, value);
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), path);
}

bool Config::has(const std::string& key) const { return kv_.count(key) != 0; }

void Config::set(const std::string& key, const std::string& value) {
  if (kv_.emplace(key, value).second)
    order_.push_back(key);
  else
    kv_[key] = value;
}

std::string Config::get_str(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string Config::get_str(const std::string& key, const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::get_num(const std::string& key) const { return to_double(get_str(key), key); }

double Config::get_num(const std::string& key, double fallback) const {
  return has(key) ? get_num(key) : fallback;
}

long Config::get_int(const std::string& key) const {
  const double v = get_num(key);
  const long r = static_cast<long>(v);
  if (static_cast<double>(r) != v)
    throw ConfigError("expected an integer for '" + key + "', got '" + get_str(key) + "'");
  return r;
}

long Config::get_int(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool Config::get_bool(const std::string& key) const {
  const std::string v = get_str(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean for '" + key + "', got '" + v + "'");
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

Vec Config::get_vec(const std::string& key) const { return parse_vec(get_str(key), key); }

Mat Config::get_mat(const std::string& key) const { return parse_mat(get_str(key), key); }

std::string Config::serialize() const {
  std::string out;
  std::string section;
  for (const auto& key : order_) {
    const size_t dot = key.find('.');
    const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
    const std::string bare = dot == std::string::npos ? key : key.substr(dot + 1);
    if (sec != section) {
      if (!out.empty()) out += "\n";
      out += "[" + sec + "]\n";
      section = sec;
    }
    out += bare + " = " + kv_.at(key) + "\n";
  }
  return out;
}

void Config::merge(const Config& other) {
  for (const auto& key : other.keys()) set(key, other.get_str(key));
}

Vec parse_vec(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty component in vector '" + what + "'");
    vals.push_back(to_double(item, what));
  }
  if (vals.empty()) throw ConfigError("empty vector for '" + what + "'");
  Vec v(static_cast<int>(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v(static_cast<int>(i)) = vals[i];
  return v;
}

Mat parse_mat(const std::string& text, const std::string& what) {
  std::vector<Vec> rows;
  std::string row;
  std::istringstream in(text);
  while (std::getline(in, row, ';')) rows.push_back(parse_vec(row, what));
  if (rows.empty()) throw ConfigError("empty matrix for '" + what + "'");
  Mat m(static_cast<int>(rows.size()), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols())
      throw ConfigError("ragged rows in matrix '" + what + "'");
    m.row(static_cast<int>(i)) = rows[i].transpose();
  }
  return m;
}

namespace {
std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

std::string format_vec(const Vec& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt17(v(i));
  }
  return out;
}

std::string format_mat(const Mat& m) {
  std::string out;
  for (int i = 0; i < m.rows(); ++i) {
    if (i) out += ";";
    out += format_vec(m.row(i).transpose());
  }
  return out;
}

}  // namespace ddmpc
