#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ddmpc/types.hpp"

namespace ddmpc {

struct ConfigError : Error {
  using Error::Error;
};

// Flat key-value configuration with [section] headers. Keys are addressed as
// "section.key"; keys before any header live in the "" section and are
// addressed bare. '#' starts a comment. Parse errors carry line numbers.
class Config {
 public:
  Config() = default;

  static Config parse_string(const std::string& text, const std::string& origin = "<string>");
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_str(const std::string& key) const;
  std::string get_str(const std::string& key, const std::string& fallback) const;
  double get_num(const std::string& key) const;
  double get_num(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;

  // Vectors are comma-separated scalars; matrices use ';' between rows.
  Vec get_vec(const std::string& key) const;
  Mat get_mat(const std::string& key) const;

  // Keys in first-set order, for stable serialization.
  const std::vector<std::string>& keys() const { return order_; }
  std::string serialize() const;

  // Other wins on conflicts (used for CLI flag overrides).
  void merge(const Config& other);

 private:
  std::map<std::string, std::string> kv_;
  std::vector<std::string> order_;
};

// Shared parsers for "1,2,3" vectors and "1,0;0,1" matrices.
Vec parse_vec(const std::string& text, const std::string& what);
Mat parse_mat(const std::string& text, const std::string& what);
std::string format_vec(const Vec& v);
std::string format_mat(const Mat& m);

}  // namespace ddmpc
