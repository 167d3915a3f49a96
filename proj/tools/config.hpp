#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "semicl/errors.hpp"

namespace semicl::cli {

using json = nlohmann::json;

/// Strict view of one JSON object: every key must be consumed before finish().
class Section {
 public:
  Section(const json& j, std::string path);

  bool has(const std::string& key) const;
  const json& raw(const std::string& key);
  Section child(const std::string& key);

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) {
      used_.insert(key);
      return fallback;
    }
    return convert<T>(raw(key), key);
  }

  template <class T>
  T require(const std::string& key) {
    if (!has(key)) throw ValidationError(path_ + ": missing key '" + key + "'");
    return convert<T>(raw(key), key);
  }

  double positive(const std::string& key, double fallback);

  /// Throws on keys that were never read.
  void finish() const;
  const std::string& path() const { return path_; }

 private:
  template <class T>
  T convert(const json& v, const std::string& key) const {
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ValidationError(path_ + "." + key + ": wrong type");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

json load_json(const std::string& path);

/// FNV-1a over the canonical dump of (command, config, seed).
std::string config_hash(const std::string& command, const json& config, unsigned long long seed);

}  // namespace semicl::cli
