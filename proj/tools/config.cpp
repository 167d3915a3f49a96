#include "config.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace semicl::cli {

Section::Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
}

bool Section::has(const std::string& key) const { return j_.contains(key); }

const json& Section::raw(const std::string& key) {
  used_.insert(key);
  return j_.at(key);
}

Section Section::child(const std::string& key) {
  if (!has(key)) throw ValidationError(path_ + ": missing section '" + key + "'");
  return Section(raw(key), path_ + "." + key);
}

double Section::positive(const std::string& key, double fallback) {
  const double v = get<double>(key, fallback);
  if (!(v > 0.0)) throw ValidationError(fmt::format("{}.{}: must be positive, got {}", path_, key, v));
  return v;
}

void Section::finish() const {
  std::string unknown;
  for (const auto& [k, v] : j_.items())
    if (!used_.count(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  if (!unknown.empty()) throw ValidationError(path_ + ": unknown key(s) " + unknown);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ValidationError("config " + path + ": " + e.what());
  }
}

std::string config_hash(const std::string& command, const json& config, unsigned long long seed) {
  const std::string text = command + "\n" + config.dump() + "\n" + std::to_string(seed);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace semicl::cli
