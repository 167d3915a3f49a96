#pragma once

#include <filesystem>
#include <functional>
#include <string>

#include "config.hpp"

namespace semicl::cli {

struct RunContext {
  std::string command;
  json config;
  std::filesystem::path config_dir;
  std::filesystem::path out;
  unsigned long long seed = 0;
  unsigned threads = 1;
  bool force = false;
  std::string hash;
};

/// Runs one experiment command; throws the library error types on failure.
void run_command(const RunContext& ctx);

/// Writes `body` to out/name behind a '# config_hash=...' line.
void emit(const RunContext& ctx, const std::string& name, const std::string& body);

/// Calls task(i) for i in [0, count) on at most `threads` workers; rethrows the first failure.
void parallel_for(unsigned threads, std::size_t count, const std::function<void(std::size_t)>& task);

struct RegressOptions {
  std::filesystem::path golden;
  std::filesystem::path out;
  unsigned threads = 1;
  bool update = false;
};

/// Regenerates every run listed in golden/manifest.json and compares numeric cells.
/// Returns true when every file matches.
bool regress(const RegressOptions& opt);

}  // namespace semicl::cli
