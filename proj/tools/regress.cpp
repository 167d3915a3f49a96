#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "commands.hpp"

namespace semicl::cli {

namespace fs = std::filesystem;

namespace {

struct Tolerance {
  double rel = 1e-12;
  double abs = 0.0;
};

std::vector<std::vector<std::string>> read_cells(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    if (!line.empty() && line[0] == '#') {
      cells.push_back(line);
    } else {
      std::string cell;
      std::istringstream ls(line);
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  char* end = nullptr;
  v = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

// Returns the list of violated cells.
std::vector<std::string> compare_files(const fs::path& golden, const fs::path& fresh, const Tolerance& tol) {
  std::vector<std::string> bad;
  const auto a = read_cells(golden), b = read_cells(fresh);
  if (a.size() != b.size()) bad.push_back(fmt::format("row count {} vs {}", a.size(), b.size()));
  for (std::size_t r = 0; r < std::min(a.size(), b.size()); ++r) {
    if (a[r].size() != b[r].size()) {
      bad.push_back(fmt::format("row {}: {} vs {} cells", r + 1, a[r].size(), b[r].size()));
      continue;
    }
    for (std::size_t c = 0; c < a[r].size(); ++c) {
      double x, y;
      if (parse_number(a[r][c], x) && parse_number(b[r][c], y)) {
        const double diff = std::abs(x - y);
        if (!(diff <= tol.abs + tol.rel * std::abs(x)) && !(std::isnan(x) && std::isnan(y)))
          bad.push_back(fmt::format("row {} col {}: golden {} fresh {} (diff {:.3g})", r + 1, c + 1, a[r][c], b[r][c], diff));
      } else if (a[r][c] != b[r][c]) {
        bad.push_back(fmt::format("row {} col {}: golden '{}' fresh '{}'", r + 1, c + 1, a[r][c], b[r][c]));
      }
    }
  }
  return bad;
}

Tolerance parse_tolerance(const json& j, Tolerance fallback, const std::string& path) {
  Section s(j, path);
  fallback.rel = s.get<double>("rel", fallback.rel);
  fallback.abs = s.get<double>("abs", fallback.abs);
  s.finish();
  if (fallback.rel < 0.0 || fallback.abs < 0.0) throw ValidationError(path + ": tolerances must be >= 0");
  return fallback;
}

}  // namespace

bool regress(const RegressOptions& opt) {
  const fs::path manifest_path = opt.golden / "manifest.json";
  const json manifest = load_json(manifest_path.string());
  Section top(manifest, "manifest");
  const json& runs = top.raw("runs");
  top.finish();
  if (!runs.is_array()) throw ValidationError("manifest.runs: expected a list");

  bool ok = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    Section run(runs[i], fmt::format("manifest.runs[{}]", i));
    const auto name = run.require<std::string>("name");
    RunContext ctx;
    ctx.command = run.require<std::string>("command");
    fs::path config = run.require<std::string>("config");
    if (config.is_relative()) config = opt.golden / config;
    ctx.seed = run.get<unsigned long long>("seed", 0);
    Tolerance base;
    base.rel = run.get<double>("rel", base.rel);
    base.abs = run.get<double>("abs", base.abs);
    const json& files = run.raw("files");
    run.finish();
    if (!files.is_object() || files.empty()) throw ValidationError(fmt::format("manifest.runs[{}].files: expected a non-empty object", i));

    ctx.config = load_json(config.string());
    ctx.config_dir = config.parent_path();
    ctx.out = opt.out / name;
    ctx.threads = opt.threads;
    ctx.hash = config_hash(ctx.command, ctx.config, ctx.seed);
    fs::remove_all(ctx.out);
    run_command(ctx);

    const fs::path golden_dir = opt.golden / name;
    for (const auto& [file, tol_json] : files.items()) {
      const Tolerance tol = parse_tolerance(tol_json, base, fmt::format("manifest.runs[{}].files.{}", i, file));
      const fs::path g = golden_dir / file, f = ctx.out / file;
      if (opt.update) {
        if (!fs::exists(f)) throw ValidationError(fmt::format("{}: run did not produce {}", name, file));
        fs::create_directories(golden_dir);
        fs::copy_file(f, g, fs::copy_options::overwrite_existing);
        std::cout << fmt::format("UPDATED {}/{}\n", name, file);
        continue;
      }
      if (!fs::exists(g) || !fs::exists(f)) {
        ok = false;
        std::cout << fmt::format("FAIL {}/{}: missing ({}golden, {}fresh)\n", name, file, fs::exists(g) ? "" : "no ",
                                 fs::exists(f) ? "" : "no ");
        continue;
      }
      const auto bad = compare_files(g, f, tol);
      if (bad.empty()) {
        std::cout << fmt::format("PASS {}/{}\n", name, file);
      } else {
        ok = false;
        std::cout << fmt::format("FAIL {}/{}: {} cell(s)\n", name, file, bad.size());
        for (const auto& b : bad) std::cout << "  " << b << "\n";
      }
    }
    if (!opt.update && fs::exists(golden_dir)) {
      // inventory: golden files the manifest does not mention
      for (const auto& entry : fs::directory_iterator(golden_dir)) {
        const std::string fname = entry.path().filename().string();
        if (!files.contains(fname)) {
          ok = false;
          std::cout << fmt::format("FAIL {}/{}: golden file not listed in the manifest\n", name, fname);
        }
      }
    }
  }
  return ok;
}

}  // namespace semicl::cli
