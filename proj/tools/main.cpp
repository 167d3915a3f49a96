#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace semicl;
using namespace semicl::cli;

namespace {

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kInvalid = 2;
constexpr int kNoConvergence = 3;

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kInvalid;
  } catch (const ConvergenceError& e) {
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNoConvergence;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "file error: " << e.what() << "\n";
    return kInvalid;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical ground states: hierarchies, spectra, resummation and lattice fields"};
  app.require_subcommand(1);

  std::string config, out = "out", golden;
  unsigned long long seed = 0;
  unsigned threads = 1;
  bool force = false, update = false;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"oscillator", "Transport hierarchy in 1-D, action minimization in N-D"},
      {"field", "Lattice scalar field: minimizer, identities, virial sweep"},
      {"compare", "Hierarchy energy coefficients against Rayleigh-Schroedinger"},
      {"resum", "Pade and Borel-Pade sums of a series"},
      {"validate", "Sampled potential hypotheses"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "seed for randomized probes");
    sub->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
    sub->add_flag("--force", force, "skip potential validation");
  }
  auto* reg = app.add_subcommand("regress", "Regenerate golden runs and compare");
  reg->add_option("--golden", golden, "golden directory with manifest.json")->required()->check(CLI::ExistingDirectory);
  reg->add_option("--out", out, "scratch directory for fresh outputs");
  reg->add_option("--threads", threads, "worker threads")->check(CLI::Range(1u, 1024u));
  reg->add_flag("--update", update, "overwrite the goldens with fresh outputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  CLI::App* sub = app.get_subcommands().front();
  if (sub->get_name() == "regress") {
    return guarded([&] {
      RegressOptions opt;
      opt.golden = golden;
      opt.out = out;
      opt.threads = threads;
      opt.update = update;
      return regress(opt) ? kOk : kMismatch;
    });
  }
  return guarded([&] {
    RunContext ctx;
    ctx.command = sub->get_name();
    ctx.config = load_json(config);
    ctx.config_dir = std::filesystem::path(config).parent_path();
    ctx.out = out;
    ctx.seed = seed;
    ctx.threads = threads;
    ctx.force = force;
    ctx.hash = config_hash(ctx.command, ctx.config, seed);
    run_command(ctx);
    std::cerr << "wrote " << ctx.out.string() << " (config hash " << ctx.hash << ")\n";
    return kOk;
  });
}
