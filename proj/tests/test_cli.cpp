#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>

namespace fs = std::filesystem;

namespace {

const fs::path kGolden = SEMICL_GOLDEN;

struct Run {
  int code = -1;
  std::string output;
};

Run run(const std::string& args) {
  static int counter = 0;
  const fs::path log = fs::temp_directory_path() / ("semicl_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".log");
  const std::string cmd = std::string(SEMICL_EXE) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  fs::remove(log);
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("semicl_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& body) {
  const fs::path p = dir / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("oscillator run writes provenance headers") {
  const auto out = scratch("osc");
  const auto r = run("oscillator --config " + (kGolden / "configs/quartic_1d.json").string() + " --out " + out.string() + " --seed 3");
  REQUIRE(r.code == 0);
  const auto text = slurp(out / "coefficients.csv");
  CHECK(text.rfind("# config_hash=", 0) == 0);
  CHECK(text.find("command=oscillator seed=3\n") != std::string::npos);
  CHECK(text.find("k,e_k,delta_k\n") != std::string::npos);
  for (const char* f : {"fundamental.csv", "profiles.csv", "series.txt", "excited_1.csv", "excited_2.csv", "summary.csv"})
    CHECK(fs::exists(out / f));

  // same config and seed -> same hash; another seed -> another hash
  const auto again = scratch("osc2");
  REQUIRE(run("oscillator --config " + (kGolden / "configs/quartic_1d.json").string() + " --out " + again.string() + " --seed 3").code == 0);
  CHECK(slurp(again / "coefficients.csv") == text);
  const auto other = scratch("osc3");
  REQUIRE(run("oscillator --config " + (kGolden / "configs/quartic_1d.json").string() + " --out " + other.string() + " --seed 4").code == 0);
  CHECK(slurp(other / "coefficients.csv").substr(0, 30) != text.substr(0, 30));
}

TEST_CASE("worker count does not change results") {
  const auto one = scratch("t1"), two = scratch("t2");
  const auto cfg = (kGolden / "configs/coupled_2d.json").string();
  REQUIRE(run("oscillator --config " + cfg + " --out " + one.string() + " --threads 1").code == 0);
  REQUIRE(run("oscillator --config " + cfg + " --out " + two.string() + " --threads 2").code == 0);
  CHECK(slurp(one / "summary.csv") == slurp(two / "summary.csv"));
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  SUBCASE("unknown config key") {
    const auto cfg = write_config(dir, "bad.json", R"({"potential": {"omega": 1.0}, "order": 3, "ordr": 4})");
    const auto r = run("oscillator --config " + cfg.string() + " --out " + (dir / "o").string());
    CHECK(r.code == 2);
    CHECK(r.output.find("ordr") != std::string::npos);
  }
  SUBCASE("inadmissible potential") {
    const auto cfg = write_config(dir, "neg.json",
                                  R"({"potential": {"omega": 1.0, "terms": [{"exponents": [4], "coeff": -1.0}]}, "half_width": 2.0})");
    CHECK(run("validate --config " + cfg.string() + " --out " + (dir / "v").string()).code == 2);
    CHECK(fs::exists(dir / "v" / "validation.csv"));
    CHECK(run("oscillator --config " + cfg.string() + " --out " + (dir / "w").string()).code == 2);
  }
  SUBCASE("missing config file") {
    CHECK(run("oscillator --config " + (dir / "nope.json").string()).code == 2);
  }
  SUBCASE("malformed json") {
    const auto cfg = write_config(dir, "broken.json", "{\"order\": ");
    CHECK(run("resum --config " + cfg.string() + " --out " + (dir / "r").string()).code == 2);
  }
  SUBCASE("solver budget exhausted") {
    const auto cfg = write_config(dir, "budget.json", R"({
      "lattice": {"n": 1, "N": 16, "a": 0.5, "dt": 0.02, "poly": [0, 0, 0.5, 0, 0.1],
                  "boundary": {"modes": [{"wave": [1], "amp": 3.0}]}},
      "solver": {"max_newton": 1}})");
    const auto r = run("field --config " + cfg.string() + " --out " + (dir / "f").string());
    CHECK(r.code == 3);
  }
  SUBCASE("no subcommand") { CHECK(run("").code == 2); }
}

TEST_CASE("regress against the goldens") {
  const auto out = scratch("regress");
  const auto ok = run("regress --golden " + kGolden.string() + " --out " + out.string());
  CHECK(ok.code == 0);
  CHECK(ok.output.find("FAIL") == std::string::npos);
  CHECK(ok.output.find("PASS quartic_1d/coefficients.csv") != std::string::npos);

  SUBCASE("a perturbed golden cell fails") {
    const auto copy = scratch("golden_copy");
    fs::copy(kGolden, copy, fs::copy_options::recursive);
    const fs::path target = copy / "quartic_1d" / "coefficients.csv";
    std::string text = slurp(target);
    const auto pos = text.find("\n1,");
    REQUIRE(pos != std::string::npos);
    text.insert(pos + 3, "9");  // e_1 = 0.0075 -> 90.0075
    std::ofstream(target) << text;
    const auto r = run("regress --golden " + copy.string() + " --out " + (copy / "fresh").string());
    CHECK(r.code == 1);
    CHECK(r.output.find("FAIL quartic_1d/coefficients.csv") != std::string::npos);
    CHECK(r.output.find("row 4 col 2") != std::string::npos);
  }
  SUBCASE("an unlisted golden file fails the inventory") {
    const auto copy = scratch("golden_extra");
    fs::copy(kGolden, copy, fs::copy_options::recursive);
    std::ofstream(copy / "resum_quartic" / "stray.csv") << "a,b\n";
    const auto r = run("regress --golden " + copy.string() + " --out " + (copy / "fresh").string());
    CHECK(r.code == 1);
    CHECK(r.output.find("stray.csv") != std::string::npos);
  }
}
