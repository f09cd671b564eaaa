#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "superdense/cli.hpp"
#include "superdense/measure.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace superdense;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out, err;
};

RunResult run(std::vector<std::string> args) {
  std::ostringstream out, err;
  RunResult r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::path("cli_test_runs") / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("config values parse, override, and round-trip") {
  const fs::path dir = fresh_dir("cfg");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg");
    f << "# comment line\n"
      << "gallery=cusp:m=4\n"
      << "  seed = 42\n"  // spaces around key and value are trimmed
      << "ladder.rungs=6\n";
  }
  RunConfig cfg;
  cfg.subcommand = "estimate";
  load_config_file((dir / "run.cfg").string(), cfg);
  CHECK(cfg.get("gallery", "") == "cusp:m=4");
  CHECK(cfg.get("seed", "") == "42");
  CHECK(cfg.get_int("ladder.rungs", 0) == 6);

  // render() parses back to the identical map.
  const std::string rendered = cfg.render();
  {
    std::ofstream f(dir / "echo.cfg");
    f << rendered;
  }
  RunConfig echo;
  load_config_file((dir / "echo.cfg").string(), echo);
  echo.values.erase("subcommand");
  CHECK(echo.values == cfg.values);

  CHECK_THROWS_AS(cfg.get_int("gallery", 0), ContractViolation);
  CHECK_THROWS_AS(cfg.get_double("gallery", 0.0), ContractViolation);

  RunConfig bad;
  {
    std::ofstream f(dir / "bad.cfg");
    f << "no equals sign here\n";
  }
  CHECK_THROWS_AS(load_config_file((dir / "bad.cfg").string(), bad), ContractViolation);
  CHECK_THROWS_AS(load_config_file("cli_test_runs/does-not-exist.cfg", bad),
                  ContractViolation);
}

TEST_CASE("estimate writes the diagnostic csv and honors overrides") {
  const fs::path dir = fresh_dir("estimate");
  const RunResult r = run({"estimate", "--set", "out=" + dir.string(), "--set",
                           "gallery=cusp:m=3", "--set", "quad.points=48"});
  CHECK(r.code == 0);
  CHECK(r.out.find("class finite") != std::string::npos);

  const std::string csv = slurp(dir / "degree.csv");
  CHECK(csv.rfind("x_1,x_2,r,residual,residual_err,quotient_n,class,exponent,stderr\n",
                  0) == 0);
  CHECK(csv.find("finite") != std::string::npos);

  const std::string resolved = slurp(dir / "resolved.cfg");
  CHECK(resolved.find("gallery=cusp:m=3\n") != std::string::npos);
  CHECK(resolved.find("quad.points=48\n") != std::string::npos);
  CHECK(resolved.find("seed=0\n") != std::string::npos);  // defaults made explicit
  CHECK(resolved.find("subcommand=estimate\n") != std::string::npos);

  const std::string manifest = slurp(dir / "manifest.txt");
  CHECK(manifest.find("degree.csv") != std::string::npos);
  CHECK(manifest.find("resolved.cfg") != std::string::npos);

  // No svg by default; flag-gated on.
  CHECK_FALSE(fs::exists(dir / "loglog_0.svg"));
  const fs::path dir2 = fresh_dir("estimate-svg");
  const RunResult r2 =
      run({"estimate", "--set", "out=" + dir2.string(), "--set", "svg=1"});
  CHECK(r2.code == 0);
  CHECK(fs::exists(dir2 / "loglog_0.svg"));
}

TEST_CASE("empty sample list yields a header-only csv and exit 0") {
  const fs::path dir = fresh_dir("estimate-empty");
  const RunResult r =
      run({"estimate", "--set", "out=" + dir.string(), "--set", "points="});
  CHECK(r.code == 0);
  CHECK(slurp(dir / "degree.csv") ==
        "x_1,x_2,r,residual,residual_err,quotient_n,class,exponent,stderr\n");
}

TEST_CASE("configuration errors exit 2") {
  CHECK(run({"estimate", "--set", "gallery=not-a-set",
             "--set", "out=cli_test_runs/bad1"}).code == 2);
  CHECK(run({"estimate", "--set", "points=0,0,0",
             "--set", "out=cli_test_runs/bad2"}).code == 2);  // dim mismatch
  CHECK(run({"estimate", "--set", "ladder.rungs=oops",
             "--set", "out=cli_test_runs/bad3"}).code == 2);
  CHECK(run({"approx", "--set", "target=mystery",
             "--set", "out=cli_test_runs/bad4"}).code == 2);
  CHECK(run({"estimate", "--set", "malformed"}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);
  const RunResult r = run({"estimate", "--set", "gallery=not-a-set",
                           "--set", "out=cli_test_runs/bad5"});
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("gallery-list prints the catalog") {
  const RunResult r = run({"gallery-list"});
  CHECK(r.code == 0);
  CHECK(r.out.find("cusp") != std::string::npos);
  CHECK(r.out.find("swiss") != std::string::npos);
  CHECK(r.out.find("graded") != std::string::npos);
  CHECK(r.out.find("expected") != std::string::npos);
}

TEST_CASE("help is help, not an error") {
  const RunResult r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("estimate") != std::string::npos);
  CHECK(r.out.find("gallery-list") != std::string::npos);
}

TEST_CASE("laws battery passes on the default pairing") {
  const fs::path dir = fresh_dir("laws");
  const RunResult r =
      run({"laws", "--set", "out=" + dir.string(), "--set", "pairs=5"});
  CHECK(r.code == 0);
  CHECK(r.out.find("min violations 0") != std::string::npos);
  CHECK(r.out.find("union exceeds both parts") != std::string::npos);
  const std::string csv = slurp(dir / "laws.csv");
  CHECK(csv.rfind("x_1,x_2,first_class", 0) == 0);
  CHECK(fs::exists(dir / "invariance.csv"));
}

TEST_CASE("identical seeds reproduce byte-identical outputs") {
  const fs::path a = fresh_dir("det-a"), b = fresh_dir("det-b");
  const std::vector<std::string> base = {"approx", "--set", "samples=4",
                                         "--set", "ks=4,5,6", "--set", "seed=11"};
  auto with_out = [&](const fs::path& dir) {
    std::vector<std::string> v = base;
    v.push_back("--set");
    v.push_back("out=" + dir.string());
    return v;
  };
  const RunResult ra = run(with_out(a));
  const RunResult rb = run(with_out(b));
  CHECK(ra.code == rb.code);
  CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
  CHECK(slurp(a / "pipeline.txt") == slurp(b / "pipeline.txt"));
  CHECK(slurp(a / "summary.txt") == slurp(b / "summary.txt"));

  // Replaying the exact same config (same out directory included) reproduces
  // every byte, the hash manifest with it.
  const std::string traj_first = slurp(a / "trajectory.csv");
  const std::string manifest_first = slurp(a / "manifest.txt");
  const RunResult ra2 = run(with_out(a));
  CHECK(ra2.code == ra.code);
  CHECK(slurp(a / "trajectory.csv") == traj_first);
  CHECK(slurp(a / "manifest.txt") == manifest_first);

  // A different seed must change the sampled trajectories.
  const fs::path c = fresh_dir("det-c");
  std::vector<std::string> diff = {"approx", "--set", "samples=4", "--set",
                                   "ks=4,5,6", "--set", "seed=12", "--set",
                                   "out=" + c.string()};
  run(diff);
  CHECK(slurp(a / "trajectory.csv") != slurp(c / "trajectory.csv"));

  const fs::path e1 = fresh_dir("det-e1"), e2 = fresh_dir("det-e2");
  run({"estimate", "--set", "out=" + e1.string()});
  run({"estimate", "--set", "out=" + e2.string()});
  CHECK(slurp(e1 / "degree.csv") == slurp(e2 / "degree.csv"));
}

TEST_CASE("config file feeds a run and flags override it") {
  const fs::path dir = fresh_dir("filecfg");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg");
    f << "gallery=cusp:m=4\npoints=0,0\nquad.points=24\n";
  }
  const RunResult r = run({"estimate", "--config", (dir / "run.cfg").string(),
                           "--set", "gallery=halfplane", "--set",
                           "out=" + (dir / "out").string()});
  CHECK(r.code == 0);
  const std::string resolved = slurp(dir / "out" / "resolved.cfg");
  CHECK(resolved.find("gallery=halfplane\n") != std::string::npos);  // flag wins
  CHECK(resolved.find("quad.points=24\n") != std::string::npos);     // file kept
  CHECK(r.out.find("class zero") != std::string::npos);  // halfplane boundary probe
}
