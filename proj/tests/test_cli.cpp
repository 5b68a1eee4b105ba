#include "doctest.h"

#include "swarmlink/cli.hpp"
#include "swarmlink/fixtures.hpp"
#include "swarmlink/scenario.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace swarmlink;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::set<std::string> tree(const fs::path& root) {
  std::set<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) out.insert(fs::relative(e.path(), root).string());
  return out;
}

struct Scratch {
  fs::path root;
  explicit Scratch(const std::string& name) : root(fs::temp_directory_path() / ("swarmlink_cli_" + name)) {
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Scratch() { fs::remove_all(root); }
  std::string operator/(const std::string& rel) const { return (root / rel).string(); }
};

}  // namespace

TEST_CASE("sha256") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("run writes the report and exits 0") {
  Scratch s("run");
  spit(s / "static.scn", serialize(slam_static_fixture()));
  const auto before = tree(s.root);
  const Result r = cli({"run", s / "static.scn", "--out", s / "out"});
  CHECK(r.code == kExitOk);
  CHECK(fs::exists(s / "out/map.pgm"));
  CHECK(fs::exists(s / "out/pose_trace.csv"));
  const ExperimentReport expected = run_experiment(slam_static_fixture());
  for (const auto& [name, content] : expected.files) CHECK(slurp(s / ("out/" + name)) == content);
  CHECK(r.out == expected.files.at("summary.txt"));

  // Nothing appears outside the output directory.
  auto after = tree(s.root);
  std::erase_if(after, [](const std::string& p) { return p.starts_with("out"); });
  CHECK(after == before);
}

TEST_CASE("run exit codes") {
  Scratch s("codes");
  SUBCASE("missing scenario file") {
    const Result r = cli({"run", s / "absent.scn", "--out", s / "out"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("cannot read") != std::string::npos);
    CHECK_FALSE(fs::exists(s / "out"));
  }
  SUBCASE("invalid scenario") {
    spit(s / "bad.scn", "[sim]\nduration = 1\nwobble = 2\n[experiment]\nkind = free\n");
    const Result r = cli({"run", s / "bad.scn", "--out", s / "out"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("line 3: unknown key 'wobble'") != std::string::npos);
  }
  SUBCASE("outage that never lifts") {
    ScenarioConfig c = reconnect_fixture();
    c.disruptions[1].end = c.sim.duration;
    spit(s / "stuck.scn", serialize(c));
    const Result r = cli({"run", s / "stuck.scn", "--out", s / "out"});
    CHECK(r.code == kExitExperimentFailed);
    CHECK(r.err.find("never recovered") != std::string::npos);
    CHECK(fs::exists(s / "out/table1.tsv"));
  }
  SUBCASE("unwritable output location") {
    spit(s / "free.scn", "[sim]\nduration = 1\n[experiment]\nkind = free\n");
    spit(s / "blocker", "x");
    CHECK(cli({"run", s / "free.scn", "--out", s / "blocker/out"}).code == kExitUsage);
  }
  SUBCASE("usage errors") {
    CHECK(cli({}).code == kExitUsage);
    CHECK(cli({"launch"}).code == kExitUsage);
    CHECK(cli({"run", s / "x.scn"}).code == kExitUsage);
    CHECK(cli({"run", s / "x.scn", "--out", s / "o", "--seed", "many"}).code == kExitUsage);
    const Result help = cli({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("sweep") != std::string::npos);
  }
}

TEST_CASE("seed override wins over the config seed") {
  Scratch s("seed");
  ScenarioConfig c = rssi_accuracy_fixture();
  c.sim.duration = 5;
  spit(s / "rssi.scn", serialize(c));
  REQUIRE(cli({"run", s / "rssi.scn", "--out", s / "a", "--seed", "9"}).code == kExitOk);
  CHECK(slurp(s / "a/summary.txt").find("seed = 9\n") != std::string::npos);
  c.sim.seed = 9;
  CHECK(slurp(s / "a/rssi_accuracy.csv") == run_experiment(c).files.at("rssi_accuracy.csv"));
}

TEST_CASE("validate") {
  Scratch s("validate");
  const ScenarioConfig moving = slam_moving_fixture();
  spit(s / "moving.scn", serialize(moving));
  const Result ok = cli({"validate", s / "moving.scn"});
  CHECK(ok.code == kExitOk);
  CHECK(ok.out == serialize(moving));
  CHECK(ok.err.empty());

  spit(s / "dup.scn", "[sim]\nduration = 1\n[uav.2]\nposition = 1,1\n[uav.2]\nposition = 3,1\n[experiment]\nkind = free\n");
  const Result dup = cli({"validate", s / "dup.scn"});
  CHECK(dup.code == kExitUsage);
  CHECK(dup.err.find("line 5: duplicate section [uav.2]") != std::string::npos);

  spit(s / "rem.scn", "[sim]\nduration = 1.03\n[experiment]\nkind = free\n");
  const Result rem = cli({"validate", s / "rem.scn"});
  CHECK(rem.code == kExitOk);
  CHECK(rem.err.find("remainder") != std::string::npos);
}

TEST_CASE("sweep subcommand") {
  Scratch s("sweep");
  ScenarioConfig c = rssi_accuracy_fixture();
  c.sim.duration = 5;
  spit(s / "rssi.scn", serialize(c));
  const Result r = cli({"sweep", s / "rssi.scn", "--param", "distance", "--values", "4,8,12,16", "--out", s / "sw"});
  CHECK(r.code == kExitOk);
  CHECK(slurp(s / "sw/sweep.csv") == r.out);
  for (const char* dir : {"000_4", "001_8", "002_12", "003_16"}) CHECK(fs::exists(s / (std::string("sw/") + dir + "/summary.txt")));
  CHECK(slurp(s / "sw/001_8/rssi_accuracy.csv") ==
        run_experiment(apply_sweep_value(c, "distance", "8")).files.at("rssi_accuracy.csv"));

  CHECK(cli({"sweep", s / "rssi.scn", "--param", "mass", "--values", "1", "--out", s / "x"}).code == kExitUsage);
  CHECK(cli({"sweep", s / "rssi.scn", "--param", "distance", "--values", "near", "--out", s / "x"}).code == kExitUsage);

  ScenarioConfig stuck = reconnect_fixture();
  stuck.disruptions[1].end = stuck.sim.duration;
  spit(s / "stuck.scn", serialize(stuck));
  CHECK(cli({"sweep", s / "stuck.scn", "--param", "distance", "--values", "4", "--out", s / "y"}).code ==
        kExitExperimentFailed);
}

TEST_CASE("fixtures subcommand") {
  Scratch s("fixtures");
  const Result first = cli({"fixtures", "--out", s / "a"});
  REQUIRE(first.code == kExitOk);
  const auto files = tree(s.root / "a");
  CHECK(files == std::set<std::string>{"digests.txt", "reconnect.scn", "rssi_accuracy.scn", "slam_moving.scn",
                                       "slam_static.scn"});
  for (const auto& f : fixture_set()) CHECK(parse_scenario(slurp(s / ("a/" + f.file))).config == f.config);

  const std::string digests = slurp(s / "a/digests.txt");
  const ExperimentReport stat = run_experiment(slam_static_fixture());
  CHECK(digests.find(sha256_hex(stat.files.at("map.pgm")) + "  slam_static.scn/map.pgm\n") != std::string::npos);

  REQUIRE(cli({"fixtures", "--out", s / "b"}).code == kExitOk);
  for (const auto& name : files) CHECK(slurp(s / ("a/" + name)) == slurp(s / ("b/" + name)));

  spit(s / "plain", "x");
  CHECK(cli({"fixtures", "--out", s / "plain"}).code != kExitOk);
}

TEST_CASE("SWARMLINK_LOG sets verbosity") {
  Scratch s("log");
  spit(s / "free.scn", "[sim]\nduration = 1\n[experiment]\nkind = free\n");
  ::setenv("SWARMLINK_LOG", "info", 1);
  const Result loud = cli({"run", s / "free.scn", "--out", s / "o"});
  ::unsetenv("SWARMLINK_LOG");
  CHECK(loud.err.find("[info] running") != std::string::npos);
  const Result quiet = cli({"run", s / "free.scn", "--out", s / "o"});
  CHECK(quiet.err.empty());
  const Result verbose = cli({"-v", "run", s / "free.scn", "--out", s / "o"});
  CHECK(verbose.err.find("[info]") != std::string::npos);
}
