#include "swarmlink/cli.hpp"

#include "swarmlink/fixtures.hpp"
#include "swarmlink/scenario.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <vector>

namespace swarmlink {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

namespace {

namespace fs = std::filesystem;

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err, int verbosity) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
  auto logger = std::make_shared<spdlog::logger>("swarmlink", sink);
  logger->set_pattern("[%l] %v");
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("SWARMLINK_LOG")) level = spdlog::level::from_str(env);
  for (int i = 0; i < verbosity && level > spdlog::level::trace; ++i) {
    level = static_cast<spdlog::level::level_enum>(level - 1);
  }
  logger->set_level(level);
  return logger;
}

std::optional<std::string> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return text.str();
}

void print_diagnostics(std::ostream& err, const std::string& source, const std::vector<Diagnostic>& diags,
                       std::string_view prefix) {
  for (const auto& d : diags) err << source << ": " << prefix << format_diagnostic(d) << "\n";
}

/// Loads and parses a scenario file, reporting problems on `err`.
std::optional<ParsedScenario> load_scenario(const std::string& path, std::ostream& err) {
  const auto text = read_file(path);
  if (!text) {
    err << path << ": cannot read scenario file\n";
    return std::nullopt;
  }
  try {
    ParsedScenario parsed = parse_scenario(*text);
    print_diagnostics(err, path, parsed.warnings, "warning: ");
    return parsed;
  } catch (const ConfigError& e) {
    print_diagnostics(err, path, e.diagnostics(), "error: ");
    return std::nullopt;
  }
}

void report_failures(std::ostream& err, const ExperimentReport& report) {
  for (const auto& f : report.failures) err << report.scenario << ": failure: " << f << "\n";
}

std::string sweep_dir_name(std::size_t index, const std::string& value) {
  std::string safe;
  for (char ch : value) safe += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '-') ? ch : '_';
  std::string idx = std::to_string(index);
  if (idx.size() < 3) idx.insert(0, 3 - idx.size(), '0');
  return idx + "_" + safe;
}

struct Options {
  std::string scenario;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string param;
  std::vector<std::string> values;
  int verbosity = 0;
};

int cmd_run(const Options& o, std::ostream& out, std::ostream& err, spdlog::logger& log) {
  auto parsed = load_scenario(o.scenario, err);
  if (!parsed) return kExitUsage;
  ScenarioConfig config = parsed->config;
  if (o.seed) config.sim.seed = *o.seed;
  log.info("running {} ({}) with seed {}", config.sim.name, experiment_kind_name(config.experiment.kind),
           config.sim.seed);
  const ExperimentReport report = run_experiment(config);
  write_report(report, o.out);
  log.info("wrote {} files to {}", report.files.size(), o.out);
  out << report.files.at("summary.txt");
  report_failures(err, report);
  return report.success ? kExitOk : kExitExperimentFailed;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err, spdlog::logger& log) {
  auto parsed = load_scenario(o.scenario, err);
  if (!parsed) return kExitUsage;
  ScenarioConfig config = parsed->config;
  if (o.seed) config.sim.seed = *o.seed;
  std::vector<ExperimentReport> reports;
  try {
    reports = sweep(config, o.param, o.values);
  } catch (const std::invalid_argument& e) {
    err << "sweep: " << e.what() << "\n";
    return kExitUsage;
  }
  fs::create_directories(o.out);
  std::string index = "index,parameter,value,directory,success\n";
  bool all_ok = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::string dir = sweep_dir_name(i, o.values[i]);
    log.info("{} = {} -> {}", o.param, o.values[i], dir);
    write_report(reports[i], fs::path(o.out) / dir);
    index += std::to_string(i) + "," + o.param + "," + o.values[i] + "," + dir + "," +
             (reports[i].success ? "true" : "false") + "\n";
    report_failures(err, reports[i]);
    all_ok = all_ok && reports[i].success;
  }
  ExperimentReport listing;
  listing.files["sweep.csv"] = index;
  write_report(listing, o.out);
  out << index;
  return all_ok ? kExitOk : kExitExperimentFailed;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  auto parsed = load_scenario(o.scenario, err);
  if (!parsed) return kExitUsage;
  out << serialize(parsed->config);
  return kExitOk;
}

int cmd_fixtures(const Options& o, std::ostream& out, spdlog::logger& log) {
  ExperimentReport bundle;
  std::string digests;
  for (const auto& fixture : fixture_set()) {
    bundle.files[fixture.file] = serialize(fixture.config);
    log.info("running fixture {}", fixture.file);
    const ExperimentReport report = run_experiment(fixture.config);
    for (const auto& [name, content] : report.files) {
      digests += sha256_hex(content) + "  " + fixture.file + "/" + name + "\n";
    }
  }
  bundle.files["digests.txt"] = digests;
  write_report(bundle, o.out);
  for (const auto& [name, content] : bundle.files) out << sha256_hex(content) << "  " << name << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Swarm link, formation, learning and SLAM experiments", "swarmlink"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("-v,--verbose", o.verbosity, "More log output (repeatable); SWARMLINK_LOG sets the base level");

  auto* run = app.add_subcommand("run", "Run a scenario and write its report files");
  run->add_option("scenario", o.scenario, "Scenario file")->required();
  run->add_option("--out", o.out, "Output directory")->required();
  run->add_option("--seed", o.seed, "Seed overriding the scenario's");

  auto* sw = app.add_subcommand("sweep", "Run a scenario once per parameter value");
  sw->add_option("scenario", o.scenario, "Scenario file")->required();
  sw->add_option("--param", o.param, "distance, noise_sigma or interval (a:b)")->required();
  sw->add_option("--values", o.values, "Comma-separated values")->delimiter(',')->expected(0, -1)->required();
  sw->add_option("--out", o.out, "Output directory")->required();
  sw->add_option("--seed", o.seed, "Seed overriding the scenario's");

  auto* validate = app.add_subcommand("validate", "Check a scenario and print its normalized form");
  validate->add_option("scenario", o.scenario, "Scenario file")->required();

  auto* fixtures = app.add_subcommand("fixtures", "Write the fixture scenarios and their report digests");
  fixtures->add_option("--out", o.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << "Run with --help for usage.\n";
    return kExitUsage;
  }

  auto log = make_logger(err, o.verbosity);
  try {
    if (*run) return cmd_run(o, out, err, *log);
    if (*sw) return cmd_sweep(o, out, err, *log);
    if (*validate) return cmd_validate(o, out, err);
    return cmd_fixtures(o, out, *log);
  } catch (const ConfigError& e) {
    print_diagnostics(err, o.scenario, e.diagnostics(), "error: ");
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace swarmlink
