#include <chrono>
#include <cstdio>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "config.hpp"
#include "json.hpp"
#include "persistq/errors.hpp"
#include "persistq/io.hpp"
#include "persistq/version.hpp"
#include "runners.hpp"

namespace {

using persistq::cli::command_registry;
using persistq::cli::ConfigData;
using persistq::cli::ResolvedParams;

struct ParsedCli {
  std::string command;
  std::string config_path;
  std::map<std::string, std::string> flags;
};

int run(const ParsedCli& cli) {
  ConfigData config;
  if (!cli.config_path.empty()) {
    config = persistq::cli::parse_config_file(cli.config_path);
    persistq::cli::validate_config(config);
  }
  const ResolvedParams params = persistq::cli::resolve_params(cli.command, config, cli.flags);

  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::json results;
  std::vector<std::string> outputs;
  bool ok = true;

  if (cli.command == "verify-all") {
    const std::string stamp =
        params.text("stamp").empty() ? persistq::io::utc_stamp() : params.text("stamp");
    const std::string report =
        persistq::io::output_path(params.text("outdir"), "verify-all-report", stamp, "json");
    ok = persistq::cli::run_verify_all(params, report);
    outputs.push_back(report);
    results = {{"report", report}, {"all_pass", ok}};
    std::fprintf(stdout, "%s: %s\n", report.c_str(), ok ? "PASS" : "FAIL");
  } else {
    auto run_result = persistq::cli::run_command(params);
    results = std::move(run_result.results);
    outputs = std::move(run_result.output_files);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // Manifest with the full provenance of every parameter.
  const std::string stamp =
      params.text("stamp").empty() ? persistq::io::utc_stamp() : params.text("stamp");
  nlohmann::json manifest = {
      {"command", cli.command},
      {"version", persistq::kVersion},
      {"seed", params.uinteger("seed")},
      {"wall_time_s", wall},
      {"parameters",
       {{"defaults", params.defaults},
        {"config_file", params.config_values},
        {"flags", params.flag_values},
        {"effective", params.effective}}},
      {"outputs", outputs},
      {"results", results}};
  persistq::io::write_json(
      persistq::io::output_path(params.text("outdir"), cli.command, stamp, "json"), manifest);

  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"persistq: persistent stochastic processes and the wave equations they become"};
  app.require_subcommand(1);
  app.set_version_flag("--version", persistq::kVersion);

  ParsedCli cli;
  std::map<std::string, std::map<std::string, std::string>> option_values;

  for (const auto& [command, specs] : command_registry()) {
    if (command == "global") continue;
    auto* sub = app.add_subcommand(command, "");
    sub->add_option("--config", cli.config_path, "key = value config file with [sections]");
    for (const auto& spec : command_registry().at("global"))
      sub->add_option("--" + spec.name, option_values[command][spec.name], spec.help);
    for (const auto& spec : specs) {
      if (spec.type == 'b') {
        // Boolean flags accept an optional explicit value.
        sub->add_flag("--" + spec.name + "{true}", option_values[command][spec.name], spec.help);
      } else {
        sub->add_option("--" + spec.name, option_values[command][spec.name], spec.help);
      }
    }
    sub->callback([&cli, command = command]() { cli.command = command; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (const auto& [name, value] : option_values[cli.command])
    if (!value.empty()) cli.flags[name] = value;

  try {
    return run(cli);
  } catch (const persistq::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const persistq::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const persistq::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
