#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace persistq::cli {

/// One declared parameter of a subcommand. Types: d double, i integer,
/// u unsigned 64-bit, s string, b boolean flag.
struct ParamSpec {
  std::string name;
  char type;
  std::string default_value;
  std::string help;
};

/// Every subcommand with its parameter list; "global" holds keys shared by
/// all runs (seed, outdir, stamp).
const std::map<std::string, std::vector<ParamSpec>>& command_registry();

struct ConfigValue {
  std::string value;
  int line;
};

/// section -> key -> value; the empty section name holds keys that appear
/// before any [section] header.
using ConfigData = std::map<std::string, std::map<std::string, ConfigValue>>;

/// Parses the flat `key = value` format with [section] headers, # or ;
/// comments. Throws ValidationError with a line number on malformed input.
ConfigData parse_config_file(const std::string& path);

/// Strict validation: every section must name a known subcommand (or
/// "global"), every key must be declared there, and every value must parse
/// as the declared type. Errors carry line numbers.
void validate_config(const ConfigData& config);

/// Fully resolved parameters of one run, with provenance for the manifest.
struct ResolvedParams {
  std::string command;
  std::map<std::string, std::string> defaults;
  std::map<std::string, std::string> config_values;
  std::map<std::string, std::string> flag_values;
  std::map<std::string, std::string> effective;

  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  std::uint64_t uinteger(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  bool flag(const std::string& key) const;
};

/// Precedence: command-line flag > [command] section > sectionless entry >
/// [global] (for global keys) > declared default.
ResolvedParams resolve_params(const std::string& command, const ConfigData& config,
                              const std::map<std::string, std::string>& flags);

}  // namespace persistq::cli
