#include "config.hpp"

#include <charconv>
#include <fstream>

#include "persistq/errors.hpp"

namespace persistq::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (...) {
    return false;
  }
}

bool parse_long(const std::string& s, long& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [p, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && p == end;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [p, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && p == end;
}

bool parse_bool(const std::string& s, bool& out) {
  if (s == "true" || s == "1" || s == "on" || s == "yes") {
    out = true;
    return true;
  }
  if (s == "false" || s == "0" || s == "off" || s == "no") {
    out = false;
    return true;
  }
  return false;
}

bool check_type(char type, const std::string& value) {
  double d;
  long l;
  std::uint64_t u;
  bool b;
  switch (type) {
    case 'd': return parse_double(value, d);
    case 'i': return parse_long(value, l);
    case 'u': return parse_u64(value, u);
    case 'b': return parse_bool(value, b);
    default: return true;
  }
}

const char* type_name(char type) {
  switch (type) {
    case 'd': return "number";
    case 'i': return "integer";
    case 'u': return "unsigned integer";
    case 'b': return "boolean";
    default: return "string";
  }
}

}  // namespace

const std::map<std::string, std::vector<ParamSpec>>& command_registry() {
  static const std::map<std::string, std::vector<ParamSpec>> registry = {
      {"global",
       {{"seed", 'u', "42", "base RNG seed"},
        {"outdir", 's', ".", "output directory"},
        {"stamp", 's', "", "output name stamp (default: UTC time)"}}},
      {"kac-sim",
       {{"c", 'd', "1", "propagation speed"},
        {"lambda", 'd', "1", "direction switching rate"},
        {"t", 'd', "2", "final time"},
        {"paths", 'u', "1000000", "number of Monte Carlo paths"},
        {"init-direction", 'i', "1", "+1, -1, or 0 to alternate"},
        {"init-x", 'd', "0", "initial position"},
        {"grid-n", 'i', "1024", "histogram cells"},
        {"grid-length", 'd', "0", "histogram period (0 = auto)"},
        {"grid-origin", 'd', "0", "histogram origin (used when length set)"}}},
      {"master",
       {{"c", 'd', "1", "propagation speed"},
        {"lambda", 'd', "1", "switching rate"},
        {"t", 'd', "2", "target time (rounded to whole lattice steps)"},
        {"grid-n", 'i', "1024", "lattice cells"},
        {"grid-length", 'd', "8", "period"},
        {"grid-origin", 'd', "-4", "origin"},
        {"init", 's', "delta", "delta | gaussian"},
        {"init-direction", 'i', "1", "sector of the initial mass"},
        {"gaussian-width", 'd', "0.5", "width for init=gaussian"}}},
      {"telegrapher",
       {{"c", 'd', "1", "propagation speed"},
        {"lambda", 'd', "2", "damping rate"},
        {"t", 'd', "4", "final time"},
        {"grid-n", 'i', "1024", "grid points"},
        {"grid-length", 'd', "6.283185307179586", "period"},
        {"grid-origin", 'd', "0", "origin"},
        {"init", 's', "mode", "mode | pulse"},
        {"mode-k", 'i', "1", "Fourier mode number for init=mode"},
        {"pulse-width", 'd', "0.5", "width for init=pulse"},
        {"cfl", 'd', "0.5", "c dt / dx"}}},
      {"diffusion-limit",
       {{"nu", 'd', "0.5", "diffusion coefficient"},
        {"lambda", 'd', "100", "switching rate"},
        {"t", 'd', "1", "final time"},
        {"paths", 'u', "100000", "number of paths"}}},
      {"dirac1d",
       {{"mass", 'd', "1", "mass"},
        {"c", 'd', "1", "speed of light"},
        {"hbar", 'd', "1", "hbar"},
        {"convention", 's', "sec5", "mass-term sign convention: sec5 | eq13"},
        {"grid-n", 'i', "256", "grid points"},
        {"grid-length", 'd', "16", "period"},
        {"grid-origin", 'd', "-8", "origin"},
        {"init", 's', "packet", "packet | mode | rest"},
        {"mode-k", 'i', "1", "mode number for init=mode"},
        {"packet-width", 'd', "1", "packet width"},
        {"packet-k0", 'd', "2", "packet carrier wavenumber"},
        {"t", 'd', "1", "final time"},
        {"dt", 'd', "0", "step (0 = auto from max |E(k)| dt = 0.1 hbar)"}}},
      {"dirac3d",
       {{"mass", 'd', "1", "mass"},
        {"n", 'i', "16", "grid points per axis"},
        {"length", 'd', "6.283185307179586", "box length per axis"},
        {"k", 'i', "1", "plane-wave mode along z"},
        {"t", 'd', "5", "final time"},
        {"dt", 'd', "0.05", "step"}}},
      {"dispersion",
       {{"mass", 'd', "1", "mass"},
        {"c", 'd', "1", "speed of light"},
        {"hbar", 'd', "1", "hbar"},
        {"k-min", 'd', "0", "first wavenumber"},
        {"k-max", 'd', "4", "last wavenumber"},
        {"k-count", 'i', "33", "number of samples"}}},
      {"gauge",
       {{"mass-a", 'd', "1", "species a mass"},
        {"mass-b", 'd', "1", "species b mass"},
        {"charge", 'd', "1", "e: charges +e and -e"},
        {"grid-n", 'i', "256", "grid points"},
        {"grid-length", 'd', "8", "period"},
        {"chi-amp", 'd', "0.5", "pure-gauge chi amplitude (0 = prescribed field)"},
        {"chi-mode", 'i', "1", "pure-gauge chi mode"},
        {"a0-amp", 'd', "0", "prescribed A0 amplitude"},
        {"ax-amp", 'd', "0", "prescribed Ax amplitude"},
        {"ax-mean", 'd', "0", "prescribed uniform Ax part"},
        {"t", 'd', "1", "final time"},
        {"dt", 'd', "0.005", "step"}}},
      {"maxwell",
       {{"n", 'i', "32", "grid points per axis"},
        {"length", 'd', "6.283185307179586", "box length per axis"},
        {"init", 's', "rcp", "rcp | random"},
        {"k", 'i', "1", "plane-wave mode along z for init=rcp"},
        {"t", 'd', "2", "final time"},
        {"dt", 'd', "0.02", "step"},
        {"report-every", 'i', "10", "steps between JSON series entries"}}},
      {"photon-kac",
       {{"n", 'i', "32", "grid points per axis"},
        {"length", 'd', "6.283185307179586", "box length per axis"},
        {"lambda-gamma", 'd', "0.5", "helicity switching rate"},
        {"init", 's', "uniform", "uniform | rcp | random"},
        {"k", 'i', "1", "plane-wave mode along z for init=rcp"},
        {"t", 'd', "2", "final time"},
        {"dt", 'd', "0.02", "step"},
        {"report-every", 'i', "10", "steps between JSON series entries"}}},
      {"nelson",
       {{"state", 's', "oscillator0", "oscillator0..3 | hydrogen-1s | plane-wave"},
        {"points", 'i', "1024", "grid points"},
        {"mode-k", 'i', "1", "winding for state=plane-wave"},
        {"mass", 'd', "1", "mass"},
        {"hbar", 'd', "1", "hbar"}}},
      {"gordon",
       {{"mass", 'd', "1", "mass"},
        {"c", 'd', "1", "speed of light"},
        {"hbar", 'd', "1", "hbar"},
        {"k", 'd', "3", "plane-wave wavenumber"},
        {"grid-n", 'i', "128", "grid points"}}},
      {"verify-all",
       {{"fast", 'b', "false", "reduced sizes for CI"},
        {"threads", 'i', "0", "0 = leave PERSISTQ_THREADS as set"}}},
  };
  return registry;
}

ConfigData parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open " + path);
  ConfigData data;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line.substr(0, line.find_first_of("#;")));
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']')
        throw ValidationError(path + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      data[section];
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty())
      throw ValidationError(path + ":" + std::to_string(lineno) + ": empty key");
    if (data[section].count(key))
      throw ValidationError(path + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    data[section][key] = ConfigValue{value, lineno};
  }
  return data;
}

namespace {

const ParamSpec* find_spec(const std::vector<ParamSpec>& specs, const std::string& key) {
  for (const auto& s : specs)
    if (s.name == key) return &s;
  return nullptr;
}

/// Sectionless keys may belong to any single subcommand or to global; they
/// are valid if exactly interpretable. Sectioned keys must match the section.
void validate_entry(const std::string& section, const std::string& key, const ConfigValue& v) {
  const auto& registry = command_registry();
  if (!section.empty()) {
    const auto it = registry.find(section);
    if (it == registry.end())
      throw ValidationError("config line " + std::to_string(v.line) + ": unknown section [" +
                            section + "]");
    const ParamSpec* spec = find_spec(it->second, key);
    if (!spec)
      throw ValidationError("config line " + std::to_string(v.line) + ": unknown key '" + key +
                            "' in section [" + section + "]");
    if (!check_type(spec->type, v.value))
      throw ValidationError("config line " + std::to_string(v.line) + ": value '" + v.value +
                            "' for '" + key + "' is not a valid " + type_name(spec->type));
    return;
  }
  // Sectionless: accept if any command (or global) declares the key.
  for (const auto& [cmd, specs] : registry) {
    if (const ParamSpec* spec = find_spec(specs, key)) {
      if (!check_type(spec->type, v.value))
        throw ValidationError("config line " + std::to_string(v.line) + ": value '" + v.value +
                              "' for '" + key + "' is not a valid " + type_name(spec->type));
      return;
    }
  }
  throw ValidationError("config line " + std::to_string(v.line) + ": unknown key '" + key + "'");
}

}  // namespace

void validate_config(const ConfigData& config) {
  for (const auto& [section, entries] : config)
    for (const auto& [key, value] : entries) validate_entry(section, key, value);
}

ResolvedParams resolve_params(const std::string& command, const ConfigData& config,
                              const std::map<std::string, std::string>& flags) {
  const auto& registry = command_registry();
  const auto cmd_it = registry.find(command);
  if (cmd_it == registry.end()) throw ValidationError("unknown subcommand " + command);

  ResolvedParams out;
  out.command = command;

  auto lookup_config = [&](const std::string& key) -> const std::string* {
    for (const std::string& section : {command, std::string(""), std::string("global")}) {
      const auto sec = config.find(section);
      if (sec == config.end()) continue;
      const auto kv = sec->second.find(key);
      if (kv != sec->second.end()) return &kv->second.value;
    }
    return nullptr;
  };

  auto resolve_one = [&](const ParamSpec& spec) {
    out.defaults[spec.name] = spec.default_value;
    std::string value = spec.default_value;
    if (const std::string* cv = lookup_config(spec.name)) {
      out.config_values[spec.name] = *cv;
      value = *cv;
    }
    const auto fl = flags.find(spec.name);
    if (fl != flags.end()) {
      if (!check_type(spec.type, fl->second))
        throw ValidationError("flag --" + spec.name + ": value '" + fl->second +
                              "' is not a valid " + type_name(spec.type));
      out.flag_values[spec.name] = fl->second;
      value = fl->second;
    }
    out.effective[spec.name] = value;
  };

  for (const auto& spec : registry.at("global")) resolve_one(spec);
  if (command != "global")
    for (const auto& spec : cmd_it->second) resolve_one(spec);
  return out;
}

double ResolvedParams::number(const std::string& key) const {
  double d;
  if (!parse_double(effective.at(key), d))
    throw ValidationError("parameter " + key + " is not a number");
  return d;
}

long ResolvedParams::integer(const std::string& key) const {
  long v;
  if (!parse_long(effective.at(key), v))
    throw ValidationError("parameter " + key + " is not an integer");
  return v;
}

std::uint64_t ResolvedParams::uinteger(const std::string& key) const {
  std::uint64_t v;
  if (!parse_u64(effective.at(key), v))
    throw ValidationError("parameter " + key + " is not an unsigned integer");
  return v;
}

const std::string& ResolvedParams::text(const std::string& key) const {
  return effective.at(key);
}

bool ResolvedParams::flag(const std::string& key) const {
  bool b;
  if (!parse_bool(effective.at(key), b))
    throw ValidationError("parameter " + key + " is not a boolean");
  return b;
}

}  // namespace persistq::cli
