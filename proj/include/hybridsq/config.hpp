#ifndef HYBRIDSQ_CONFIG_HPP
#define HYBRIDSQ_CONFIG_HPP

// `key = value` run configuration. One entry per line, `#` starts a comment,
// unknown or repeated keys are errors.

#include <algorithm>
#include <charconv>
#include <initializer_list>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "hybridsq/errors.hpp"
#include "hybridsq/model.hpp"
#include "hybridsq/spectrum.hpp"

namespace hybridsq {

enum class Command { smax_sweep, time_trace, spectrum, spectrum_vs_g, validate_adiabatic, eigenmodes };

inline const char* to_string(Command c) {
  switch (c) {
    case Command::smax_sweep: return "smax-sweep";
    case Command::time_trace: return "time-trace";
    case Command::spectrum: return "spectrum";
    case Command::spectrum_vs_g: return "spectrum-vs-g";
    case Command::validate_adiabatic: return "validate-adiabatic";
    case Command::eigenmodes: return "eigenmodes";
  }
  return "?";
}

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;

  std::vector<double> points() const;
};

enum class AtomPreparation { e1, e2, ground0, ground1 };

struct RunConfig {
  Command command = Command::smax_sweep;
  ModelParams params;
  std::optional<double> g_eff;
  std::optional<GridSpec> time_grid;
  std::optional<GridSpec> omega_grid;
  std::optional<GridSpec> geff_grid;
  std::string output_path;
  std::uint64_t seed = 0;
  SpectrumMethod method = SpectrumMethod::analytic;
  double omega_fixed = 1.0;
  AtomPreparation atom = AtomPreparation::e1;
  // Entries exactly as given, in file order.
  std::vector<std::pair<std::string, std::string>> entries;
};

inline const char* to_string(AtomPreparation a) {
  switch (a) {
    case AtomPreparation::e1: return "e1";
    case AtomPreparation::e2: return "e2";
    case AtomPreparation::ground0: return "ground0";
    case AtomPreparation::ground1: return "ground1";
  }
  return "?";
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_real(std::string_view value, std::size_t line, std::string_view key) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(line, "key '" + std::string(key) + "' expects a number, got '" + std::string(value) + "'");
  }
  return out;
}

inline std::uint64_t parse_count(std::string_view value, std::size_t line, std::string_view key) {
  std::uint64_t out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(line, "key '" + std::string(key) + "' expects a non-negative integer, got '" +
                                std::string(value) + "'");
  }
  return out;
}

}  // namespace detail

inline std::vector<double> GridSpec::points() const {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  out.back() = stop;
  return out;
}

inline RunConfig parse_config(std::string_view text) {
  struct Entry {
    std::string value;
    std::size_t line;
  };
  static const std::vector<std::string_view> known{
      "command",    "output",     "seed",       "method",      "omega_m",    "delta",     "Delta",
      "g1",         "g2",         "Omega",      "eps",         "gamma",      "nbar",      "kappa",
      "Gamma_e",    "g_eff",      "geff_start", "geff_stop",   "geff_count", "omega_start", "omega_stop",
      "omega_count", "t_start",   "t_stop",     "t_count",     "omega_fixed", "atom"};

  RunConfig cfg;
  std::map<std::string, Entry, std::less<>> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, "expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (value.empty()) throw ConfigError(line_no, "key '" + key + "' has no value");
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
    if (entries.count(key)) {
      throw ConfigError(line_no, "key '" + key + "' repeated (first on line " +
                                     std::to_string(entries.at(key).line) + ")");
    }
    entries.emplace(key, Entry{value, line_no});
    cfg.entries.emplace_back(key, value);
  }

  // Types first, in file order, so a malformed value is reported at its own line.
  static const std::vector<std::string_view> counts{"geff_count", "omega_count", "t_count", "seed"};
  static const std::vector<std::string_view> texts{"command", "output", "method", "atom"};
  for (const auto& [key, value] : cfg.entries) {
    const std::size_t line = entries.at(key).line;
    if (std::find(counts.begin(), counts.end(), key) != counts.end()) {
      detail::parse_count(value, line, key);
    } else if (std::find(texts.begin(), texts.end(), key) == texts.end()) {
      detail::parse_real(value, line, key);
    }
  }

  const auto cmd = entries.find("command");
  if (cmd == entries.end()) throw ConfigError(std::max<std::size_t>(line_no, 1), "missing required key 'command'");
  const std::size_t cmd_line = cmd->second.line;
  static const std::vector<std::pair<std::string_view, Command>> commands{
      {"smax-sweep", Command::smax_sweep},         {"time-trace", Command::time_trace},
      {"spectrum", Command::spectrum},             {"spectrum-vs-g", Command::spectrum_vs_g},
      {"validate-adiabatic", Command::validate_adiabatic}, {"eigenmodes", Command::eigenmodes}};
  const auto match = std::find_if(commands.begin(), commands.end(),
                                  [&](const auto& c) { return c.first == cmd->second.value; });
  if (match == commands.end()) throw ConfigError(cmd_line, "unknown command '" + cmd->second.value + "'");
  cfg.command = match->second;

  const auto real = [&](std::string_view key) -> std::optional<double> {
    const auto it = entries.find(key);
    if (it == entries.end()) return std::nullopt;
    return detail::parse_real(it->second.value, it->second.line, key);
  };
  const auto line_of = [&](std::string_view key) { return entries.find(key)->second.line; };

  if (auto v = real("omega_m")) cfg.params.omega_m = *v;
  if (auto v = real("delta")) cfg.params.delta = *v;
  if (auto v = real("Delta")) cfg.params.Delta = *v;
  if (auto v = real("g1")) cfg.params.g1 = *v;
  if (auto v = real("g2")) cfg.params.g2 = *v;
  if (auto v = real("Omega")) cfg.params.Omega = *v;
  if (auto v = real("eps")) cfg.params.eps = *v;
  if (auto v = real("gamma")) cfg.params.gamma = *v;
  if (auto v = real("nbar")) cfg.params.nbar = *v;
  if (auto v = real("kappa")) cfg.params.kappa = *v;
  if (auto v = real("Gamma_e")) cfg.params.Gamma_e = *v;
  cfg.g_eff = real("g_eff");
  cfg.omega_fixed = real("omega_fixed").value_or(cfg.params.omega_m);
  try {
    cfg.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cmd_line, e.what());
  }

  if (const auto it = entries.find("seed"); it != entries.end()) {
    cfg.seed = detail::parse_count(it->second.value, it->second.line, "seed");
  }
  if (const auto it = entries.find("method"); it != entries.end()) {
    if (it->second.value == "analytic") {
      cfg.method = SpectrumMethod::analytic;
    } else if (it->second.value == "numeric") {
      cfg.method = SpectrumMethod::numeric;
    } else {
      throw ConfigError(it->second.line, "method must be 'analytic' or 'numeric'");
    }
  }
  if (const auto it = entries.find("atom"); it != entries.end()) {
    static const std::vector<std::pair<std::string_view, AtomPreparation>> atoms{
        {"e1", AtomPreparation::e1},
        {"e2", AtomPreparation::e2},
        {"ground0", AtomPreparation::ground0},
        {"ground1", AtomPreparation::ground1}};
    const auto a = std::find_if(atoms.begin(), atoms.end(), [&](const auto& x) { return x.first == it->second.value; });
    if (a == atoms.end()) throw ConfigError(it->second.line, "atom must be one of e1, e2, ground0, ground1");
    cfg.atom = a->second;
  }

  const auto grid = [&](std::string_view prefix) -> std::optional<GridSpec> {
    const std::string s = std::string(prefix) + "_start", e = std::string(prefix) + "_stop",
                      c = std::string(prefix) + "_count";
    const bool any = entries.count(s) || entries.count(e) || entries.count(c);
    if (!any) return std::nullopt;
    for (const auto& k : {s, e, c}) {
      if (!entries.count(k)) {
        throw ConfigError(cmd_line, "grid '" + std::string(prefix) + "' is missing key '" + k + "'");
      }
    }
    GridSpec g{*real(s), *real(e), detail::parse_count(entries.at(c).value, entries.at(c).line, c)};
    if (g.count < 2) throw ConfigError(line_of(c), "key '" + c + "' must be >= 2");
    if (!(g.stop > g.start)) throw ConfigError(line_of(e), "key '" + e + "' must exceed '" + s + "'");
    return g;
  };
  cfg.geff_grid = grid("geff");
  cfg.omega_grid = grid("omega");
  cfg.time_grid = grid("t");

  const auto require = [&](std::initializer_list<std::string_view> keys) {
    for (auto k : keys) {
      if (!entries.count(k)) {
        throw ConfigError(cmd_line, std::string("command ") + to_string(cfg.command) + " requires key '" +
                                        std::string(k) + "'");
      }
    }
  };
  require({"output"});
  cfg.output_path = entries.at("output").value;
  switch (cfg.command) {
    case Command::smax_sweep:
      require({"geff_start", "geff_stop", "geff_count"});
      break;
    case Command::time_trace:
      require({"g_eff"});
      break;
    case Command::spectrum:
      require({"g_eff", "gamma"});
      break;
    case Command::spectrum_vs_g:
      require({"gamma", "geff_start", "geff_stop", "geff_count"});
      break;
    case Command::validate_adiabatic:
      require({"delta", "Delta", "g1", "g2", "Omega"});
      break;
    case Command::eigenmodes:
      require({"delta", "Delta", "g1", "g2", "Omega", "eps"});
      break;
  }
  return cfg;
}

}  // namespace hybridsq

#endif  // HYBRIDSQ_CONFIG_HPP
