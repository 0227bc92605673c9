#ifndef HYBRIDSQ_RUNNER_HPP
#define HYBRIDSQ_RUNNER_HPP

// Executes a RunConfig and renders the result as CSV.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hybridsq/analytic.hpp"
#include "hybridsq/config.hpp"
#include "hybridsq/dynamics.hpp"
#include "hybridsq/model.hpp"
#include "hybridsq/spectrum.hpp"

namespace hybridsq {

inline constexpr const char* kVersion = "hybridsq 0.1.0";

struct CsvTable {
  std::vector<std::string> metadata;  // written as "# <line>"
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline std::string render_csv(const CsvTable& t) {
  std::string out;
  for (const auto& m : t.metadata) out += "# " + m + "\n";
  for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += "\n";
  for (const auto& row : t.rows) {
    if (row.size() != t.header.size()) throw std::logic_error("CSV row width differs from header");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += format_number(row[i]);
    }
    out += "\n";
  }
  return out;
}

namespace detail {

inline std::string kv(const std::string& key, double value) { return key + " = " + format_number(value); }

inline std::string kv(const std::string& key, const std::string& value) { return key + " = " + value; }

inline std::string dims_text(const std::vector<std::size_t>& dims) {
  std::string s;
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "x" : "") + std::to_string(dims[i]);
  return s.empty() ? "none" : s;
}

inline void grid_meta(CsvTable& t, const std::string& name, const GridSpec& g) {
  t.metadata.push_back(name + " = " + format_number(g.start) + " .. " + format_number(g.stop) + " (" +
                       std::to_string(g.count) + " points)");
}

inline CsvTable base_table(const RunConfig& cfg) {
  CsvTable t;
  t.metadata.push_back(kVersion);
  t.metadata.push_back(kv("command", to_string(cfg.command)));
  t.metadata.push_back("units: omega_m = 1, hbar = 1, rates in units of omega_m");
  for (const auto& [k, v] : cfg.params.snapshot()) t.metadata.push_back(kv(k, v));
  if (cfg.g_eff) t.metadata.push_back(kv("g_eff", *cfg.g_eff));
  t.metadata.push_back(kv("seed", std::to_string(cfg.seed)));
  return t;
}

inline CsvTable run_smax_sweep(const RunConfig& cfg) {
  CsvTable t = base_table(cfg);
  grid_meta(t, "geff_grid", *cfg.geff_grid);
  t.header = {"g_eff", "s_max_db"};
  for (double g : cfg.geff_grid->points()) t.rows.push_back({g, s_max(g, cfg.params.omega_m)});
  return t;
}

inline CsvTable run_time_trace(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  const double g = *cfg.g_eff;
  CsvTable t = base_table(cfg);
  const std::vector<double> times =
      cfg.time_grid ? cfg.time_grid->points() : period_grid(g, p.omega_m, 400);
  if (cfg.time_grid) {
    grid_meta(t, "t_grid", *cfg.time_grid);
  } else {
    t.metadata.push_back("t_grid = one squeezing period (400 points)");
  }
  const double v0 = 0.25 * thermal_V(p.nbar);
  const auto cov = covariance_evolve(g, p.omega_m, p.gamma, p.nbar, CovarianceState::thermal(p.nbar), times);

  if (p.gamma > 0.0) {
    t.metadata.push_back("open system: moment equations only");
    t.header = {"t", "variance_covariance", "squeezing_db"};
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double v = cov[i].cov(0, 0);
      t.rows.push_back({times[i], v, -5.0 * std::log10(v / v0)});
    }
    return t;
  }

  const TimeSeries fock = simulate_effective_variance(g, p.omega_m, p.nbar, times);
  t.metadata.push_back(kv("truncation_dims", dims_text(fock.meta.dims)));
  t.metadata.push_back(kv("max_edge_population", fock.meta.max_tail));
  t.header = {"t", "variance_analytic", "variance_covariance", "variance_fock", "squeezing_db"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    t.rows.push_back({times[i], position_variance(g, p.omega_m, p.nbar, times[i]), cov[i].cov(0, 0),
                      fock.values[i], squeezing_db(g, p.omega_m, times[i])});
  }
  return t;
}

inline GridSpec omega_grid_or_default(const RunConfig& cfg) {
  return cfg.omega_grid.value_or(GridSpec{-4.0, 4.0, 801});
}

inline CsvTable run_spectrum(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  const double g = *cfg.g_eff;
  oscillation_rate(g, p.omega_m);
  const auto crit = critical_frequencies(p, g);

  CsvTable t = base_table(cfg);
  const GridSpec grid = omega_grid_or_default(cfg);
  grid_meta(t, "omega_grid", grid);
  t.metadata.push_back(kv("method", to_string(cfg.method)));
  t.metadata.push_back(kv("omega_crit", crit.second));

  const std::vector<double> omegas = grid.points();
  const SpectrumSeries analytic = spectrum_series(p, g, omegas, SpectrumMethod::analytic);
  const SpectrumSeries numeric = spectrum_numeric(p, g, omegas);
  const SpectrumSeries& chosen = cfg.method == SpectrumMethod::analytic ? analytic : numeric;

  std::vector<double> is_peak(omegas.size(), 0.0);
  for (std::size_t k = 0; k < chosen.peaks.size(); ++k) {
    const Peak& pk = chosen.peaks[k];
    t.metadata.push_back("peak_" + std::to_string(k + 1) + " = " + format_number(pk.omega) + ", " +
                         format_number(pk.value));
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < omegas.size(); ++i) {
      if (std::abs(omegas[i] - pk.omega) < std::abs(omegas[nearest] - pk.omega)) nearest = i;
    }
    is_peak[nearest] = 1.0;
  }

  t.header = {"omega", "variance_analytic", "variance_numeric", "P", "Q", "peak"};
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const SpectrumPoint sp = spectrum_analytic(p, g, omegas[i]);
    t.rows.push_back({omegas[i], analytic.variances[i], numeric.variances[i], sp.P, sp.Q, is_peak[i]});
  }
  return t;
}

inline CsvTable run_spectrum_vs_g(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  if (!(p.gamma > 0.0)) throw std::invalid_argument("spectrum needs gamma > 0");
  CsvTable t = base_table(cfg);
  grid_meta(t, "geff_grid", *cfg.geff_grid);
  t.metadata.push_back(kv("omega_fixed", cfg.omega_fixed));
  const std::vector<double> grid = cfg.geff_grid->points();
  for (double g : grid) oscillation_rate(g, p.omega_m);
  const TrendSeries analytic = trend_vs_geff(p, cfg.omega_fixed, grid, SpectrumMethod::analytic);
  const TrendSeries numeric = trend_vs_geff(p, cfg.omega_fixed, grid, SpectrumMethod::numeric);
  t.metadata.push_back(kv("analytic_strictly_decreasing", analytic.trend.strictly_decreasing ? "yes" : "no"));
  t.metadata.push_back(kv("numeric_strictly_decreasing", numeric.trend.strictly_decreasing ? "yes" : "no"));
  t.header = {"g_eff", "variance_analytic", "variance_numeric"};
  for (std::size_t i = 0; i < grid.size(); ++i) t.rows.push_back({grid[i], analytic.variances[i], numeric.variances[i]});
  return t;
}

inline Vector atom_amplitudes(const RunConfig& cfg) {
  Vector a = Vector::Zero(3);
  switch (cfg.atom) {
    case AtomPreparation::e1:
    case AtomPreparation::e2: {
      const auto spec = atomic_coupling_spectrum(cfg.params);
      a.head(2) = (cfg.atom == AtomPreparation::e1 ? spec.e1 : spec.e2).cast<Complex>();
      break;
    }
    case AtomPreparation::ground0:
      a(level::ground0) = 1.0;
      break;
    case AtomPreparation::ground1:
      a(level::ground1) = 1.0;
      break;
  }
  return a;
}

inline CsvTable run_validate_adiabatic(const RunConfig& cfg) {
  ValidationOptions opts;
  CsvTable t = base_table(cfg);
  t.metadata.push_back(kv("atom", to_string(cfg.atom)));
  if (cfg.time_grid) {
    if (cfg.time_grid->start != 0.0) throw std::invalid_argument("validate-adiabatic needs t_start = 0");
    opts.horizon = cfg.time_grid->stop;
    opts.n_times = cfg.time_grid->count;
    grid_meta(t, "t_grid", *cfg.time_grid);
  } else {
    t.metadata.push_back("t_grid = one squeezing period of the dominant branch (400 points)");
  }
  const ValidationReport r = validate_adiabatic_chain(cfg.params, atom_amplitudes(cfg), opts);

  t.metadata.push_back(kv("ratio_Delta_over_couplings", r.ratios.excited_state));
  t.metadata.push_back(kv("ratio_delta_over_couplings", r.ratios.cavity));
  t.metadata.push_back(kv("g_eff_1", r.spectrum.g_eff_1));
  t.metadata.push_back(kv("g_eff_2", r.spectrum.g_eff_2));
  t.metadata.push_back(kv("branch_weight_1", r.branch_weights[0]));
  t.metadata.push_back(kv("branch_weight_2", r.branch_weights[1]));
  t.metadata.push_back(kv("truncation_dims_full", dims_text(r.full_dims)));
  t.metadata.push_back(kv("truncation_dims_two_level", dims_text(r.two_level_dims)));
  t.metadata.push_back(kv("truncation_dims_effective", dims_text(r.effective_dims)));
  t.metadata.push_back(kv("max_edge_population", r.max_tail));
  t.metadata.push_back(kv("dev_effective_vs_full", r.dev_effective_vs_full));
  t.metadata.push_back(kv("dev_two_level_as_written_vs_full", r.dev_as_written_vs_full));
  t.metadata.push_back(kv("dev_two_level_textbook_vs_full", r.dev_textbook_vs_full));
  t.metadata.push_back(kv("dev_effective_vs_two_level_as_written", r.dev_effective_vs_as_written));
  t.metadata.push_back(kv("dev_effective_vs_two_level_textbook", r.dev_effective_vs_textbook));
  t.metadata.push_back(kv("closer_stark_variant", to_string(r.closer_variant)));

  t.header = {"t", "variance_full", "variance_two_level_as_written", "variance_two_level_textbook",
              "variance_effective"};
  const bool dissipative = r.full_dissipative.has_value();
  if (dissipative) {
    t.metadata.push_back(kv("s_achieved_reference_db", r.smax_reference_db));
    t.metadata.push_back(kv("s_achieved_dissipative_db", r.smax_dissipative_db));
    t.metadata.push_back(kv("relative_degradation", r.degradation));
    t.header.push_back("variance_full_reference");
    t.header.push_back("variance_full_dissipative");
  }
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    std::vector<double> row{r.times[i], r.full[i], r.two_level_as_written[i], r.two_level_textbook[i],
                            r.effective[i]};
    if (dissipative) {
      row.push_back((*r.full_reference)[i]);
      row.push_back((*r.full_dissipative)[i]);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline CsvTable run_eigenmodes(const RunConfig& cfg) {
  const ModelParams& p = cfg.params;
  const AtomCouplingSpectrum s = atomic_coupling_spectrum(p);
  CsvTable t = base_table(cfg);
  t.metadata.push_back(kv("raman_coupling", p.raman_coupling()));
  t.header = {"branch", "lambda", "e_0", "e_1", "g_eff", "q_squared", "s_max_db", "t_max_squeezing"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const auto row = [&](double branch, double lambda, const Eigen::Vector2d& e, double g) {
    const double q2 = q_squared(g, p.omega_m);
    t.rows.push_back({branch, lambda, e(0), e(1), g, q2, g >= 0.0 ? s_max(g, p.omega_m) : nan,
                      q2 > 0.0 ? time_of_max_squeezing(g, p.omega_m) : nan});
  };
  row(1, s.lambda1, s.e1, s.g_eff_1);
  row(2, s.lambda2, s.e2, s.g_eff_2);
  return t;
}

}  // namespace detail

inline CsvTable execute(const RunConfig& cfg) {
  switch (cfg.command) {
    case Command::smax_sweep: return detail::run_smax_sweep(cfg);
    case Command::time_trace: return detail::run_time_trace(cfg);
    case Command::spectrum: return detail::run_spectrum(cfg);
    case Command::spectrum_vs_g: return detail::run_spectrum_vs_g(cfg);
    case Command::validate_adiabatic: return detail::run_validate_adiabatic(cfg);
    case Command::eigenmodes: return detail::run_eigenmodes(cfg);
  }
  throw std::logic_error("unhandled command");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace hybridsq

#endif  // HYBRIDSQ_RUNNER_HPP
