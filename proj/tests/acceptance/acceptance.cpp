// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hybridsq/hybridsq.hpp"

using namespace hybridsq;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ModelParams hierarchy_params(double scale) {
  ModelParams p;
  p.Delta = 100.0 * scale;
  p.delta = 20.0 * scale;
  p.Omega = 1.0;
  p.g1 = 1.0;
  p.g2 = 0.02;
  return p;
}

Vector atom_e1(const ModelParams& p) {
  Vector a = Vector::Zero(3);
  a.head(2) = atomic_coupling_spectrum(p).e1.cast<Complex>();
  return a;
}

Outcome smax_values() {
  const double s1 = s_max(1.0, 1.0);
  const double s4 = s_max(4.0, 1.0);
  const bool ok = std::abs(s1 - 3.4949) <= 1e-3 && std::abs(s4 - 6.1492) <= 1e-3;
  return {ok, "s_max(1) = " + fmt("%.6f", s1) + " (target 3.4949 +-1e-3), s_max(4) = " + fmt("%.6f", s4) +
                  " (target 6.1492 +-1e-3)"};
}

Outcome smax_curve() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg =
      parse_config("command = smax-sweep\ngeff_start = 0\ngeff_stop = 8\ngeff_count = 81\noutput = fig2.csv\n");
  const std::string csv = render_csv(execute(cfg));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::stringstream ss(csv);
  std::string line;
  std::vector<double> g, s;
  bool header = false;
  while (std::getline(ss, line)) {
    if (line.rfind('#', 0) == 0) continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    g.push_back(std::strtod(line.substr(0, comma).c_str(), nullptr));
    s.push_back(std::strtod(line.substr(comma + 1).c_str(), nullptr));
  }
  double worst = 0.0;
  bool increasing = s.size() == 81;
  for (std::size_t i = 0; i < s.size(); ++i) {
    worst = std::max(worst, std::abs(s[i] - 5.0 * std::log10(4.0 * g[i] + 1.0)));
    if (i > 0 && !(s[i] > s[i - 1])) increasing = false;
  }
  return {increasing && worst <= 1e-9 && secs < 1.0, std::to_string(s.size()) + " rows, monotone " +
                                                         (increasing ? "yes" : "no") + ", max |error| " +
                                                         fmt("%.2e", worst) + ", " + fmt("%.3f s", secs)};
}

Outcome dynamics_vs_closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0, tail = 0.0;
  std::string dims;
  for (double g : {0.5, 1.0, 2.0}) {
    const auto times = period_grid(g, 1.0, 400);
    const auto m = effective_moments(g, 1.0, 0.0, times);
    const auto v = m.variance();
    for (std::size_t i = 0; i < times.size(); ++i) worst = std::max(worst, rel(v[i], position_variance(g, 1.0, 0.0, times[i])));
    tail = std::max(tail, m.max_tail());
    dims += (dims.empty() ? "" : ",") + std::to_string(m.dims[0]);
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 5e-3 && tail < 1e-6 && secs < 60.0, "max rel dev " + fmt("%.2e", worst) + ", tail " +
                                                             fmt("%.1e", tail) + ", d = " + dims + ", " +
                                                             fmt("%.1f s", secs)};
}

Outcome oracle_triangle() {
  double fa = 0.0, fc = 0.0, ac = 0.0, tail = 0.0;
  for (double nbar : {0.0, 10.0}) {
    for (double g : {0.5, 1.0, 2.0}) {
      const auto times = period_grid(g, 1.0, 400);
      const auto fock = effective_moments(g, 1.0, nbar, times);
      const auto vf = fock.variance();
      const auto cov = covariance_evolve(g, 1.0, 0.0, nbar, CovarianceState::thermal(nbar), times);
      for (std::size_t i = 0; i < times.size(); ++i) {
        const double va = position_variance(g, 1.0, nbar, times[i]);
        const double vc = cov[i].cov(0, 0);
        fa = std::max(fa, rel(vf[i], va));
        fc = std::max(fc, rel(vf[i], vc));
        ac = std::max(ac, rel(va, vc));
      }
      tail = std::max(tail, fock.max_tail());
    }
  }
  const double worst = std::max({fa, fc, ac});
  return {worst <= 5e-3 && tail < 1e-6, "fock-analytic " + fmt("%.2e", fa) + ", fock-covariance " + fmt("%.2e", fc) +
                                            ", analytic-covariance " + fmt("%.2e", ac) + ", tail " + fmt("%.1e", tail)};
}

Outcome temperature_independence() {
  const double g = 1.0;
  const std::vector<double> times{0.3, time_of_max_squeezing(g, 1.0)};
  double analytic_spread = 0.0, numeric_spread = 0.0;
  for (double t : times) {
    std::vector<double> sa, sn;
    for (double nbar : {0.0, 1.0, 10.0}) {
      sa.push_back(-5.0 * std::log10(position_variance(g, 1.0, nbar, t) / position_variance(0.0, 1.0, nbar, t)));
      const auto m = effective_moments(g, 1.0, nbar, std::vector<double>{0.0, t});
      sn.push_back(-5.0 * std::log10(m.variance()[1] / m.variance()[0]));
    }
    for (std::size_t k = 1; k < sa.size(); ++k) {
      analytic_spread = std::max(analytic_spread, std::abs(sa[k] - sa[0]));
      numeric_spread = std::max(numeric_spread, rel(sn[k], sn[0]));
    }
  }
  return {analytic_spread <= 1e-12 && numeric_spread <= 1e-2,
          "analytic spread " + fmt("%.1e dB", analytic_spread) + ", numeric rel spread " + fmt("%.1e", numeric_spread)};
}

Outcome adiabatic_validity() {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelParams p = hierarchy_params(1.0);
  const ModelParams p2 = hierarchy_params(2.0);
  const auto r = validate_adiabatic_chain(p, atom_e1(p));
  const auto r2 = validate_adiabatic_chain(p2, atom_e1(p2));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = r.dev_effective_vs_full < 0.05 && r2.dev_effective_vs_full < r.dev_effective_vs_full && secs < 600.0;
  return {ok, "deviation " + fmt("%.3e", r.dev_effective_vs_full) + " -> " + fmt("%.3e", r2.dev_effective_vs_full) +
                  " with Delta, delta doubled, closer Stark variant " + to_string(r.closer_variant) + ", d = " +
                  std::to_string(r.full_dims[0]) + "x" + std::to_string(r.full_dims[1]) + ", " + fmt("%.1f s", secs)};
}

Outcome decay_immunity() {
  const auto t0 = std::chrono::steady_clock::now();
  ModelParams p = hierarchy_params(1.0);
  p.kappa = 0.5;
  p.Gamma_e = 0.1;
  const auto r = validate_adiabatic_chain(p, atom_e1(p));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {r.degradation < 0.1, "S_achieved " + fmt("%.4e dB", r.smax_reference_db) + " -> " +
                                   fmt("%.4e dB", r.smax_dissipative_db) + ", relative degradation " +
                                   fmt("%.4f", r.degradation) + " (target < 0.1), " + fmt("%.1f s", secs)};
}

Outcome spectrum_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> ug(0.0, 3.0), ugamma(0.1, 3.0), unbar(0.0, 20.0), uw(-6.0, 6.0);
  double worst = 0.0;
  for (int draw = 0; draw < 100; ++draw) {
    ModelParams p;
    const double g = ug(rng);
    p.gamma = ugamma(rng);
    p.nbar = unbar(rng);
    for (int k = 0; k < 200; ++k) {
      const double w = uw(rng);
      worst = std::max(worst, rel(spectrum_numeric_point(p, g, w), spectrum_analytic(p, g, w).variance));
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-8 && secs < 10.0, "max rel error " + fmt("%.3e", worst) + " over 100 x 200 points, " +
                                            fmt("%.2f s", secs)};
}

Outcome fig3_structure() {
  ModelParams p;
  p.gamma = 1.0;
  p.nbar = 10.0;
  const auto omegas = linspace(-4.0, 4.0, 801);
  const double step = omegas[1] - omegas[0];
  const double wc = critical_frequencies(p, 1.0).second;
  const auto analytic = spectrum_series(p, 1.0, omegas, SpectrumMethod::analytic);
  const auto numeric = spectrum_numeric(p, 1.0, omegas);
  bool ok = analytic.peaks.size() == 2;
  if (ok) ok = std::abs(analytic.peaks[0].omega + wc) <= step && std::abs(analytic.peaks[1].omega - wc) <= step;
  std::string detail = std::to_string(analytic.peaks.size()) + " peaks at";
  for (const auto& pk : analytic.peaks) detail += " " + fmt("%+.4f", pk.omega);
  detail += " vs omega_crit = +-" + fmt("%.4f", wc) + " (step " + fmt("%.3f", step) + "); exact Langevin peaks at";
  for (const auto& pk : numeric.peaks) detail += " " + fmt("%+.4f", pk.omega);
  return {ok, detail};
}

Outcome fig4_trend() {
  ModelParams p;
  p.gamma = 1.0;
  p.nbar = 10.0;
  const auto grid = linspace(0.1, 5.0, 50);
  const auto in_g = trend_vs_geff(p, 1.0, grid, SpectrumMethod::analytic);
  const std::vector<double> gammas{0.5, 1.0, 2.0};
  const auto in_gamma = trend_vs_gamma(p, 1.0, gammas, SpectrumMethod::analytic);
  const auto in_gamma_exact = trend_vs_gamma(p, 1.0, gammas, SpectrumMethod::numeric);
  std::string detail = std::string("decreasing in g_eff: ") + (in_g.trend.strictly_decreasing ? "yes" : "no") +
                       "; at omega_crit(gamma) for gamma = 0.5, 1, 2:";
  for (double v : in_gamma.variances) detail += " " + fmt("%.4g", v);
  detail += std::string(" (increasing: ") + (in_gamma.trend.strictly_increasing ? "yes" : "no") + "), exact:";
  for (double v : in_gamma_exact.variances) detail += " " + fmt("%.4g", v);
  return {in_g.trend.strictly_decreasing && in_gamma.trend.strictly_increasing, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"S_max values", smax_values},
      {"S_max curve over g_eff in [0, 8]", smax_curve},
      {"unitary dynamics vs closed form", dynamics_vs_closed_form},
      {"analytic / Fock / covariance agreement", oracle_triangle},
      {"relative squeezing independent of temperature", temperature_independence},
      {"adiabatic elimination validity", adiabatic_validity},
      {"squeezing immune to cavity and atomic decay", decay_immunity},
      {"analytic vs numeric spectrum", spectrum_identity},
      {"spectrum doublet at omega_crit", fig3_structure},
      {"variance trends in g_eff and gamma", fig4_trend},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
