#ifndef HYBRIDSQ_SPECTRUM_HPP
#define HYBRIDSQ_SPECTRUM_HPP

// Position-quadrature fluctuation spectrum of the damped effective oscillator.
//
// The numeric route Fourier-transforms the quantum Langevin equation
//   db/dt = -i[b, H] - (gamma/2) b + sqrt(gamma) b_in
// into a 2x2 linear system for (b(w), b^dag(w)), inverts it, and contracts
// X(w) X(-w) with the white thermal input correlations. The reported value is
// the coefficient of delta(w + w').

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hybridsq/analytic.hpp"
#include "hybridsq/dynamics.hpp"
#include "hybridsq/model.hpp"

namespace hybridsq {

enum class SpectrumMethod { analytic, numeric };

inline const char* to_string(SpectrumMethod m) { return m == SpectrumMethod::analytic ? "analytic" : "numeric"; }

struct Peak {
  double omega;
  double value;
};

struct SpectrumSeries {
  std::vector<double> omegas;
  std::vector<double> variances;
  RunMeta meta;
  std::vector<Peak> peaks;
};

namespace detail {

// Response matrix M(w) with M (b(w), b^dag(w))^T = sqrt(gamma) (b_in(w), b_in^dag(w))^T.
inline Eigen::Matrix2cd langevin_response(double g_eff, double omega_m, double gamma, double omega) {
  const double k = omega_m + 2.0 * g_eff;
  Eigen::Matrix2cd m;
  m << Complex(0.5 * gamma, k - omega), Complex(0.0, 2.0 * g_eff),
      Complex(0.0, -2.0 * g_eff), Complex(0.5 * gamma, -k - omega);
  return m;
}

// Row vector c(w) with X(w) = c_1 b_in(w) + c_2 b_in^dag(w).
inline Eigen::RowVector2cd x_noise_weights(double g_eff, double omega_m, double gamma, double omega) {
  const Eigen::Matrix2cd m = langevin_response(g_eff, omega_m, gamma, omega);
  if (std::abs(m.determinant()) == 0.0) {
    throw std::domain_error("Langevin response matrix is singular at omega = " + std::to_string(omega));
  }
  const Eigen::RowVector2cd half(0.5, 0.5);
  return std::sqrt(gamma) * (half * m.inverse());
}

}  // namespace detail

// <X(w) X(w')> / delta(w + w') with <b_in(w) b_in^dag(w')> = (nbar+1) delta(w+w')
// and <b_in^dag(w) b_in(w')> = nbar delta(w+w') in this Fourier convention.
inline double spectrum_numeric_point(const ModelParams& p, double g_eff, double omega) {
  if (!(p.gamma > 0.0)) throw std::invalid_argument("spectrum needs gamma > 0");
  const auto cp = detail::x_noise_weights(g_eff, p.omega_m, p.gamma, omega);
  const auto cm = detail::x_noise_weights(g_eff, p.omega_m, p.gamma, -omega);
  const Complex v = cp(0) * cm(1) * (p.nbar + 1.0) + cp(1) * cm(0) * p.nbar;
  return v.real();
}

inline std::vector<Peak> find_peaks(const SpectrumSeries& series);

namespace detail {

inline RunMeta spectrum_meta(const ModelParams& p, double g_eff) {
  RunMeta meta;
  meta.parameters = p.snapshot();
  meta.parameters.emplace_back("g_eff", g_eff);
  return meta;
}

}  // namespace detail

inline SpectrumSeries spectrum_series(const ModelParams& p, double g_eff, std::span<const double> omegas,
                                      SpectrumMethod method) {
  require_increasing(omegas);
  SpectrumSeries out;
  out.omegas.assign(omegas.begin(), omegas.end());
  out.variances.reserve(omegas.size());
  for (double w : omegas) {
    out.variances.push_back(method == SpectrumMethod::analytic ? spectrum_analytic(p, g_eff, w).variance
                                                               : spectrum_numeric_point(p, g_eff, w));
  }
  out.meta = detail::spectrum_meta(p, g_eff);
  if (out.omegas.size() >= 3) out.peaks = find_peaks(out);
  return out;
}

inline SpectrumSeries spectrum_numeric(const ModelParams& p, double g_eff, std::span<const double> omegas) {
  return spectrum_series(p, g_eff, omegas, SpectrumMethod::numeric);
}

// Interior local maxima, each refined by the vertex of the parabola through
// the three bracketing points.
inline std::vector<Peak> find_peaks(const SpectrumSeries& series) {
  const auto& x = series.omegas;
  const auto& y = series.variances;
  if (x.size() != y.size()) throw std::invalid_argument("spectrum series lengths differ");
  if (x.size() < 3) throw std::invalid_argument("peak finding needs at least 3 points");
  std::vector<Peak> peaks;
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
    const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
    const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);  // leading coefficient
    if (curvature >= 0.0) {
      peaks.push_back({x1, y1});
      continue;
    }
    // y = y1 + d01 (x - x1) + curvature (x - x0)(x - x1)
    const double slope_at_x1 = d01 + curvature * (x1 - x0);
    const double xv = x1 - slope_at_x1 / (2.0 * curvature);
    const double yv = y1 + d01 * (xv - x1) + curvature * (xv - x0) * (xv - x1);
    peaks.push_back({xv, yv});
  }
  return peaks;
}

struct Monotonicity {
  bool strictly_increasing;
  bool strictly_decreasing;
};

inline Monotonicity monotonicity(std::span<const double> values) {
  Monotonicity m{true, true};
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i] > values[i - 1])) m.strictly_increasing = false;
    if (!(values[i] < values[i - 1])) m.strictly_decreasing = false;
  }
  return m;
}

struct TrendSeries {
  std::vector<double> abscissa;  // g_eff or gamma values
  std::vector<double> omegas;    // frequency at which each value was taken
  std::vector<double> variances;
  RunMeta meta;
  Monotonicity trend{};
};

inline double spectrum_value(const ModelParams& p, double g_eff, double omega, SpectrumMethod method) {
  return method == SpectrumMethod::analytic ? spectrum_analytic(p, g_eff, omega).variance
                                            : spectrum_numeric_point(p, g_eff, omega);
}

// Variance at a fixed frequency as a function of g_eff.
inline TrendSeries trend_vs_geff(const ModelParams& p, double omega_fixed, std::span<const double> geff_grid,
                                 SpectrumMethod method = SpectrumMethod::analytic) {
  TrendSeries out;
  out.abscissa.assign(geff_grid.begin(), geff_grid.end());
  for (double g : geff_grid) {
    out.omegas.push_back(omega_fixed);
    out.variances.push_back(spectrum_value(p, g, omega_fixed, method));
  }
  out.meta.parameters = p.snapshot();
  out.meta.parameters.emplace_back("omega_fixed", omega_fixed);
  out.trend = monotonicity(out.variances);
  return out;
}

// Variance at the upper critical frequency omega_crit(gamma) for each gamma.
inline TrendSeries trend_vs_gamma(const ModelParams& p, double g_eff, std::span<const double> gamma_grid,
                                  SpectrumMethod method = SpectrumMethod::analytic) {
  TrendSeries out;
  out.abscissa.assign(gamma_grid.begin(), gamma_grid.end());
  for (double gamma : gamma_grid) {
    ModelParams q = p;
    q.gamma = gamma;
    const double w = critical_frequencies(q, g_eff).second;
    out.omegas.push_back(w);
    out.variances.push_back(spectrum_value(q, g_eff, w, method));
  }
  out.meta.parameters = p.snapshot();
  out.meta.parameters.emplace_back("g_eff", g_eff);
  out.trend = monotonicity(out.variances);
  return out;
}

}  // namespace hybridsq

#endif  // HYBRIDSQ_SPECTRUM_HPP
