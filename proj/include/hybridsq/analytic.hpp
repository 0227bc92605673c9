#ifndef HYBRIDSQ_ANALYTIC_HPP
#define HYBRIDSQ_ANALYTIC_HPP

// Closed-form results for H = omega_m b^dag b + g_eff (b + b^dag)^2.
//
// Quadratures are X = (b + b^dag)/2, P = (b - b^dag)/2i, so the vacuum
// variance is 1/4. Squeezing in dB, S_max and spectral peak positions are
// ratios and do not depend on that normalization.

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "hybridsq/errors.hpp"
#include "hybridsq/model.hpp"

namespace hybridsq {

inline double q_squared(double g_eff, double omega_m) { return omega_m * (omega_m + 4.0 * g_eff); }

inline double oscillation_rate(double g_eff, double omega_m) {
  const double q2 = q_squared(g_eff, omega_m);
  if (!(q2 > 0.0)) {
    throw UnstableRegime("q^2 = omega_m(omega_m + 4 g_eff) = " + std::to_string(q2) + " <= 0");
  }
  return std::sqrt(q2);
}

// Variance period pi/q; the minimum sits at half of it.
inline double squeezing_period(double g_eff, double omega_m) {
  return std::numbers::pi / oscillation_rate(g_eff, omega_m);
}

inline double time_of_max_squeezing(double g_eff, double omega_m) { return 0.5 * squeezing_period(g_eff, omega_m); }

struct BogoliubovCoeffs {
  std::complex<double> r;
  std::complex<double> s;
  double k;
  double q;
};

// b(t) = r b(0) + s b^dag(0).
inline BogoliubovCoeffs bogoliubov(double g_eff, double omega_m, double t) {
  const double k = 2.0 * g_eff + omega_m;
  const double q = oscillation_rate(g_eff, omega_m);
  const double sn = std::sin(q * t);
  return {std::complex<double>(std::cos(q * t), -k / q * sn), std::complex<double>(0.0, -2.0 * g_eff / q * sn), k, q};
}

// coth(hbar omega_m / 2 k_B T) = 2 nbar + 1.
inline double thermal_V(double nbar) {
  if (!(nbar >= 0.0)) throw std::invalid_argument("nbar must be >= 0");
  return 2.0 * nbar + 1.0;
}

// nbar = 1/(exp(hbar omega_m / k_B T) - 1), argument given as hbar omega_m / k_B T.
inline double nbar_from_temperature(double hbar_omega_over_kT) {
  if (!(hbar_omega_over_kT > 0.0)) throw std::invalid_argument("hbar omega / k_B T must be > 0");
  return 1.0 / std::expm1(hbar_omega_over_kT);
}

inline double squeezing_depth(double g_eff, double omega_m) { return 4.0 * g_eff / (4.0 * g_eff + omega_m); }

// <(Delta X)^2>(t) = (V/4) [1 - 4 g/(4 g + omega_m) sin^2(q t)].
inline double position_variance(double g_eff, double omega_m, double nbar, double t) {
  const double q = oscillation_rate(g_eff, omega_m);
  const double sn = std::sin(q * t);
  return 0.25 * thermal_V(nbar) * (1.0 - squeezing_depth(g_eff, omega_m) * sn * sn);
}

inline double minimum_position_variance(double g_eff, double omega_m, double nbar) {
  oscillation_rate(g_eff, omega_m);
  return 0.25 * thermal_V(nbar) * omega_m / (4.0 * g_eff + omega_m);
}

// S = -10 log10 sqrt(ratio of variances to the uncoupled oscillator).
inline double squeezing_db(double g_eff, double omega_m, double t) {
  const double q = oscillation_rate(g_eff, omega_m);
  const double sn = std::sin(q * t);
  return -5.0 * std::log10(1.0 - squeezing_depth(g_eff, omega_m) * sn * sn);
}

inline double s_max(double g_eff, double omega_m) {
  if (!(g_eff >= 0.0)) throw std::invalid_argument("s_max needs g_eff >= 0");
  if (!(omega_m > 0.0)) throw std::invalid_argument("omega_m must be > 0");
  return 5.0 * std::log10(4.0 * g_eff / omega_m + 1.0);
}

struct SpectrumPoint {
  double omega;
  double variance;
  double P;
  double Q;
};

// <X(w), X(w)> = (gamma/4) P/Q in the displayed closed form.
inline SpectrumPoint spectrum_analytic(const ModelParams& p, double g_eff, double omega) {
  if (!(p.gamma > 0.0)) throw std::invalid_argument("spectrum needs gamma > 0");
  const double wm = p.omega_m;
  const double nb = p.nbar;
  const double hg2 = 0.25 * p.gamma * p.gamma;
  const double plus = omega + 2.0 * g_eff + wm;
  const double minus = omega - 2.0 * g_eff - wm;
  const double P = (nb + 1.0) * (hg2 + plus * plus) + nb * (hg2 + minus * minus) -
                   2.0 * g_eff * (omega + (2.0 * nb + 1.0) * wm);
  const double inner = hg2 + wm * (4.0 * g_eff + wm) - omega * omega;
  const double Q = inner * inner + (omega * p.gamma) * (omega * p.gamma);
  return {omega, 0.25 * p.gamma * P / Q, P, Q};
}

// +-sqrt(omega_m (4 g_eff + omega_m) - gamma^2/4), the minima of Q.
inline std::pair<double, double> critical_frequencies(const ModelParams& p, double g_eff) {
  const double arg = p.omega_m * (4.0 * g_eff + p.omega_m) - 0.25 * p.gamma * p.gamma;
  if (!(arg > 0.0)) {
    throw OverdampedDoublet("omega_m(4 g_eff + omega_m) - gamma^2/4 = " + std::to_string(arg) + " <= 0");
  }
  const double w = std::sqrt(arg);
  return {-w, w};
}

}  // namespace hybridsq

#endif  // HYBRIDSQ_ANALYTIC_HPP
