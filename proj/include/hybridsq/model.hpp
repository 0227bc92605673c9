#ifndef HYBRIDSQ_MODEL_HPP
#define HYBRIDSQ_MODEL_HPP

// Hamiltonians of the atom-cavity-oscillator system, all in units of omega_m
// with hbar = 1.
//
// Factor order is fixed: cavity mode a, oscillator mode b, then the atom.
// The full model works in the frame rotating the cavity at the pump
// frequency, |e> at the control frequency and |1> at their difference, which
// makes every Hamiltonian here time independent.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hybridsq/operators.hpp"

namespace hybridsq {

namespace factor {
inline constexpr std::size_t cavity = 0;
inline constexpr std::size_t oscillator = 1;
inline constexpr std::size_t atom = 2;
}  // namespace factor

namespace level {
inline constexpr std::size_t ground0 = 0;
inline constexpr std::size_t ground1 = 1;
inline constexpr std::size_t excited = 2;
}  // namespace level

struct ModelParams {
  double omega_m = 1.0;  // oscillator frequency, the unit
  double delta = 0.0;    // cavity-pump detuning omega_c - omega_l
  double Delta = 0.0;    // one-photon detuning of |e>
  double g1 = 0.0;       // atom-cavity coupling
  double g2 = 0.0;       // quadratic optomechanical coupling
  double Omega = 0.0;    // control Rabi frequency
  double eps = 0.0;      // cavity pump amplitude
  double gamma = 0.0;    // mechanical damping
  double nbar = 0.0;     // thermal phonon occupation
  double kappa = 0.0;    // cavity decay, validation runs only
  double Gamma_e = 0.0;  // spontaneous emission from |e>, validation runs only

  void validate() const {
    if (!(omega_m > 0.0)) throw std::invalid_argument("omega_m must be > 0");
    const std::array<std::pair<const char*, double>, 8> nonneg{{{"g1", g1},
                                                                {"g2", g2},
                                                                {"Omega", Omega},
                                                                {"eps", eps},
                                                                {"gamma", gamma},
                                                                {"nbar", nbar},
                                                                {"kappa", kappa},
                                                                {"Gamma_e", Gamma_e}}};
    for (const auto& [name, value] : nonneg) {
      if (!(value >= 0.0)) throw std::invalid_argument(std::string(name) + " must be >= 0");
    }
  }

  // Two-photon (Raman) coupling Omega g1 / Delta.
  double raman_coupling() const {
    if (Delta == 0.0) throw std::invalid_argument("Delta = 0: excited state cannot be eliminated");
    return Omega * g1 / Delta;
  }

  std::vector<std::pair<std::string, double>> snapshot() const {
    return {{"omega_m", omega_m}, {"delta", delta}, {"Delta", Delta},   {"g1", g1},
            {"g2", g2},           {"Omega", Omega}, {"eps", eps},       {"gamma", gamma},
            {"nbar", nbar},       {"kappa", kappa}, {"Gamma_e", Gamma_e}};
  }
};

inline HilbertSpace full_space(std::size_t d_cav, std::size_t d_mech) {
  return HilbertSpace{Factor::fock(d_cav), Factor::fock(d_mech), Factor::level(3)};
}

inline HilbertSpace two_level_space(std::size_t d_cav, std::size_t d_mech) {
  return HilbertSpace{Factor::fock(d_cav), Factor::fock(d_mech), Factor::level(2)};
}

inline HilbertSpace oscillator_space(std::size_t d_mech) { return HilbertSpace{Factor::fock(d_mech)}; }

namespace detail {

inline void require_hybrid_layout(const HilbertSpace& space, std::size_t levels) {
  const bool ok = space.size() == 3 && space.factor(factor::cavity).kind == Factor::Kind::fock &&
                  space.factor(factor::oscillator).kind == Factor::Kind::fock &&
                  space.factor(factor::atom).kind == Factor::Kind::level &&
                  space.factor(factor::atom).dim == levels;
  if (!ok) {
    throw std::invalid_argument("expected space Fock(cavity) x Fock(oscillator) x Level(" +
                                std::to_string(levels) + ")");
  }
}

inline Matrix unit_matrix(std::size_t dim, std::size_t i, std::size_t j) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(d, d);
  m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return m;
}

inline Matrix number_matrix(std::size_t dim) {
  Matrix a = ladder_matrix(dim);
  return a.adjoint() * a;
}

inline Matrix position_squared_matrix(std::size_t dim) {
  Matrix a = ladder_matrix(dim);
  Matrix x = a + a.adjoint();
  return x * x;
}

// Terms shared by every cavity model: delta a^dag a + omega_m b^dag b
// + g2 a^dag a (b + b^dag)^2 + eps (a + a^dag).
inline Operator cavity_oscillator_terms(const ModelParams& p, const HilbertSpace& space) {
  const std::size_t dc = space.factor(factor::cavity).dim;
  const std::size_t dm = space.factor(factor::oscillator).dim;
  const Matrix na = number_matrix(dc);
  const Matrix a = ladder_matrix(dc);
  Operator h = p.delta * tensor_embed({FactorMatrix{factor::cavity, na}}, space);
  h += p.omega_m * tensor_embed({FactorMatrix{factor::oscillator, number_matrix(dm)}}, space);
  h += p.g2 * tensor_embed({FactorMatrix{factor::cavity, na},
                            FactorMatrix{factor::oscillator, position_squared_matrix(dm)}},
                           space);
  h += p.eps * tensor_embed({FactorMatrix{factor::cavity, Matrix(a + a.adjoint())}}, space);
  return h;
}

}  // namespace detail

// H = delta a^dag a + omega_m b^dag b + Delta|e><e| - delta|1><1|
//   + (Omega|e><0| + g1 a^dag |1><e| + h.c.) + g2 a^dag a (b+b^dag)^2 + eps(a + a^dag)
inline Operator build_full_hamiltonian(const ModelParams& p, const HilbertSpace& space) {
  detail::require_hybrid_layout(space, 3);
  const std::size_t dc = space.factor(factor::cavity).dim;
  const auto proj = [&](std::size_t i, std::size_t j) { return detail::unit_matrix(3, i, j); };

  Operator h = detail::cavity_oscillator_terms(p, space);
  h += p.Delta * tensor_embed({FactorMatrix{factor::atom, proj(level::excited, level::excited)}}, space);
  h -= p.delta * tensor_embed({FactorMatrix{factor::atom, proj(level::ground1, level::ground1)}}, space);

  Operator coupling = p.Omega * tensor_embed({FactorMatrix{factor::atom, proj(level::excited, level::ground0)}}, space);
  coupling += p.g1 * tensor_embed({FactorMatrix{factor::cavity, Matrix(ladder_matrix(dc).adjoint())},
                                   FactorMatrix{factor::atom, proj(level::ground1, level::excited)}},
                                  space);
  h += coupling;
  h += coupling.adjoint();
  return h;
}

enum class StarkVariant {
  as_written,  // both ground-state shifts with coefficient Omega g1 / Delta
  textbook,    // Omega^2/Delta on |0><0|, g1^2/Delta on |1><1| a^dag a
};

inline const char* to_string(StarkVariant v) { return v == StarkVariant::as_written ? "as-written" : "textbook"; }

// Excited state eliminated: atom reduced to {|0>, |1>}.
inline Operator build_two_level_hamiltonian(const ModelParams& p, const HilbertSpace& space, StarkVariant variant) {
  detail::require_hybrid_layout(space, 2);
  const std::size_t dc = space.factor(factor::cavity).dim;
  const double alpha = p.raman_coupling();
  const double shift0 = variant == StarkVariant::as_written ? alpha : p.Omega * p.Omega / p.Delta;
  const double shift1 = variant == StarkVariant::as_written ? alpha : p.g1 * p.g1 / p.Delta;
  const auto proj = [&](std::size_t i, std::size_t j) { return detail::unit_matrix(2, i, j); };

  Operator h = detail::cavity_oscillator_terms(p, space);
  h -= shift0 * tensor_embed({FactorMatrix{factor::atom, proj(0, 0)}}, space);
  h -= shift1 * tensor_embed({FactorMatrix{factor::cavity, detail::number_matrix(dc)},
                              FactorMatrix{factor::atom, proj(1, 1)}},
                             space);
  h -= p.delta * tensor_embed({FactorMatrix{factor::atom, proj(1, 1)}}, space);

  const Operator flip = tensor_embed({FactorMatrix{factor::cavity, ladder_matrix(dc)},
                                      FactorMatrix{factor::atom, proj(0, 1)}},
                                     space);
  h -= alpha * (flip + flip.adjoint());
  return h;
}

// Eigen-decomposition of the atomic part of g-hat,
// [[alpha^2, -eps alpha], [-eps alpha, 0]] on {|0>, |1>}.
struct AtomCouplingSpectrum {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Eigen::Vector2d e1 = Eigen::Vector2d::UnitX();
  Eigen::Vector2d e2 = Eigen::Vector2d::UnitY();
  double g_eff_1 = 0.0;
  double g_eff_2 = 0.0;
};

inline AtomCouplingSpectrum atomic_coupling_spectrum(const ModelParams& p) {
  if (p.delta == 0.0) throw std::invalid_argument("delta = 0: cavity cannot be eliminated");
  const double alpha = p.raman_coupling();
  const double a = alpha * alpha;
  const double b = -p.eps * alpha;

  AtomCouplingSpectrum out;
  const double root = std::sqrt(a * a + 4.0 * b * b);
  out.lambda1 = 0.5 * (a + root);
  out.lambda2 = 0.5 * (a - root);

  if (b != 0.0) {
    // (A - lambda) v = 0 with A = [[a, b], [b, 0]] gives v ~ (lambda, b).
    out.e1 = Eigen::Vector2d(out.lambda1, b).normalized();
    out.e2 = Eigen::Vector2d(out.lambda2, b).normalized();
  }
  // Sign convention: first nonzero component positive.
  for (auto* v : {&out.e1, &out.e2}) {
    const double lead = std::abs((*v)(0)) > 1e-15 ? (*v)(0) : (*v)(1);
    if (lead < 0.0) *v = -*v;
  }

  const double scale = p.g2 / (p.delta * p.delta);
  const double eps2 = p.eps * p.eps;
  out.g_eff_1 = scale * (out.lambda1 + eps2);
  out.g_eff_2 = scale * (out.lambda2 + eps2);
  return out;
}

struct EffectiveHamiltonian {
  Operator hamiltonian;
  double q_squared;  // omega_m (omega_m + 4 g_eff)
  bool unstable;     // q_squared <= 0: hyperbolic evolution
};

// H = omega_m b^dag b + g_eff (b + b^dag)^2 on a single Fock factor.
inline EffectiveHamiltonian build_effective_hamiltonian(double g_eff, double omega_m, const HilbertSpace& space) {
  if (space.size() != 1) throw std::invalid_argument("effective Hamiltonian needs a single Fock factor");
  const std::size_t d = require_fock(space, 0).dim;
  Operator h = tensor_embed({FactorMatrix{0, Matrix(omega_m * detail::number_matrix(d) +
                                                    g_eff * detail::position_squared_matrix(d))}},
                            space);
  const double q2 = omega_m * (omega_m + 4.0 * g_eff);
  return {std::move(h), q2, !(q2 > 0.0)};
}

}  // namespace hybridsq

#endif  // HYBRIDSQ_MODEL_HPP
