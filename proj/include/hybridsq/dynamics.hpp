#ifndef HYBRIDSQ_DYNAMICS_HPP
#define HYBRIDSQ_DYNAMICS_HPP

// Time evolution of the full, two-level and effective models.
//
// Closed systems are propagated exactly from a Hermitian eigendecomposition
// of H. Open systems integrate the Lindblad equation with an adaptive
// Dormand-Prince stepper. covariance_evolve integrates the Gaussian moment
// equations of the damped quadratic oscillator and is the independent oracle
// for the Fock-space runs.

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <boost/numeric/odeint.hpp>

#include "hybridsq/analytic.hpp"
#include "hybridsq/errors.hpp"
#include "hybridsq/model.hpp"
#include "hybridsq/operators.hpp"

namespace hybridsq {

inline std::vector<double> linspace(double start, double stop, std::size_t count) {
  if (count < 2) throw std::invalid_argument("grid needs at least 2 points");
  std::vector<double> out(count);
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = start + step * static_cast<double>(i);
  out.back() = stop;
  return out;
}

// Default grid: `count` points over one variance period pi/q.
inline std::vector<double> period_grid(double g_eff, double omega_m, std::size_t count = 400) {
  return linspace(0.0, squeezing_period(g_eff, omega_m), count);
}

inline void require_increasing(std::span<const double> times) {
  if (times.empty()) throw std::invalid_argument("empty time grid");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("time grid must be strictly increasing");
  }
}

struct RunMeta {
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<std::size_t> dims;
  double max_tail = 0.0;    // largest top-Fock-level population seen
  bool tail_flag = false;   // max_tail above the truncation threshold
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<double> values;
  RunMeta meta;
};

struct TrajectoryStats {
  std::vector<double> max_edge_population;  // per factor; 0 for Level factors
  double max_norm_error = 0.0;             // |norm - 1| or |trace - 1|

  double max_tail() const {
    return max_edge_population.empty() ? 0.0
                                      : *std::max_element(max_edge_population.begin(), max_edge_population.end());
  }
};

struct StateTrajectory {
  std::vector<double> times;
  std::vector<QuantumState> states;
  TrajectoryStats stats;
};

namespace detail {

inline bool is_real(const Matrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

inline void require_hermitian(const Operator& h) {
  const double scale = std::max(1.0, h.matrix().cwiseAbs().maxCoeff());
  if (!h.is_hermitian(1e-10 * scale)) throw std::invalid_argument("Hamiltonian is not Hermitian");
}

inline void track_tails(const QuantumState& s, TrajectoryStats& stats) {
  const auto& space = s.space();
  stats.max_edge_population.resize(space.size(), 0.0);
  for (std::size_t k = 0; k < space.size(); ++k) {
    if (space.factor(k).kind != Factor::Kind::fock) continue;
    stats.max_edge_population[k] = std::max(stats.max_edge_population[k], edge_population(s, k));
  }
}

}  // namespace detail

// exp(-iHt) through H = V diag(E) V^dag, valid for any t.
class UnitaryPropagator {
 public:
  explicit UnitaryPropagator(const Operator& h) : space_(h.space()) {
    detail::require_hermitian(h);
    real_ = detail::is_real(h.matrix());
    if (real_) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix().real());
      energies_ = es.eigenvalues();
      basis_real_ = es.eigenvectors();
      basis_ = basis_real_.cast<Complex>();
    } else {
      Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix());
      energies_ = es.eigenvalues();
      basis_ = es.eigenvectors();
    }
  }

  const HilbertSpace& space() const noexcept { return space_; }
  const Eigen::VectorXd& energies() const noexcept { return energies_; }

  Vector evolve(const Vector& psi0, double t) const {
    Vector c = basis_.adjoint() * psi0;
    for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::polar(1.0, -energies_(j) * t);
    return basis_ * c;
  }

  Matrix evolve(const Matrix& rho0, double t) const {
    Matrix r = basis_.adjoint() * rho0 * basis_;
    const Vector phase = phases(t);
    r = phase.asDiagonal() * r * phase.conjugate().asDiagonal();
    return basis_ * r * basis_.adjoint();
  }

  QuantumState evolve(const QuantumState& s0, double t) const {
    if (s0.is_pure()) return QuantumState::pure(space_, evolve(s0.vector(), t), 1e-6);
    return QuantumState::mixed_unchecked(space_, evolve(s0.density(), t));
  }

  // Tr(rho(t) O_k) on every grid time without forming rho(t): O(d^2) per
  // time and observable after an O(d^3) change of basis.
  std::vector<std::vector<Complex>> expectation_series(const Matrix& rho0, std::span<const Matrix* const> ops,
                                                       std::span<const double> times) const {
    std::vector<std::vector<Complex>> out(ops.size(), std::vector<Complex>(times.size()));
    const bool real_path = real_ && detail::is_real(rho0) &&
                           std::all_of(ops.begin(), ops.end(), [](const Matrix* m) { return detail::is_real(*m); });
    if (real_path) {
      const Eigen::MatrixXd rho = basis_real_.transpose() * rho0.real() * basis_real_;
      for (std::size_t k = 0; k < ops.size(); ++k) {
        const Eigen::MatrixXd o = basis_real_.transpose() * ops[k]->real() * basis_real_;
        const Eigen::MatrixXd m = rho.cwiseProduct(o.transpose());
        for (std::size_t i = 0; i < times.size(); ++i) {
          const Eigen::VectorXd c = (energies_ * times[i]).array().cos().matrix();
          const Eigen::VectorXd s = (energies_ * times[i]).array().sin().matrix();
          const Eigen::VectorXd mc = m * c;
          const Eigen::VectorXd ms = m * s;
          out[k][i] = Complex(c.dot(mc) + s.dot(ms), c.dot(ms) - s.dot(mc));
        }
      }
      return out;
    }
    const Matrix rho = basis_.adjoint() * rho0 * basis_;
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const Matrix o = basis_.adjoint() * *ops[k] * basis_;
      const Matrix m = rho.cwiseProduct(o.transpose());
      for (std::size_t i = 0; i < times.size(); ++i) {
        const Vector a = phases(times[i]);
        out[k][i] = a.transpose() * (m * a.conjugate());
      }
    }
    return out;
  }

 private:
  Vector phases(double t) const {
    Vector a(energies_.size());
    for (Eigen::Index j = 0; j < a.size(); ++j) a(j) = std::polar(1.0, -energies_(j) * t);
    return a;
  }

  HilbertSpace space_;
  bool real_ = false;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd basis_real_;
  Matrix basis_;
};

// Observer signature: void(std::size_t index, double t, const QuantumState&).
template <class Observer>
  requires std::invocable<Observer&, std::size_t, double, const QuantumState&>
TrajectoryStats evolve_unitary(const Operator& h, const QuantumState& psi0, std::span<const double> times,
                               Observer&& observe) {
  if (!psi0.is_pure()) throw std::invalid_argument("evolve_unitary needs a pure initial state");
  if (!(psi0.space() == h.space())) throw std::invalid_argument("state and Hamiltonian spaces differ");
  require_increasing(times);
  const UnitaryPropagator prop(h);
  TrajectoryStats stats;
  for (std::size_t i = 0; i < times.size(); ++i) {
    Vector psi = prop.evolve(psi0.vector(), times[i]);
    const double drift = std::abs(psi.norm() - 1.0);
    stats.max_norm_error = std::max(stats.max_norm_error, drift);
    if (drift > 1e-6) {
      throw IntegrationError("norm drift " + std::to_string(drift) + " at t = " + std::to_string(times[i]));
    }
    const auto state = QuantumState::pure(h.space(), std::move(psi), 1e-6);
    detail::track_tails(state, stats);
    observe(i, times[i], state);
  }
  return stats;
}

inline StateTrajectory evolve_unitary(const Operator& h, const QuantumState& psi0, std::span<const double> times) {
  StateTrajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.states.reserve(times.size());
  traj.stats = evolve_unitary(h, psi0, times, [&](std::size_t, double, const QuantumState& s) {
    traj.states.push_back(s);
  });
  return traj;
}

struct CollapseOp {
  Operator op;
  double rate;
};

struct LindbladOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double initial_step = 1e-3;
  double trace_tol = 1e-9;
  double positivity_tol = 1e-8;
  std::size_t positivity_stride = 1;  // eigenvalue check every n-th observation
  std::size_t max_steps = 1'000'000;  // between two observation times
};

// d rho/dt = -i[H, rho] + sum_k rate_k (L rho L^dag - {L^dag L, rho}/2).
template <class Observer>
  requires std::invocable<Observer&, std::size_t, double, const QuantumState&>
TrajectoryStats evolve_lindblad(const Operator& h, std::span<const CollapseOp> collapse, const QuantumState& rho0,
                                std::span<const double> times, Observer&& observe,
                                const LindbladOptions& opts = {}) {
  namespace odeint = boost::numeric::odeint;
  using SparseMatrix = Eigen::SparseMatrix<Complex>;
  using State = std::vector<Complex>;

  detail::require_hermitian(h);
  if (!(rho0.space() == h.space())) throw std::invalid_argument("state and Hamiltonian spaces differ");
  require_increasing(times);
  const auto n = static_cast<Eigen::Index>(h.space().total_dim());

  Matrix h_eff = h.matrix();
  std::vector<SparseMatrix> jumps;
  for (const auto& c : collapse) {
    if (!(c.op.space() == h.space())) throw std::invalid_argument("collapse operator on a different space");
    if (!(c.rate >= 0.0)) throw std::invalid_argument("collapse rate must be >= 0");
    if (c.rate == 0.0) continue;
    const Matrix l = std::sqrt(c.rate) * c.op.matrix();
    h_eff -= Complex(0.0, 0.5) * (l.adjoint() * l);
    jumps.push_back(l.sparseView());
  }
  const SparseMatrix h_eff_sparse = h_eff.sparseView();

  Matrix m(n, n), lr(n, n), lr_adj(n, n);
  auto rhs = [&](const State& x, State& dxdt, double) {
    Eigen::Map<const Matrix> rho(x.data(), n, n);
    Eigen::Map<Matrix> drho(dxdt.data(), n, n);
    m.noalias() = h_eff_sparse * rho;
    drho = Complex(0.0, -1.0) * m + Complex(0.0, 1.0) * m.adjoint();
    for (const auto& l : jumps) {
      lr.noalias() = l * rho;
      lr_adj = lr.adjoint();
      drho.noalias() += l * lr_adj;
    }
  };

  const Matrix start = rho0.density_matrix();
  State x(start.data(), start.data() + start.size());

  TrajectoryStats stats;
  std::size_t index = 0;
  auto on_time = [&](const State& xs, double t) {
    Eigen::Map<const Matrix> rho(xs.data(), n, n);
    Matrix herm = 0.5 * (rho + rho.adjoint());
    const double drift = std::abs(herm.trace().real() - 1.0);
    stats.max_norm_error = std::max(stats.max_norm_error, drift);
    if (drift > opts.trace_tol) {
      throw IntegrationError("trace drift " + std::to_string(drift) + " at t = " + std::to_string(t));
    }
    if (opts.positivity_stride > 0 && (index % opts.positivity_stride == 0 || index + 1 == times.size())) {
      const double min_eig =
          Eigen::SelfAdjointEigenSolver<Matrix>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
      if (min_eig < -opts.positivity_tol) {
        throw IntegrationError("negative eigenvalue " + std::to_string(min_eig) + " at t = " + std::to_string(t));
      }
    }
    const auto state = QuantumState::mixed_unchecked(h.space(), std::move(herm));
    detail::track_tails(state, stats);
    observe(index, t, state);
    ++index;
  };

  auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), opts.initial_step, on_time,
                            odeint::max_step_checker(static_cast<int>(opts.max_steps)));
  } catch (const odeint::step_adjustment_error& e) {
    throw IntegrationError(std::string("Lindblad step control failed: ") + e.what());
  } catch (const odeint::no_progress_error& e) {
    throw IntegrationError(std::string("Lindblad integration stalled: ") + e.what());
  }
  return stats;
}

inline StateTrajectory evolve_lindblad(const Operator& h, std::span<const CollapseOp> collapse,
                                       const QuantumState& rho0, std::span<const double> times,
                                       const LindbladOptions& opts = {}) {
  StateTrajectory traj;
  traj.times.assign(times.begin(), times.end());
  traj.states.reserve(times.size());
  traj.stats = evolve_lindblad(
      h, collapse, rho0, times, [&](std::size_t, double, const QuantumState& s) { traj.states.push_back(s); }, opts);
  return traj;
}

inline double variance(const QuantumState& s, const Operator& q) {
  const double m = expectation(s, q).real();
  return expectation(s, q * q).real() - m * m;
}

inline TimeSeries variance_trajectory(const StateTrajectory& traj, const Operator& quad) {
  TimeSeries out;
  out.times = traj.times;
  out.values.reserve(traj.states.size());
  const Operator quad2 = quad * quad;
  for (const auto& s : traj.states) {
    if (!(s.space() == quad.space())) throw std::invalid_argument("trajectory and quadrature spaces differ");
    const double m = expectation(s, quad).real();
    out.values.push_back(expectation(s, quad2).real() - m * m);
  }
  out.meta.dims = traj.states.empty() ? std::vector<std::size_t>{} : traj.states.front().space().dims();
  out.meta.max_tail = traj.stats.max_tail();
  return out;
}

inline TimeSeries variance_trajectory(const StateTrajectory& traj, std::size_t factor_index, Quadrature which) {
  if (traj.states.empty()) return {traj.times, {}, {}};
  return variance_trajectory(traj, quadrature(traj.states.front().space(), factor_index, which));
}

// ---------------------------------------------------------------------------
// Gaussian moments of the damped quadratic oscillator.

struct CovarianceState {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();      // <X>, <P>
  Eigen::Matrix2d cov = 0.25 * Eigen::Matrix2d::Identity();  // symmetrized

  static CovarianceState vacuum() { return {}; }
  static CovarianceState thermal(double nbar) {
    CovarianceState s;
    s.cov = 0.25 * thermal_V(nbar) * Eigen::Matrix2d::Identity();
    return s;
  }

  double determinant() const { return cov.determinant(); }
};

// Drift of (X, P) implied by db/dt = -i[b, H] - (gamma/2) b + sqrt(gamma) b_in.
inline Eigen::Matrix2d quadrature_drift(double g_eff, double omega_m, double gamma) {
  Eigen::Matrix2d a;
  a << -0.5 * gamma, omega_m, -(omega_m + 4.0 * g_eff), -0.5 * gamma;
  return a;
}

// d mean/dt = A mean; d cov/dt = A cov + cov A^T + D with D = gamma (2 nbar + 1)/4.
inline std::vector<CovarianceState> covariance_evolve(double g_eff, double omega_m, double gamma, double nbar,
                                                      const CovarianceState& init, std::span<const double> times,
                                                      double tol = 1e-12) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 5>;  // <X>, <P>, cXX, cXP, cPP
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  require_increasing(times);
  const Eigen::Matrix2d a = quadrature_drift(g_eff, omega_m, gamma);
  const double diffusion = 0.25 * gamma * thermal_V(nbar);

  auto rhs = [&](const State& x, State& dx, double) {
    Eigen::Matrix2d c;
    c << x[2], x[3], x[3], x[4];
    const Eigen::Matrix2d dc = a * c + c * a.transpose() + diffusion * Eigen::Matrix2d::Identity();
    dx[0] = a(0, 0) * x[0] + a(0, 1) * x[1];
    dx[1] = a(1, 0) * x[0] + a(1, 1) * x[1];
    dx[2] = dc(0, 0);
    dx[3] = 0.5 * (dc(0, 1) + dc(1, 0));
    dx[4] = dc(1, 1);
  };

  State x{init.mean(0), init.mean(1), init.cov(0, 0), 0.5 * (init.cov(0, 1) + init.cov(1, 0)), init.cov(1, 1)};
  std::vector<CovarianceState> out;
  out.reserve(times.size());
  auto record = [&](const State& s, double) {
    CovarianceState c;
    c.mean << s[0], s[1];
    c.cov << s[2], s[3], s[3], s[4];
    out.push_back(c);
  };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), 1e-3, record,
                          odeint::max_step_checker(10'000'000));
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature moments with adaptive truncation.

struct TruncationPolicy {
  std::size_t d_cav_start = 8;
  std::optional<std::size_t> d_mech_start;  // default from initial_mech_dim
  std::size_t d_cav_cap = 64;
  std::size_t d_mech_cap = 4096;
  double tail_threshold = 1e-6;
};

inline std::size_t initial_mech_dim(double nbar, double g_eff, double omega_m) {
  const double estimate = 8.0 * (2.0 * nbar + 1.0) * (4.0 * g_eff / omega_m + 1.0);
  return std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(std::max(estimate, 0.0))));
}

// First and second moments of one quadrature along a run.
struct MomentSeries {
  std::vector<double> times;
  std::vector<double> mean;         // <Q>
  std::vector<double> second;       // <Q^2>
  std::vector<std::size_t> dims;
  std::vector<double> edge_population;  // per factor, max over the run

  std::vector<double> variance() const {
    std::vector<double> v(times.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = second[i] - mean[i] * mean[i];
    return v;
  }
  double max_tail() const {
    return edge_population.empty() ? 0.0 : *std::max_element(edge_population.begin(), edge_population.end());
  }
};

struct EvolutionSetup {
  Operator hamiltonian;
  QuantumState initial;
  std::vector<CollapseOp> collapse;  // empty: closed system
  std::size_t oscillator_factor;
  Quadrature quadrature = Quadrature::X;
};

inline MomentSeries run_moments(const EvolutionSetup& setup, std::span<const double> times,
                                const LindbladOptions& lindblad = {}) {
  const auto& space = setup.hamiltonian.space();
  const Operator q = quadrature(space, setup.oscillator_factor, setup.quadrature);
  const Operator q2 = q * q;

  MomentSeries out;
  out.times.assign(times.begin(), times.end());
  out.dims = space.dims();
  out.mean.resize(times.size());
  out.second.resize(times.size());

  const bool open = std::any_of(setup.collapse.begin(), setup.collapse.end(),
                                [](const CollapseOp& c) { return c.rate > 0.0; });
  if (!open && !setup.initial.is_pure()) {
    require_increasing(times);
    std::vector<Matrix> projectors;
    std::vector<std::size_t> fock;
    for (std::size_t k = 0; k < space.size(); ++k) {
      if (space.factor(k).kind != Factor::Kind::fock) continue;
      const auto d = space.factor(k).dim;
      const Matrix edge = detail::unit_matrix(d, d - 1, d - 1) + detail::unit_matrix(d, d - 2, d - 2);
      projectors.push_back(tensor_embed({FactorMatrix{k, edge}}, space).matrix());
      fock.push_back(k);
    }
    std::vector<const Matrix*> ops{&q.matrix(), &q2.matrix()};
    for (const auto& p : projectors) ops.push_back(&p);
    const UnitaryPropagator prop(setup.hamiltonian);
    const auto series = prop.expectation_series(setup.initial.density(), ops, times);
    out.edge_population.assign(space.size(), 0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
      out.mean[i] = series[0][i].real();
      out.second[i] = series[1][i].real();
      for (std::size_t j = 0; j < fock.size(); ++j) {
        out.edge_population[fock[j]] = std::max(out.edge_population[fock[j]], series[2 + j][i].real());
      }
    }
    return out;
  }

  auto record = [&](std::size_t i, double, const QuantumState& s) {
    out.mean[i] = expectation(s, q).real();
    out.second[i] = expectation(s, q2).real();
  };
  const TrajectoryStats stats =
      open ? evolve_lindblad(setup.hamiltonian, setup.collapse, setup.initial, times, record, lindblad)
           : evolve_unitary(setup.hamiltonian, setup.initial, times, record);
  out.edge_population = stats.max_edge_population;
  return out;
}

// Re-runs `make(dims)` with doubled Fock dimensions until every edge
// population is below the threshold. `dims` lists the Fock factors in order,
// `caps` their maxima.
template <class MakeSetup>
MomentSeries run_moments_adaptive(MakeSetup&& make, std::vector<std::size_t> dims,
                                  const std::vector<std::size_t>& caps, std::span<const double> times,
                                  double threshold, const LindbladOptions& lindblad = {}) {
  for (;;) {
    const EvolutionSetup setup = make(std::span<const std::size_t>(dims));
    MomentSeries run = run_moments(setup, times, lindblad);
    const auto& space = setup.hamiltonian.space();
    bool grow = false;
    std::size_t fock_index = 0;
    for (std::size_t k = 0; k < space.size(); ++k) {
      if (space.factor(k).kind != Factor::Kind::fock) continue;
      if (run.edge_population[k] > threshold) {
        if (2 * dims[fock_index] > caps[fock_index]) {
          throw TruncationError("top Fock level of factor " + std::to_string(k) + " holds " +
                                std::to_string(run.edge_population[k]) + " at the cap d = " +
                                std::to_string(dims[fock_index]));
        }
        dims[fock_index] *= 2;
        grow = true;
      }
      ++fock_index;
    }
    if (!grow) return run;
  }
}

inline MomentSeries effective_moments(double g_eff, double omega_m, double nbar, std::span<const double> times,
                                      const TruncationPolicy& policy = {}) {
  auto make = [&](std::span<const std::size_t> dims) {
    const HilbertSpace space = oscillator_space(dims[0]);
    auto eff = build_effective_hamiltonian(g_eff, omega_m, space);
    QuantumState init = nbar > 0.0 ? thermal_state(space, 0, nbar).state : basis_state(space, {0});
    return EvolutionSetup{std::move(eff.hamiltonian), std::move(init), {}, 0};
  };
  const std::size_t d0 = policy.d_mech_start.value_or(initial_mech_dim(nbar, g_eff, omega_m));
  return run_moments_adaptive(make, {d0}, {std::max(policy.d_mech_cap, d0)}, times, policy.tail_threshold);
}

// X variance of H = omega_m b^dag b + g_eff (b+b^dag)^2 from the thermal
// state, computed in a truncated Fock space.
inline TimeSeries simulate_effective_variance(double g_eff, double omega_m, double nbar,
                                              std::span<const double> times, const TruncationPolicy& policy = {}) {
  const MomentSeries m = effective_moments(g_eff, omega_m, nbar, times, policy);
  TimeSeries out{m.times, m.variance(), {}};
  out.meta.parameters = {{"g_eff", g_eff}, {"omega_m", omega_m}, {"nbar", nbar}};
  out.meta.dims = m.dims;
  out.meta.max_tail = m.max_tail();
  out.meta.tail_flag = out.meta.max_tail > policy.tail_threshold;
  return out;
}

// ---------------------------------------------------------------------------
// Adiabatic-elimination validation.

struct HierarchyRatios {
  double excited_state;  // Delta / max(Omega, g1)
  double cavity;         // delta / max(Omega g1/Delta, g2, eps g2/delta)
};

inline HierarchyRatios hierarchy_ratios(const ModelParams& p) {
  const auto ratio = [](double big, double small) {
    return small > 0.0 ? std::abs(big) / small : std::numeric_limits<double>::infinity();
  };
  const double alpha = std::abs(p.raman_coupling());
  const double pump = p.delta != 0.0 ? p.eps * p.g2 / std::abs(p.delta) : 0.0;
  return {ratio(p.Delta, std::max(p.Omega, p.g1)), ratio(p.delta, std::max({alpha, p.g2, pump}))};
}

struct ValidationOptions {
  std::optional<double> horizon;  // default: one variance period of the dominant branch
  std::size_t n_times = 400;
  TruncationPolicy truncation;
  LindbladOptions lindblad{.positivity_stride = 25};
};

struct ValidationReport {
  HierarchyRatios ratios{};
  AtomCouplingSpectrum spectrum;
  std::array<double, 2> branch_weights{};  // |<e_i|psi_atom>|^2
  std::vector<double> times;

  std::vector<double> full;
  std::vector<double> two_level_as_written;
  std::vector<double> two_level_textbook;
  std::vector<double> effective;
  std::vector<std::size_t> full_dims;        // d_cav, d_mech
  std::vector<std::size_t> two_level_dims;
  std::vector<std::size_t> effective_dims;
  double max_tail = 0.0;

  // max_t |v(t) - v_ref(t)| / v_ref(t)
  double dev_effective_vs_full = 0.0;
  double dev_as_written_vs_full = 0.0;
  double dev_textbook_vs_full = 0.0;
  double dev_effective_vs_as_written = 0.0;
  double dev_effective_vs_textbook = 0.0;
  StarkVariant closer_variant = StarkVariant::as_written;

  // Present when kappa, Gamma_e or gamma is nonzero.
  std::optional<std::vector<double>> full_dissipative;
  std::optional<std::vector<double>> full_reference;  // same run with kappa = Gamma_e = 0
  double smax_reference_db = 0.0;
  double smax_dissipative_db = 0.0;
  double degradation = 0.0;  // (S_ref - S_diss) / S_ref
};

inline double max_relative_deviation(std::span<const double> values, std::span<const double> reference) {
  if (values.size() != reference.size()) throw std::invalid_argument("series lengths differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    worst = std::max(worst, std::abs(values[i] - reference[i]) / std::abs(reference[i]));
  }
  return worst;
}

// Largest -10 log10 sqrt(v/v_ref) along a variance series.
inline double achieved_squeezing_db(std::span<const double> variance, double reference) {
  double best = -std::numeric_limits<double>::infinity();
  for (double v : variance) best = std::max(best, -5.0 * std::log10(v / reference));
  return best;
}

namespace detail {

inline QuantumState oscillator_initial(std::size_t d_mech, double nbar) {
  const HilbertSpace s = oscillator_space(d_mech);
  return nbar > 0.0 ? thermal_state(s, 0, nbar).state : basis_state(s, {0});
}

inline QuantumState atom_state(const Vector& amplitudes) {
  const auto count = static_cast<std::size_t>(amplitudes.size());
  return QuantumState::pure(HilbertSpace{Factor::level(count)}, amplitudes);
}

inline std::vector<CollapseOp> full_model_collapse(const ModelParams& p, const HilbertSpace& space,
                                                   bool with_cavity_and_atom) {
  std::vector<CollapseOp> out;
  const Operator b = annihilation(space, factor::oscillator);
  if (p.gamma > 0.0) {
    out.push_back({b, p.gamma * (p.nbar + 1.0)});
    if (p.nbar > 0.0) out.push_back({b.adjoint(), p.gamma * p.nbar});
  }
  if (with_cavity_and_atom) {
    if (p.kappa > 0.0) out.push_back({annihilation(space, factor::cavity), p.kappa});
    if (p.Gamma_e > 0.0) {
      out.push_back({level_projector(space, factor::atom, level::ground0, level::excited), 0.5 * p.Gamma_e});
      out.push_back({level_projector(space, factor::atom, level::ground1, level::excited), 0.5 * p.Gamma_e});
    }
  }
  return out;
}

}  // namespace detail

// Runs the full three-level model, the two-level model in both Stark
// variants and the effective oscillator model from the same initial
// condition and compares their X-variance trajectories.
inline ValidationReport validate_adiabatic_chain(const ModelParams& p, const Vector& atom_init,
                                                 const ValidationOptions& opts = {}) {
  p.validate();
  if (atom_init.size() != 2 && atom_init.size() != 3) throw std::invalid_argument("atom state needs 2 or 3 amplitudes");
  if (std::abs(atom_init.norm() - 1.0) > 1e-10) throw std::invalid_argument("atom state is not normalized");
  if (atom_init.size() == 3 && std::abs(atom_init(level::excited)) > 1e-12) {
    throw std::invalid_argument("reduced models need the atom in the ground manifold");
  }

  ValidationReport rep;
  rep.ratios = hierarchy_ratios(p);
  rep.spectrum = atomic_coupling_spectrum(p);

  const Vector ground = atom_init.head(2);
  Vector atom3 = Vector::Zero(3);
  atom3.head(2) = ground;
  const Eigen::Vector2cd e1 = rep.spectrum.e1.cast<Complex>();
  const Eigen::Vector2cd e2 = rep.spectrum.e2.cast<Complex>();
  rep.branch_weights = {std::norm(e1.dot(ground)), std::norm(e2.dot(ground))};

  const std::array<double, 2> branch_g{rep.spectrum.g_eff_1, rep.spectrum.g_eff_2};
  const std::size_t dominant = rep.branch_weights[0] >= rep.branch_weights[1] ? 0 : 1;
  double horizon = 0.0;
  if (opts.horizon) {
    horizon = *opts.horizon;
  } else {
    const double q2 = q_squared(branch_g[dominant], p.omega_m);
    horizon = q2 > 0.0 ? std::numbers::pi / std::sqrt(q2) : std::numbers::pi / p.omega_m;
  }
  if (!(horizon > 0.0)) throw std::invalid_argument("validation horizon must be > 0");
  rep.times = linspace(0.0, horizon, opts.n_times);

  const auto& tp = opts.truncation;
  const double g_scale = std::max({std::abs(branch_g[0]), std::abs(branch_g[1]), 0.0});
  const std::size_t d_mech0 = tp.d_mech_start.value_or(initial_mech_dim(p.nbar, g_scale, p.omega_m));
  const std::vector<std::size_t> caps{tp.d_cav_cap, std::max(tp.d_mech_cap, d_mech0)};
  const Complex cavity_amplitude = p.delta != 0.0 ? Complex(-p.eps / p.delta) : Complex(0.0);

  auto hybrid_setup = [&](const ModelParams& params, bool three_level, std::optional<StarkVariant> variant,
                          bool dissipative) {
    return [&, params, three_level, variant, dissipative](std::span<const std::size_t> dims) {
      const HilbertSpace space = three_level ? full_space(dims[0], dims[1]) : two_level_space(dims[0], dims[1]);
      Operator h = three_level ? build_full_hamiltonian(params, space)
                               : build_two_level_hamiltonian(params, space, *variant);
      const QuantumState cav = coherent_state(HilbertSpace{Factor::fock(dims[0])}, cavity_amplitude);
      const QuantumState osc = detail::oscillator_initial(dims[1], params.nbar);
      const QuantumState atom = detail::atom_state(three_level ? atom3 : ground);
      QuantumState init = product_state(space, {cav, osc, atom});
      std::vector<CollapseOp> collapse;
      if (dissipative) collapse = detail::full_model_collapse(params, space, true);
      return EvolutionSetup{std::move(h), std::move(init), std::move(collapse), factor::oscillator};
    };
  };

  const auto run_hybrid = [&](const ModelParams& params, bool three_level, std::optional<StarkVariant> variant,
                              bool dissipative) {
    return run_moments_adaptive(hybrid_setup(params, three_level, variant, dissipative), {tp.d_cav_start, d_mech0},
                                caps, rep.times, tp.tail_threshold, opts.lindblad);
  };

  const MomentSeries full = run_hybrid(p, true, std::nullopt, false);
  const MomentSeries as_written = run_hybrid(p, false, StarkVariant::as_written, false);
  const MomentSeries textbook = run_hybrid(p, false, StarkVariant::textbook, false);
  rep.full = full.variance();
  rep.two_level_as_written = as_written.variance();
  rep.two_level_textbook = textbook.variance();
  rep.full_dims = {full.dims[factor::cavity], full.dims[factor::oscillator]};
  rep.two_level_dims = {as_written.dims[factor::cavity], as_written.dims[factor::oscillator]};
  rep.max_tail = std::max({full.max_tail(), as_written.max_tail(), textbook.max_tail()});

  // Effective model: incoherent mixture over the eigenbranches of g-hat.
  std::vector<double> mean(rep.times.size(), 0.0), second(rep.times.size(), 0.0);
  for (std::size_t branch = 0; branch < 2; ++branch) {
    const double w = rep.branch_weights[branch];
    if (w < 1e-14) continue;
    TruncationPolicy eff_policy = tp;
    eff_policy.d_mech_start = std::max(d_mech0, initial_mech_dim(p.nbar, branch_g[branch], p.omega_m));
    const MomentSeries m = effective_moments(branch_g[branch], p.omega_m, p.nbar, rep.times, eff_policy);
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
      mean[i] += w * m.mean[i];
      second[i] += w * m.second[i];
    }
    rep.max_tail = std::max(rep.max_tail, m.max_tail());
    if (rep.effective_dims.empty() || m.dims[0] > rep.effective_dims[0]) rep.effective_dims = m.dims;
  }
  rep.effective.resize(rep.times.size());
  for (std::size_t i = 0; i < rep.times.size(); ++i) rep.effective[i] = second[i] - mean[i] * mean[i];

  rep.dev_effective_vs_full = max_relative_deviation(rep.effective, rep.full);
  rep.dev_as_written_vs_full = max_relative_deviation(rep.two_level_as_written, rep.full);
  rep.dev_textbook_vs_full = max_relative_deviation(rep.two_level_textbook, rep.full);
  rep.dev_effective_vs_as_written = max_relative_deviation(rep.effective, rep.two_level_as_written);
  rep.dev_effective_vs_textbook = max_relative_deviation(rep.effective, rep.two_level_textbook);
  rep.closer_variant =
      rep.dev_textbook_vs_full < rep.dev_as_written_vs_full ? StarkVariant::textbook : StarkVariant::as_written;

  if (p.kappa > 0.0 || p.Gamma_e > 0.0 || p.gamma > 0.0) {
    ModelParams reference = p;
    reference.kappa = 0.0;
    reference.Gamma_e = 0.0;
    const std::vector<double> ref =
        p.gamma > 0.0 ? run_hybrid(reference, true, std::nullopt, true).variance() : rep.full;
    const std::vector<double> diss = run_hybrid(p, true, std::nullopt, true).variance();
    const double v0 = 0.25 * thermal_V(p.nbar);
    rep.smax_reference_db = achieved_squeezing_db(ref, v0);
    rep.smax_dissipative_db = achieved_squeezing_db(diss, v0);
    rep.degradation = (rep.smax_reference_db - rep.smax_dissipative_db) / rep.smax_reference_db;
    rep.full_reference = ref;
    rep.full_dissipative = diss;
  }
  return rep;
}

}  // namespace hybridsq

#endif  // HYBRIDSQ_DYNAMICS_HPP
