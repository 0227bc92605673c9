#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hybridsq/model.hpp"

using namespace hybridsq;
using Catch::Matchers::WithinAbs;

namespace {

ModelParams generic() {
  ModelParams p;
  p.delta = 3.0;
  p.Delta = 7.0;
  p.g1 = 0.7;
  p.g2 = 0.05;
  p.Omega = 1.3;
  p.eps = 0.4;
  return p;
}

// Brute-force eigenpairs of a real symmetric 2x2 matrix.
Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solve2(double a, double b) {
  Eigen::Matrix2d m;
  m << a, b, b, 0.0;
  return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(m);
}

}  // namespace

TEST_CASE("full Hamiltonian without couplings is diagonal", "[model]") {
  ModelParams p;
  p.delta = 2.0;
  p.Delta = 5.0;
  const HilbertSpace s = full_space(4, 5);
  const Operator h = build_full_hamiltonian(p, s);
  const Matrix off = h.matrix() - Matrix(h.matrix().diagonal().asDiagonal());
  CHECK(off.cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t na = 0; na < 4; ++na) {
    for (std::size_t nb = 0; nb < 5; ++nb) {
      for (std::size_t lv = 0; lv < 3; ++lv) {
        const double expected = 2.0 * na + 1.0 * nb + (lv == level::excited ? 5.0 : 0.0) - (lv == level::ground1 ? 2.0 : 0.0);
        const std::size_t g = s.flatten(std::vector<std::size_t>{na, nb, lv});
        CHECK_THAT(h.matrix()(g, g).real(), WithinAbs(expected, 1e-14));
      }
    }
  }
}

TEST_CASE("Hamiltonians are Hermitian", "[model]") {
  const ModelParams p = generic();
  CHECK(build_full_hamiltonian(p, full_space(5, 6)).is_hermitian(1e-12));
  CHECK(build_two_level_hamiltonian(p, two_level_space(5, 6), StarkVariant::as_written).is_hermitian(1e-12));
  CHECK(build_two_level_hamiltonian(p, two_level_space(5, 6), StarkVariant::textbook).is_hermitian(1e-12));
  CHECK(build_effective_hamiltonian(0.8, 1.0, oscillator_space(20)).hamiltonian.is_hermitian(1e-12));
}

TEST_CASE("full Hamiltonian matrix elements", "[model]") {
  const ModelParams p = generic();
  const HilbertSpace s = full_space(4, 4);
  const Operator h = build_full_hamiltonian(p, s);
  const auto idx = [&](std::size_t na, std::size_t nb, std::size_t lv) {
    return static_cast<Eigen::Index>(s.flatten(std::vector<std::size_t>{na, nb, lv}));
  };
  // <e| H |0> = Omega, <1, n_a+1| H |e, n_a> = g1 sqrt(n_a+1).
  CHECK_THAT(h(idx(1, 2, level::excited), idx(1, 2, level::ground0)).real(), WithinAbs(p.Omega, 1e-14));
  CHECK_THAT(h(idx(2, 2, level::ground1), idx(1, 2, level::excited)).real(), WithinAbs(p.g1 * std::sqrt(2.0), 1e-14));
  // Pump: <n_a+1| eps a^dag |n_a>.
  CHECK_THAT(h(idx(1, 0, level::ground0), idx(0, 0, level::ground0)).real(), WithinAbs(p.eps, 1e-14));
  // g2 a^dag a (b + b^dag)^2 connects n_b to n_b + 2 with sqrt((n_b+1)(n_b+2)).
  CHECK_THAT(h(idx(2, 2, level::ground0), idx(2, 0, level::ground0)).real(), WithinAbs(p.g2 * 2.0 * std::sqrt(2.0), 1e-14));
}

TEST_CASE("two-level Hamiltonian", "[model]") {
  ModelParams p = generic();
  SECTION("flip term vanishes without Raman coupling") {
    for (int which = 0; which < 2; ++which) {
      ModelParams q = p;
      (which == 0 ? q.Omega : q.g1) = 0.0;
      const HilbertSpace s = two_level_space(4, 3);
      const Operator h = build_two_level_hamiltonian(q, s, StarkVariant::as_written);
      const Operator flip = tensor_embed({FactorMatrix{factor::cavity, ladder_matrix(4)},
                                          FactorMatrix{factor::atom, detail::unit_matrix(2, 0, 1)}},
                                         s);
      // The Hamiltonian has no overlap with a|0><1|.
      CHECK(std::abs((flip.adjoint().matrix().cwiseProduct(h.matrix())).sum()) < 1e-14);
    }
  }
  SECTION("Stark variants differ only by the shifts") {
    const HilbertSpace s = two_level_space(4, 3);
    const Operator d = build_two_level_hamiltonian(p, s, StarkVariant::textbook) -
                       build_two_level_hamiltonian(p, s, StarkVariant::as_written);
    const Matrix off = d.matrix() - Matrix(d.matrix().diagonal().asDiagonal());
    CHECK(off.cwiseAbs().maxCoeff() < 1e-14);
    const double alpha = p.raman_coupling();
    const auto g = static_cast<Eigen::Index>(s.flatten(std::vector<std::size_t>{0, 0, 0}));
    CHECK_THAT(d(g, g).real(), WithinAbs(-(p.Omega * p.Omega / p.Delta - alpha), 1e-14));
  }
  SECTION("Delta = 0 is rejected") {
    p.Delta = 0.0;
    CHECK_THROWS_AS(build_two_level_hamiltonian(p, two_level_space(3, 3), StarkVariant::as_written),
                    std::invalid_argument);
  }
}

TEST_CASE("atomic coupling spectrum", "[model]") {
  SECTION("already diagonal") {
    ModelParams p;
    p.delta = 1.0;
    p.Delta = 2.0;
    p.Omega = 1.0;
    p.g1 = 1.0;  // alpha = 0.5
    const auto s = atomic_coupling_spectrum(p);
    CHECK_THAT(s.lambda1, WithinAbs(0.25, 1e-15));
    CHECK_THAT(s.lambda2, WithinAbs(0.0, 1e-15));
    CHECK(s.e1.isApprox(Eigen::Vector2d(1.0, 0.0)));
    CHECK(s.e2.isApprox(Eigen::Vector2d(0.0, 1.0)));
  }
  SECTION("alpha = 3, eps = 2 against a brute-force eigensolve") {
    ModelParams p;
    p.delta = 1.0;
    p.Delta = 1.0;
    p.Omega = 3.0;
    p.g1 = 1.0;
    p.eps = 2.0;
    const auto s = atomic_coupling_spectrum(p);
    CHECK_THAT(s.lambda1, WithinAbs(12.0, 1e-12));
    CHECK_THAT(s.lambda2, WithinAbs(-3.0, 1e-12));
    const auto es = solve2(9.0, -6.0);
    CHECK_THAT(s.lambda1, WithinAbs(es.eigenvalues()(1), 1e-12));
    CHECK_THAT(s.lambda2, WithinAbs(es.eigenvalues()(0), 1e-12));
    CHECK_THAT(std::abs(s.e1.dot(es.eigenvectors().col(1))), WithinAbs(1.0, 1e-12));
    CHECK_THAT(std::abs(s.e2.dot(es.eigenvectors().col(0))), WithinAbs(1.0, 1e-12));
    CHECK(s.e1(0) > 0.0);
    CHECK_THAT(s.e1.dot(s.e2), WithinAbs(0.0, 1e-14));
  }
  SECTION("no Raman coupling leaves the pump term") {
    ModelParams p;
    p.delta = 1.0;
    p.Delta = 1.0;
    p.eps = 1.0;
    p.g2 = 1.0;
    const auto s = atomic_coupling_spectrum(p);
    CHECK_THAT(s.g_eff_1, WithinAbs(1.0, 1e-15));
    CHECK_THAT(s.g_eff_2, WithinAbs(1.0, 1e-15));
  }
  SECTION("random draws against the brute-force eigensolve") {
    for (int k = 0; k < 20; ++k) {
      ModelParams p;
      p.delta = 1.0 + 0.3 * k;
      p.Delta = 2.0 + 0.1 * k;
      p.Omega = 0.2 + 0.17 * k;
      p.g1 = 1.1 - 0.03 * k;
      p.eps = 0.05 * k;
      p.g2 = 0.01;
      const double a = std::pow(p.raman_coupling(), 2);
      const double b = -p.eps * p.raman_coupling();
      const auto es = solve2(a, b);
      const auto s = atomic_coupling_spectrum(p);
      CHECK_THAT(s.lambda1, WithinAbs(es.eigenvalues()(1), 1e-12));
      CHECK_THAT(s.lambda2, WithinAbs(es.eigenvalues()(0), 1e-12));
      CHECK_THAT(s.g_eff_1, WithinAbs(p.g2 / (p.delta * p.delta) * (s.lambda1 + p.eps * p.eps), 1e-15));
    }
  }
  SECTION("delta = 0 is rejected") {
    ModelParams p;
    p.Delta = 1.0;
    CHECK_THROWS_AS(atomic_coupling_spectrum(p), std::invalid_argument);
  }
}

TEST_CASE("effective Hamiltonian", "[model]") {
  const HilbertSpace s = oscillator_space(12);
  const auto free = build_effective_hamiltonian(0.0, 1.0, s);
  CHECK(free.hamiltonian.matrix().isApprox(number(s, 0).matrix()));
  CHECK_FALSE(free.unstable);
  const auto bad = build_effective_hamiltonian(-0.5, 1.0, s);
  CHECK(bad.unstable);
  CHECK_THAT(bad.q_squared, WithinAbs(-1.0, 1e-15));
}

TEST_CASE("parameter validation", "[model]") {
  ModelParams p;
  p.gamma = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.gamma = 0.0;
  p.omega_m = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(full_space(3, 3).factor(3), std::out_of_range);
  CHECK_THROWS_AS(build_full_hamiltonian(ModelParams{}, two_level_space(3, 3)), std::invalid_argument);
}
