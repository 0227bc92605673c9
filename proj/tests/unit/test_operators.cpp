#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hybridsq/operators.hpp"

using namespace hybridsq;
using Catch::Matchers::WithinAbs;

TEST_CASE("ladder matrix on Fock(3)", "[operators]") {
  const Matrix a = ladder_matrix(3);
  CHECK(a(0, 1) == Complex(1.0));
  CHECK_THAT(a(1, 2).real(), WithinAbs(std::sqrt(2.0), 1e-15));
  CHECK((a.cwiseAbs().array() > 0).count() == 2);
}

TEST_CASE("canonical commutator below the truncation edge", "[operators]") {
  const HilbertSpace s{Factor::fock(40)};
  const Operator c = commutator(annihilation(s, 0), creation(s, 0));
  for (Eigen::Index n = 0; n < 39; ++n) {
    for (Eigen::Index m = 0; m < 40; ++m) {
      CHECK_THAT(std::abs(c(m, n) - (m == n ? 1.0 : 0.0)), WithinAbs(0.0, 1e-12));
    }
  }
  // The top level carries the truncation artefact 1 - d.
  CHECK_THAT(c(39, 39).real(), WithinAbs(-39.0, 1e-12));
}

TEST_CASE("level projector |e><0|", "[operators]") {
  const HilbertSpace s{Factor::level(3)};
  const Operator p = level_projector(s, 0, 2, 0);
  CHECK(p(2, 0) == Complex(1.0));
  CHECK(p.matrix().cwiseAbs().sum() == 1.0);
  CHECK_THROWS_AS(level_projector(s, 0, 3, 0), std::out_of_range);
  CHECK_THROWS_AS(annihilation(s, 0), std::invalid_argument);
}

TEST_CASE("tensor embedding", "[operators]") {
  const HilbertSpace s{Factor::fock(4), Factor::fock(5), Factor::level(3)};
  REQUIRE(s.total_dim() == 60);

  SECTION("identities give the identity") {
    const Operator id = tensor_embed({FactorMatrix{0, Matrix::Identity(4, 4)}, FactorMatrix{1, Matrix::Identity(5, 5)},
                                      FactorMatrix{2, Matrix::Identity(3, 3)}},
                                     s);
    CHECK(id.matrix().isApprox(Matrix::Identity(60, 60)));
  }

  SECTION("Kronecker trace factorizes") {
    const HilbertSpace two{Factor::fock(2), Factor::level(3)};
    Matrix x(2, 2), y(3, 3);
    x << 1.0, 2.0, 3.0, 2.0;
    y << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0;
    const Operator k = tensor_embed({FactorMatrix{0, x}, FactorMatrix{1, y}}, two);
    CHECK_THAT(k.matrix().trace().real(), WithinAbs(3.0 * 3.0, 1e-14));
    // Row-major labels: global index = i_0 * 3 + i_1.
    CHECK(k(1 * 3 + 2, 0 * 3 + 2) == Complex(3.0));
  }

  SECTION("operators on different factors commute") {
    const Operator a = annihilation(s, 0);
    const Operator b = annihilation(s, 1);
    CHECK(commutator(a, b).matrix().cwiseAbs().maxCoeff() < 1e-14);
    CHECK(commutator(a, b.adjoint()).matrix().cwiseAbs().maxCoeff() < 1e-14);
  }

  SECTION("bad input") {
    CHECK_THROWS_AS(tensor_embed({FactorMatrix{0, Matrix::Identity(3, 3)}}, s), std::invalid_argument);
    CHECK_THROWS_AS(tensor_embed({FactorMatrix{0, Matrix::Identity(4, 4)}, FactorMatrix{0, Matrix::Identity(4, 4)}}, s),
                    std::invalid_argument);
    CHECK_THROWS_AS(tensor_embed({FactorMatrix{5, Matrix::Identity(4, 4)}}, s), std::out_of_range);
  }
}

TEST_CASE("index flattening round-trips", "[operators]") {
  const HilbertSpace s{Factor::fock(3), Factor::fock(4), Factor::level(2)};
  for (std::size_t g = 0; g < s.total_dim(); ++g) {
    const std::vector<std::size_t> local{s.local_index(g, 0), s.local_index(g, 1), s.local_index(g, 2)};
    CHECK(s.flatten(local) == g);
  }
}

TEST_CASE("thermal state moments", "[operators]") {
  SECTION("nbar = 0 is the vacuum") {
    const HilbertSpace s{Factor::fock(10)};
    const auto th = thermal_state(s, 0, 0.0);
    CHECK_THAT(th.state.density_matrix()(0, 0).real(), WithinAbs(1.0, 1e-15));
    CHECK_THAT(th.state.purity(), WithinAbs(1.0, 1e-15));
  }
  SECTION("nbar = 10 on d = 200") {
    const HilbertSpace s{Factor::fock(200)};
    const auto th = thermal_state(s, 0, 10.0);
    // Truncated geometric series sum_{n<d} n p_n, p_n = nbar^n/(nbar+1)^{n+1}.
    double oracle_n = 0.0, norm = 0.0;
    for (int n = 0; n < 200; ++n) {
      const double pn = std::pow(10.0 / 11.0, n) / 11.0;
      norm += pn;
      oracle_n += n * pn;
    }
    const double n_mean = expectation(th.state, number(s, 0)).real();
    CHECK_THAT(n_mean, WithinAbs(oracle_n / norm, 1e-9));
    // Truncation at d = 200 removes 1.05e-6 from the mean.
    CHECK_THAT(n_mean, WithinAbs(10.0, 2e-6));
    const Operator x = quadrature(s, 0, Quadrature::X);
    const double vx = expectation(th.state, x * x).real() - std::pow(expectation(th.state, x).real(), 2);
    // Truncated a a^dag is diag(1, ..., d-1, 0): the top level loses d p_{d-1}.
    const double top = 200.0 * std::pow(10.0 / 11.0, 199) / 11.0 / norm;
    CHECK_THAT(vx, WithinAbs((2.0 * oracle_n / norm + 1.0 - top) / 4.0, 1e-12));
    CHECK_THAT(vx, WithinAbs(21.0 / 4.0, 1e-6));
    CHECK(th.truncated_mass < 1e-8);
  }
  SECTION("only the chosen factor is thermal") {
    const HilbertSpace s{Factor::fock(4), Factor::fock(60), Factor::level(3)};
    const auto th = thermal_state(s, 1, 2.0);
    CHECK_THAT(expectation(th.state, number(s, 0)).real(), WithinAbs(0.0, 1e-15));
    CHECK_THAT(expectation(th.state, number(s, 1)).real(), WithinAbs(2.0, 1e-6));
    CHECK_THAT(expectation(th.state, level_projector(s, 2, 0, 0)).real(), WithinAbs(1.0, 1e-15));
  }
}

TEST_CASE("expectation values", "[operators]") {
  const HilbertSpace s{Factor::fock(30), Factor::level(3)};
  CHECK(expectation(basis_state(s, {0, 0}), number(s, 0)) == Complex(0.0));
  CHECK_THAT(expectation(basis_state(s, {3, 1}), number(s, 0)).real(), WithinAbs(3.0, 1e-15));

  const QuantumState coh = product_state(s, {coherent_state(HilbertSpace{Factor::fock(30)}, Complex(1.0, 0.5)),
                                             basis_state(HilbertSpace{Factor::level(3)}, {2})});
  CHECK_THAT(expectation(coh, annihilation(s, 0)).real(), WithinAbs(1.0, 1e-9));
  CHECK_THAT(expectation(coh, annihilation(s, 0)).imag(), WithinAbs(0.5, 1e-9));

  // Hermitian observable on a random-ish mixed state: real expectation.
  Matrix rho = Matrix::Zero(90, 90);
  for (Eigen::Index i = 0; i < 90; ++i) rho(i, i) = 1.0 / 90.0;
  rho(0, 5) = Complex(0.001, 0.002);
  rho(5, 0) = std::conj(rho(0, 5));
  const QuantumState mixed = QuantumState::mixed(s, rho);
  const Operator herm = annihilation(s, 0) + creation(s, 0) + level_projector(s, 1, 0, 2) + level_projector(s, 1, 2, 0);
  REQUIRE(herm.is_hermitian());
  CHECK(std::abs(expectation(mixed, herm).imag()) < 1e-10);
  CHECK(std::abs(expectation(coh, herm).imag()) < 1e-10);
}

TEST_CASE("state validation", "[operators]") {
  const HilbertSpace s{Factor::fock(3)};
  Vector v(3);
  v << 1.0, 1.0, 0.0;
  CHECK_THROWS_AS(QuantumState::pure(s, v), std::invalid_argument);
  Matrix bad = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(QuantumState::mixed(s, bad), std::invalid_argument);
  Matrix neg = Matrix::Zero(3, 3);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(QuantumState::mixed(s, neg), std::invalid_argument);
  CHECK_THROWS_AS(Factor::fock(1), std::invalid_argument);
}

TEST_CASE("edge population covers the top two levels", "[operators]") {
  const HilbertSpace s{Factor::fock(5), Factor::fock(4)};
  CHECK(edge_population(basis_state(s, {4, 0}), 0) == 1.0);
  CHECK(edge_population(basis_state(s, {3, 0}), 0) == 1.0);
  CHECK(edge_population(basis_state(s, {2, 1}), 0) == 0.0);
  CHECK(edge_population(basis_state(s, {4, 1}), 1) == 0.0);
}
