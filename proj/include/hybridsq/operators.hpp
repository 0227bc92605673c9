#ifndef HYBRIDSQ_OPERATORS_HPP
#define HYBRIDSQ_OPERATORS_HPP

// Operator algebra on truncated tensor-product spaces.
//
// A space is an ordered list of factors, each a truncated Fock space or a
// finite set of levels. Operators and states are dense Eigen objects laid out
// in row-major Kronecker order: the first factor is the most significant
// index. Everything here is an immutable value.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

namespace hybridsq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

struct Factor {
  enum class Kind { fock, level };

  Kind kind;
  std::size_t dim;

  static Factor fock(std::size_t d) {
    if (d < 2) throw std::invalid_argument("Fock factor needs dimension >= 2");
    return {Kind::fock, d};
  }
  static Factor level(std::size_t count) {
    if (count < 2) throw std::invalid_argument("Level factor needs count >= 2");
    return {Kind::level, count};
  }

  bool operator==(const Factor&) const = default;
};

class HilbertSpace {
 public:
  explicit HilbertSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw std::invalid_argument("HilbertSpace needs at least one factor");
    strides_.assign(factors_.size(), 1);
    total_dim_ = 1;
    for (std::size_t k = factors_.size(); k-- > 0;) {
      strides_[k] = total_dim_;
      total_dim_ *= factors_[k].dim;
    }
  }
  HilbertSpace(std::initializer_list<Factor> factors) : HilbertSpace(std::vector<Factor>(factors)) {}

  std::size_t size() const noexcept { return factors_.size(); }
  std::size_t total_dim() const noexcept { return total_dim_; }
  const std::vector<Factor>& factors() const noexcept { return factors_; }

  const Factor& factor(std::size_t index) const {
    if (index >= factors_.size()) {
      throw std::out_of_range("factor index " + std::to_string(index) + " out of range");
    }
    return factors_[index];
  }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> out;
    out.reserve(factors_.size());
    for (const auto& f : factors_) out.push_back(f.dim);
    return out;
  }

  // Index of factor `index` inside the flattened basis index `global`.
  std::size_t local_index(std::size_t global, std::size_t index) const {
    return (global / strides_.at(index)) % factors_[index].dim;
  }

  std::size_t flatten(std::span<const std::size_t> locals) const {
    if (locals.size() != factors_.size()) throw std::invalid_argument("basis label has wrong length");
    std::size_t out = 0;
    for (std::size_t k = 0; k < factors_.size(); ++k) {
      if (locals[k] >= factors_[k].dim) throw std::out_of_range("basis label exceeds factor dimension");
      out += locals[k] * strides_[k];
    }
    return out;
  }

  bool operator==(const HilbertSpace& other) const { return factors_ == other.factors_; }

 private:
  std::vector<Factor> factors_;
  std::vector<std::size_t> strides_;
  std::size_t total_dim_ = 0;
};

class Operator {
 public:
  Operator(HilbertSpace space, Matrix matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
    const auto n = static_cast<Eigen::Index>(space_.total_dim());
    if (matrix_.rows() != n || matrix_.cols() != n) {
      throw std::invalid_argument("operator matrix does not match space dimension");
    }
  }

  static Operator identity(const HilbertSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.total_dim());
    return {space, Matrix::Identity(n, n)};
  }
  static Operator zero(const HilbertSpace& space) {
    const auto n = static_cast<Eigen::Index>(space.total_dim());
    return {space, Matrix::Zero(n, n)};
  }

  const HilbertSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  Complex operator()(Eigen::Index row, Eigen::Index col) const { return matrix_(row, col); }

  Operator adjoint() const { return {space_, matrix_.adjoint()}; }

  bool is_hermitian(double tol = 1e-12) const {
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() <= tol;
  }

  Operator& operator+=(const Operator& rhs) {
    require_same_space(rhs);
    matrix_ += rhs.matrix_;
    return *this;
  }
  Operator& operator-=(const Operator& rhs) {
    require_same_space(rhs);
    matrix_ -= rhs.matrix_;
    return *this;
  }
  Operator& operator*=(Complex c) {
    matrix_ *= c;
    return *this;
  }

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(Operator lhs, Complex c) { return lhs *= c; }
  friend Operator operator*(Complex c, Operator rhs) { return rhs *= c; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs) {
    lhs.require_same_space(rhs);
    return {lhs.space_, lhs.matrix_ * rhs.matrix_};
  }

 private:
  void require_same_space(const Operator& rhs) const {
    if (!(space_ == rhs.space_)) throw std::invalid_argument("operators act on different spaces");
  }

  HilbertSpace space_;
  Matrix matrix_;
};

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

class QuantumState {
 public:
  static QuantumState pure(HilbertSpace space, Vector psi, double tol = 1e-10) {
    if (psi.size() != static_cast<Eigen::Index>(space.total_dim())) {
      throw std::invalid_argument("state vector does not match space dimension");
    }
    if (std::abs(psi.norm() - 1.0) > tol) throw std::invalid_argument("pure state is not normalized");
    return QuantumState(std::move(space), std::move(psi));
  }

  static QuantumState mixed(HilbertSpace space, Matrix rho, double tol = 1e-10) {
    const auto n = static_cast<Eigen::Index>(space.total_dim());
    if (rho.rows() != n || rho.cols() != n) {
      throw std::invalid_argument("density matrix does not match space dimension");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol) {
      throw std::invalid_argument("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - Complex{1.0}) > tol) throw std::invalid_argument("density matrix trace != 1");
    const bool diagonal = (rho - Matrix(rho.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
    const double min_eig = diagonal ? rho.diagonal().real().minCoeff()
                                    : Eigen::SelfAdjointEigenSolver<Matrix>(rho, Eigen::EigenvaluesOnly)
                                          .eigenvalues()
                                          .minCoeff();
    if (min_eig < -tol) throw std::invalid_argument("density matrix has negative eigenvalue");
    return QuantumState(std::move(space), std::move(rho));
  }

  // For states produced by evolution routines that enforce their own
  // tolerances; skips the O(d^3) positivity check.
  static QuantumState mixed_unchecked(HilbertSpace space, Matrix rho) {
    return QuantumState(std::move(space), std::move(rho));
  }

  const HilbertSpace& space() const noexcept { return space_; }
  bool is_pure() const noexcept { return std::holds_alternative<Vector>(data_); }

  const Vector& vector() const {
    if (!is_pure()) throw std::logic_error("mixed state has no state vector");
    return std::get<Vector>(data_);
  }
  const Matrix& density() const {
    if (is_pure()) throw std::logic_error("pure state stores a vector; use density_matrix()");
    return std::get<Matrix>(data_);
  }
  Matrix density_matrix() const {
    if (is_pure()) {
      const auto& v = std::get<Vector>(data_);
      return v * v.adjoint();
    }
    return std::get<Matrix>(data_);
  }

  double trace() const {
    return is_pure() ? std::get<Vector>(data_).squaredNorm() : std::get<Matrix>(data_).trace().real();
  }

  double purity() const {
    if (is_pure()) return std::pow(std::get<Vector>(data_).squaredNorm(), 2);
    const auto& rho = std::get<Matrix>(data_);
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return rho.squaredNorm();
  }

  // Diagonal of the density matrix in the product basis.
  Eigen::VectorXd populations() const {
    if (is_pure()) return std::get<Vector>(data_).cwiseAbs2();
    return std::get<Matrix>(data_).diagonal().real();
  }

 private:
  QuantumState(HilbertSpace space, Vector psi) : space_(std::move(space)), data_(std::move(psi)) {}
  QuantumState(HilbertSpace space, Matrix rho) : space_(std::move(space)), data_(std::move(rho)) {}

  HilbertSpace space_;
  std::variant<Vector, Matrix> data_;
};

struct FactorMatrix {
  std::size_t factor;
  Matrix matrix;
};

// Kronecker product over all factors, identity where no matrix is given.
inline Operator tensor_embed(std::span<const FactorMatrix> ops, const HilbertSpace& space) {
  std::vector<const Matrix*> slot(space.size(), nullptr);
  for (const auto& op : ops) {
    const auto& f = space.factor(op.factor);
    if (slot[op.factor] != nullptr) {
      throw std::invalid_argument("duplicate factor " + std::to_string(op.factor) + " in tensor_embed");
    }
    const auto d = static_cast<Eigen::Index>(f.dim);
    if (op.matrix.rows() != d || op.matrix.cols() != d) {
      throw std::invalid_argument("matrix shape does not match factor " + std::to_string(op.factor));
    }
    slot[op.factor] = &op.matrix;
  }
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < space.size(); ++k) {
    const auto d = static_cast<Eigen::Index>(space.factor(k).dim);
    const Matrix local = slot[k] ? *slot[k] : Matrix::Identity(d, d);
    Matrix next = Eigen::kroneckerProduct(out, local);
    out = std::move(next);
  }
  return {space, std::move(out)};
}

inline Operator tensor_embed(std::initializer_list<FactorMatrix> ops, const HilbertSpace& space) {
  return tensor_embed(std::span<const FactorMatrix>(ops.begin(), ops.size()), space);
}

// Single-factor ladder matrix: sqrt(n) on |n> -> |n-1>. In the truncated
// space [a, a^dag] = 1 except at the top level, where it equals 1 - d.
inline Matrix ladder_matrix(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return m;
}

inline const Factor& require_fock(const HilbertSpace& space, std::size_t index) {
  const auto& f = space.factor(index);
  if (f.kind != Factor::Kind::fock) {
    throw std::invalid_argument("factor " + std::to_string(index) + " is not a Fock factor");
  }
  return f;
}

inline Operator annihilation(const HilbertSpace& space, std::size_t index) {
  const auto& f = require_fock(space, index);
  return tensor_embed({FactorMatrix{index, ladder_matrix(f.dim)}}, space);
}

inline Operator creation(const HilbertSpace& space, std::size_t index) {
  return annihilation(space, index).adjoint();
}

inline Operator number(const HilbertSpace& space, std::size_t index) {
  const auto& f = require_fock(space, index);
  Eigen::VectorXd n = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(f.dim), 0.0, double(f.dim - 1));
  return tensor_embed({FactorMatrix{index, Matrix(n.cast<Complex>().asDiagonal())}}, space);
}

// |i><j| on a Level factor.
inline Operator level_projector(const HilbertSpace& space, std::size_t index, std::size_t i, std::size_t j) {
  const auto& f = space.factor(index);
  if (f.kind != Factor::Kind::level) {
    throw std::invalid_argument("factor " + std::to_string(index) + " is not a Level factor");
  }
  if (i >= f.dim || j >= f.dim) throw std::out_of_range("level index out of range");
  const auto c = static_cast<Eigen::Index>(f.dim);
  Matrix m = Matrix::Zero(c, c);
  m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 1.0;
  return tensor_embed({FactorMatrix{index, std::move(m)}}, space);
}

enum class Quadrature { X, P };

// X = (b + b^dag)/2, P = (b - b^dag)/2i; vacuum variance 1/4 each.
inline Operator quadrature(const HilbertSpace& space, std::size_t index, Quadrature which) {
  const auto b = annihilation(space, index);
  const auto bd = b.adjoint();
  if (which == Quadrature::X) return (b + bd) * Complex{0.5};
  return (b - bd) * Complex{0.0, -0.5};
}

inline Complex expectation(const QuantumState& state, const Operator& op) {
  if (!(state.space() == op.space())) throw std::invalid_argument("state and operator spaces differ");
  if (state.is_pure()) {
    const auto& psi = state.vector();
    return psi.dot(op.matrix() * psi);
  }
  // Tr(rho O) without forming the product.
  return (state.density().transpose().cwiseProduct(op.matrix())).sum();
}

// Computational basis state |n_0, n_1, ...>.
inline QuantumState basis_state(const HilbertSpace& space, std::span<const std::size_t> labels) {
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(space.total_dim()));
  psi(static_cast<Eigen::Index>(space.flatten(labels))) = 1.0;
  return QuantumState::pure(space, std::move(psi));
}

inline QuantumState basis_state(const HilbertSpace& space, std::initializer_list<std::size_t> labels) {
  return basis_state(space, std::span<const std::size_t>(labels.begin(), labels.size()));
}

struct ThermalState {
  QuantumState state;
  // Geometric weight beyond the truncation, (nbar/(nbar+1))^d, before renormalization.
  double truncated_mass;
};

// Thermal occupation on one Fock factor, other factors in their |0>.
// p_n proportional to x^n with x = exp(-hbar w/kT) = nbar/(nbar+1).
inline ThermalState thermal_state(const HilbertSpace& space, std::size_t index, double nbar) {
  if (!(nbar >= 0.0)) throw std::invalid_argument("nbar must be >= 0");
  const auto& f = require_fock(space, index);
  const double x = nbar / (nbar + 1.0);
  std::vector<double> p(f.dim);
  double sum = 0.0;
  for (std::size_t n = 0; n < f.dim; ++n) {
    p[n] = std::pow(x, static_cast<double>(n)) / (nbar + 1.0);
    sum += p[n];
  }
  const double tail = std::pow(x, static_cast<double>(f.dim));
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.total_dim()));
  for (std::size_t g = 0; g < space.total_dim(); ++g) {
    bool others_in_ground = true;
    for (std::size_t k = 0; k < space.size(); ++k) {
      if (k != index && space.local_index(g, k) != 0) {
        others_in_ground = false;
        break;
      }
    }
    if (others_in_ground) diag(static_cast<Eigen::Index>(g)) = p[space.local_index(g, index)] / sum;
  }
  Matrix rho = diag.cast<Complex>().asDiagonal();
  return {QuantumState::mixed(space, std::move(rho)), tail};
}

// Coherent state on a single-Fock-factor space, renormalized after truncation.
inline QuantumState coherent_state(const HilbertSpace& space, Complex alpha) {
  if (space.size() != 1) throw std::invalid_argument("coherent_state expects a single Fock factor");
  const auto& f = require_fock(space, 0);
  Vector psi(static_cast<Eigen::Index>(f.dim));
  Complex amp = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 0; n < f.dim; ++n) {
    psi(static_cast<Eigen::Index>(n)) = amp;
    amp *= alpha / std::sqrt(static_cast<double>(n + 1));
  }
  psi.normalize();
  return QuantumState::pure(space, std::move(psi));
}

// Product of single-factor states, one per factor of `space`, in order.
inline QuantumState product_state(const HilbertSpace& space, std::span<const QuantumState> parts) {
  if (parts.size() != space.size()) throw std::invalid_argument("product_state needs one state per factor");
  bool all_pure = true;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (parts[k].space().size() != 1 || !(parts[k].space().factor(0) == space.factor(k))) {
      throw std::invalid_argument("product_state part " + std::to_string(k) + " does not match its factor");
    }
    all_pure = all_pure && parts[k].is_pure();
  }
  if (all_pure) {
    Vector psi = Vector::Ones(1);
    for (const auto& part : parts) {
      Vector next = Eigen::kroneckerProduct(psi, part.vector());
      psi = std::move(next);
    }
    return QuantumState::pure(space, std::move(psi));
  }
  Matrix rho = Matrix::Ones(1, 1);
  for (const auto& part : parts) {
    Matrix next = Eigen::kroneckerProduct(rho, part.density_matrix());
    rho = std::move(next);
  }
  return QuantumState::mixed_unchecked(space, std::move(rho));
}

inline QuantumState product_state(const HilbertSpace& space, std::initializer_list<QuantumState> parts) {
  return product_state(space, std::span<const QuantumState>(parts.begin(), parts.size()));
}

// Population of the two highest levels of a Fock factor; the truncation
// diagnostic. Two levels because a quadratic coupling moves n in steps of 2.
inline double edge_population(const QuantumState& state, std::size_t index) {
  const auto& space = state.space();
  const auto& f = require_fock(space, index);
  const Eigen::VectorXd pops = state.populations();
  double total = 0.0;
  for (std::size_t g = 0; g < space.total_dim(); ++g) {
    if (space.local_index(g, index) + 2 >= f.dim) total += pops(static_cast<Eigen::Index>(g));
  }
  return total;
}

}  // namespace hybridsq

#endif  // HYBRIDSQ_OPERATORS_HPP
