#ifndef HYBRIDSQ_ERRORS_HPP
#define HYBRIDSQ_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hybridsq {

// q^2 = omega_m (omega_m + 4 g_eff) <= 0: hyperbolic dynamics, no closed form.
class UnstableRegime : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// omega_m (4 g_eff + omega_m) <= gamma^2 / 4: no spectral doublet.
class OverdampedDoublet : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Top Fock levels still populated after growing the truncation up to its cap.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Norm or trace drift beyond tolerance during time evolution.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hybridsq

#endif  // HYBRIDSQ_ERRORS_HPP
