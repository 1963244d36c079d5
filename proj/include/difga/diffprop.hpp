#pragma once

// Gradients of scalar functions of the recovery parameters: forward-mode
// through Dual, and central finite differences as an independent check.

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "difga/dual.hpp"

namespace difga {

class GradientError : public std::runtime_error {
 public:
  GradientError(const std::string& what, std::size_t slot) : std::runtime_error(what), slot_(slot) {}
  std::size_t slot() const { return slot_; }

 private:
  std::size_t slot_;
};

/// theta_i -> Dual(theta_i, e_i).
inline std::vector<Dual> seed_parameters(std::span<const double> theta) {
  if (theta.empty()) throw std::invalid_argument("seed_parameters: empty parameter vector");
  std::vector<Dual> out;
  out.reserve(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out.push_back(Dual::variable(theta[i], i, theta.size()));
  return out;
}

/// Value and gradient of f in one forward pass.  `f` takes std::span<const Dual>.
template <class F>
std::pair<double, std::vector<double>> value_and_gradient(F&& f, std::span<const double> theta) {
  const auto seeded = seed_parameters(theta);
  const Dual y = f(std::span<const Dual>(seeded));
  if (!std::isfinite(y.value())) throw GradientError("gradient: non-finite function value", 0);
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    grad[i] = y.tangent(i);
    if (!std::isfinite(grad[i]))
      throw GradientError("gradient: non-finite derivative in parameter slot " + std::to_string(i), i);
  }
  return {y.value(), std::move(grad)};
}

template <class F>
std::vector<double> gradient(F&& f, std::span<const double> theta) {
  return value_and_gradient(std::forward<F>(f), theta).second;
}

/// Central differences (f(theta + h e_i) - f(theta - h e_i)) / 2h.
/// `f` takes std::span<const double>.
template <class F>
std::vector<double> finite_diff_gradient(F&& f, std::span<const double> theta, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_gradient: step must be positive");
  std::vector<double> work(theta.begin(), theta.end());
  std::vector<double> grad(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    work[i] = theta[i] + h;
    const double up = f(std::span<const double>(work));
    work[i] = theta[i] - h;
    const double down = f(std::span<const double>(work));
    work[i] = theta[i];
    if (!std::isfinite(up) || !std::isfinite(down))
      throw GradientError("finite_diff_gradient: non-finite value in parameter slot " + std::to_string(i), i);
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

}  // namespace difga
