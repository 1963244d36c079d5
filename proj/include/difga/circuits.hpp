#pragma once

// Circuit builders: the ideal entangled resource state, the lossy circuit with
// an environment mode, phase kicks, and the trainable recovery layer.
//
// Mode layout for a circuit with A ancillas:
//   0          signal
//   1 .. A     ancillas
//   A + 1      environment (noisy circuit only)

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "difga/gaussian.hpp"

namespace difga {

/// Where the phase kicks sit relative to the recovery layer.
enum class KickPlacement { before_recovery, after_recovery };

inline const char* to_string(KickPlacement p) {
  return p == KickPlacement::before_recovery ? "before_recovery" : "after_recovery";
}

inline KickPlacement kick_placement_from_string(const std::string& s) {
  if (s == "before_recovery") return KickPlacement::before_recovery;
  if (s == "after_recovery") return KickPlacement::after_recovery;
  throw std::invalid_argument("unknown kick placement '" + s + "'");
}

struct CircuitSpec {
  double r_s = 0.60;
  double phi_s = 0.30;
  double alpha_re = 0.80;
  double alpha_im = 0.0;
  double r_a = 0.40;
  double phi_a = 0.10;
  double theta_bs = 0.70;
  double phi_bs = 0.20;
  std::size_t num_ancillas = 1;
  double eta = 0.55;
  KickPlacement kick_placement = KickPlacement::after_recovery;

  /// Signal plus ancillas; the noisy circuit adds one environment mode.
  std::size_t corrected_modes() const { return 1 + num_ancillas; }
  std::size_t noisy_modes() const { return corrected_modes() + 1; }
  std::size_t num_recovery_params() const { return 3 * corrected_modes(); }

  void validate() const {
    detail::check_transmissivity(eta, "CircuitSpec");
    for (double v : {r_s, phi_s, alpha_re, alpha_im, r_a, phi_a, theta_bs, phi_bs})
      if (!std::isfinite(v)) throw std::invalid_argument("CircuitSpec: non-finite parameter");
  }
};

/// Flattened as (phi_0, Re beta_0, Im beta_0, phi_1, Re beta_1, Im beta_1, ...).
struct RecoveryParams {
  std::vector<double> values;

  static RecoveryParams zeros(std::size_t num_ancillas) {
    return {std::vector<double>(3 * (1 + num_ancillas), 0.0)};
  }
  std::size_t size() const { return values.size(); }
};

/// One rotation angle per corrected mode: signal first, then each ancilla.
using KickSet = std::vector<double>;

namespace detail {

inline State prepare_entangled(const CircuitSpec& spec, std::size_t num_modes) {
  State s = vacuum_state(num_modes);
  s = apply_squeezing(std::move(s), 0, spec.r_s, spec.phi_s);
  s = apply_displacement(std::move(s), 0, spec.alpha_re, spec.alpha_im);
  for (std::size_t j = 1; j <= spec.num_ancillas; ++j) s = apply_squeezing(std::move(s), j, spec.r_a, spec.phi_a);
  for (std::size_t j = 1; j <= spec.num_ancillas; ++j)
    s = apply_beamsplitter(std::move(s), 0, j, spec.theta_bs, spec.phi_bs);
  return s;
}

template <class T>
GaussianState<T> promote(const State& s) {
  if constexpr (std::is_same_v<T, double>) {
    return s;
  } else {
    GaussianState<T> out{s.num_modes, {}, Matrix<T>(s.cov.rows(), s.cov.cols())};
    for (double m : s.mean) out.mean.emplace_back(m);
    for (std::size_t r = 0; r < s.cov.rows(); ++r)
      for (std::size_t c = 0; c < s.cov.cols(); ++c) out.cov(r, c) = T(s.cov(r, c));
    return out;
  }
}

}  // namespace detail

/// Lossless target state on 1 + num_ancillas modes.
inline State build_ideal(const CircuitSpec& spec) {
  spec.validate();
  return detail::prepare_entangled(spec, spec.corrected_modes());
}

/// Noisy circuit up to and including the loss: the part shared by every
/// Monte-Carlo sample.
inline State build_lossy(const CircuitSpec& spec) {
  spec.validate();
  const std::size_t env = spec.noisy_modes() - 1;
  return apply_loss_via_env(detail::prepare_entangled(spec, spec.noisy_modes()), 0, env, spec.eta);
}

/// Applies kicks and the recovery layer to the output of build_lossy.
template <class T>
GaussianState<T> finish_noisy(const State& lossy, const CircuitSpec& spec, std::span<const T> recovery,
                              std::span<const double> kicks) {
  const std::size_t corrected = spec.corrected_modes();
  if (recovery.size() != spec.num_recovery_params())
    throw std::invalid_argument("build_noisy: expected " + std::to_string(spec.num_recovery_params()) +
                                " recovery parameters, got " + std::to_string(recovery.size()));
  if (kicks.size() != corrected)
    throw std::invalid_argument("build_noisy: expected " + std::to_string(corrected) + " kick angles, got " +
                                std::to_string(kicks.size()));

  GaussianState<T> s = detail::promote<T>(lossy);
  auto kick = [&] {
    for (std::size_t j = 0; j < corrected; ++j)
      if (kicks[j] != 0.0) s = apply_rotation(std::move(s), j, T(kicks[j]));
  };
  if (spec.kick_placement == KickPlacement::before_recovery) kick();
  // D(beta_j) R(phi_j): rotate first, then displace.
  for (std::size_t j = 0; j < corrected; ++j) {
    s = apply_rotation(std::move(s), j, recovery[3 * j]);
    s = apply_displacement(std::move(s), j, recovery[3 * j + 1], recovery[3 * j + 2]);
  }
  if (spec.kick_placement == KickPlacement::after_recovery) kick();
  return s;
}

template <class T>
GaussianState<T> build_noisy(const CircuitSpec& spec, std::span<const T> recovery, std::span<const double> kicks) {
  return finish_noisy<T>(build_lossy(spec), spec, recovery, kicks);
}

inline State build_noisy(const CircuitSpec& spec, const RecoveryParams& recovery, const KickSet& kicks) {
  return build_noisy<double>(spec, recovery.values, kicks);
}

/// (<x_0>, <p_0>).
template <class T>
std::pair<T, T> signal_expectations(const GaussianState<T>& state) {
  return {mean_x(state, 0), mean_p(state, 0)};
}

}  // namespace difga
