#pragma once

// Quadrature-matching objective and plain gradient descent on the recovery
// layer.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "difga/circuits.hpp"
#include "difga/diffprop.hpp"
#include "difga/noise.hpp"

namespace difga {

enum class NoiseMode { gaussian_only, ng_aware };

/// Whether each optimisation step draws new kick-sets or reuses those of step 0.
enum class Sampling { fresh_per_step, frozen };

inline const char* to_string(NoiseMode m) { return m == NoiseMode::gaussian_only ? "gaussian_only" : "ng_aware"; }
inline const char* to_string(Sampling s) { return s == Sampling::frozen ? "frozen" : "fresh_per_step"; }

struct TrainConfig {
  double learning_rate = 0.06;
  std::size_t steps = 60;
  std::vector<double> init;  // empty: zeros
  NoiseMode noise_mode = NoiseMode::ng_aware;
  Sampling sampling = Sampling::fresh_per_step;

  void validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
      throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (steps < 1) throw std::invalid_argument("TrainConfig: steps must be >= 1");
  }
};

struct TrainRecord {
  std::vector<double> loss_history;                // steps + 1 entries
  std::vector<std::vector<double>> param_history;  // steps + 1 rows
  RecoveryParams final_params;
  double wall_time = 0.0;  // seconds
};

class TrainingError : public std::runtime_error {
 public:
  TrainingError(const std::string& what, std::size_t step) : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// The objective with the ideal target and the lossy prefix cached.
class Objective {
 public:
  Objective(CircuitSpec spec, NoiseModel model, Stream stream = Stream::training)
      : spec_(std::move(spec)), model_(std::move(model)), stream_(stream) {
    model_.validate();
    const auto ideal = signal_expectations(build_ideal(spec_));
    ideal_x_ = ideal.first;
    ideal_p_ = ideal.second;
    lossy_ = build_lossy(spec_);
  }

  const CircuitSpec& spec() const { return spec_; }
  const NoiseModel& model() const { return model_; }

  std::vector<KickSet> kicks(std::uint64_t step) const {
    if (model_.delta == 0.0) return {KickSet(spec_.corrected_modes(), 0.0)};
    return sample_kicks(model_, spec_.num_ancillas, step, stream_);
  }

  /// (x_ideal - <x_0>)^2 + (p_ideal - <p_0>)^2 over the given kick-sets.
  template <class T>
  T evaluate(std::span<const T> recovery, std::span<const KickSet> kick_sets) const {
    const auto [x, p] = mc_expectations<T>(lossy_, spec_, recovery, kick_sets);
    const T dx = ideal_x_ - x;
    const T dp = ideal_p_ - p;
    return dx * dx + dp * dp;
  }

  template <class T>
  T operator()(std::span<const T> recovery, std::uint64_t step) const {
    const auto k = kicks(step);
    return evaluate<T>(recovery, k);
  }

  std::pair<double, std::vector<double>> value_and_gradient(std::span<const double> theta,
                                                            std::uint64_t step) const {
    const auto k = kicks(step);
    return difga::value_and_gradient([&](std::span<const Dual> r) { return evaluate<Dual>(r, k); }, theta);
  }

 private:
  CircuitSpec spec_;
  NoiseModel model_;
  Stream stream_;
  double ideal_x_ = 0.0;
  double ideal_p_ = 0.0;
  State lossy_;
};

inline double loss(const CircuitSpec& spec, const RecoveryParams& recovery, const NoiseModel& model,
                   std::uint64_t step, Stream stream = Stream::training) {
  return Objective(spec, model, stream).operator()<double>(recovery.values, step);
}

/// theta - lr * grad.
inline std::vector<double> gd_step(std::span<const double> theta, std::span<const double> grad, double lr) {
  if (theta.size() != grad.size())
    throw std::invalid_argument("gd_step: parameter/gradient length mismatch (" + std::to_string(theta.size()) +
                                " vs " + std::to_string(grad.size()) + ")");
  std::vector<double> out(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] - lr * grad[i];
  return out;
}

inline TrainRecord train(const CircuitSpec& spec, NoiseModel model, const TrainConfig& config) {
  config.validate();
  if (config.noise_mode == NoiseMode::gaussian_only) model.delta = 0.0;
  const Objective objective(spec, model);

  std::vector<double> theta = config.init;
  if (theta.empty()) theta.assign(spec.num_recovery_params(), 0.0);
  if (theta.size() != spec.num_recovery_params())
    throw std::invalid_argument("train: init has " + std::to_string(theta.size()) + " parameters, circuit needs " +
                                std::to_string(spec.num_recovery_params()));

  const auto start = std::chrono::steady_clock::now();
  TrainRecord record;
  record.loss_history.reserve(config.steps + 1);
  record.param_history.reserve(config.steps + 1);
  for (std::size_t step = 0;; ++step) {
    const std::uint64_t sample_step = config.sampling == Sampling::frozen ? 0 : step;
    const bool last = step == config.steps;
    double value = 0.0;
    std::vector<double> grad;
    if (last) {
      value = objective.operator()<double>(theta, sample_step);
    } else {
      try {
        std::tie(value, grad) = objective.value_and_gradient(theta, sample_step);
      } catch (const GradientError& e) {
        throw TrainingError(std::string(e.what()) + " at step " + std::to_string(step), step);
      }
    }
    if (!std::isfinite(value)) throw TrainingError("train: non-finite loss at step " + std::to_string(step), step);
    record.loss_history.push_back(value);
    record.param_history.push_back(theta);
    if (last) break;
    theta = gd_step(theta, grad, config.learning_rate);
  }
  record.final_params.values = theta;
  record.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

}  // namespace difga
