#pragma once

// Phase-jitter sampling and the Monte-Carlo expectation estimator.
//
// Kicks for a given (seed, stream, step) come from a Mersenne Twister keyed by
// a SplitMix64 hash of the triple, so any step can be regenerated on its own.
// Normal variates use the Box-Muller transform with u1 in (0, 1].

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "difga/circuits.hpp"

namespace difga {

/// Independent sample streams; evaluation never reuses training samples.
enum class Stream : std::uint64_t { training = 0, evaluation = 1 };

struct NoiseModel {
  double delta = 0.0;  // signal jitter std-dev (radians)
  double kappa = 0.6;  // ancilla jitter is kappa * delta
  std::size_t samples = 16;
  std::uint64_t seed = 42;

  void validate() const {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("NoiseModel: delta must be >= 0");
    if (!(kappa >= 0.0) || !std::isfinite(kappa)) throw std::invalid_argument("NoiseModel: kappa must be >= 0");
    if (samples < 1) throw std::invalid_argument("NoiseModel: samples must be >= 1");
  }
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class NormalStream {
 public:
  NormalStream(std::uint64_t seed, Stream stream, std::uint64_t step)
      : engine_(splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream)) ^ step)) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open_closed();
    const double u2 = uniform_open_closed();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  double uniform_open_closed() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// K kick-sets of 1 + num_ancillas angles each.
inline std::vector<KickSet> sample_kicks(const NoiseModel& model, std::size_t num_ancillas, std::uint64_t step,
                                         Stream stream = Stream::training) {
  model.validate();
  std::vector<KickSet> out(model.samples, KickSet(1 + num_ancillas, 0.0));
  if (model.delta == 0.0) return out;
  NormalStream normal(model.seed, stream, step);
  const double anc = model.kappa * model.delta;
  for (auto& set : out) {
    set[0] = model.delta * normal.next();
    for (std::size_t j = 1; j <= num_ancillas; ++j) set[j] = anc * normal.next();
  }
  return out;
}

/// Mean signal expectations over explicit kick-sets, summed in sample order.
template <class T>
std::pair<T, T> mc_expectations(const State& lossy, const CircuitSpec& spec, std::span<const T> recovery,
                                std::span<const KickSet> kick_sets) {
  if (kick_sets.empty()) throw std::invalid_argument("mc_expectations: no kick-sets");
  T sx(0.0), sp(0.0);
  for (const auto& kicks : kick_sets) {
    const auto [x, p] = signal_expectations(finish_noisy<T>(lossy, spec, recovery, kicks));
    sx += x;
    sp += p;
  }
  const double inv = 1.0 / static_cast<double>(kick_sets.size());
  return {sx * inv, sp * inv};
}

/// Monte-Carlo estimate of (<x_0>, <p_0>) at a given sampling step.  With
/// delta = 0 this is exactly the deterministic circuit.
template <class T>
std::pair<T, T> mc_expectations(const CircuitSpec& spec, std::span<const T> recovery, const NoiseModel& model,
                                std::uint64_t step, Stream stream = Stream::training) {
  const State lossy = build_lossy(spec);
  if (model.delta == 0.0) {
    const KickSet zero(spec.corrected_modes(), 0.0);
    return signal_expectations(finish_noisy<T>(lossy, spec, recovery, zero));
  }
  const auto kicks = sample_kicks(model, spec.num_ancillas, step, stream);
  return mc_expectations<T>(lossy, spec, recovery, kicks);
}

inline std::pair<double, double> mc_expectations(const CircuitSpec& spec, const RecoveryParams& recovery,
                                                 const NoiseModel& model, std::uint64_t step,
                                                 Stream stream = Stream::training) {
  return mc_expectations<double>(spec, recovery.values, model, step, stream);
}

}  // namespace difga
