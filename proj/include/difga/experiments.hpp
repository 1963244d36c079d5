#pragma once

// Scripted experiments over the recovery-layer training pipeline.
//
// Each experiment resolves its configuration (built-in defaults, then any
// overrides), runs its rows on a small work pool and returns an
// ExperimentResult whose config_snapshot is enough to rerun it.  Row seeds are
// derived as base_seed XOR row_index.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "difga/circuits.hpp"
#include "difga/gaussian.hpp"
#include "difga/noise.hpp"
#include "difga/trainer.hpp"

namespace difga {

inline const std::vector<std::string>& experiment_ids() {
  static const std::vector<std::string> ids = {"loss_sweep",         "sm_vs_mm",     "phase_diagram",
                                               "generalization",     "critical_threshold",
                                               "mode_scaling",       "param_dynamics", "runtime_vs_k"};
  return ids;
}

/// Optional replacements for an experiment's built-in settings.  A scalar
/// override of a swept variable collapses that sweep to the single value.
struct Overrides {
  std::optional<double> eta;
  std::optional<double> delta;
  std::optional<double> kappa;
  std::optional<std::size_t> samples;
  std::optional<std::size_t> steps;
  std::optional<double> learning_rate;
  std::optional<std::size_t> ancillas;
  std::optional<std::size_t> eval_samples;
  std::optional<bool> frozen_noise;
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  Overrides overrides;
  CircuitSpec circuit;            // fixed preparation/entangler parameters
  std::size_t threads = 0;        // 0: hardware concurrency
  double timing_min_seconds = 0.3;  // runtime_vs_k: minimum measured time per point
};

using Cell = std::variant<std::int64_t, double, std::string>;
using Row = std::vector<Cell>;

struct ExperimentResult {
  ExperimentResult() = default;
  ExperimentResult(std::string id, std::vector<std::string> cols)
      : experiment_id(std::move(id)), columns(std::move(cols)) {}

  std::string experiment_id;
  std::vector<std::string> columns;
  std::vector<Row> rows;
  nlohmann::json summary = nlohmann::json::object();
  nlohmann::json config_snapshot = nlohmann::json::object();
  std::vector<std::string> errors;  // one entry per failed row

  bool ok() const { return errors.empty(); }
};

/// (1 - sqrt(eta))^2 (2 alpha)^2 cos^{2A}(theta): the zero-recovery,
/// noise-free loss with a zero-mean partner on every beam splitter.
inline double baseline_error_closed_form(double eta, double alpha, double theta_bs, std::size_t num_ancillas) {
  detail::check_transmissivity(eta, "baseline_error_closed_form");
  const double amp = (1.0 - std::sqrt(eta)) * 2.0 * alpha;
  return amp * amp * std::pow(std::cos(theta_bs), 2.0 * static_cast<double>(num_ancillas));
}

inline const std::vector<double>& eta_grid() {
  static const std::vector<double> g = {0.30, 0.41, 0.52, 0.63, 0.74, 0.85, 0.95};
  return g;
}

// ---------------------------------------------------------------------------
// Serialization helpers (shared with the CLI writers)

inline nlohmann::json to_json(const CircuitSpec& c) {
  return {{"r_s", c.r_s},           {"phi_s", c.phi_s},       {"alpha_re", c.alpha_re},
          {"alpha_im", c.alpha_im}, {"r_a", c.r_a},           {"phi_a", c.phi_a},
          {"theta_bs", c.theta_bs}, {"phi_bs", c.phi_bs},     {"num_ancillas", c.num_ancillas},
          {"eta", c.eta},           {"kick_placement", to_string(c.kick_placement)}};
}

inline CircuitSpec circuit_from_json(const nlohmann::json& j) {
  CircuitSpec c;
  c.r_s = j.at("r_s");
  c.phi_s = j.at("phi_s");
  c.alpha_re = j.at("alpha_re");
  c.alpha_im = j.at("alpha_im");
  c.r_a = j.at("r_a");
  c.phi_a = j.at("phi_a");
  c.theta_bs = j.at("theta_bs");
  c.phi_bs = j.at("phi_bs");
  c.num_ancillas = j.at("num_ancillas");
  c.eta = j.at("eta");
  c.kick_placement = kick_placement_from_string(j.at("kick_placement"));
  return c;
}

namespace detail {

template <class T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key) && !j.at(key).is_null()) v = j.at(key).get<T>();
}

}  // namespace detail

inline nlohmann::json to_json(const Overrides& o) {
  nlohmann::json j = nlohmann::json::object();
  detail::put_optional(j, "eta", o.eta);
  detail::put_optional(j, "delta", o.delta);
  detail::put_optional(j, "kappa", o.kappa);
  detail::put_optional(j, "samples", o.samples);
  detail::put_optional(j, "steps", o.steps);
  detail::put_optional(j, "learning_rate", o.learning_rate);
  detail::put_optional(j, "ancillas", o.ancillas);
  detail::put_optional(j, "eval_samples", o.eval_samples);
  detail::put_optional(j, "frozen_noise", o.frozen_noise);
  return j;
}

inline Overrides overrides_from_json(const nlohmann::json& j) {
  Overrides o;
  detail::get_optional(j, "eta", o.eta);
  detail::get_optional(j, "delta", o.delta);
  detail::get_optional(j, "kappa", o.kappa);
  detail::get_optional(j, "samples", o.samples);
  detail::get_optional(j, "steps", o.steps);
  detail::get_optional(j, "learning_rate", o.learning_rate);
  detail::get_optional(j, "ancillas", o.ancillas);
  detail::get_optional(j, "eval_samples", o.eval_samples);
  detail::get_optional(j, "frozen_noise", o.frozen_noise);
  return o;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"seed", c.seed},
          {"overrides", to_json(c.overrides)},
          {"circuit", to_json(c.circuit)},
          {"threads", c.threads},
          {"timing_min_seconds", c.timing_min_seconds}};
}

inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.seed = j.at("seed");
  c.overrides = overrides_from_json(j.at("overrides"));
  c.circuit = circuit_from_json(j.at("circuit"));
  c.threads = j.at("threads");
  c.timing_min_seconds = j.at("timing_min_seconds");
  return c;
}

inline nlohmann::json cell_to_json(const Cell& c) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, c);
}

inline Cell cell_from_json(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_null()) return std::nan("");
  return j.get<double>();
}

inline nlohmann::json to_json(const ExperimentResult& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[r.columns[i]] = cell_to_json(row[i]);
    rows.push_back(std::move(obj));
  }
  return {{"experiment_id", r.experiment_id}, {"columns", r.columns},
          {"rows", std::move(rows)},          {"summary", r.summary},
          {"config_snapshot", r.config_snapshot}, {"errors", r.errors}};
}

inline ExperimentResult result_from_json(const nlohmann::json& j) {
  ExperimentResult r;
  r.experiment_id = j.at("experiment_id");
  r.columns = j.at("columns").get<std::vector<std::string>>();
  for (const auto& obj : j.at("rows")) {
    Row row;
    for (const auto& col : r.columns) row.push_back(cell_from_json(obj.at(col)));
    r.rows.push_back(std::move(row));
  }
  r.summary = j.at("summary");
  r.config_snapshot = j.at("config_snapshot");
  r.errors = j.at("errors").get<std::vector<std::string>>();
  return r;
}

inline bool operator==(const ExperimentResult& a, const ExperimentResult& b) {
  auto same_cell = [](const Cell& x, const Cell& y) {
    if (x.index() != y.index()) return false;
    if (const auto* dx = std::get_if<double>(&x)) {
      const double dy = std::get<double>(y);
      return *dx == dy || (std::isnan(*dx) && std::isnan(dy));
    }
    return x == y;
  };
  if (a.experiment_id != b.experiment_id || a.columns != b.columns || a.rows.size() != b.rows.size() ||
      a.summary != b.summary || a.config_snapshot != b.config_snapshot || a.errors != b.errors)
    return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].size() != b.rows[i].size()) return false;
    for (std::size_t k = 0; k < a.rows[i].size(); ++k)
      if (!same_cell(a.rows[i][k], b.rows[i][k])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Work pool

namespace detail {

/// Runs task(i) for i in [0, n) on up to `threads` workers.  Exceptions are
/// reported per index through on_error; results are placed by the task itself.
inline void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& task,
                         const std::function<void(std::size_t, const std::string&)>& on_error) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        task(i);
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        on_error(i, e.what());
      }
    }
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

inline double nan() { return std::nan(""); }

/// Fills rows[i] by task(i); failed rows become NaN-filled and are logged.
inline void run_rows(ExperimentResult& result, std::size_t n, std::size_t threads,
                     const std::function<Row(std::size_t)>& task,
                     const std::function<Row(std::size_t)>& failed_row) {
  result.rows.assign(n, Row{});
  std::vector<std::string> errors(n);
  parallel_for(
      n, threads, [&](std::size_t i) { result.rows[i] = task(i); },
      [&](std::size_t i, const std::string& what) {
        errors[i] = "row " + std::to_string(i) + ": " + what;
        result.rows[i] = failed_row(i);
      });
  for (auto& e : errors)
    if (!e.empty()) result.errors.push_back(std::move(e));
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? lo : std::round((lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1)) * 1e12) / 1e12;
  return out;
}

inline std::uint64_t row_seed(std::uint64_t base, std::size_t row) { return base ^ static_cast<std::uint64_t>(row); }

struct Resolved {
  CircuitSpec circuit;
  NoiseModel noise;
  TrainConfig train;
  std::size_t eval_samples = 0;
};

/// Applies experiment defaults, then the user's overrides.
inline Resolved resolve(const ExperimentConfig& cfg, double eta, double delta, std::size_t samples,
                        std::size_t steps, bool frozen, std::size_t ancillas = 1) {
  const Overrides& o = cfg.overrides;
  Resolved r;
  r.circuit = cfg.circuit;
  r.circuit.eta = o.eta.value_or(eta);
  r.circuit.num_ancillas = o.ancillas.value_or(ancillas);
  r.noise.delta = o.delta.value_or(delta);
  r.noise.kappa = o.kappa.value_or(0.6);
  r.noise.samples = o.samples.value_or(samples);
  r.noise.seed = cfg.seed;
  r.train.learning_rate = o.learning_rate.value_or(0.06);
  r.train.steps = o.steps.value_or(steps);
  r.train.sampling = o.frozen_noise.value_or(frozen) ? Sampling::frozen : Sampling::fresh_per_step;
  r.eval_samples = o.eval_samples.value_or(r.noise.samples);
  return r;
}

inline nlohmann::json snapshot(const std::string& id, const ExperimentConfig& cfg, const Resolved& r) {
  return {{"experiment_id", id},
          {"config", to_json(cfg)},
          {"resolved",
           {{"circuit", to_json(r.circuit)},
            {"delta", r.noise.delta},
            {"kappa", r.noise.kappa},
            {"samples", r.noise.samples},
            {"eval_samples", r.eval_samples},
            {"learning_rate", r.train.learning_rate},
            {"steps", r.train.steps},
            {"sampling", to_string(r.train.sampling)}}}};
}

/// Swept values, unless an override pins the variable.
inline std::vector<double> sweep(const std::optional<double>& pinned, std::vector<double> grid) {
  if (pinned) return {*pinned};
  return grid;
}

/// Loss at the given parameters on a fresh evaluation stream.
inline double evaluate_error(const CircuitSpec& spec, NoiseModel model, std::size_t eval_samples,
                             std::span<const double> params) {
  model.samples = eval_samples;
  const Objective objective(spec, model, Stream::evaluation);
  return objective.operator()<double>(params, 0);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Experiments

/// Gaussian loss only, one ancilla, 60 steps per transmissivity.
inline ExperimentResult run_loss_sweep(const ExperimentConfig& cfg = {}) {
  const auto base = detail::resolve(cfg, 0.55, 0.0, 1, 60, false);
  const auto etas = detail::sweep(cfg.overrides.eta, eta_grid());
  ExperimentResult result{"loss_sweep", {"eta", "baseline_loss", "final_loss", "degradation_DT"}};
  result.config_snapshot = detail::snapshot(result.experiment_id, cfg, base);
  detail::run_rows(
      result, etas.size(), cfg.threads,
      [&](std::size_t i) {
        auto r = base;
        r.circuit.eta = etas[i];
        r.noise.seed = detail::row_seed(cfg.seed, i);
        r.train.noise_mode = NoiseMode::gaussian_only;
        const auto rec = train(r.circuit, r.noise, r.train);
        return Row{etas[i], rec.loss_history.front(), rec.loss_history.back(), entanglement_degradation(etas[i])};
      },
      [&](std::size_t i) { return Row{etas[i], detail::nan(), detail::nan(), detail::nan()}; });
  return result;
}

/// Single-mode and one-ancilla circuits, with and without recovery.
inline ExperimentResult run_sm_vs_mm(const ExperimentConfig& cfg = {}) {
  const auto base = detail::resolve(cfg, 0.55, 0.0, 1, 40, false);
  ExperimentResult result{"sm_vs_mm", {"variant", "final_loss"}};
  result.config_snapshot = detail::snapshot(result.experiment_id, cfg, base);
  const std::vector<std::string> variants = {"SM base", "SM mit", "MM base", "MM mit"};
  detail::run_rows(
      result, variants.size(), cfg.threads,
      [&](std::size_t i) {
        auto r = base;
        r.circuit.num_ancillas = i < 2 ? 0 : 1;
        r.train.noise_mode = NoiseMode::gaussian_only;
        const auto rec = train(r.circuit, r.noise, r.train);
        const bool mitigated = i % 2 == 1;
        return Row{variants[i], mitigated ? rec.loss_history.back() : rec.loss_history.front()};
      },
      [&](std::size_t i) { return Row{variants[i], detail::nan()}; });
  result.summary["degradation_DT"] = entanglement_degradation(base.circuit.eta);
  return result;
}

/// Final training objective over a (delta, eta) grid with frozen kick-sets.
inline ExperimentResult run_phase_diagram(const ExperimentConfig& cfg = {}) {
  const auto base = detail::resolve(cfg, 0.55, 0.0, 16, 30, true);
  const auto deltas = detail::sweep(cfg.overrides.delta, detail::linspace(0.0, 0.7, 8));
  const auto etas = detail::sweep(cfg.overrides.eta, eta_grid());
  ExperimentResult result{"phase_diagram", {"delta", "eta", "log10_final_loss"}};
  result.config_snapshot = detail::snapshot(result.experiment_id, cfg, base);
  const std::size_t n = deltas.size() * etas.size();
  detail::run_rows(
      result, n, cfg.threads,
      [&](std::size_t i) {
        auto r = base;
        const double delta = deltas[i / etas.size()], eta = etas[i % etas.size()];
        r.circuit.eta = eta;
        r.noise.delta = delta;
        r.noise.seed = detail::row_seed(cfg.seed, i);
        const auto rec = train(r.circuit, r.noise, r.train);
        return Row{delta, eta, std::log10(std::max(rec.loss_history.back(), 1e-30))};
      },
      [&](std::size_t i) { return Row{deltas[i / etas.size()], etas[i % etas.size()], detail::nan()}; });
  nlohmann::json dt = nlohmann::json::object();
  for (double eta : etas) dt[std::to_string(eta)] = entanglement_degradation(eta);
  result.summary["degradation_DT"] = dt;
  return result;
}

/// Gaussian-trained versus noise-aware-trained recovery, both scored on a
/// held-out evaluation stream.
inline ExperimentResult run_generalization(const ExperimentConfig& cfg = {}) {
  auto base = detail::resolve(cfg, 0.55, 0.0, 16, 60, false);
  base.eval_samples = cfg.overrides.eval_samples.value_or(256);
  const auto deltas = detail::sweep(cfg.overrides.delta, {0.0, 0.14, 0.28, 0.42, 0.70});
  ExperimentResult result{"generalization", {"delta", "gauss_trained_error", "ng_trained_error"}};
  result.config_snapshot = detail::snapshot(result.experiment_id, cfg, base);
  detail::run_rows(
      result, deltas.size(), cfg.threads,
      [&](std::size_t i) {
        auto r = base;
        r.noise.delta = deltas[i];
        r.noise.seed = detail::row_seed(cfg.seed, i);
        auto gauss_cfg = r.train;
        gauss_cfg.noise_mode = NoiseMode::gaussian_only;
        auto ng_cfg = r.train;
        ng_cfg.noise_mode = NoiseMode::ng_aware;
        const auto gauss = train(r.circuit, r.noise, gauss_cfg);
        const auto ng = train(r.circuit, r.noise, ng_cfg);
        return Row{deltas[i],
                   detail::evaluate_error(r.circuit, r.noise, r.eval_samples, gauss.final_params.values),
                   detail::evaluate_error(r.circuit, r.noise, r.eval_samples, ng.final_params.values)};
      },
      [&](std::size_t i) { return Row{deltas[i], detail::nan(), detail::nan()}; });
  result.summary["degradation_DT"] = entanglement_degradation(base.circuit.eta);
  return result;
}

/// Baseline versus noise-aware mitigated error along delta; reports the
/// smallest delta whose mitigated/baseline ratio exceeds 0.10.
inline ExperimentResult run_critical_threshold(const ExperimentConfig& cfg = {}) {
  const auto base = detail::resolve(cfg, 0.55, 0.0, 16, 60, true);
  const auto deltas = detail::sweep(cfg.overrides.delta, detail::linspace(0.0, 0.8, 9));
  ExperimentResult result{"critical_threshold", {"delta", "baseline_error", "mitigated_error"}};
  result.config_snapshot = detail::snapshot(result.experiment_id, cfg, base);
  detail::run_rows(
      result, deltas.size(), cfg.threads,
      [&](std::size_t i) {
        auto r = base;
        r.noise.delta = deltas[i];
        r.noise.seed = detail::row_seed(cfg.seed, i);
        const auto rec = train(r.circuit, r.noise, r.train);
        return Row{deltas[i], rec.loss_history.front(), rec.loss_history.back()};
      },
      [&](std::size_t i) { return Row{deltas[i], detail::nan(), detail::nan()}; });
  constexpr double ratio_limit = 0.10;
  nlohmann::json critical = "none";
  for (const auto& row : result.rows) {
    const double b = std::get<double>(row[1]), m = std::get<double>(row[2]);
    if (b > 0.0 && m / b > ratio_limit) {
      critical = std::get<double>(row[0]);
      break;
    }
  }
  result.summary["critical_delta"] = critical;
  result.summary["ratio_limit"] = ratio_limit;
  result.summary["degradation_DT"] = entanglement_degradation(base.circuit.eta);
  return result;
}

/// Total modes M = ancillas + 2 (signal, ancillas, environment).
inline ExperimentResult run_mode_scaling(const ExperimentConfig& cfg = {}) {
  const auto base = detail::resolve(cfg, 0.55, 0.30, 16, 60, true);
  std::vector<std::size_t> ancillas = {0, 1, 2, 3};
  if (cfg.overrides.ancillas) ancillas = {*cfg.overrides.ancillas};
  ExperimentResult result{"mode_scaling", {"total_modes", "baseline_error", "mitigated_error"}};
  result.config_snapshot = detail::snapshot(result.experiment_id, cfg, base);
  detail::run_rows(
      result, ancillas.size(), cfg.threads,
      [&](std::size_t i) {
        auto r = base;
        r.circuit.num_ancillas = ancillas[i];
        r.noise.seed = detail::row_seed(cfg.seed, i);
        const auto rec = train(r.circuit, r.noise, r.train);
        return Row{static_cast<std::int64_t>(ancillas[i] + 2), rec.loss_history.front(), rec.loss_history.back()};
      },
      [&](std::size_t i) {
        return Row{static_cast<std::int64_t>(ancillas[i] + 2), detail::nan(), detail::nan()};
      });
  nlohmann::json closed = nlohmann::json::array();
  for (std::size_t a : ancillas)
    closed.push_back(baseline_error_closed_form(base.circuit.eta, base.circuit.alpha_re, base.circuit.theta_bs, a));
  result.summary["noise_free_baseline_closed_form"] = closed;
  result.summary["degradation_DT"] = entanglement_degradation(base.circuit.eta);
  return result;
}

/// Full loss and parameter trajectories of one noise-aware run.
inline ExperimentResult run_param_dynamics(const ExperimentConfig& cfg = {}) {
  const auto r = detail::resolve(cfg, 0.55, 0.30, 32, 60, true);
  ExperimentResult result{"param_dynamics", {"step", "loss"}};
  for (std::size_t k = 0; k < r.circuit.num_recovery_params(); ++k) result.columns.push_back("p" + std::to_string(k));
  result.config_snapshot = detail::snapshot(result.experiment_id, cfg, r);
  try {
    const auto rec = train(r.circuit, r.noise, r.train);
    for (std::size_t s = 0; s < rec.loss_history.size(); ++s) {
      Row row{static_cast<std::int64_t>(s), rec.loss_history[s]};
      for (double p : rec.param_history[s]) row.emplace_back(p);
      result.rows.push_back(std::move(row));
    }
    // Largest-magnitude final parameter.
    const auto& fin = rec.final_params.values;
    const auto it = std::max_element(fin.begin(), fin.end(),
                                     [](double a, double b) { return std::abs(a) < std::abs(b); });
    result.summary["dominant_index"] = std::distance(fin.begin(), it);
    result.summary["dominant_value"] = *it;
    result.summary["wall_time"] = rec.wall_time;
  } catch (const std::exception& e) {
    result.errors.push_back(e.what());
  }
  result.summary["degradation_DT"] = entanglement_degradation(r.circuit.eta);
  return result;
}

/// Least-squares fit y = a + b x; returns (a, b, R^2).
inline std::array<double, 3> linear_fit(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double a = (sy - b * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fit = a + b * x[i];
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - sy / n) * (y[i] - sy / n);
  }
  return {a, b, ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0};
}

/// Wall time of 20-step noise-aware training against K, single-threaded.
/// Row samples_K = 0 is the Gaussian-only reference run.
inline ExperimentResult run_runtime_vs_k(const ExperimentConfig& cfg = {}) {
  const auto base = detail::resolve(cfg, 0.55, 0.30, 16, 20, false);
  std::vector<std::size_t> ks = {4, 8, 16, 32};
  if (cfg.overrides.samples) ks = {*cfg.overrides.samples};
  ExperimentResult result{"runtime_vs_k", {"samples_K", "seconds", "slowdown"}};
  result.config_snapshot = detail::snapshot(result.experiment_id, cfg, base);

  // Mean time per run, repeated until timing_min_seconds has elapsed.
  auto time_run = [&](NoiseMode mode, std::size_t k) {
    auto r = base;
    r.noise.samples = k;
    r.train.noise_mode = mode;
    std::size_t reps = 0;
    const auto start = std::chrono::steady_clock::now();
    double elapsed = 0.0;
    do {
      (void)train(r.circuit, r.noise, r.train);
      ++reps;
      elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } while (elapsed < cfg.timing_min_seconds || reps < 3);
    return elapsed / static_cast<double>(reps);
  };

  try {
    const double gaussian = time_run(NoiseMode::gaussian_only, base.noise.samples);
    result.rows.push_back(Row{std::int64_t{0}, gaussian, 1.0});
    std::vector<double> xs, ys;
    for (std::size_t k : ks) {
      const double t = time_run(NoiseMode::ng_aware, k);
      result.rows.push_back(Row{static_cast<std::int64_t>(k), t, t / gaussian});
      xs.push_back(static_cast<double>(k));
      ys.push_back(t);
    }
    if (xs.size() >= 2) {
      const auto [a, b, r2] = linear_fit(xs, ys);
      result.summary["fit_intercept"] = a;
      result.summary["fit_slope"] = b;
      result.summary["fit_r_squared"] = r2;
      result.summary["ratio_last_first"] = ys.back() / ys.front();
    }
  } catch (const std::exception& e) {
    result.errors.push_back(e.what());
  }
  return result;
}

inline ExperimentResult run_experiment(const std::string& id, const ExperimentConfig& cfg = {}) {
  if (id == "loss_sweep") return run_loss_sweep(cfg);
  if (id == "sm_vs_mm") return run_sm_vs_mm(cfg);
  if (id == "phase_diagram") return run_phase_diagram(cfg);
  if (id == "generalization") return run_generalization(cfg);
  if (id == "critical_threshold") return run_critical_threshold(cfg);
  if (id == "mode_scaling") return run_mode_scaling(cfg);
  if (id == "param_dynamics") return run_param_dynamics(cfg);
  if (id == "runtime_vs_k") return run_runtime_vs_k(cfg);
  throw std::invalid_argument("unknown experiment '" + id + "'");
}

/// Reruns an experiment from its config_snapshot.
inline ExperimentResult rerun(const nlohmann::json& snapshot) {
  return run_experiment(snapshot.at("experiment_id"), experiment_config_from_json(snapshot.at("config")));
}

}  // namespace difga
