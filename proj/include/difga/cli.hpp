#pragma once

// Command-line front end: argument parsing, result writers and dispatch.
//
//   difga list
//   difga run <experiment_id> [flags]
//   difga train [flags]
//   difga sweep [--etas a,b,...] [--deltas a,b,...] [flags]
//   difga gradcheck [--configs N] [flags]
//
// Seed precedence: --seed, then DIFGA_SEED, then 42.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "difga/experiments.hpp"
#include "difga/gradcheck.hpp"

namespace difga {

enum class OutputFormat { csv, json, both };

struct RunConfig {
  std::string command;
  std::string experiment_id;  // `run` only
  Overrides overrides;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir = "results";
  OutputFormat format = OutputFormat::csv;
  std::vector<double> sweep_etas;    // `sweep` only
  std::vector<double> sweep_deltas;  // `sweep` only
  std::size_t gradcheck_configs = 50;
  std::size_t threads = 0;
};

/// Bad invocation; `message` is ready to print and `exit_code` to return.
struct UsageError : std::runtime_error {
  UsageError(const std::string& message, int exit_code) : std::runtime_error(message), exit_code(exit_code) {}
  int exit_code;
};

constexpr std::uint64_t kDefaultSeed = 42;
constexpr double kMaxDelta = 0.8;
constexpr std::size_t kMaxAncillas = 8;

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

inline std::optional<std::string> process_env(const char* name) {
  if (const char* v = std::getenv(name)) return std::string(v);
  return std::nullopt;
}

namespace detail {

inline void check_range(const char* field, double v, double lo, double hi) {
  if (!std::isfinite(v) || v < lo || v > hi) {
    std::ostringstream os;
    os << field << ": " << v << " outside documented range [" << lo << ", " << hi << "]";
    throw UsageError(os.str(), 2);
  }
}

inline void validate_overrides(const Overrides& o) {
  if (o.eta) check_range("--eta", *o.eta, 0.0, 1.0);
  if (o.delta) check_range("--delta", *o.delta, 0.0, kMaxDelta);
  if (o.kappa) check_range("--kappa", *o.kappa, 0.0, 10.0);
  if (o.learning_rate && !(*o.learning_rate > 0.0 && std::isfinite(*o.learning_rate)))
    throw UsageError("--lr: must be a positive finite number", 2);
  if (o.samples && *o.samples < 1) throw UsageError("--samples: must be >= 1", 2);
  if (o.eval_samples && *o.eval_samples < 1) throw UsageError("--eval-samples: must be >= 1", 2);
  if (o.steps && *o.steps < 1) throw UsageError("--steps: must be >= 1", 2);
  if (o.ancillas && *o.ancillas > kMaxAncillas)
    throw UsageError("--ancillas: " + std::to_string(*o.ancillas) + " exceeds maximum " + std::to_string(kMaxAncillas),
                     2);
}

}  // namespace detail

inline RunConfig parse_args(const std::vector<std::string>& args, const EnvLookup& env = process_env) {
  CLI::App app{"Differentiable Gaussian error mitigation: experiments and training", "difga"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::optional<std::uint64_t> seed_flag;
  std::string format = "csv";
  std::string out_dir = cfg.output_dir.string();

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--eta", cfg.overrides.eta, "Loss transmissivity in [0, 1]");
    sub->add_option("--delta", cfg.overrides.delta, "Signal phase-jitter std-dev in [0, 0.8]");
    sub->add_option("--kappa", cfg.overrides.kappa, "Ancilla jitter factor (ancilla std-dev = kappa * delta)");
    sub->add_option("--samples", cfg.overrides.samples, "Monte-Carlo samples K");
    sub->add_option("--steps", cfg.overrides.steps, "Gradient-descent steps");
    sub->add_option("--lr", cfg.overrides.learning_rate, "Learning rate");
    sub->add_option("--ancillas", cfg.overrides.ancillas, "Number of ancilla modes");
    sub->add_option("--seed", seed_flag, "Base seed (default: DIFGA_SEED or 42)");
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--format", format, "csv | json | both")->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_flag("--frozen-noise{true}", cfg.overrides.frozen_noise,
                  "Reuse the step-0 kick-sets at every step (--frozen-noise=false to disable)");
    sub->add_option("--eval-samples", cfg.overrides.eval_samples, "Monte-Carlo samples for held-out evaluation");
    sub->add_option("--threads", cfg.threads, "Worker threads for grid rows (0: all cores)");
  };

  auto* list = app.add_subcommand("list", "List the available experiments");
  auto* run = app.add_subcommand("run", "Run one experiment and write its results");
  run->add_option("experiment_id", cfg.experiment_id, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(experiment_ids()));
  add_common(run);
  auto* trn = app.add_subcommand("train", "Train a single recovery layer");
  add_common(trn);
  auto* sweep = app.add_subcommand("sweep", "Train over a custom eta x delta grid");
  sweep->add_option("--etas", cfg.sweep_etas, "Comma-separated transmissivities")->delimiter(',');
  sweep->add_option("--deltas", cfg.sweep_deltas, "Comma-separated jitter amplitudes")->delimiter(',');
  add_common(sweep);
  auto* grad = app.add_subcommand("gradcheck", "Compare forward-mode gradients with finite differences");
  grad->add_option("--configs", cfg.gradcheck_configs, "Number of randomized configurations");
  add_common(grad);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    throw UsageError(app.help(), 0);
  } catch (const CLI::CallForAllHelp&) {
    throw UsageError(app.help("", CLI::AppFormatMode::All), 0);
  } catch (const CLI::ParseError& e) {
    std::string sub_help;
    for (auto* s : app.get_subcommands()) sub_help = s->help();
    throw UsageError(std::string("error: ") + e.what() + "\n\n" + (sub_help.empty() ? app.help() : sub_help),
                     e.get_exit_code() == 0 ? 2 : e.get_exit_code());
  }

  for (auto* s : {list, run, trn, sweep, grad})
    if (s->parsed()) cfg.command = s->get_name();

  if (seed_flag) {
    cfg.seed = *seed_flag;
  } else if (auto v = env("DIFGA_SEED")) {
    std::uint64_t parsed = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), parsed);
    if (ec != std::errc{} || ptr != v->data() + v->size())
      throw UsageError("DIFGA_SEED: '" + *v + "' is not an unsigned 64-bit integer", 2);
    cfg.seed = parsed;
  } else {
    cfg.seed = kDefaultSeed;
  }
  cfg.output_dir = out_dir;
  cfg.format = format == "json" ? OutputFormat::json : format == "both" ? OutputFormat::both : OutputFormat::csv;

  detail::validate_overrides(cfg.overrides);
  for (double e : cfg.sweep_etas) detail::check_range("--etas", e, 0.0, 1.0);
  for (double d : cfg.sweep_deltas) detail::check_range("--deltas", d, 0.0, kMaxDelta);
  return cfg;
}

// ---------------------------------------------------------------------------
// Writers

/// Shortest decimal that round-trips to the same double.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string csv_field(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char ch : s) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return quoted + '"';
}

inline std::string to_csv(const ExperimentResult& result) {
  std::string out;
  for (std::size_t i = 0; i < result.columns.size(); ++i) out += (i ? "," : "") + result.columns[i];
  out += '\n';
  for (const auto& row : result.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += '\n';
  }
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << content;
  if (!f) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace detail

/// Writes <experiment_id>.csv and/or <experiment_id>.json into output_dir.
inline std::vector<std::filesystem::path> write_results(const ExperimentResult& result, const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + config.output_dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  if (config.format != OutputFormat::json) {
    auto path = config.output_dir / (result.experiment_id + ".csv");
    detail::write_file(path, to_csv(result));
    written.push_back(std::move(path));
  }
  if (config.format != OutputFormat::csv) {
    auto path = config.output_dir / (result.experiment_id + ".json");
    detail::write_file(path, to_json(result).dump(2) + "\n");
    written.push_back(std::move(path));
  }
  return written;
}

// ---------------------------------------------------------------------------
// Commands

namespace detail {

inline ExperimentConfig experiment_config(const RunConfig& rc) {
  ExperimentConfig ec;
  ec.seed = rc.seed;
  ec.overrides = rc.overrides;
  ec.threads = rc.threads;
  return ec;
}

inline ExperimentResult train_result(const RunConfig& rc) {
  const auto r = resolve(experiment_config(rc), 0.55, 0.0, 16, 60, false);
  auto train_cfg = r.train;
  train_cfg.noise_mode = r.noise.delta > 0.0 ? NoiseMode::ng_aware : NoiseMode::gaussian_only;
  ExperimentResult result{"train", {"step", "loss"}};
  for (std::size_t k = 0; k < r.circuit.num_recovery_params(); ++k) result.columns.push_back("p" + std::to_string(k));
  result.config_snapshot = snapshot("train", experiment_config(rc), r);
  const auto rec = train(r.circuit, r.noise, train_cfg);
  for (std::size_t s = 0; s < rec.loss_history.size(); ++s) {
    Row row{static_cast<std::int64_t>(s), rec.loss_history[s]};
    for (double p : rec.param_history[s]) row.emplace_back(p);
    result.rows.push_back(std::move(row));
  }
  result.summary["initial_loss"] = rec.loss_history.front();
  result.summary["final_loss"] = rec.loss_history.back();
  result.summary["final_params"] = rec.final_params.values;
  result.summary["wall_time"] = rec.wall_time;
  result.summary["degradation_DT"] = entanglement_degradation(r.circuit.eta);
  return result;
}

inline ExperimentResult sweep_result(const RunConfig& rc) {
  const auto cfg = experiment_config(rc);
  const auto base = resolve(cfg, 0.55, 0.0, 16, 60, false);
  const auto etas = rc.sweep_etas.empty() ? std::vector<double>{base.circuit.eta} : rc.sweep_etas;
  const auto deltas = rc.sweep_deltas.empty() ? std::vector<double>{base.noise.delta} : rc.sweep_deltas;
  ExperimentResult result{"sweep", {"eta", "delta", "baseline_loss", "final_loss", "degradation_DT"}};
  result.config_snapshot = snapshot("sweep", cfg, base);
  result.config_snapshot["etas"] = etas;
  result.config_snapshot["deltas"] = deltas;
  run_rows(
      result, etas.size() * deltas.size(), rc.threads,
      [&](std::size_t i) {
        auto r = base;
        r.circuit.eta = etas[i / deltas.size()];
        r.noise.delta = deltas[i % deltas.size()];
        r.noise.seed = row_seed(rc.seed, i);
        r.train.noise_mode = r.noise.delta > 0.0 ? NoiseMode::ng_aware : NoiseMode::gaussian_only;
        const auto rec = train(r.circuit, r.noise, r.train);
        return Row{r.circuit.eta, r.noise.delta, rec.loss_history.front(), rec.loss_history.back(),
                   entanglement_degradation(r.circuit.eta)};
      },
      [&](std::size_t i) {
        return Row{etas[i / deltas.size()], deltas[i % deltas.size()], nan(), nan(), nan()};
      });
  return result;
}

}  // namespace detail

/// Full CLI: returns the process exit code.  Exit 0 iff every requested row
/// completed.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr, const EnvLookup& env = process_env) {
  RunConfig rc;
  try {
    rc = parse_args(args, env);
  } catch (const UsageError& e) {
    (e.exit_code == 0 ? out : err) << e.what() << '\n';
    return e.exit_code;
  }

  try {
    if (rc.command == "list") {
      for (const auto& id : experiment_ids()) out << id << '\n';
      return 0;
    }
    if (rc.command == "gradcheck") {
      const auto cases = gradcheck_suite(rc.gradcheck_configs, rc.seed);
      std::size_t failed = 0;
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        out << (c.passed ? "PASS" : "FAIL") << " config " << i << " eta=" << c.spec.eta
            << " delta=" << c.model.delta << " modes=" << c.spec.noisy_modes() << " K=" << c.model.samples
            << " max_abs=" << c.max_abs_error << " max_rel=" << c.max_rel_error << '\n';
        failed += c.passed ? 0 : 1;
      }
      out << (cases.size() - failed) << "/" << cases.size() << " configurations agree\n";
      return failed == 0 ? 0 : 1;
    }

    ExperimentResult result;
    if (rc.command == "run") {
      result = run_experiment(rc.experiment_id, detail::experiment_config(rc));
    } else if (rc.command == "train") {
      result = detail::train_result(rc);
      out << "initial loss " << format_number(result.summary["initial_loss"].get<double>()) << '\n'
          << "final loss " << format_number(result.summary["final_loss"].get<double>()) << '\n';
    } else {
      result = detail::sweep_result(rc);
    }
    for (const auto& path : write_results(result, rc)) out << "wrote " << path.string() << '\n';
    for (const auto& e : result.errors) err << result.experiment_id << ": " << e << '\n';
    return result.ok() ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace difga
