#pragma once

// Multi-mode Gaussian states in the first/second-moment representation.
//
// Conventions:
//  * hbar = 2, so the vacuum covariance is the identity and <x> = 2 Re(alpha).
//  * Quadratures are interleaved: (x_0, p_0, x_1, p_1, ...).
//  * The symplectic form is block diagonal with 2x2 blocks [[0, 1], [-1, 0]].
//
// Every Gaussian unitary is a local affine symplectic map acting on one or two
// modes.  States are values: each primitive takes a state and returns the
// transformed state.  Everything is templated on the scalar so the circuits
// can be evaluated on dual numbers.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "difga/dual.hpp"
#include "difga/matrix.hpp"

namespace difga {

/// Non-deduced scalar argument, so doubles bind to dual-valued states.
template <class T>
using Scalar = std::type_identity_t<T>;

template <class T>
struct GaussianState {
  std::size_t num_modes = 0;
  std::vector<T> mean;  // length 2M
  Matrix<T> cov;        // 2M x 2M
};

using State = GaussianState<double>;

/// Linear-plus-shift phase-space map: mean -> S mean + d, cov -> S cov S^T.
template <class T>
struct AffineSymplectic {
  Matrix<T> S;
  std::vector<T> d;

  std::size_t num_modes() const { return d.size() / 2; }
};

/// A Gaussian unitary restricted to N modes; embeds as identity elsewhere.
template <class T, std::size_t N>
struct LocalGaussianOp {
  std::array<std::size_t, N> modes{};
  std::array<std::array<T, 2 * N>, 2 * N> block{};
  std::array<T, 2 * N> shift{};
};

namespace detail {

inline void check_mode(std::size_t num_modes, std::size_t mode, const char* what) {
  if (mode >= num_modes)
    throw std::out_of_range(std::string(what) + ": mode " + std::to_string(mode) +
                            " out of range for " + std::to_string(num_modes) + " modes");
}

inline void check_transmissivity(double eta, const char* what) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument(std::string(what) + ": transmissivity " + std::to_string(eta) +
                                " outside [0, 1]");
}

template <class T>
void check_finite(const T& x, const char* what) {
  if (!std::isfinite(value_of(x))) throw std::invalid_argument(std::string(what) + ": non-finite argument");
}

template <class T, std::size_t N>
std::array<std::size_t, 2 * N> quadrature_indices(const LocalGaussianOp<T, N>& op) {
  std::array<std::size_t, 2 * N> idx{};
  for (std::size_t k = 0; k < N; ++k) {
    idx[2 * k] = 2 * op.modes[k];
    idx[2 * k + 1] = 2 * op.modes[k] + 1;
  }
  return idx;
}

}  // namespace detail

template <class T>
GaussianState<T> vacuum_state(std::size_t num_modes) {
  if (num_modes == 0) throw std::invalid_argument("vacuum_state: num_modes must be >= 1");
  return {num_modes, std::vector<T>(2 * num_modes, T(0.0)), Matrix<T>::identity(2 * num_modes)};
}

inline State vacuum_state(std::size_t num_modes) { return vacuum_state<double>(num_modes); }

/// Block diagonal symplectic form for `num_modes` modes.
inline Matrix<double> symplectic_form(std::size_t num_modes) {
  Matrix<double> omega(2 * num_modes, 2 * num_modes);
  for (std::size_t k = 0; k < num_modes; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  return omega;
}

// ---------------------------------------------------------------------------
// Local operators

template <class T>
LocalGaussianOp<T, 1> rotation_op(std::size_t mode, const T& phi) {
  using std::cos;
  using std::sin;
  LocalGaussianOp<T, 1> op;
  op.modes = {mode};
  const T c = cos(phi), s = sin(phi);
  op.block = {{{c, -s}, {s, c}}};
  op.shift = {T(0.0), T(0.0)};
  return op;
}

template <class T>
LocalGaussianOp<T, 1> squeezing_op(std::size_t mode, const T& r, const T& phi) {
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  LocalGaussianOp<T, 1> op;
  op.modes = {mode};
  const T ch = cosh(r), sh = sinh(r), c = cos(phi), s = sin(phi);
  op.block = {{{ch - sh * c, -(sh * s)}, {-(sh * s), ch + sh * c}}};
  op.shift = {T(0.0), T(0.0)};
  return op;
}

template <class T>
LocalGaussianOp<T, 1> displacement_op(std::size_t mode, const T& re, const T& im) {
  LocalGaussianOp<T, 1> op;
  op.modes = {mode};
  op.block = {{{T(1.0), T(0.0)}, {T(0.0), T(1.0)}}};
  op.shift = {2.0 * re, 2.0 * im};
  return op;
}

/// a_a -> cos(theta) a_a - e^{-i phi} sin(theta) a_b,
/// a_b -> e^{i phi} sin(theta) a_a + cos(theta) a_b.
template <class T>
LocalGaussianOp<T, 2> beamsplitter_op(std::size_t mode_a, std::size_t mode_b, const T& theta,
                                      const T& phi) {
  using std::cos;
  using std::sin;
  if (mode_a == mode_b) throw std::invalid_argument("beamsplitter: modes must differ");
  LocalGaussianOp<T, 2> op;
  op.modes = {mode_a, mode_b};
  const T c = cos(theta), s = sin(theta);
  const T sc = s * cos(phi), ss = s * sin(phi);
  const T z(0.0);
  op.block = {{{c, z, -sc, -ss}, {z, c, ss, -sc}, {sc, -ss, c, z}, {ss, sc, z, c}}};
  op.shift = {z, z, z, z};
  return op;
}

/// Applies a local operator directly on the affected rows and columns.
template <class T, std::size_t N>
GaussianState<T> apply_local(GaussianState<T> state, const LocalGaussianOp<T, N>& op) {
  for (std::size_t m : op.modes) detail::check_mode(state.num_modes, m, "apply_local");
  constexpr std::size_t D = 2 * N;
  const auto idx = detail::quadrature_indices(op);
  const std::size_t n = 2 * state.num_modes;

  std::array<T, D> sub;
  for (std::size_t i = 0; i < D; ++i) {
    T acc = op.shift[i];
    for (std::size_t j = 0; j < D; ++j) acc += op.block[i][j] * state.mean[idx[j]];
    sub[i] = acc;
  }
  for (std::size_t i = 0; i < D; ++i) state.mean[idx[i]] = sub[i];

  // cov <- S cov (rows), then cov <- cov S^T (columns).
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < D; ++i) {
      T acc(0.0);
      for (std::size_t j = 0; j < D; ++j) acc += op.block[i][j] * state.cov(idx[j], c);
      sub[i] = acc;
    }
    for (std::size_t i = 0; i < D; ++i) state.cov(idx[i], c) = sub[i];
  }
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < D; ++i) {
      T acc(0.0);
      for (std::size_t j = 0; j < D; ++j) acc += state.cov(r, idx[j]) * op.block[i][j];
      sub[i] = acc;
    }
    for (std::size_t i = 0; i < D; ++i) state.cov(r, idx[i]) = sub[i];
  }
  return state;
}

/// Embeds a local operator into the full 2M-dimensional phase space.
template <class T, std::size_t N>
AffineSymplectic<T> embed(const LocalGaussianOp<T, N>& op, std::size_t num_modes) {
  for (std::size_t m : op.modes) detail::check_mode(num_modes, m, "embed");
  const auto idx = detail::quadrature_indices(op);
  AffineSymplectic<T> map{Matrix<T>::identity(2 * num_modes), std::vector<T>(2 * num_modes, T(0.0))};
  for (std::size_t i = 0; i < 2 * N; ++i) {
    for (std::size_t j = 0; j < 2 * N; ++j) map.S(idx[i], idx[j]) = op.block[i][j];
    map.d[idx[i]] = op.shift[i];
  }
  return map;
}

/// Dense application of an affine symplectic map.
template <class T>
GaussianState<T> apply(const GaussianState<T>& state, const AffineSymplectic<T>& map) {
  if (map.d.size() != state.mean.size()) throw std::invalid_argument("apply: dimension mismatch");
  GaussianState<T> out{state.num_modes, map.S * state.mean, map.S * state.cov * map.S.transpose()};
  for (std::size_t i = 0; i < out.mean.size(); ++i) out.mean[i] += map.d[i];
  return out;
}

/// `second` after `first`.
template <class T>
AffineSymplectic<T> compose(const AffineSymplectic<T>& second, const AffineSymplectic<T>& first) {
  AffineSymplectic<T> out{second.S * first.S, second.S * first.d};
  for (std::size_t i = 0; i < out.d.size(); ++i) out.d[i] += second.d[i];
  return out;
}

/// max |S Omega S^T - Omega|.
inline double symplectic_residual(const Matrix<double>& S) {
  const auto omega = symplectic_form(S.rows() / 2);
  return max_abs_diff(S * omega * S.transpose(), omega);
}

// ---------------------------------------------------------------------------
// Primitives

template <class T>
GaussianState<T> apply_rotation(GaussianState<T> state, std::size_t mode, const Scalar<T>& phi) {
  detail::check_mode(state.num_modes, mode, "apply_rotation");
  return apply_local(std::move(state), rotation_op(mode, phi));
}

template <class T>
GaussianState<T> apply_squeezing(GaussianState<T> state, std::size_t mode, const Scalar<T>& r,
                                 const Scalar<T>& phi) {
  detail::check_mode(state.num_modes, mode, "apply_squeezing");
  detail::check_finite(r, "apply_squeezing");
  detail::check_finite(phi, "apply_squeezing");
  return apply_local(std::move(state), squeezing_op(mode, r, phi));
}

/// Shifts the mode's mean by (2 re, 2 im); the covariance is untouched.
template <class T>
GaussianState<T> apply_displacement(GaussianState<T> state, std::size_t mode, const Scalar<T>& re,
                                    const Scalar<T>& im) {
  detail::check_mode(state.num_modes, mode, "apply_displacement");
  state.mean[2 * mode] += 2.0 * re;
  state.mean[2 * mode + 1] += 2.0 * im;
  return state;
}

template <class T>
GaussianState<T> apply_beamsplitter(GaussianState<T> state, std::size_t mode_a, std::size_t mode_b,
                                    const Scalar<T>& theta, const Scalar<T>& phi) {
  detail::check_mode(state.num_modes, mode_a, "apply_beamsplitter");
  detail::check_mode(state.num_modes, mode_b, "apply_beamsplitter");
  return apply_local(std::move(state), beamsplitter_op(mode_a, mode_b, theta, phi));
}

/// Optical loss as a beam splitter against a vacuum environment mode.
template <class T>
GaussianState<T> apply_loss_via_env(GaussianState<T> state, std::size_t mode, std::size_t env_mode,
                                    double eta) {
  detail::check_transmissivity(eta, "apply_loss_via_env");
  detail::check_mode(state.num_modes, mode, "apply_loss_via_env");
  detail::check_mode(state.num_modes, env_mode, "apply_loss_via_env");
  constexpr double tol = 1e-12;
  const std::size_t e = 2 * env_mode;
  for (std::size_t i = 0; i < 2; ++i) {
    bool vacuum = std::abs(value_of(state.mean[e + i])) <= tol;
    for (std::size_t c = 0; c < 2 * state.num_modes; ++c) {
      const double expected = (c == e + i) ? 1.0 : 0.0;
      vacuum = vacuum && std::abs(value_of(state.cov(e + i, c)) - expected) <= tol;
    }
    if (!vacuum) throw std::invalid_argument("apply_loss_via_env: environment mode is not in vacuum");
  }
  return apply_beamsplitter(std::move(state), mode, env_mode, T(std::acos(std::sqrt(eta))), T(0.0));
}

/// Pure-loss channel on one mode, acting directly on the reduced moments.
template <class T>
GaussianState<T> apply_loss_channel(GaussianState<T> state, std::size_t mode, double eta) {
  detail::check_transmissivity(eta, "apply_loss_channel");
  detail::check_mode(state.num_modes, mode, "apply_loss_channel");
  const double g = std::sqrt(eta);
  const std::size_t n = 2 * state.num_modes;
  const std::size_t a = 2 * mode;
  for (std::size_t i = a; i < a + 2; ++i) {
    state.mean[i] *= g;
    for (std::size_t c = 0; c < n; ++c) {
      if (c == a || c == a + 1) continue;
      state.cov(i, c) *= g;
      state.cov(c, i) *= g;
    }
  }
  for (std::size_t i = a; i < a + 2; ++i)
    for (std::size_t j = a; j < a + 2; ++j)
      state.cov(i, j) = eta * state.cov(i, j) + ((i == j) ? 1.0 - eta : 0.0);
  return state;
}

/// Traces out `mode`, returning the (M-1)-mode marginal.
template <class T>
GaussianState<T> discard_mode(const GaussianState<T>& state, std::size_t mode) {
  detail::check_mode(state.num_modes, mode, "discard_mode");
  if (state.num_modes == 1) throw std::invalid_argument("discard_mode: cannot discard the only mode");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < 2 * state.num_modes; ++i)
    if (i / 2 != mode) keep.push_back(i);
  GaussianState<T> out{state.num_modes - 1, {}, Matrix<T>(keep.size(), keep.size())};
  for (std::size_t i = 0; i < keep.size(); ++i) {
    out.mean.push_back(state.mean[keep[i]]);
    for (std::size_t j = 0; j < keep.size(); ++j) out.cov(i, j) = state.cov(keep[i], keep[j]);
  }
  return out;
}

template <class T>
T mean_x(const GaussianState<T>& state, std::size_t mode) {
  detail::check_mode(state.num_modes, mode, "mean_x");
  return state.mean[2 * mode];
}

template <class T>
T mean_p(const GaussianState<T>& state, std::size_t mode) {
  detail::check_mode(state.num_modes, mode, "mean_p");
  return state.mean[2 * mode + 1];
}

/// Value projection of a dual-valued state.
inline State values_of(const GaussianState<Dual>& s) {
  State out{s.num_modes, {}, Matrix<double>(s.cov.rows(), s.cov.cols())};
  for (const auto& m : s.mean) out.mean.push_back(m.value());
  for (std::size_t r = 0; r < s.cov.rows(); ++r)
    for (std::size_t c = 0; c < s.cov.cols(); ++c) out.cov(r, c) = s.cov(r, c).value();
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

/// Symplectic spectrum of a covariance matrix, ascending, one value per mode.
inline std::vector<double> symplectic_eigenvalues(const Matrix<double>& cov) {
  const std::size_t n = cov.rows();
  const auto omega = symplectic_form(n / 2);
  Eigen::MatrixXd sigma(n, n), om(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      sigma(r, c) = cov(r, c);
      om(r, c) = omega(r, c);
    }
  // K = sqrt(cov) Omega sqrt(cov) is antisymmetric with spectrum +-i nu, so its
  // singular values are the nu, each appearing twice.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> cov_eig(sigma);
  const Eigen::VectorXd root = cov_eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd half = cov_eig.eigenvectors() * root.asDiagonal() * cov_eig.eigenvectors().transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(half * om * half);
  std::vector<double> nu(svd.singularValues().data(), svd.singularValues().data() + n);
  std::sort(nu.begin(), nu.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < n; i += 2) out.push_back(0.5 * (nu[i] + nu[i + 1]));
  return out;
}

/// Checks symmetry, finiteness and the uncertainty principle; throws on violation.
inline void validate(const State& state) {
  const std::size_t n = 2 * state.num_modes;
  if (state.num_modes == 0 || state.mean.size() != n || state.cov.rows() != n || state.cov.cols() != n)
    throw std::invalid_argument("GaussianState: inconsistent dimensions");
  for (double m : state.mean)
    if (!std::isfinite(m)) throw std::invalid_argument("GaussianState: non-finite mean");
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      if (!std::isfinite(state.cov(r, c))) throw std::invalid_argument("GaussianState: non-finite covariance");
      if (std::abs(state.cov(r, c) - state.cov(c, r)) > 1e-12)
        throw std::invalid_argument("GaussianState: covariance not symmetric");
    }
  for (double nu : symplectic_eigenvalues(state.cov))
    if (nu < 1.0 - 1e-9) throw std::invalid_argument("GaussianState: symplectic eigenvalue below 1");
}

/// Entanglement degradation of the single-mode pure-loss channel,
/// min{det N / (1 + det X)^2, 1} with X = sqrt(eta) I and N = (1 - eta) I.
inline double entanglement_degradation(double eta) {
  detail::check_transmissivity(eta, "entanglement_degradation");
  const double det_x = eta;
  const double det_n = (1.0 - eta) * (1.0 - eta);
  return std::min(det_n / ((1.0 + det_x) * (1.0 + det_x)), 1.0);
}

}  // namespace difga
