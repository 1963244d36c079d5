#pragma once

// Forward-mode dual numbers carrying a dense tangent vector.
//
// A Dual holds a value and one tangent slot per independent parameter.
// Binary operations between two duals require equal tangent lengths, except
// that a dual with an empty tangent vector acts as a constant.  Constants are
// therefore cheap: `Dual{3.0}` allocates nothing.

#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace difga {

class Dual {
 public:
  Dual() = default;
  Dual(double value) : value_(value) {}  // NOLINT: implicit constant promotion
  Dual(double value, std::vector<double> tangents)
      : value_(value), tangents_(std::move(tangents)) {}

  static Dual variable(double value, std::size_t slot, std::size_t num_slots) {
    if (slot >= num_slots) throw std::out_of_range("Dual::variable: slot out of range");
    std::vector<double> t(num_slots, 0.0);
    t[slot] = 1.0;
    return Dual(value, std::move(t));
  }

  double value() const { return value_; }
  const std::vector<double>& tangents() const { return tangents_; }
  std::size_t size() const { return tangents_.size(); }
  bool is_constant() const { return tangents_.empty(); }

  /// Tangent in `slot`; constants report zero for every slot.
  double tangent(std::size_t slot) const {
    return slot < tangents_.size() ? tangents_[slot] : 0.0;
  }

  Dual& operator+=(const Dual& o) {
    value_ += o.value_;
    axpy(1.0, o);
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    value_ -= o.value_;
    axpy(-1.0, o);
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    // d(ab) = a db + b da
    for (auto& t : tangents_) t *= o.value_;
    axpy(value_, o);
    value_ *= o.value_;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.value_;
    const double q = value_ * inv;
    for (auto& t : tangents_) t *= inv;
    axpy(-q * inv, o);
    value_ = q;
    return *this;
  }

  Dual operator-() const {
    Dual r(*this);
    r.value_ = -r.value_;
    for (auto& t : r.tangents_) t = -t;
    return r;
  }

  /// f(x) with known derivative df at x.
  Dual chain(double f, double df) const {
    Dual r(f, tangents_);
    for (auto& t : r.tangents_) t *= df;
    return r;
  }

 private:
  void axpy(double a, const Dual& o) {
    if (o.tangents_.empty()) return;
    if (tangents_.empty()) {
      tangents_.assign(o.tangents_.size(), 0.0);
    } else if (tangents_.size() != o.tangents_.size()) {
      throw std::invalid_argument("Dual: tangent length mismatch");
    }
    for (std::size_t i = 0; i < tangents_.size(); ++i) tangents_[i] += a * o.tangents_[i];
  }

  double value_ = 0.0;
  std::vector<double> tangents_;
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline Dual operator+(Dual a, double b) { return a += Dual(b); }
inline Dual operator+(double a, Dual b) { return b += Dual(a); }
inline Dual operator-(Dual a, double b) { return a -= Dual(b); }
inline Dual operator-(double a, const Dual& b) { return Dual(a) -= b; }
inline Dual operator*(Dual a, double b) {
  return a *= Dual(b);
}
inline Dual operator*(double a, Dual b) { return b *= Dual(a); }
inline Dual operator/(Dual a, double b) { return a /= Dual(b); }
inline Dual operator/(double a, const Dual& b) { return Dual(a) /= b; }

inline bool operator<(const Dual& a, const Dual& b) { return a.value() < b.value(); }
inline bool operator>(const Dual& a, const Dual& b) { return a.value() > b.value(); }
inline bool operator==(const Dual& a, const Dual& b) { return a.value() == b.value(); }

inline Dual sin(const Dual& x) { return x.chain(std::sin(x.value()), std::cos(x.value())); }
inline Dual cos(const Dual& x) { return x.chain(std::cos(x.value()), -std::sin(x.value())); }
inline Dual sinh(const Dual& x) { return x.chain(std::sinh(x.value()), std::cosh(x.value())); }
inline Dual cosh(const Dual& x) { return x.chain(std::cosh(x.value()), std::sinh(x.value())); }
inline Dual exp(const Dual& x) {
  const double e = std::exp(x.value());
  return x.chain(e, e);
}
inline Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value());
  return x.chain(s, 0.5 / s);
}
inline Dual acos(const Dual& x) {
  const double v = x.value();
  return x.chain(std::acos(v), -1.0 / std::sqrt(1.0 - v * v));
}

inline std::ostream& operator<<(std::ostream& os, const Dual& x) {
  os << x.value() << " [";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x.tangents()[i];
  return os << ']';
}

/// Value part of a scalar, for code templated on double or Dual.
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.value(); }

}  // namespace difga
