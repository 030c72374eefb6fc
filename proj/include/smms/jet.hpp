#pragma once

#include <array>
#include <cassert>
#include <cmath>

#include "smms/linalg.hpp"

namespace smms {

// Second-order forward-mode number: a value together with its gradient and
// Hessian with respect to up to kMaxDim seeded variables.
//
// A jet of dimension 0 is a constant and combines with jets of any
// dimension. Hessians are stored packed (upper triangle).
class Jet {
 public:
  static constexpr int kCap = kMaxDim;
  static constexpr int kPacked = kCap * (kCap + 1) / 2;

  constexpr Jet() = default;
  constexpr Jet(double value) : val_(value) {}  // NOLINT: implicit constants are the point

  static Jet variable(int dim, int index, double value) {
    assert(dim <= kCap && index < dim);
    Jet j(value);
    j.dim_ = dim;
    j.grad_[index] = 1.0;
    return j;
  }

  int dim() const { return dim_; }
  double value() const { return val_; }
  double d(int i) const { return grad_[i]; }
  double dd(int i, int j) const { return hess_[packed(i, j)]; }

  Vec gradient() const {
    Vec g(dim_);
    for (int i = 0; i < dim_; ++i) g(i) = grad_[i];
    return g;
  }
  Mat hessian() const {
    Mat h(dim_, dim_);
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) h(i, j) = dd(i, j);
    return h;
  }

  // Chain rule for a scalar function with derivatives (f0, f1, f2) at value().
  Jet compose(double f0, double f1, double f2) const {
    Jet r(f0);
    r.dim_ = dim_;
    for (int i = 0; i < dim_; ++i) r.grad_[i] = f1 * grad_[i];
    for (int j = 0; j < dim_; ++j)
      for (int i = 0; i <= j; ++i) {
        const int p = packed(i, j);
        r.hess_[p] = f1 * hess_[p] + f2 * grad_[i] * grad_[j];
      }
    return r;
  }

  Jet operator-() const { return compose(-val_, -1.0, 0.0); }

  Jet& operator+=(const Jet& o) {
    widen(o);
    val_ += o.val_;
    for (int i = 0; i < o.dim_; ++i) grad_[i] += o.grad_[i];
    for (int p = 0; p < npacked(o.dim_); ++p) hess_[p] += o.hess_[p];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    widen(o);
    val_ -= o.val_;
    for (int i = 0; i < o.dim_; ++i) grad_[i] -= o.grad_[i];
    for (int p = 0; p < npacked(o.dim_); ++p) hess_[p] -= o.hess_[p];
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    *this = *this * o;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    *this = *this / o;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(a.val_ * b.val_);
    r.dim_ = a.dim_ > b.dim_ ? a.dim_ : b.dim_;
    for (int i = 0; i < r.dim_; ++i) r.grad_[i] = a.val_ * b.grad_[i] + b.val_ * a.grad_[i];
    for (int j = 0; j < r.dim_; ++j)
      for (int i = 0; i <= j; ++i) {
        const int p = packed(i, j);
        r.hess_[p] = a.val_ * b.hess_[p] + b.val_ * a.hess_[p] + a.grad_[i] * b.grad_[j] +
                     a.grad_[j] * b.grad_[i];
      }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    const double inv = 1.0 / b.val_;
    return a * b.compose(inv, -inv * inv, 2.0 * inv * inv * inv);
  }

 private:
  static constexpr int packed(int i, int j) {
    return i <= j ? j * (j + 1) / 2 + i : i * (i + 1) / 2 + j;
  }
  static constexpr int npacked(int dim) { return dim * (dim + 1) / 2; }

  void widen(const Jet& o) {
    if (o.dim_ > dim_) dim_ = o.dim_;
  }

  int dim_ = 0;
  double val_ = 0.0;
  std::array<double, kCap> grad_{};
  std::array<double, kPacked> hess_{};
};

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(s, c, -s);
}
inline Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return a.compose(c, -s, -c);
}
inline Jet tan(const Jet& a) {
  const double t = std::tan(a.value());
  const double sec2 = 1.0 + t * t;
  return a.compose(t, sec2, 2.0 * t * sec2);
}
inline Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return a.compose(e, e, e);
}
inline Jet log(const Jet& a) {
  const double x = a.value();
  return a.compose(std::log(x), 1.0 / x, -1.0 / (x * x));
}
inline Jet sqrt(const Jet& a) {
  const double s = std::sqrt(a.value());
  return a.compose(s, 0.5 / s, -0.25 / (s * a.value()));
}
inline Jet sinh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return a.compose(s, c, s);
}
inline Jet cosh(const Jet& a) {
  const double s = std::sinh(a.value()), c = std::cosh(a.value());
  return a.compose(c, s, c);
}
inline Jet abs(const Jet& a) {
  const double sg = a.value() < 0.0 ? -1.0 : 1.0;
  return a.compose(std::abs(a.value()), sg, 0.0);
}
// Real exponent. pow(0, p) keeps finite derivatives only when p is 0, 1 or >= 2.
inline Jet pow(const Jet& a, double p) {
  const double x = a.value();
  if (p == 0.0) return a.compose(1.0, 0.0, 0.0);
  if (p == 1.0) return a;
  if (p == 2.0) return a.compose(x * x, 2.0 * x, 2.0);
  return a.compose(std::pow(x, p), p * std::pow(x, p - 1.0), p * (p - 1.0) * std::pow(x, p - 2.0));
}
inline Jet pow(const Jet& a, const Jet& b) { return exp(b * log(a)); }
inline Jet square(const Jet& a) { return a * a; }

}  // namespace smms
