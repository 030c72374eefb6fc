#include "smms/ode.hpp"

#include <algorithm>
#include <cmath>

#include "smms/error.hpp"

namespace smms::ode {
namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

Integrator::Integrator(Rhs rhs, std::size_t size, Options opts)
    : rhs_(std::move(rhs)), opts_(opts), n_(size), y_(size), tmp_(size), y_new_(size), y_err_(size) {
  for (auto& k : k_) k.assign(size, 0.0);
}

void Integrator::reset(double t0, std::span<const double> y0) {
  t_ = t0;
  std::copy(y0.begin(), y0.end(), y_.begin());
  h_ = 0.0;
  k1_valid_ = false;
  steps_ = rejected_ = 0;
  failure_.clear();
}

bool Integrator::trial(double h, std::vector<double>& y_out, double* err) {
  auto stage = [&](int idx, double c, auto&& combine) -> bool {
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y_[i] + h * combine(i);
    try {
      rhs_(t_ + c * h, tmp_, k_[idx]);
    } catch (const DomainError&) {
      return false;
    }
    return true;
  };
  if (!k1_valid_) {
    try {
      rhs_(t_, y_, k_[0]);
    } catch (const DomainError& e) {
      failure_ = e.what();
      return false;
    }
    k1_valid_ = true;
  }
  const auto& k1 = k_[0];
  const auto& k2 = k_[1];
  const auto& k3 = k_[2];
  const auto& k4 = k_[3];
  const auto& k5 = k_[4];
  const auto& k6 = k_[5];
  if (!stage(1, c2, [&](std::size_t i) { return a21 * k1[i]; })) return false;
  if (!stage(2, c3, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; })) return false;
  if (!stage(3, c4, [&](std::size_t i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; })) return false;
  if (!stage(4, c5, [&](std::size_t i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; }))
    return false;
  if (!stage(5, 1.0, [&](std::size_t i) {
        return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
      }))
    return false;
  for (std::size_t i = 0; i < n_; ++i)
    y_out[i] = y_[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  if (err == nullptr) return true;
  try {
    rhs_(t_ + h, y_out, k_[6]);
  } catch (const DomainError&) {
    return false;
  }
  for (std::size_t i = 0; i < n_; ++i)
    y_err_[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k_[6][i]);
  *err = error_norm(y_out);
  return std::isfinite(*err);
}

double Integrator::error_norm(std::span<const double> y_new) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
    const double r = y_err_[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(n_));
}

double Integrator::initial_step(double span) {
  if (!k1_valid_) {
    rhs_(t_, y_, k_[0]);
    k1_valid_ = true;
  }
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sc = opts_.atol + opts_.rtol * std::abs(y_[i]);
    d0 += (y_[i] / sc) * (y_[i] / sc);
    d1 += (k_[0][i] / sc) * (k_[0][i] / sc);
  }
  d0 = std::sqrt(d0 / n_);
  d1 = std::sqrt(d1 / n_);
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min({h, std::abs(span), opts_.h_max});
  return std::max(h, 1e-12 * std::max(1.0, std::abs(t_)));
}

Status Integrator::advance(double t_target, const Event* event) {
  if (t_target <= t_) return Status::reached;
  if (h_ <= 0.0) {
    try {
      h_ = initial_step(t_target - t_);
    } catch (const DomainError& e) {
      failure_ = e.what();
      return Status::failed;
    }
  }
  while (t_ < t_target) {
    if (steps_ + rejected_ > static_cast<std::size_t>(opts_.max_steps)) {
      failure_ = "step budget exhausted";
      return Status::failed;
    }
    const double remaining = t_target - t_;
    bool last = false;
    const double h_planned = std::min(h_, opts_.h_max);
    double h = h_planned;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }
    double err = 0.0;
    const bool ok = trial(h, y_new_, &err);
    if (!ok || err > 1.0) {
      ++rejected_;
      const double shrink = ok ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      h_ = h * shrink;
      if (h_ < opts_.h_min * std::max(1.0, std::abs(t_))) {
        if (failure_.empty()) failure_ = "step size underflow";
        return Status::failed;
      }
      continue;
    }
    ++steps_;
    const double grow = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    const double t_new = last ? t_target : t_ + h;

    if (event != nullptr && (*event)(t_new, y_new_) <= 0.0) {
      // Bisect on the step length with untimed single steps from the
      // accepted state; keep the last state where the event is positive.
      double lo = 0.0, hi = h;
      std::vector<double> probe(n_);
      for (int it = 0; it < 200 && hi - lo > 4e-16 * std::max(1.0, std::abs(t_)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!trial(mid, probe, nullptr) || (*event)(t_ + mid, probe) <= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      if (lo > 0.0 && trial(lo, probe, nullptr)) {
        y_ = probe;
        t_ += lo;
        k1_valid_ = false;
      }
      event_time_ = t_ + (hi - lo);
      return Status::event;
    }

    std::swap(y_, y_new_);
    std::swap(k_[0], k_[6]);  // FSAL
    t_ = t_new;
    // A step truncated to hit t_target says nothing about the scale of the
    // next interval; carry the planned size forward instead.
    h_ = (last && h < h_planned) ? h_planned : h * grow;
  }
  return Status::reached;
}

}  // namespace smms::ode
