#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace smms::ode {

struct Options {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
  double h_min = 1e-14;
  long max_steps = 5'000'000;
};

// dy = f(t, y). A DomainError thrown from here rejects the trial step.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

// Fires when the value drops to <= 0 after being positive.
using Event = std::function<double(double t, std::span<const double> y)>;

enum class Status { reached, event, failed };

// Adaptive Dormand-Prince 5(4) integrator with step-size carry-over between
// calls to advance() and bisection-located stopping events.
class Integrator {
 public:
  Integrator(Rhs rhs, std::size_t size, Options opts = {});

  void reset(double t0, std::span<const double> y0);

  double t() const { return t_; }
  std::span<const double> y() const { return y_; }
  std::size_t steps() const { return steps_; }
  std::size_t rejected() const { return rejected_; }
  const std::string& failure() const { return failure_; }
  // Time at which the last event fired (first sample with event <= 0).
  double event_time() const { return event_time_; }

  Status advance(double t_target, const Event* event = nullptr);

 private:
  // One trial step of size h from the current state. Returns false when the
  // right-hand side rejected a stage.
  bool trial(double h, std::vector<double>& y_out, double* err);
  double error_norm(std::span<const double> y_new) const;
  double initial_step(double span);

  Rhs rhs_;
  Options opts_;
  std::size_t n_;
  double t_ = 0.0;
  double h_ = 0.0;
  double event_time_ = 0.0;
  std::vector<double> y_;
  std::vector<double> k_[7];
  std::vector<double> tmp_, y_new_, y_err_;
  bool k1_valid_ = false;
  std::size_t steps_ = 0;
  std::size_t rejected_ = 0;
  std::string failure_;
};

}  // namespace smms::ode
