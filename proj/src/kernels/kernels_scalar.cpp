#include <cmath>

#include "smms/kernels.hpp"

namespace smms::kernels::detail {
namespace {

constexpr std::size_t kLanes = 4;

inline void neumaier(double& s, double& c, double x) {
  const double t = s + x;
  if (std::fabs(s) >= std::fabs(x))
    c += (s - t) + x;
  else
    c += (x - t) + s;
  s = t;
}

double dot_scalar(const double* v, const double* w, std::size_t n) {
  double s[kLanes] = {0.0, 0.0, 0.0, 0.0};
  double c[kLanes] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) {
    const double p = v[i] * w[i];
    neumaier(s[i % kLanes], c[i % kLanes], p);
  }
  // Fold the lanes with the same compensated step.
  double total = s[0], comp = c[0] + c[1] + c[2] + c[3];
  for (std::size_t l = 1; l < kLanes; ++l) neumaier(total, comp, s[l]);
  return total + comp;
}

ArgMax max_difference_scalar(const double* a, const double* b, std::size_t n) {
  ArgMax best;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    if (d > best.value || (!best.found() && d == best.value)) {
      best.value = d;
      best.index = i;
    }
  }
  return best;
}

}  // namespace

const Table& scalar_table() {
  static const Table t{dot_scalar, max_difference_scalar};
  return t;
}

}  // namespace smms::kernels::detail
