#include "smms/comparison.hpp"

#include <cmath>
#include <numbers>

#include "smms/error.hpp"
#include "smms/kernels.hpp"
#include "smms/quadrature.hpp"

namespace smms {
namespace {

void check_k(double k) {
  if (!(k > 1.0)) throw DomainError("k must exceed 1");
}

ComparisonVerdict verdict(std::string quantity, const RadialTransport& t, const kernels::ArgMax& best,
                          std::size_t samples, double tol) {
  ComparisonVerdict v;
  v.quantity = std::move(quantity);
  v.tolerance = tol;
  v.samples = samples;
  if (best.found()) {
    v.max_violation = best.value;
    v.witness.index = best.index;
    v.witness.r = t.r[best.index];
    v.witness.x = t.geodesic.samples[best.index].position;
  } else {
    v.max_violation = -std::numeric_limits<double>::infinity();
  }
  if (t.df_dr_min < 0.0) v.hypothesis_flags.push_back("df/dr < 0 along the normal geodesic");
  if (t.H_f < 0.0) v.hypothesis_flags.push_back("H_f < 0 at the start point");
  return v;
}

}  // namespace

double model_mean_curvature(double H_f, double k, double r) {
  check_k(k);
  const double denom = k - 1.0 + H_f * r;
  if (!(denom > 0.0)) throw DomainError("model_mean_curvature: model blows down before r");
  return (k - 1.0) * H_f / denom;
}

double auxiliary_h(double H_f, int n, double r) {
  if (n < 2) throw DomainError("auxiliary_h: n must be >= 2");
  return (n - 1.0) + H_f * r;
}

ComparisonVerdict compare_mean_curvature(const RadialTransport& transport, double H_f, double k, double tol) {
  check_k(k);
  if (transport.size() == 0) throw DomainError("compare_mean_curvature: empty transport");
  std::vector<double> mf, m0;
  for (std::size_t i = 0; i < transport.size(); ++i) {
    if (!(k - 1.0 + H_f * transport.r[i] > 0.0)) break;
    mf.push_back(transport.m_f[i]);
    m0.push_back(model_mean_curvature(H_f, k, transport.r[i]));
  }
  return verdict("m_f <= m0", transport, kernels::max_difference(mf, m0), mf.size(), tol);
}

ComparisonVerdict check_theta_monotone(const RadialTransport& transport, double tol) {
  if (transport.size() < 2) throw DomainError("check_theta_monotone: need at least 2 samples");
  std::size_t valid = 0;
  while (valid < transport.size() && std::isfinite(transport.theta[valid])) ++valid;
  auto best = kernels::max_increase(std::span<const double>(transport.theta.data(), valid));
  if (best.found()) ++best.index;  // report the later sample of the pair
  return verdict("theta nonincreasing", transport, best, valid, tol);
}

ComparisonVerdict check_volume_element_bound(const RadialTransport& transport, double H_f, double k, double f_at,
                                             double tol) {
  check_k(k);
  if (transport.size() == 0) throw DomainError("check_volume_element_bound: empty transport");
  std::vector<double> scaled, bound_scaled;
  const double w = std::exp(-f_at);
  for (std::size_t i = 0; i < transport.size(); ++i) {
    const double base = 1.0 + H_f * transport.r[i] / (k - 1.0);
    const double bound = base > 0.0 ? w * std::pow(base, k - 1.0) : 0.0;
    const double scale = std::max(1.0, bound);
    scaled.push_back(transport.A_f[i] / scale);
    bound_scaled.push_back(bound / scale);
  }
  return verdict("A_f <= volume element bound", transport, kernels::max_difference(scaled, bound_scaled),
                 scaled.size(), tol);
}

double willmore_gap(double lhs, double avr, double k) {
  if (!(k >= 2.0)) throw DomainError("willmore_gap: k must be >= 2");
  return lhs - unit_sphere_area(k) * avr;
}

double myers_diameter_bound(int n, double N, double H) {
  if (n < 2) throw DomainError("myers_diameter_bound: n must be >= 2");
  if (!(N > 0.0)) throw DomainError("myers_diameter_bound: N must be positive");
  if (!(H > 0.0)) throw DomainError("myers_diameter_bound: H must be positive");
  return std::sqrt((n + N - 1.0) / (n - 1.0)) * std::numbers::pi / std::sqrt(H);
}

}  // namespace smms
