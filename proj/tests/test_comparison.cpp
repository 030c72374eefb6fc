#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "smms/comparison.hpp"
#include "smms/error.hpp"
#include "smms/hypersurface.hpp"
#include "smms/models.hpp"
#include "smms/quadrature.hpp"
#include "support.hpp"

using namespace smms;
using namespace smms::testing;
using doctest::Approx;

namespace {

struct Run {
  ShapeData sd;
  RadialTransport t;
};

Run transport_from(const ModelSpec& spec, const Vec& u, double r_max, int points = 1000) {
  const BuiltModel m = build_model(spec);
  Run run{shape_data(*m.embedding, m.smms, u), {}};
  run.t = radial_transport(m.smms, run.sd.transport_start(), r_max, points);
  return run;
}

}  // namespace

TEST_CASE("model mean curvature") {
  CHECK(model_mean_curvature(1.7, 3.5, 0.0) == Approx(1.7));
  CHECK(model_mean_curvature(2.0, 4.0, 3.0) == Approx(6.0 / 9.0));
  CHECK(model_mean_curvature(0.0, 3.0, 100.0) == 0.0);
  CHECK_THROWS_AS(model_mean_curvature(-1.0, 3.0, 2.0), DomainError);
  CHECK_THROWS_AS(model_mean_curvature(1.0, 1.0, 2.0), DomainError);
  // Riccati identity m0' + m0^2/(k-1) = 0 by finite differences.
  const double H = 1.3, k = 4.5, r = 0.8;
  const double m0 = model_mean_curvature(H, k, r);
  CHECK(observed_order([&](double x) { return model_mean_curvature(H, k, x); }, r, -m0 * m0 / (k - 1)) >= 2.0);
}

TEST_CASE("auxiliary h") {
  CHECK(auxiliary_h(5.0, 4, 0.0) == 3.0);
  CHECK(auxiliary_h(3.0, 3, 2.0) == 8.0);
  CHECK(auxiliary_h(0.0, 5, 17.0) == 4.0);
  CHECK_THROWS_AS(auxiliary_h(1.0, 1, 1.0), DomainError);
  // (h^2)' = 2/(n-1) h^2 m0 with k = n.
  const int n = 3;
  const double H = 0.9, r = 1.4;
  auto h2 = [&](double x) { return auxiliary_h(H, n, x) * auxiliary_h(H, n, x); };
  CHECK(observed_order(h2, r, 2.0 / (n - 1) * h2(r) * model_mean_curvature(H, n, r)) >= 2.0);
}

TEST_CASE("flat equality case") {
  const Run run = transport_from({"euclidean", {{"n", 3.0}}}, make_vec({1.0, 1.0}), 10.0);
  const auto m = compare_mean_curvature(run.t, run.sd.H_f, 3.0, 1e-9);
  CHECK(m.holds());
  CHECK(std::abs(m.max_violation) <= 1e-9);
  const auto th = check_theta_monotone(run.t, 1e-9);
  CHECK(th.holds());
  CHECK(std::abs(th.max_violation) <= 1e-9);
  const auto b = check_volume_element_bound(run.t, run.sd.H_f, 3.0, run.sd.f_at, 1e-9);
  CHECK(b.holds());
  CHECK(std::abs(b.max_violation) <= 1e-9);
  CHECK(m.samples == run.t.size());
}

TEST_CASE("unit S3 geodesic sphere is strictly inside the model") {
  const Run run = transport_from({"sphere_ambient", {{"n", 3.0}, {"r0", kPi / 4}}}, make_vec({1.0, 1.0}), 2.0);
  // The first sample is the shared initial value; beyond it the gap is strict.
  double worst = -1;
  for (std::size_t i = 1; i < run.t.size(); ++i)
    worst = std::max(worst, run.t.m_f[i] - model_mean_curvature(run.sd.H_f, 3.0, run.t.r[i]));
  CHECK(worst < 0.0);
  CHECK(compare_mean_curvature(run.t, run.sd.H_f, 3.0, 1e-7).holds());
  const auto th = check_theta_monotone(run.t, 1e-7);
  CHECK(th.holds());
  CHECK(th.max_violation < 0.0);
  const auto b = check_volume_element_bound(run.t, run.sd.H_f, 3.0, run.sd.f_at, 1e-7);
  CHECK(b.holds());
  for (std::size_t i = 1; i < run.t.size(); ++i) {
    const double bound = std::pow(1.0 + run.sd.H_f * run.t.r[i] / 2.0, 2.0);
    CHECK(run.t.A_f[i] < bound);
  }
}

TEST_CASE("gaussian soliton sphere") {
  const Run run = transport_from({"gaussian_soliton", {{"n", 3.0}, {"lambda", 1.0}, {"radius", 1.0}}},
                                 make_vec({0.7, 3.0}), 5.0);
  CHECK(run.t.df_dr_min >= 0.0);
  const auto m = compare_mean_curvature(run.t, run.sd.H_f, 3.0, 1e-7);
  CHECK(m.holds());
  CHECK(m.hypothesis_flags.empty());
  CHECK(check_theta_monotone(run.t, 1e-7).holds());
  CHECK(check_volume_element_bound(run.t, run.sd.H_f, 3.0, run.sd.f_at, 1e-7).holds());
}

TEST_CASE("equality cone model keeps theta at exp(-f)") {
  const Run run = transport_from({"cone_power_density", {{"n", 3.0}, {"N", 2.0}, {"r0", 1.0}}},
                                 make_vec({1.1, 0.5}), 1000.0, 1001);
  double worst = 0;
  for (double t : run.t.theta) worst = std::max(worst, std::abs(t - std::exp(-run.sd.f_at)));
  CHECK(worst <= 1e-7);
  CHECK(compare_mean_curvature(run.t, run.sd.H_f, 5.0, 1e-7).holds());
}

TEST_CASE("violations carry witnesses") {
  // A hyperbolic ambient breaks the comparison: m_f exceeds the model value.
  const BuiltModel m = build_model({"warped_custom", {{"n", 3.0}, {"w", std::string("sinh(r)")}, {"r0", 1.0}}});
  const ShapeData sd = shape_data(*m.embedding, m.smms, make_vec({1.0, 1.0}));
  const RadialTransport t = radial_transport(m.smms, sd.transport_start(), 3.0, 301);
  const auto v = compare_mean_curvature(t, sd.H_f, 3.0, 1e-7);
  CHECK_FALSE(v.holds());
  CHECK(v.witness.r > 0.0);
  CHECK(v.witness.x.size() == 3);
  CHECK(v.max_violation == Approx(t.m_f[v.witness.index] - model_mean_curvature(sd.H_f, 3.0, v.witness.r)));
  CHECK_FALSE(check_theta_monotone(t, 1e-7).holds());
  RadialTransport empty;
  CHECK_THROWS_AS(compare_mean_curvature(empty, 1.0, 3.0, 1e-7), DomainError);
  CHECK_THROWS_AS(check_theta_monotone(empty, 1e-7), DomainError);
}

TEST_CASE("willmore gap") {
  CHECK(willmore_gap(4 * kPi, 1.0, 3.0) == Approx(0.0).scale(1.0));
  CHECK(willmore_gap(0.0, 0.0, 4.0) == 0.0);
  CHECK(std::abs(willmore_gap(4 * kPi, 3.0 / (2 * kPi), 5.0)) < 1e-12);
  CHECK(unit_sphere_area(5.0) == Approx(8 * kPi * kPi / 3));
  CHECK_THROWS_AS(willmore_gap(1.0, 1.0, 1.5), DomainError);
}

TEST_CASE("myers diameter bound") {
  CHECK(std::abs(myers_diameter_bound(3, 2.0, 1.0) - kPi * std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(myers_diameter_bound(2, 1.0, 1.0) - kPi * std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(myers_diameter_bound(3, 2.0, 4.0) - kPi * std::sqrt(2.0) / 2) <= 1e-12);
  CHECK_THROWS_AS(myers_diameter_bound(3, 2.0, 0.0), DomainError);
  CHECK_THROWS_AS(myers_diameter_bound(3, 0.0, 1.0), DomainError);
}
