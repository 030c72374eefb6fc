#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "smms/certify.hpp"
#include "smms/error.hpp"
#include "smms/geodesic.hpp"
#include "smms/models.hpp"
#include "smms/ode.hpp"
#include "smms/transport.hpp"
#include "support.hpp"

using namespace smms;
using namespace smms::testing;
using doctest::Approx;

namespace {

DensityField radial_density(int n, std::function<Jet(const Jet&)> f) {
  return DensityField(n, [f](std::span<const Jet> x) {
    Jet s(0.0);
    for (const Jet& xi : x) s = s + xi * xi;
    return f(sqrt(s));
  });
}

Smms flat_smms(int n, DensityField f, Weight w = Weight::infinite()) {
  return Smms{flat_metric(n), std::move(f), w, BasePoint{ChartPoint::Zero(n), false}};
}

}  // namespace

TEST_CASE("jet arithmetic carries exact first and second derivatives") {
  const Jet x = Jet::variable(2, 0, 0.7), y = Jet::variable(2, 1, -0.3);
  const Jet f = sin(x) * exp(y) + x / (1.0 + y * y);
  CHECK(f.value() == Approx(std::sin(0.7) * std::exp(-0.3) + 0.7 / 1.09));
  CHECK(f.d(0) == Approx(std::cos(0.7) * std::exp(-0.3) + 1 / 1.09));
  CHECK(f.dd(0, 0) == Approx(-std::sin(0.7) * std::exp(-0.3)));
  CHECK(f.dd(0, 1) == Approx(std::cos(0.7) * std::exp(-0.3) - 2 * -0.3 / (1.09 * 1.09)));
  CHECK(f.dd(0, 1) == f.dd(1, 0));
}

TEST_CASE("jet derivatives converge to finite differences at order two or better") {
  using F = std::function<Jet(const Jet&)>;
  const std::vector<std::pair<const char*, F>> fns{
      {"sin*exp", [](const Jet& x) { return sin(x) * exp(0.5 * x); }},
      {"log", [](const Jet& x) { return log(1.0 + x * x); }},
      {"sqrt", [](const Jet& x) { return sqrt(2.0 + x); }},
      {"tan", [](const Jet& x) { return tan(0.3 * x); }},
      {"sinh/cosh", [](const Jet& x) { return sinh(x) / cosh(x); }},
      {"pow", [](const Jet& x) { return pow(1.5 + x, 2.7); }},
      {"pow jet", [](const Jet& x) { return pow(1.5 + x, x); }},
      {"abs", [](const Jet& x) { return abs(x - 2.0); }},
  };
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> pick(-0.8, 0.8);
  for (const auto& [name, f] : fns)
    for (int trial = 0; trial < 5; ++trial) {
      const double x0 = pick(rng);
      const Jet j = f(Jet::variable(1, 0, x0));
      auto value = [&](double x) { return f(Jet(x)).value(); };
      auto slope = [&](double x) { return f(Jet::variable(1, 0, x)).d(0); };
      INFO(name << " at " << x0);
      CHECK(observed_order(value, x0, j.d(0), 5e-2) >= 2.0);
      CHECK(observed_order(slope, x0, j.dd(0, 0), 5e-2) >= 2.0);
    }
}

TEST_CASE("christoffel symbols") {
  SUBCASE("flat metric has none") {
    const Christoffel c = christoffel(flat_metric(3), make_vec({0.3, -1.0, 2.0}));
    for (int k = 0; k < 3; ++k) CHECK(c[k].cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("polar plane at (2, 0)") {
    const Christoffel c = christoffel(polar_plane(), make_vec({2.0, 0.0}));
    CHECK(c[0](1, 1) == Approx(-2.0));
    CHECK(c[1](0, 1) == Approx(0.5));
    CHECK(c[1](1, 0) == c[1](0, 1));
    CHECK(c[0](0, 0) == 0.0);
    CHECK(c[0](0, 1) == 0.0);
    CHECK(c[1](0, 0) == 0.0);
    CHECK(c[1](1, 1) == 0.0);
  }
  SUBCASE("round S2 on the equator") {
    const Christoffel c = christoffel(round_s2(), make_vec({kPi / 2, 0.0}));
    CHECK(std::abs(c[0](1, 1)) < 1e-15);  // -sin cos
    CHECK(std::abs(c[1](0, 1)) < 1e-15);  // cot
  }
  SUBCASE("metric compatibility d_k g_ij = g(Gamma_k e_i, e_j) + g(e_i, Gamma_k e_j)") {
    const MetricField g = round_s3();
    const ChartPoint u = make_vec({0.9, 1.2, 0.4});
    const MetricSample s = g.sample(u);
    const Christoffel c = christoffel(g, u);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double rhs = 0.0;
          for (int l = 0; l < 3; ++l) rhs += s.g(l, j) * c[l](k, i) + s.g(i, l) * c[l](k, j);
          CHECK(s.dg[k](i, j) == Approx(rhs).epsilon(1e-12));
        }
  }
  SUBCASE("outside the chart") { CHECK_THROWS_AS(christoffel(polar_plane(), make_vec({-1.0, 0.0})), DomainError); }
}

TEST_CASE("metric derivatives agree with finite differences at order two or better") {
  const MetricField g = round_s3();
  const ChartPoint u = make_vec({0.8, 1.1, 0.3});
  const MetricSample s = g.sample(u);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        auto comp = [&](double x) {
          ChartPoint v = u;
          v(k) = x;
          return g.at(v)(i, j);
        };
        auto slope = [&](double x) {
          ChartPoint v = u;
          v(k) = x;
          return g.sample(v).dg[k](i, j);
        };
        if (std::abs(s.dg[k](i, j)) > 0 || std::abs(s.d2g[k][k](i, j)) > 0) {
          CHECK(observed_order(comp, u(k), s.dg[k](i, j), 5e-2) >= 2.0);
          CHECK(observed_order(slope, u(k), s.d2g[k][k](i, j), 5e-2) >= 2.0);
        }
      }
}

TEST_CASE("curvature operator") {
  SUBCASE("flat") {
    const Mat r = curvature_operator(flat_metric(3), make_vec({1, 2, 3}), make_vec({0.2, 0.5, -1}));
    CHECK(r.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("unit S3 is the identity on the complement") {
    const MetricField g = round_s3();
    const ChartPoint u = make_vec({1.0, 0.7, 2.0});
    const Mat gu = g.at(u);
    Vec v = make_vec({0.3, -0.4, 0.8});
    v /= std::sqrt(v.dot(gu * v));
    const Mat r = curvature_operator(g, u, v);
    CHECK((r - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("cosh-warped space has curvature -1 along radial directions") {
    const MetricField g = warped3([](const Jet& r) { return cosh(r); });
    const Mat r = curvature_operator(g, make_vec({0.8, 1.0, 0.5}), make_vec({1, 0, 0}));
    CHECK((r + Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("trace is Ric(v, v)") {
    const MetricField g = warped3([](const Jet& r) { return r + 0.3 * r * r * r; });
    const ChartPoint u = make_vec({0.9, 1.3, 0.2});
    const Mat gu = g.at(u);
    Vec v = make_vec({0.6, 0.2, 0.9});
    v /= std::sqrt(v.dot(gu * v));
    const double tr = curvature_operator(g, u, v).trace();
    CHECK(tr == Approx(ricci(g, u)(v, v)).epsilon(1e-10));
  }
  SUBCASE("zero vector") {
    CHECK_THROWS_AS(curvature_operator(flat_metric(2), make_vec({0, 0}), make_vec({0, 0})), DomainError);
  }
}

TEST_CASE("ricci") {
  SUBCASE("flat") { CHECK(ricci(flat_metric(4), make_vec({1, 2, 3, 4})).matrix.cwiseAbs().maxCoeff() == 0.0); }
  SUBCASE("round S2 is g at random samples") {
    const MetricField g = round_s2();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> th(0.05, kPi - 0.05), ph(0, 2 * kPi);
    for (int i = 0; i < 100; ++i) {
      const ChartPoint u = make_vec({th(rng), ph(rng)});
      const auto ric = ricci(g, u);
      CHECK((ric.matrix - ric.metric_at_base).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
  SUBCASE("round S3 is 2g and symmetric") {
    const auto ric = ricci(round_s3(), make_vec({1.1, 0.4, 5.0}));
    CHECK((ric.matrix - 2.0 * ric.metric_at_base).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((ric.matrix - ric.matrix.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * ric.matrix.cwiseAbs().maxCoeff());
  }
  SUBCASE("product S2 x R has no curvature along the line") {
    ChartDomain d{{{0.0, kPi, false}, {0.0, 2 * kPi, true}, {}}};
    MetricField g(3, d, [](std::span<const Jet> u, std::span<Jet> up) {
      for (auto& c : up) c = Jet(0.0);
      up[0] = Jet(1.0);
      up[3] = square(sin(u[0]));
      up[5] = Jet(1.0);
    });
    const auto ric = ricci(g, make_vec({1.0, 2.0, 3.0}));
    CHECK(std::abs(ric.matrix(2, 2)) < 1e-14);
    CHECK(ric.matrix(0, 0) == Approx(1.0));
  }
}

TEST_CASE("hessian of the density") {
  const MetricField flat = flat_metric(3);
  SUBCASE("quadratic") {
    const double lambda = 1.7;
    const DensityField f(3, [lambda](std::span<const Jet> x) {
      return 0.5 * lambda * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    });
    const auto h = hessian(f, flat, make_vec({0.3, 1.0, -2.0}));
    CHECK((h.matrix - lambda * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("linear") {
    const DensityField f(3, [](std::span<const Jet> x) { return 2.0 * x[0] - x[1] + 0.5 * x[2]; });
    CHECK(hessian(f, flat, make_vec({1, 2, 3})).matrix.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("distance function in the polar plane: D^2 r(d_theta, d_theta) = r") {
    const DensityField f(2, [](std::span<const Jet> u) { return u[0]; });
    const auto h = hessian(f, polar_plane(), make_vec({2.0, 0.4}));
    CHECK(h.matrix(1, 1) == Approx(2.0));
    CHECK(std::abs(h.matrix(0, 0)) < 1e-15);
    CHECK(std::abs(h.matrix(0, 1)) < 1e-15);
  }
  SUBCASE("matches second differences of f along a geodesic") {
    // In the flat chart geodesics are lines, so D^2 f(v, v) is the second
    // derivative of f along x + t v.
    const DensityField f(3, [](std::span<const Jet> x) { return sin(x[0]) * exp(0.3 * x[1]) + x[2] * x[2] * x[0]; });
    const ChartPoint x = make_vec({0.4, -0.2, 0.9});
    const Vec v = make_vec({0.6, 0.0, 0.8});
    const double exact = hessian(f, flat, x)(v, v);
    auto line = [&](double t) { return f.value(x + t * v); };
    const double e1 = std::abs(central_d2(line, 0.0, 5e-2) - exact), e2 = std::abs(central_d2(line, 0.0, 2.5e-2) - exact);
    CHECK(std::log2(e1 / e2) >= 2.0);
  }
}

TEST_CASE("bakry-emery tensor") {
  SUBCASE("gaussian soliton gives lambda g") {
    const double lambda = 1.0;
    const Smms s = flat_smms(3, radial_density(3, [lambda](const Jet& r) { return 0.5 * lambda * r * r; }));
    const auto be = bakry_emery(s, make_vec({0.5, -1.5, 2.5}));
    CHECK((be.matrix - lambda * Mat::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(be.min_eigenvalue() == Approx(1.0));
  }
  SUBCASE("constant density reproduces ricci") {
    const MetricField g = round_s3();
    const Smms s{g, DensityField(3, [](std::span<const Jet>) { return Jet(0.4); }), Weight::infinite(), std::nullopt};
    const ChartPoint u = make_vec({0.7, 2.0, 1.0});
    CHECK((bakry_emery(s, u).matrix - ricci(g, u).matrix).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("cone density: radial-radial vanishes, transverse is -N / rho^2") {
    const double N = 2.0;
    const Smms s = flat_smms(3, radial_density(3, [N](const Jet& r) { return -N * log(r); }), Weight::finite(N));
    const ChartPoint x = make_vec({2.0, 0.0, 0.0});
    const auto be = bakry_emery(s, x);
    CHECK(std::abs(be.matrix(0, 0)) < 1e-14);
    // Oracle: D^2(-N log rho) = -N (g - 2 drho drho)/rho^2 on the transverse block.
    CHECK(be.matrix(1, 1) == Approx(-N / 4.0));
    CHECK(be.min_eigenvalue() == Approx(-N / 4.0));
  }
  SUBCASE("weights") {
    CHECK_THROWS_AS(Weight::finite(0.0), DomainError);
    CHECK_THROWS_AS(Weight::finite(-1.0), DomainError);
    CHECK(Weight::finite(2.5).value() == 2.5);
    CHECK_FALSE(Weight::finite(2.5).is_integer());
    CHECK(Weight::infinite().is_infinite());
  }
}

TEST_CASE("certify_hypotheses") {
  SamplePlan plan;
  for (int i = 0; i < 27; ++i) plan.points.push_back(make_vec({-2.0 + 2.0 * (i % 3), -2.0 + 2.0 * (i / 3 % 3), 1.0 + i / 9}));
  plan.radial_r_max = 5.0;
  SUBCASE("flat space") {
    const BuiltModel m = build_model({"euclidean", {{"n", 3.0}}});
    const auto rep = certify_hypotheses(m.smms, &*m.embedding, plan);
    CHECK(rep.bakry_emery.minimum == 0.0);
    CHECK(rep.df_dr.minimum == 0.0);
    CHECK(rep.df_drho.minimum == 0.0);
    CHECK(rep.clean());
    CHECK(rep.note == "sampled, not a proof");
  }
  SUBCASE("gaussian soliton") {
    const BuiltModel m = build_model({"gaussian_soliton", {{"n", 3.0}, {"lambda", 1.0}}});
    const auto rep = certify_hypotheses(m.smms, nullptr, plan);
    CHECK(rep.bakry_emery.minimum == Approx(1.0).epsilon(1e-12));
    CHECK(rep.df_drho.minimum > 0.0);
    CHECK_FALSE(rep.df_dr.checked);
    CHECK(rep.clean());
  }
  SUBCASE("cone model: negative transverse eigenvalue with witness") {
    const BuiltModel m = build_model({"cone_power_density", {{"n", 3.0}, {"N", 2.0}, {"r0", 1.0}}});
    const auto rep = certify_hypotheses(m.smms, nullptr, plan);
    CHECK(rep.bakry_emery.minimum < 0.0);
    CHECK(rep.bakry_emery.witness.size() == 3);
    // Outside the cap the transverse value is exactly -N / rho^2.
    const double rho = rep.bakry_emery.witness.norm();
    if (rho >= 1.0) CHECK(rep.bakry_emery.minimum == Approx(-2.0 / (rho * rho)));
    CHECK_FALSE(rep.clean());
  }
  SUBCASE("real N is flagged") {
    const BuiltModel m = build_model({"euclidean", {{"n", 3.0}, {"N", 1.5}}});
    const auto rep = certify_hypotheses(m.smms, nullptr, plan);
    CHECK(rep.real_weight);
    CHECK(rep.flags.size() == 1);
  }
  SUBCASE("empty plan") {
    const BuiltModel m = build_model({"twisted_exterior", {{"n", 3.0}}});
    SamplePlan empty;
    CHECK_THROWS_AS(certify_hypotheses(m.smms, nullptr, empty), DomainError);
  }
}

TEST_CASE("geodesics") {
  SUBCASE("flat straight line") {
    const auto p = integrate_geodesic(flat_metric(3), make_vec({0, 0, 0}), make_vec({1, 0, 0}), 5.0);
    CHECK_FALSE(p.exited_chart);
    CHECK((p.samples.back().position - make_vec({5, 0, 0})).norm() < 1e-12);
  }
  SUBCASE("great circle on S2 reaches the antipode at t = pi") {
    const auto p = integrate_geodesic(round_s2(), make_vec({kPi / 2, 0.0}), make_vec({0.0, 1.0}), kPi);
    const ChartPoint end = p.samples.back().position;
    CHECK(std::abs(end(0) - kPi / 2) < 1e-8);
    CHECK(std::abs(end(1) - kPi) < 1e-8);
    for (const auto& s : p.samples) CHECK(std::abs(s.speed - 1.0) < 1e-8);
  }
  SUBCASE("radial geodesic in the hyperbolic warped model") {
    const auto p = integrate_geodesic(warped3([](const Jet& r) { return sinh(r); }), make_vec({0.5, 1.0, 2.0}),
                                      make_vec({1, 0, 0}), 3.0);
    for (const auto& s : p.samples) {
      CHECK(s.position(0) == Approx(0.5 + s.t).epsilon(1e-10));
      CHECK(s.position(1) == Approx(1.0));
    }
  }
  SUBCASE("leaving the chart sets the exit flag") {
    const auto p = integrate_geodesic(round_s2(), make_vec({kPi / 2, 0.0}), make_vec({1.0, 0.0}), 3.0);
    CHECK(p.exited_chart);
    CHECK(p.end_t < kPi / 2 + 1e-3);
  }
}

TEST_CASE("radial transport") {
  SUBCASE("flat space from the unit sphere") {
    const BuiltModel m = build_model({"euclidean", {{"n", 3.0}}});
    const ShapeData sd = shape_data(*m.embedding, m.smms, make_vec({1.0, 2.0}));
    const RadialTransport t = radial_transport(m.smms, sd.transport_start(), 10.0, 1001);
    CHECK_FALSE(t.focal_r);
    double worst_m = 0, worst_a = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      worst_m = std::max(worst_m, std::abs(t.m[i] * (1 + t.r[i]) / 2.0 - 1.0));
      worst_a = std::max(worst_a, std::abs(t.A[i] / std::pow(1 + t.r[i], 2) - 1.0));
    }
    CHECK(worst_m < 1e-7);
    CHECK(worst_a < 1e-7);
    CHECK(t.A[0] == 1.0);
    CHECK(t.theta[0] == 1.0);
  }
  SUBCASE("flat space inward focuses at the center") {
    const BuiltModel m = build_model({"euclidean", {{"n", 3.0}}});
    const ShapeData sd = shape_data(m.embedding->flip(), m.smms, make_vec({1.0, 2.0}));
    const RadialTransport t = radial_transport(m.smms, sd.transport_start(), 2.0, 201);
    REQUIRE(t.focal_r);
    CHECK(*t.focal_r == Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("unit S3 geodesic sphere: m = 2 cot(r0 + r), focal at pi - r0") {
    const double r0 = kPi / 4;
    const BuiltModel m = build_model({"sphere_ambient", {{"n", 3.0}, {"r0", r0}}});
    const ShapeData sd = shape_data(*m.embedding, m.smms, make_vec({1.0, 2.0}));
    const RadialTransport t = radial_transport(m.smms, sd.transport_start(), 3.0, 301);
    REQUIRE(t.focal_r);
    CHECK(std::abs(*t.focal_r - (kPi - r0)) < 1e-4);
    for (std::size_t i = 0; i < t.size(); i += 20)
      if (t.r[i] < 2.0) CHECK(t.m[i] == Approx(2.0 / std::tan(r0 + t.r[i])).epsilon(1e-7));
  }
  SUBCASE("initial values and d/dr log A_f = m_f") {
    const BuiltModel m = build_model({"gaussian_soliton", {{"n", 3.0}, {"lambda", 1.0}, {"radius", 1.0}}});
    const ShapeData sd = shape_data(*m.embedding, m.smms, make_vec({0.5, 1.0}));
    const RadialTransport t = radial_transport(m.smms, sd.transport_start(), 4.0, 4001);
    CHECK(t.m_f[0] == Approx(sd.H_f));
    CHECK(t.theta[0] == Approx(std::exp(-sd.f_at)));
    CHECK(t.A_f[0] == Approx(std::exp(-sd.f_at)));
    double worst = 0;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      const double d = (std::log(t.A_f[i + 1]) - std::log(t.A_f[i - 1])) / (t.r[i + 1] - t.r[i - 1]);
      worst = std::max(worst, std::abs(d - t.m_f[i]));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("ode integrator") {
  // y' = -y, y(0) = 1.
  ode::Integrator integ([](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; }, 1);
  const double y0[] = {1.0};
  integ.reset(0.0, y0);
  CHECK(integ.advance(3.0) == ode::Status::reached);
  CHECK(integ.y()[0] == Approx(std::exp(-3.0)).epsilon(1e-9));
  // event: y - 0.5 crosses zero at log 2
  const ode::Event ev = [](double, std::span<const double> y) { return y[0] - 0.5; };
  integ.reset(0.0, y0);
  CHECK(integ.advance(3.0, &ev) == ode::Status::event);
  CHECK(integ.event_time() == Approx(std::log(2.0)).epsilon(1e-8));
}
