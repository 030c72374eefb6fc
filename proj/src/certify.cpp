#include "smms/certify.hpp"

#include <algorithm>

#include "smms/error.hpp"
#include "smms/parallel.hpp"
#include "smms/volume.hpp"

namespace smms {
namespace {

struct Sample {
  double value = std::numeric_limits<double>::infinity();
  ChartPoint x;
  double r = std::nan("");
};

// Lowest value wins; ties go to the lowest index.
void reduce(CertifiedMinimum& out, const std::vector<Sample>& samples) {
  out.checked = true;
  out.samples = samples.size();
  for (const Sample& s : samples)
    if (s.value < out.minimum) {
      out.minimum = s.value;
      out.witness = s.x;
      out.witness_r = s.r;
    }
}

}  // namespace

bool CertificationReport::clean() const {
  for (const CertifiedMinimum* c : {&bakry_emery, &df_dr, &df_drho, &H_f})
    if (c->required && !c->ok(tolerance)) return false;
  return true;
}

CertificationReport certify_hypotheses(const Smms& smms, const Embedding* surface, const SamplePlan& plan) {
  if (plan.points.empty() && !(surface && plan.check_surface) && !(smms.base && plan.check_radial))
    throw DomainError("certify_hypotheses: empty sample plan");
  CertificationReport rep;
  rep.tolerance = plan.tolerance;
  const bool infinite = smms.weight.is_infinite();
  rep.real_weight = !infinite && !smms.weight.is_integer();
  if (rep.real_weight) rep.flags.push_back("non-integer N: real-weight extension");
  rep.bakry_emery.name = infinite ? "Ric_f" : "Ric_f^N";
  rep.bakry_emery.required = true;
  rep.df_dr.name = "df/dr";
  rep.df_drho.name = "df/drho";
  rep.H_f.name = "H_f";
  rep.df_dr.required = rep.df_drho.required = rep.H_f.required = infinite;

  if (!plan.points.empty()) {
    std::vector<Sample> s(plan.points.size());
    parallel_for(s.size(), [&](std::size_t i) {
      s[i].x = plan.points[i];
      s[i].value = bakry_emery(smms, plan.points[i]).min_eigenvalue();
    });
    reduce(rep.bakry_emery, s);
  }

  if (surface != nullptr && plan.check_surface) {
    const Embedding emb = surface->with_orders(
        plan.surface_orders.size() == surface->orders.size() ? plan.surface_orders : surface->orders);
    const SurfaceNodes nodes = surface_nodes(emb);
    std::vector<Sample> hf(nodes.params.size()), dr(nodes.params.size());
    parallel_for(hf.size(), [&](std::size_t i) {
      const ShapeData sd = shape_data(emb, smms, nodes.params[i]);
      hf[i] = {sd.H_f, sd.x, 0.0};
      const RadialTransport tr = radial_transport(smms, sd.transport_start(), plan.normal_r_max, plan.normal_points);
      // Sample the density slope along the stored grid.
      dr[i].value = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < tr.size(); ++j) {
        const GeodesicSample& g = tr.geodesic.samples[j];
        const DensitySample f = smms.density.sample(g.position);
        const double v = f.gradient.dot(g.velocity) / g.speed;
        if (v < dr[i].value) dr[i] = {v, g.position, tr.r[j]};
      }
    });
    reduce(rep.H_f, hf);
    reduce(rep.df_dr, dr);
  } else {
    rep.df_dr.required = rep.H_f.required = false;
  }

  if (smms.base && plan.check_radial) {
    const AngularRule rule = angular_rule(smms.dim(), plan.radial_colatitude_order, plan.radial_azimuth_order);
    std::vector<double> stops;
    for (int j = 1; j <= plan.radial_points; ++j) stops.push_back(plan.radial_r_max * j / plan.radial_points);
    std::vector<Sample> s(rule.points.size());
    parallel_for(s.size(), [&](std::size_t d) {
      const RayStart rs = ray_from_base(smms, *smms.base, rule.points[d], rule.angles[d], plan.eps_seed);
      // Walk the ray with a plain geodesic and evaluate the slope at each stop.
      const GeodesicPath path = integrate_geodesic(smms.metric, rs.x, rs.direction, plan.radial_r_max - rs.t0, 1e-10,
                                                   plan.radial_points + 1);
      for (const GeodesicSample& g : path.samples) {
        if (g.t == 0.0 && rs.t0 == 0.0) continue;  // slope is direction dependent at the base point
        const DensitySample f = smms.density.sample(g.position);
        const double v = f.gradient.dot(g.velocity) / g.speed;
        if (v < s[d].value) s[d] = {v, g.position, g.t + rs.t0};
      }
    });
    reduce(rep.df_drho, s);
  } else {
    rep.df_drho.required = false;
  }
  if (!rep.bakry_emery.ok(rep.tolerance)) rep.flags.push_back(rep.bakry_emery.name + " has a negative eigenvalue");
  for (const CertifiedMinimum* c : {&rep.df_dr, &rep.df_drho, &rep.H_f})
    if (!c->ok(rep.tolerance)) rep.flags.push_back(c->name + " < 0 at a sample");
  return rep;
}

}  // namespace smms
