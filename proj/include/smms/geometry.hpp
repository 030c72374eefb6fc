#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smms/jet.hpp"
#include "smms/linalg.hpp"

namespace smms {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool periodic = false;
};

// Product of coordinate intervals. Periodic axes never exclude a point.
struct ChartDomain {
  std::vector<Interval> axes;

  static ChartDomain whole(int dim) { return ChartDomain{std::vector<Interval>(dim)}; }
  bool contains(const ChartPoint& u) const;
};

// g, dg and d2g at one chart point; dg[k] = d_k g, d2g[k][l] = d_k d_l g.
struct MetricSample {
  Mat g;
  std::array<Mat, kMaxDim> dg;
  std::array<std::array<Mat, kMaxDim>, kMaxDim> d2g;
};

// Riemannian metric in one chart, with exact first and second coordinate
// derivatives obtained by evaluating the components on jets.
class MetricField {
 public:
  // Writes the upper triangle (row-major, i <= j) of g(u) into `upper`.
  using Components = std::function<void(std::span<const Jet> u, std::span<Jet> upper)>;

  MetricField(int dim, ChartDomain domain, Components components);

  int dim() const { return dim_; }
  const ChartDomain& domain() const { return domain_; }

  // Throws DomainError outside the chart, NumericalError when g(u) is not
  // positive definite.
  MetricSample sample(const ChartPoint& u) const;
  Mat at(const ChartPoint& u) const;

 private:
  int dim_;
  ChartDomain domain_;
  Components components_;
};

struct DensitySample {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

class DensityField {
 public:
  using Function = std::function<Jet(std::span<const Jet> u)>;

  DensityField(int dim, Function f);
  static DensityField zero(int dim);

  int dim() const { return dim_; }
  DensitySample sample(const ChartPoint& u) const;
  double value(const ChartPoint& u) const;

 private:
  int dim_;
  Function f_;
};

// Weight parameter N in (0, inf]; finite values must be positive.
class Weight {
 public:
  static Weight infinite() { return Weight(); }
  static Weight finite(double n);

  bool is_infinite() const { return infinite_; }
  double value() const;  // throws for the infinite weight
  bool is_integer() const;

 private:
  Weight() = default;
  bool infinite_ = true;
  double n_ = 0.0;
};

// Base point p0 for balls. A polar pole is the coordinate singularity r = 0
// of a polar chart, where rays are seeded at a small radius.
struct BasePoint {
  ChartPoint point;
  bool polar_pole = false;
};

// Smooth metric measure space (M, g, e^{-f} dvol) plus its weight N.
struct Smms {
  MetricField metric;
  DensityField density;
  Weight weight = Weight::infinite();
  std::optional<BasePoint> base;

  int dim() const { return metric.dim(); }
  // k = n + N for finite N, k = n for N = inf.
  double k() const { return weight.is_infinite() ? dim() : dim() + weight.value(); }
};

struct BilinearFormAtPoint {
  ChartPoint base;
  Mat matrix;
  Mat metric_at_base;

  double operator()(const Vec& v, const Vec& w) const { return v.dot(matrix * w); }
  // Eigenvalues mu of det(B - mu g) = 0, ascending.
  Vec generalized_eigenvalues() const;
  double min_eigenvalue() const { return generalized_eigenvalues()(0); }
};

// Gamma[k](i, j) = Christoffel symbol of the second kind.
using Christoffel = std::array<Mat, kMaxDim>;

// Connection and curvature data at a point.
struct LocalGeometry {
  int n = 0;
  Mat g, ginv;
  Christoffel gamma;
  // dgamma[l][k](i, j) = d_l Gamma^k_ij
  std::array<Christoffel, kMaxDim> dgamma;

  static LocalGeometry at(const MetricField& metric, const ChartPoint& u);

  // Chart vector Gamma^k_ij a^i b^j.
  Vec contract(const Vec& a, const Vec& b) const;
  // Matrix T with T w = R(w, v) v in chart components.
  Mat tidal(const Vec& v) const;
  Mat ricci() const;
};

Christoffel christoffel(const MetricField& metric, const ChartPoint& u);

// Tidal operator w -> R(w, v) v on the g-orthogonal complement of v, in an
// orthonormal frame of that complement (returned in `frame` when non-null).
Mat curvature_operator(const MetricField& metric, const ChartPoint& u, const Vec& v, Mat* frame = nullptr);

BilinearFormAtPoint ricci(const MetricField& metric, const ChartPoint& u);
BilinearFormAtPoint hessian(const DensityField& field, const MetricField& metric, const ChartPoint& u);
// Ric + D^2 f - df (x) df / N, or Ric + D^2 f for N = inf.
BilinearFormAtPoint bakry_emery(const Smms& smms, const ChartPoint& u);

// Orthonormal (w.r.t. g) basis of the complement of v, as columns.
Mat orthonormal_complement(const Mat& g, const Vec& v);
// Orthonormal basis of T_u M as columns (inverse transpose Cholesky factor).
Mat orthonormal_basis(const Mat& g);

}  // namespace smms
