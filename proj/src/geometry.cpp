#include "smms/geometry.hpp"

#include <cmath>
#include <sstream>

#include "smms/error.hpp"

namespace smms {
namespace {

std::string point_string(const ChartPoint& u) {
  std::ostringstream os;
  os << "(";
  for (Eigen::Index i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u(i);
  os << ")";
  return os.str();
}

std::array<Jet, kMaxDim> seed(const ChartPoint& u) {
  std::array<Jet, kMaxDim> jets{};
  const int n = static_cast<int>(u.size());
  for (int i = 0; i < n; ++i) jets[i] = Jet::variable(n, i, u(i));
  return jets;
}

}  // namespace

bool ChartDomain::contains(const ChartPoint& u) const {
  if (static_cast<std::size_t>(u.size()) != axes.size()) return false;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const double x = u(static_cast<Eigen::Index>(i));
    if (!std::isfinite(x)) return false;
    if (axes[i].periodic) continue;
    if (!(x > axes[i].lo && x < axes[i].hi)) return false;
  }
  return true;
}

MetricField::MetricField(int dim, ChartDomain domain, Components components)
    : dim_(dim), domain_(std::move(domain)), components_(std::move(components)) {
  if (dim < 2 || dim > kMaxDim) throw DomainError("metric dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  if (static_cast<int>(domain_.axes.size()) != dim) throw DomainError("chart domain rank differs from metric dimension");
}

MetricSample MetricField::sample(const ChartPoint& u) const {
  if (u.size() != dim_ || !domain_.contains(u)) throw DomainError("point outside chart domain: " + point_string(u));
  const auto jets = seed(u);
  std::array<Jet, kMaxDim*(kMaxDim + 1) / 2> upper{};
  const int count = dim_ * (dim_ + 1) / 2;
  components_(std::span<const Jet>(jets.data(), dim_), std::span<Jet>(upper.data(), count));

  MetricSample s;
  s.g.resize(dim_, dim_);
  for (int k = 0; k < dim_; ++k) {
    s.dg[k].resize(dim_, dim_);
    for (int l = 0; l < dim_; ++l) s.d2g[k][l].resize(dim_, dim_);
  }
  int p = 0;
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j, ++p) {
      const Jet& c = upper[p];
      s.g(i, j) = s.g(j, i) = c.value();
      for (int k = 0; k < dim_; ++k) {
        s.dg[k](i, j) = s.dg[k](j, i) = c.d(k);
        for (int l = 0; l < dim_; ++l) s.d2g[k][l](i, j) = s.d2g[k][l](j, i) = c.dd(k, l);
      }
    }
  Eigen::LLT<Mat> llt(s.g);
  if (llt.info() != Eigen::Success || !s.g.allFinite())
    throw NumericalError("metric not positive definite at " + point_string(u));
  return s;
}

Mat MetricField::at(const ChartPoint& u) const { return sample(u).g; }

DensityField::DensityField(int dim, Function f) : dim_(dim), f_(std::move(f)) {}

DensityField DensityField::zero(int dim) {
  return DensityField(dim, [](std::span<const Jet>) { return Jet(0.0); });
}

DensitySample DensityField::sample(const ChartPoint& u) const {
  if (u.size() != dim_) throw DomainError("density evaluated at a point of the wrong dimension");
  const auto jets = seed(u);
  const Jet f = f_(std::span<const Jet>(jets.data(), dim_));
  DensitySample s;
  s.value = f.value();
  s.gradient = Vec::Zero(dim_);
  s.hessian = Mat::Zero(dim_, dim_);
  for (int i = 0; i < std::min(dim_, f.dim()); ++i) {
    s.gradient(i) = f.d(i);
    for (int j = 0; j < std::min(dim_, f.dim()); ++j) s.hessian(i, j) = f.dd(i, j);
  }
  if (!std::isfinite(s.value)) throw DomainError("density not finite at " + point_string(u));
  return s;
}

double DensityField::value(const ChartPoint& u) const { return sample(u).value; }

Weight Weight::finite(double n) {
  if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("weight N must be a finite real > 0 (or infinite)");
  Weight w;
  w.infinite_ = false;
  w.n_ = n;
  return w;
}

double Weight::value() const {
  if (infinite_) throw DomainError("infinite weight has no finite value");
  return n_;
}

bool Weight::is_integer() const { return infinite_ || n_ == std::round(n_); }

Vec BilinearFormAtPoint::generalized_eigenvalues() const {
  const Eigen::MatrixXd a = 0.5 * (matrix + matrix.transpose());
  const Eigen::MatrixXd b = metric_at_base;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("generalized eigenproblem failed");
  return es.eigenvalues();
}

LocalGeometry LocalGeometry::at(const MetricField& metric, const ChartPoint& u) {
  const MetricSample s = metric.sample(u);
  const int n = metric.dim();
  LocalGeometry geo;
  geo.n = n;
  geo.g = s.g;
  geo.ginv = s.g.llt().solve(Mat::Identity(n, n));
  geo.ginv = 0.5 * (geo.ginv + geo.ginv.transpose()).eval();

  // First kind: low[m](i, j) = Gamma_{m,ij}; dlow[l][m](i, j) = d_l Gamma_{m,ij}.
  Christoffel low;
  std::array<Christoffel, kMaxDim> dlow;
  for (int m = 0; m < n; ++m) {
    low[m].resize(n, n);
    for (int l = 0; l < n; ++l) dlow[l][m].resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = 0.5 * (s.dg[i](j, m) + s.dg[j](i, m) - s.dg[m](i, j));
        low[m](i, j) = low[m](j, i) = v;
        for (int l = 0; l < n; ++l) {
          const double dv = 0.5 * (s.d2g[l][i](j, m) + s.d2g[l][j](i, m) - s.d2g[l][m](i, j));
          dlow[l][m](i, j) = dlow[l][m](j, i) = dv;
        }
      }
  }
  // d_l g^{km} = -g^{ka} d_l g_ab g^{bm}
  std::array<Mat, kMaxDim> dginv;
  for (int l = 0; l < n; ++l) dginv[l] = -geo.ginv * s.dg[l] * geo.ginv;

  for (int k = 0; k < n; ++k) {
    geo.gamma[k] = Mat::Zero(n, n);
    for (int l = 0; l < n; ++l) geo.dgamma[l][k] = Mat::Zero(n, n);
    for (int m = 0; m < n; ++m) {
      geo.gamma[k] += geo.ginv(k, m) * low[m];
      for (int l = 0; l < n; ++l) geo.dgamma[l][k] += dginv[l](k, m) * low[m] + geo.ginv(k, m) * dlow[l][m];
    }
    // Exact symmetry in the lower indices.
    geo.gamma[k] = (0.5 * (geo.gamma[k] + geo.gamma[k].transpose())).eval();
    for (int l = 0; l < n; ++l) geo.dgamma[l][k] = (0.5 * (geo.dgamma[l][k] + geo.dgamma[l][k].transpose())).eval();
  }
  return geo;
}

Vec LocalGeometry::contract(const Vec& a, const Vec& b) const {
  Vec out(n);
  for (int k = 0; k < n; ++k) out(k) = a.dot(gamma[k] * b);
  return out;
}

Mat LocalGeometry::tidal(const Vec& v) const {
  // T^l_i = R^l_{ijk} v^j v^k with
  // R^l_{ijk} = d_i G^l_jk - d_j G^l_ik + G^l_ip G^p_jk - G^l_jp G^p_ik.
  const Vec q = contract(v, v);
  Mat gv(n, n);  // gv(p, i) = G^p_ik v^k
  for (int p = 0; p < n; ++p) gv.row(p) = (gamma[p] * v).transpose();
  Mat t = Mat::Zero(n, n);
  for (int l = 0; l < n; ++l) {
    Vec dv = Vec::Zero(n);  // sum_j v^j d_j G^l_ik v^k
    for (int j = 0; j < n; ++j) dv += v(j) * (dgamma[j][l] * v);
    for (int i = 0; i < n; ++i) {
      const double term1 = v.dot(dgamma[i][l] * v);
      const double term3 = gamma[l].row(i).dot(q);
      const double term4 = gv.row(l).dot(gv.col(i));
      t(l, i) = term1 - dv(i) + term3 - term4;
    }
  }
  return t;
}

Mat LocalGeometry::ricci() const {
  Mat ric = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) {
        s += dgamma[i][i](j, k) - dgamma[j][i](i, k);
        for (int p = 0; p < n; ++p) s += gamma[i](i, p) * gamma[p](j, k) - gamma[i](j, p) * gamma[p](i, k);
      }
      ric(j, k) = ric(k, j) = s;
    }
  return ric;
}

Christoffel christoffel(const MetricField& metric, const ChartPoint& u) { return LocalGeometry::at(metric, u).gamma; }

Mat orthonormal_basis(const Mat& g) {
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("metric not positive definite");
  const Mat l = llt.matrixL();
  return l.transpose().triangularView<Eigen::Upper>().solve(Mat::Identity(g.rows(), g.cols()));
}

Mat orthonormal_complement(const Mat& g, const Vec& v) {
  const int n = static_cast<int>(g.rows());
  const double vn = std::sqrt(v.dot(g * v));
  if (!(vn > 0.0)) throw DomainError("zero tangent vector");
  const Vec e0 = v / vn;
  const Mat b = orthonormal_basis(g);
  int drop = 0;
  double best = -1.0;
  for (int i = 0; i < n; ++i) {
    const double c = std::abs(b.col(i).dot(g * e0));
    if (c > best) {
      best = c;
      drop = i;
    }
  }
  Mat frame(n, n - 1);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    if (i == drop) continue;
    Vec c = b.col(i);
    c -= c.dot(g * e0) * e0;
    for (int a = 0; a < col; ++a) c -= c.dot(g * frame.col(a)) * frame.col(a);
    frame.col(col++) = c / std::sqrt(c.dot(g * c));
  }
  return frame;
}

Mat curvature_operator(const MetricField& metric, const ChartPoint& u, const Vec& v, Mat* frame) {
  const LocalGeometry geo = LocalGeometry::at(metric, u);
  const Mat e = orthonormal_complement(geo.g, v);
  const Mat r = e.transpose() * geo.g * geo.tidal(v) * e;
  if (frame != nullptr) *frame = e;
  return 0.5 * (r + r.transpose());
}

BilinearFormAtPoint ricci(const MetricField& metric, const ChartPoint& u) {
  const LocalGeometry geo = LocalGeometry::at(metric, u);
  return {u, geo.ricci(), geo.g};
}

BilinearFormAtPoint hessian(const DensityField& field, const MetricField& metric, const ChartPoint& u) {
  const LocalGeometry geo = LocalGeometry::at(metric, u);
  const DensitySample f = field.sample(u);
  Mat h = f.hessian;
  for (int k = 0; k < geo.n; ++k) h -= f.gradient(k) * geo.gamma[k];
  return {u, 0.5 * (h + h.transpose()), geo.g};
}

BilinearFormAtPoint bakry_emery(const Smms& smms, const ChartPoint& u) {
  const LocalGeometry geo = LocalGeometry::at(smms.metric, u);
  const DensitySample f = smms.density.sample(u);
  Mat b = geo.ricci() + f.hessian;
  for (int k = 0; k < geo.n; ++k) b -= f.gradient(k) * geo.gamma[k];
  if (!smms.weight.is_infinite()) b -= (f.gradient * f.gradient.transpose()) / smms.weight.value();
  return {u, 0.5 * (b + b.transpose()), geo.g};
}

}  // namespace smms
