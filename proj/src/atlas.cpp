#include "foliscope/atlas.hpp"

#include <functional>

namespace fol {

int active_chart(const Vec3c& z) {
  double m0 = std::abs(z(0)), m1 = std::abs(z(1)), m2 = std::abs(z(2));
  if (m0 == 0 && m1 == 0 && m2 == 0)
    throw std::invalid_argument("zero homogeneous vector");
  // lowest index wins ties
  int best = 0;
  double mb = m0;
  if (m1 > mb) { best = 1; mb = m1; }
  if (m2 > mb) { best = 2; mb = m2; }
  return best;
}

Vec3c affine_to_homogeneous(int chart, const Vec2c& x) {
  Vec3c z;
  auto [a, b] = chart_slots(chart);
  z(chart) = 1.0;
  z(a) = x(0);
  z(b) = x(1);
  return z;
}

SurfacePoint SurfacePoint::from_homogeneous(const Vec3c& z) {
  SurfacePoint p;
  p.chart_ = active_chart(z);
  auto [a, b] = chart_slots(p.chart_);
  p.affine_ = Vec2c(z(a) / z(p.chart_), z(b) / z(p.chart_));
  p.homog_ = affine_to_homogeneous(p.chart_, p.affine_);
  return p;
}

SurfacePoint SurfacePoint::from_affine(int chart, const Vec2c& x) {
  return from_homogeneous(affine_to_homogeneous(chart, x));
}

Vec2c SurfacePoint::in_chart(int k) const { return to_chart(*this, k); }

Vec2c to_chart(const SurfacePoint& p, int k) {
  const Vec3c& z = p.homogeneous();
  if (std::abs(z(k)) == 0.0)
    throw ChartUndefined("dehomogenizing coordinate is zero for chart " +
                         std::to_string(k));
  auto [a, b] = chart_slots(k);
  return Vec2c(z(a) / z(k), z(b) / z(k));
}

Vec2c transition(int j, int k, const Vec2c& x) {
  Vec3c z = affine_to_homogeneous(j, x);
  if (std::abs(z(k)) == 0.0)
    throw ChartUndefined("transition target chart undefined");
  auto [a, b] = chart_slots(k);
  return Vec2c(z(a) / z(k), z(b) / z(k));
}

Mat2c transition_jacobian(int j, int k, const Vec2c& x) {
  // y_m = Z_{slot_m(k)}(x) / Z_k(x) with Z linear in the affine coordinates
  auto [ja, jb] = chart_slots(j);
  auto [ka, kb] = chart_slots(k);
  Vec3c z = affine_to_homogeneous(j, x);
  cplx zk = z(k);
  if (std::abs(zk) == 0.0) throw ChartUndefined("transition Jacobian undefined");
  // dZ_i/dx_0 = [i == ja], dZ_i/dx_1 = [i == jb]
  auto dz = [&](int i, int m) -> cplx {
    if (m == 0) return i == ja ? 1.0 : 0.0;
    return i == jb ? 1.0 : 0.0;
  };
  Mat2c J;
  int num[2] = {ka, kb};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c)
      J(r, c) = (dz(num[r], c) * zk - z(num[r]) * dz(k, c)) / (zk * zk);
  return J;
}

Mat2c fs_matrix(const Vec2c& x) {
  double s = x.squaredNorm();
  double d1 = 1.0 / (1.0 + s), d2 = d1 * d1;
  Mat2c M = (d1 / kPi) * Mat2c::Identity();
  M -= (d2 / kPi) * (x * x.adjoint());
  return M;
}

double fs_on_direction(const Vec2c& x, const Vec2c& xi) {
  double s = x.squaredNorm();
  double d1 = 1.0 + s;
  cplx ip = x.dot(xi);  // sum conj(x_j) xi_j
  return (xi.squaredNorm() / d1 - std::norm(ip) / (d1 * d1)) / kPi;
}

double fs_volume_density(const Vec2c& x) {
  double s = x.squaredNorm();
  double d = 1.0 + s;
  return 2.0 / (kPi * kPi * d * d * d);
}

FsDensity fs_density(const Vec2c& x) {
  return FsDensity{fs_matrix(x), fs_volume_density(x)};
}

Transported transport_directed(int j, int k, const Vec2c& x, const Vec2c& dir,
                               double w) {
  if (j == k) return {x, dir, w};
  Vec2c y = transition(j, k, x);
  Mat2c J = transition_jacobian(j, k, x);
  Vec2c eta = J * dir;
  double sp = eta.squaredNorm();
  return {y, eta / std::sqrt(sp), w * sp};
}

double integrate_active_cell(int chart, int nr, int na,
                             const std::function<double(const Vec2c&)>& f) {
  // product polar midpoint rule on the unit bidisc, which is exactly the
  // closure of the active cell of the chart
  (void)chart;
  double sum = 0.0;
  double dr = 1.0 / nr, da = 2.0 * kPi / na;
  for (int i1 = 0; i1 < nr; ++i1)
    for (int a1 = 0; a1 < na; ++a1) {
      double r1 = (i1 + 0.5) * dr, t1 = (a1 + 0.5) * da;
      cplx x1 = std::polar(r1, t1);
      double w1 = r1 * dr * da;
      for (int i2 = 0; i2 < nr; ++i2)
        for (int a2 = 0; a2 < na; ++a2) {
          double r2 = (i2 + 0.5) * dr, t2 = (a2 + 0.5) * da;
          cplx x2 = std::polar(r2, t2);
          double w2 = r2 * dr * da;
          sum += w1 * w2 * f(Vec2c(x1, x2));
        }
    }
  return sum;
}

double fs_total_volume(int nr, int na) {
  double total = 0.0;
  for (int k = 0; k < 3; ++k)
    total += integrate_active_cell(
        k, nr, na, [](const Vec2c& x) { return fs_volume_density(x); });
  return total;
}

}  // namespace fol
