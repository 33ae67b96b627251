#include "foliscope/currents.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

namespace fol {

double SampleCloudCurrent::mass() const {
  double m = 0.0;
  for (const auto& s : samples) m += s.w * fs_on_direction(s.x, s.dir);
  return m;
}

void SampleCloudCurrent::normalize() {
  double m = mass();
  if (m <= 0) throw std::runtime_error("cannot normalize an empty current");
  for (auto& s : samples) s.w /= m;
  normalized = true;
}

double SampleCloudCurrent::directedness_residual(const FoliationSpec& F) const {
  double worst = 0.0;
  for (const auto& s : samples) {
    Vec2c v = F.eval_in_chart(s.chart, s.x);
    double n = v.norm();
    if (n == 0) continue;
    cplx cross = s.dir(0) * v(1) - s.dir(1) * v(0);
    worst = std::max(worst, std::abs(cross) / n);
  }
  return worst;
}

void SampleCloudCurrent::save_csv(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fprintf(f, "chart,x1re,x1im,x2re,x2im,weight,d1re,d1im,d2re,d2im\n");
  for (const auto& s : samples)
    std::fprintf(f, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 s.chart, s.x(0).real(), s.x(0).imag(), s.x(1).real(),
                 s.x(1).imag(), s.w, s.dir(0).real(), s.dir(0).imag(),
                 s.dir(1).real(), s.dir(1).imag());
  std::fclose(f);
}

SampleCloudCurrent SampleCloudCurrent::load_csv(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (!f) throw std::runtime_error("cannot read " + path);
  char line[512];
  SampleCloudCurrent T;
  bool first = true;
  while (std::fgets(line, sizeof line, f)) {
    if (first) { first = false; continue; }  // header
    CloudSample s;
    double v[9];
    if (std::sscanf(line, "%d,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &s.chart,
                    &v[0], &v[1], &v[2], &v[3], &v[4], &v[5], &v[6], &v[7],
                    &v[8]) != 10)
      continue;
    s.x = Vec2c(cplx(v[0], v[1]), cplx(v[2], v[3]));
    s.w = v[4];
    s.dir = Vec2c(cplx(v[5], v[6]), cplx(v[7], v[8]));
    T.samples.push_back(s);
  }
  std::fclose(f);
  return T;
}

double GridMeasure::total() const {
  double t = 0.0;
  for (double m : masses) t += m;
  return t;
}

void GridMeasure::normalize() {
  double t = total();
  if (t <= 0) throw std::runtime_error("cannot normalize an empty grid");
  for (double& m : masses) m /= t;
}

int GridMeasure::cell_of(const Vec2c& x) const {
  if (!window.contains(x)) return -1;
  double lo_r = window.center(0).real() - window.radius;
  double lo_i = window.center(0).imag() - window.radius;
  double h = 2.0 * window.radius / n;
  auto idx = [&](double v, double lo) {
    int i = int(std::floor((v - lo) / h));
    if (i < 0) i = 0;
    if (i >= n) i = n - 1;  // top edge joins the last cell
    return i;
  };
  int row = idx(x(0).imag(), lo_i), col = idx(x(0).real(), lo_r);
  return row * n + col;
}

void GridMeasure::save_csv(const std::string& path) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot write " + path);
  std::fprintf(f, "row,col,mass\n");
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double m = masses[size_t(r) * n + c];
      if (m != 0.0) std::fprintf(f, "%d,%d,%.17g\n", r, c, m);
    }
  std::fclose(f);
}

void GridMeasure::save_pgm(const std::string& path) const {
  double mx = 0.0;
  for (double m : masses) mx = std::max(mx, m);
  std::ofstream out(path, std::ios::binary);
  out << "P5\n" << n << " " << n << "\n255\n";
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double m = masses[size_t(r) * n + c];
      unsigned char px =
          mx > 0 ? (unsigned char)std::lround(255.0 * m / mx) : 0;
      out.put(char(px));
    }
}

GridMeasure GridMeasure::load_csv(const std::string& path,
                                  const ChartWindow& w) {
  std::FILE* f = std::fopen(path.c_str(), "r");
  if (!f) throw std::runtime_error("cannot read " + path);
  char line[256];
  std::vector<std::tuple<int, int, double>> entries;
  int nmax = 0;
  bool first = true;
  while (std::fgets(line, sizeof line, f)) {
    if (first) { first = false; continue; }
    int r, c;
    double m;
    if (std::sscanf(line, "%d,%d,%lf", &r, &c, &m) != 3) continue;
    entries.emplace_back(r, c, m);
    nmax = std::max({nmax, r + 1, c + 1});
  }
  std::fclose(f);
  GridMeasure g(w, nmax);
  for (auto& [r, c, m] : entries) g.masses[size_t(r) * nmax + c] = m;
  return g;
}

double l1_distance(const GridMeasure& g1, const GridMeasure& g2) {
  if (g1.n != g2.n || g1.window.chart != g2.window.chart ||
      (g1.window.center - g2.window.center).norm() > 1e-12 ||
      std::abs(g1.window.radius - g2.window.radius) > 1e-12)
    throw GridMismatch("grids have different windows or resolutions");
  double t1 = g1.total(), t2 = g2.total();
  if (t1 <= 0 || t2 <= 0) throw GridMismatch("empty grid in l1_distance");
  double d = 0.0;
  for (size_t i = 0; i < g1.masses.size(); ++i)
    d += std::abs(g1.masses[i] / t1 - g2.masses[i] / t2);
  return d;
}

double l1_distance(const std::vector<GridMeasure>& a,
                   const std::vector<GridMeasure>& b) {
  if (a.size() != b.size()) throw GridMismatch("grid families differ in size");
  double ta = 0, tb = 0;
  for (const auto& g : a) ta += g.total();
  for (const auto& g : b) tb += g.total();
  if (ta <= 0 || tb <= 0) throw GridMismatch("empty grid family");
  double d = 0.0;
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k].n != b[k].n) throw GridMismatch("grid families differ in shape");
    for (size_t i = 0; i < a[k].masses.size(); ++i)
      d += std::abs(a[k].masses[i] / ta - b[k].masses[i] / tb);
  }
  return d;
}

SampleCloudCurrent restrict_cloud(const SampleCloudCurrent& T,
                                  const ChartWindow& w) {
  SampleCloudCurrent R;
  for (const auto& s : T.samples) {
    if (s.chart != w.chart) continue;  // windows are chart-local
    if (w.contains(s.x)) R.samples.push_back(s);
  }
  return R;
}

GridMeasure to_grid(const SampleCloudCurrent& T, const ChartWindow& w, int n) {
  GridMeasure g(w, n);
  for (const auto& s : T.samples) {
    if (s.chart != w.chart) continue;
    if (!w.contains(s.x)) continue;
    g.masses[g.cell_of(s.x)] += s.w * fs_on_direction(s.x, s.dir);
  }
  return g;
}

LelongValue lelong_indicator(const SampleCloudCurrent& T, const SurfacePoint& a,
                             double r) {
  const int k = a.chart();
  const Vec2c c = a.affine();
  double sum = 0.0, sum2 = 0.0;
  for (const auto& s : T.samples) {
    Vec2c y;
    double w = s.w;
    if (s.chart == k) {
      y = s.x;
    } else {
      // transport; samples near the dehomogenization locus are far from a
      Vec3c h = affine_to_homogeneous(s.chart, s.x);
      if (std::abs(h(k)) < 1e-6) continue;
      auto tr = transport_directed(s.chart, k, s.x, s.dir, s.w);
      y = tr.x;
      w = tr.w;
    }
    if ((y - c).norm() <= r) {
      sum += w;
      sum2 += w * w;
    }
  }
  double nrm = kPi * r * r;
  return {sum / nrm, std::sqrt(sum2) / nrm};
}

SampleCloudCurrent omega_cloud(int n_points, uint64_t seed) {
  // rejection sampling of the omega^2 density over the three active cells;
  // acceptance probability (1+|x|^2)^{-3}
  SampleCloudCurrent T;
  T.samples.reserve(size_t(n_points) * 2);
  Rng rng(seed);
  const double z_cell = kPi * kPi / 2.0;  // integral of (1+s)^-3 over the cells
  int accepted = 0;
  while (accepted < n_points) {
    int chart = int(rng.uniform() * 3.0);
    if (chart > 2) chart = 2;
    Vec2c x(rng.unit_disc(), rng.unit_disc());
    double s = x.squaredNorm();
    double acc = 1.0 / ((1 + s) * (1 + s) * (1 + s));
    if (rng.uniform() >= acc) continue;
    ++accepted;
    // density of accepted points: p = (1+s)^{-3} / z_cell = (pi^2/2)^{-1}...
    double p = acc / z_cell;
    Mat2c A = fs_matrix(x);
    // adjugate: the direction complement, tr(A*C) = 2 det A
    Mat2c C = A.trace() * Mat2c::Identity() - A;
    Eigen::SelfAdjointEigenSolver<Mat2c> es(C);
    for (int m = 0; m < 2; ++m) {
      double cm = es.eigenvalues()(m);
      if (cm <= 0) continue;
      CloudSample smp;
      smp.chart = chart;
      smp.x = x;
      smp.dir = es.eigenvectors().col(m);
      smp.w = cm / (double(n_points) * p);
      T.samples.push_back(smp);
    }
  }
  return T;
}

SampleCloudCurrent line_cloud(const Vec3c& P, const Vec3c& Q, int n_radial,
                              int n_angular) {
  // two affine patches tau and 1/tau of the parametrized line P + tau Q,
  // polar midpoint quadrature on the unit disc of each patch
  SampleCloudCurrent T;
  auto add_patch = [&](bool inverted) {
    double dr = 1.0 / n_radial, da = 2.0 * kPi / n_angular;
    for (int i = 0; i < n_radial; ++i)
      for (int j = 0; j < n_angular; ++j) {
        double r = (i + 0.5) * dr, t = (j + 0.5) * da;
        cplx tau = std::polar(r, t);
        double cell = r * dr * da;
        Vec3c Z = inverted ? Vec3c(tau * P + Q) : Vec3c(P + tau * Q);
        Vec3c dZ = inverted ? P : Q;
        int k = active_chart(Z);
        auto [a, b] = chart_slots(k);
        Vec2c x(Z(a) / Z(k), Z(b) / Z(k));
        // derivative of the affine coordinates along the parameter
        Vec2c dx((dZ(a) * Z(k) - Z(a) * dZ(k)) / (Z(k) * Z(k)),
                 (dZ(b) * Z(k) - Z(b) * dZ(k)) / (Z(k) * Z(k)));
        double speed2 = dx.squaredNorm();
        if (speed2 == 0) continue;
        CloudSample s;
        s.chart = k;
        s.x = x;
        s.dir = dx / std::sqrt(speed2);
        s.w = speed2 * cell;
        T.samples.push_back(s);
      }
  };
  add_patch(false);
  add_patch(true);
  return T;
}

}  // namespace fol
