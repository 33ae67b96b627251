#include "foliscope/density.hpp"

#include <map>

namespace fol {

namespace {

// samples of a cloud expressed in the frame chart (transported when needed)
struct FrameSample {
  Vec2c x;
  Vec2c dir;
  double w;
};

std::vector<FrameSample> to_frame(const SampleCloudCurrent& T, int chart) {
  std::vector<FrameSample> out;
  out.reserve(T.samples.size());
  for (const auto& s : T.samples) {
    if (s.chart == chart) {
      out.push_back({s.x, s.dir, s.w});
    } else {
      Vec3c h = affine_to_homogeneous(s.chart, s.x);
      if (std::abs(h(chart)) < 0.2) continue;  // far from the frame window
      auto tr = transport_directed(s.chart, chart, s.x, s.dir, s.w);
      out.push_back({tr.x, tr.dir, tr.w});
    }
  }
  return out;
}

double wedge_weight(const FrameSample& a, const FrameSample& b) {
  cplx det = a.dir(0) * b.dir(1) - a.dir(1) * b.dir(0);
  return a.w * b.w * std::norm(det);
}

}  // namespace

DilationResult tensor_dilate(const SampleCloudCurrent& T1,
                             const SampleCloudCurrent& T2, double lambda,
                             const DiagonalFrame& frame, long pair_budget,
                             uint64_t seed) {
  frame.validate();
  if (lambda < 1.0) throw FrameMismatch("dilation needs lambda >= 1");

  auto s1 = to_frame(T1, frame.chart);
  auto s2 = to_frame(T2, frame.chart);

  DilationResult res;
  res.w_grid = GridMeasure(frame.w_window, frame.grid_n);

  const double reach = frame.z_radius / lambda;

  // Pair atom guard: coincident sample pairs with non-negligible joint
  // weight would break the Lelong hypotheses of the mass formula.
  double tot1 = 0, tot2 = 0;
  for (const auto& s : s1) tot1 += s.w;
  for (const auto& s : s2) tot2 += s.w;

  long full_pairs = long(s1.size()) * long(s2.size());
  bool exact_join = full_pairs <= pair_budget;

  // cell hash over y for the neighbor join at large lambda
  auto process_pair = [&](const FrameSample& a, const FrameSample& b,
                          double inv_prob) {
    res.pairs_considered++;
    const Vec2c& y = b.x;
    if (!frame.w_window.contains(y)) return;
    Vec2c d = a.x - y;
    double dist = d.norm();
    if (dist * lambda >= frame.z_radius) return;
    if (dist < 1e-12) {
      double joint = a.w * b.w;
      if (joint > 1e-6 * tot1 * tot2)
        throw NonConvergent("coincident heavy sample pair (atom) detected");
    }
    double w = wedge_weight(a, b) * inv_prob;
    res.window_sum += w;
    res.w_grid.deposit(y, w);
    // z1/w2 mixed monomial: |xi1 psi2|^2 against (i dz1 dz1b)(i dw2 dw2b)
    res.vertical_sum += a.w * b.w * std::norm(a.dir(0) * b.dir(1)) * inv_prob;
    res.pairs_used++;
  };

  if (exact_join) {
    for (const auto& a : s1)
      for (const auto& b : s2) process_pair(a, b, 1.0);
  } else {
    // spatial join: only pairs within reach can contribute, so bin T2's
    // samples by cells of size reach and enumerate neighbor cells
    const double cell = std::max(reach, 1e-9);
    std::map<std::pair<long, long>, std::vector<int>> bins;
    auto key = [&](const Vec2c& y) {
      return std::make_pair(long(std::floor(y(0).real() / cell)) * 4096 +
                                long(std::floor(y(0).imag() / cell)),
                            long(std::floor(y(1).real() / cell)) * 4096 +
                                long(std::floor(y(1).imag() / cell)));
    };
    for (int i = 0; i < int(s2.size()); ++i) bins[key(s2[i].x)].push_back(i);

    // count neighbor pairs first; subsample when still over budget
    Rng rng(seed);
    double keep = 1.0;
    long neighbor_pairs = 0;
    for (const auto& a : s1) {
      long br = long(std::floor(a.x(0).real() / cell));
      long bi = long(std::floor(a.x(0).imag() / cell));
      long cr = long(std::floor(a.x(1).real() / cell));
      long ci = long(std::floor(a.x(1).imag() / cell));
      for (long dr = -1; dr <= 1; ++dr)
        for (long di = -1; di <= 1; ++di)
          for (long er = -1; er <= 1; ++er)
            for (long ei = -1; ei <= 1; ++ei) {
              auto it = bins.find(std::make_pair((br + dr) * 4096 + bi + di,
                                                 (cr + er) * 4096 + ci + ei));
              if (it != bins.end()) neighbor_pairs += long(it->second.size());
            }
    }
    if (neighbor_pairs > pair_budget && neighbor_pairs > 0)
      keep = double(pair_budget) / double(neighbor_pairs);

    for (const auto& a : s1) {
      long br = long(std::floor(a.x(0).real() / cell));
      long bi = long(std::floor(a.x(0).imag() / cell));
      long cr = long(std::floor(a.x(1).real() / cell));
      long ci = long(std::floor(a.x(1).imag() / cell));
      for (long dr = -1; dr <= 1; ++dr)
        for (long di = -1; di <= 1; ++di)
          for (long er = -1; er <= 1; ++er)
            for (long ei = -1; ei <= 1; ++ei) {
              auto it = bins.find(std::make_pair((br + dr) * 4096 + bi + di,
                                                 (cr + er) * 4096 + ci + ei));
              if (it == bins.end()) continue;
              for (int j : it->second) {
                if (keep < 1.0 && rng.uniform() >= keep) continue;
                process_pair(a, s2[j], keep < 1.0 ? 1.0 / keep : 1.0);
              }
            }
    }
  }
  return res;
}

std::vector<DiagonalFrame> full_diagonal_frames(int grid_n) {
  std::vector<DiagonalFrame> frames;
  for (int k = 0; k < 3; ++k) {
    DiagonalFrame f;
    f.chart = k;
    f.w_window.chart = k;
    f.w_window.center = Vec2c::Zero();
    f.w_window.radius = 1.0;
    f.w_window.shape = ChartWindow::Shape::Bidisc;
    f.grid_n = grid_n;
    frames.push_back(f);
  }
  return frames;
}

DensityEstimate density_mass_estimate(const SampleCloudCurrent& T1,
                                      const SampleCloudCurrent& T2,
                                      const std::vector<double>& lambdas,
                                      const std::vector<DiagonalFrame>& frames,
                                      long pair_budget, uint64_t seed) {
  if (lambdas.size() < 2)
    throw std::invalid_argument("need at least two lambdas to extrapolate");
  DensityEstimate est;
  est.lambdas = lambdas;
  for (double la : lambdas) {
    double mass = 0.0;
    for (const auto& f : frames) {
      auto res = tensor_dilate(T1, T2, la, f, pair_budget, seed);
      double vol_z = kPi * kPi / 2.0 * std::pow(f.z_radius, 4.0);
      mass += res.window_sum * std::pow(la, 4.0) / vol_z;
    }
    est.masses.push_back(mass);
  }
  // linear fit in 1/lambda over the last three points
  int n = int(est.masses.size());
  int k0 = std::max(0, n - 3);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = k0; i < n; ++i) {
    double x = 1.0 / est.lambdas[i], y = est.masses[i];
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) {
    est.theta_mass = est.masses.back();
  } else {
    est.theta_mass = (sy * sxx - sx * sxy) / denom;  // intercept at 1/la = 0
  }
  est.error = std::abs(est.masses[n - 1] - est.theta_mass) +
              0.5 * std::abs(est.masses[n - 1] - est.masses[n - 2]);
  if (n >= 3) {
    double d1 = std::abs(est.masses[n - 1] - est.masses[n - 2]);
    double d2 = std::abs(est.masses[n - 2] - est.masses[n - 3]);
    if (est.error > 0 && d1 > 3.0 * (est.error + 1e-12) && d1 > d2 * 3.0)
      throw NonConvergent("successive density estimates diverge");
  }
  return est;
}

// ---------------------------------------------------------------------------
// Young operators on radial profiles

YoungOperator::YoungOperator(YoungKernel kind, int n, double r, double delta)
    : n_(n), r_(r), delta_(delta) {
  if (kind == YoungKernel::InverseSquare && !(delta >= 0.0 && delta < 1.0))
    throw std::invalid_argument("inverse-square kernel needs delta in [0,1)");
  if (kind == YoungKernel::ConvolutionR && delta != 0.0)
    throw std::invalid_argument("convolution kernel fixes delta = 0");
  A_.resize(n, n);
  cell_vol_.resize(n);
  const double h = 1.0 / n;
  // |S^3| = 2 pi^2; shell volume between radii
  for (int j = 0; j < n; ++j) {
    double t0 = j * h, t1 = (j + 1) * h;
    cell_vol_(j) = kPi * kPi / 2.0 * (std::pow(t1, 4) - std::pow(t0, 4));
  }
  auto kern = [&](double d2) -> double {
    if (kind == YoungKernel::InverseSquare) return 1.0 / std::max(d2, 1e-300);
    return d2 < r_ * r_ ? 1.0 / (r_ * r_ * r_ * r_) : 0.0;
  };
  // A(i,j): cellwise quadrature of the kernel over shell j against the
  // sphere angle; integrand depends on the angle between x and y only:
  // d^2 = s^2 + t^2 - 2 s t cos(theta), dsigma = |S^2| sin^2(theta) dtheta
  for (int i = 0; i < n; ++i) {
    double s = (i + 0.5) * h;
    for (int j = 0; j < n; ++j) {
      int sub_t = (std::abs(i - j) <= 1) ? 12 : 2;
      int sub_a = (std::abs(i - j) <= 2) ? 512 : 96;
      double acc = 0.0;
      for (int bt = 0; bt < sub_t; ++bt) {
        double t = (j + (bt + 0.5) / sub_t) * h;
        double ring = 0.0;
        for (int ba = 0; ba < sub_a; ++ba) {
          double a = (ba + 0.5) * kPi / sub_a;
          double d2 = s * s + t * t - 2.0 * s * t * std::cos(a);
          ring += kern(d2) * std::sin(a) * std::sin(a);
        }
        ring *= kPi / sub_a * 4.0 * kPi;  // |S^2| = 4 pi
        acc += ring * t * t * t * (h / sub_t);
      }
      A_(i, j) = acc;
    }
  }
}

Eigen::VectorXd YoungOperator::apply(const Eigen::VectorXd& f) const {
  if (f.size() != n_) throw std::invalid_argument("profile size mismatch");
  return A_ * f;
}

double YoungOperator::l2_norm(const Eigen::VectorXd& f) const {
  double s = 0;
  for (int i = 0; i < n_; ++i) s += f(i) * f(i) * cell_vol_(i);
  return std::sqrt(s);
}

double YoungOperator::norm_ratio(const Eigen::VectorXd& f) const {
  double nf = l2_norm(f);
  if (nf == 0) return 0.0;
  return l2_norm(apply(f)) / nf;
}

Eigen::VectorXd random_radial_profile(int n, uint64_t seed) {
  // random low-frequency cosine series; the same seed yields the same
  // continuous profile at any resolution
  Rng rng(seed);
  double a[9], b[9];
  for (int m = 0; m < 9; ++m) {
    a[m] = rng.gaussian() / (1.0 + m);
    b[m] = rng.gaussian() / (1.0 + m);
  }
  Eigen::VectorXd f(n);
  for (int i = 0; i < n; ++i) {
    double s = (i + 0.5) / n, v = 0;
    for (int m = 0; m < 9; ++m)
      v += a[m] * std::cos(m * kPi * s) + b[m] * std::sin(m * kPi * s);
    f(i) = v;
  }
  return f;
}

}  // namespace fol
