#include "foliscope/sector.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace fol {

SectorModel::SectorModel(cplx eta) : eta_(eta) {
  if (!(eta.imag() > 0))
    throw std::invalid_argument("sector model requires Im(eta) > 0");
  angle_ = std::atan2(eta.imag(), -eta.real());  // arctan(-b/a) in (0, pi)
  gamma_ = kPi / angle_;
  edge2_ = -std::conj(eta) / std::abs(eta);
}

double gamma_of(cplx eta) { return SectorModel(eta).gamma(); }

cplx SectorModel::phi(cplx z) const {
  if (z == cplx(0, 0)) return 0.0;
  if (!in_sector(z, 1e-9 * (1.0 + std::abs(z))))
    throw BranchViolation("phi applied outside the closed sector");
  return std::exp(gamma_ * std::log(z));
}

cplx SectorModel::phi_inv(cplx w) const {
  if (w == cplx(0, 0)) return 0.0;
  if (w.imag() < -1e-9 * (1.0 + std::abs(w)))
    throw BranchViolation("phi_inv applied below the real axis");
  return std::exp(std::log(w) / gamma_);
}

Vec2c leaf_point(cplx eta, cplx alpha, cplx zeta) {
  double b = eta.imag();
  if (b == 0) throw std::invalid_argument("leaf_point requires Im(eta) != 0");
  cplx shift = zeta + std::log(std::abs(alpha)) / b;
  const cplx I(0, 1);
  return Vec2c(alpha * std::exp(I * eta * shift), std::exp(I * shift));
}

Vec2c leaf_direction(cplx eta, const Vec2c& x) {
  Vec2c v(eta * x(0), x(1));
  double n = v.norm();
  if (n == 0) return Vec2c(1, 0);
  return v / n;
}

HarmonicWeight HarmonicWeight::from_atoms(std::vector<Atom> atoms) {
  HarmonicWeight H;
  H.atoms_ = std::move(atoms);
  return H;
}

HarmonicWeight HarmonicWeight::from_density(std::vector<double> knots,
                                            std::vector<double> values,
                                            bool extend) {
  if (knots.size() != values.size() || knots.size() < 2)
    throw std::invalid_argument("density needs matching knots and values");
  for (size_t i = 1; i < knots.size(); ++i)
    if (knots[i] <= knots[i - 1])
      throw std::invalid_argument("density knots must increase");
  for (double v : values)
    if (v < 0) throw std::invalid_argument("density must be nonnegative");
  HarmonicWeight H;
  H.knots_ = std::move(knots);
  H.vals_ = std::move(values);
  H.extend_ = extend;
  return H;
}

HarmonicWeight HarmonicWeight::constant(double c) {
  return from_density({-1.0, 1.0}, {c, c}, true);
}

double HarmonicWeight::eval(double U, double V) const {
  if (V < 0) throw std::invalid_argument("poisson evaluation needs V >= 0");
  if (V == 0) {
    // boundary contract: the density value (an atom exactly at U is infinite)
    for (const auto& a : atoms_)
      if (a.t == U) return std::numeric_limits<double>::infinity();
    if (knots_.empty()) return 0.0;
    if (U <= knots_.front()) return extend_ ? vals_.front() : 0.0;
    if (U >= knots_.back()) return extend_ ? vals_.back() : 0.0;
    auto it = std::upper_bound(knots_.begin(), knots_.end(), U);
    size_t i = size_t(it - knots_.begin()) - 1;
    double t0 = knots_[i], t1 = knots_[i + 1];
    return vals_[i] + (vals_[i + 1] - vals_[i]) * (U - t0) / (t1 - t0);
  }
  double sum = 0.0;
  for (const auto& a : atoms_) {
    double d = a.t - U;
    sum += a.m / kPi * V / (V * V + d * d);
  }
  if (!knots_.empty()) {
    // closed-form Poisson integral of the piecewise-linear density
    auto seg = [&](double p, double q, double c, double d) {
      // integral over [p,q] of K(t) (c + d t), K = (1/pi) V/(V^2+(t-U)^2)
      double ap = std::atan((p - U) / V), aq = std::atan((q - U) / V);
      double lp = std::log(V * V + (p - U) * (p - U));
      double lq = std::log(V * V + (q - U) * (q - U));
      return (c + d * U) * (aq - ap) / kPi + d * V * (lq - lp) / (2.0 * kPi);
    };
    for (size_t i = 0; i + 1 < knots_.size(); ++i) {
      double t0 = knots_[i], t1 = knots_[i + 1];
      double d = (vals_[i + 1] - vals_[i]) / (t1 - t0);
      double c = vals_[i] - d * t0;
      sum += seg(t0, t1, c, d);
    }
    if (extend_) {
      double a0 = std::atan((knots_.front() - U) / V);
      double a1 = std::atan((knots_.back() - U) / V);
      sum += vals_.front() * (a0 + kPi / 2) / kPi;
      sum += vals_.back() * (kPi / 2 - a1) / kPi;
    }
  }
  return sum;
}

double HarmonicWeight::total_atom_mass() const {
  double m = 0;
  for (const auto& a : atoms_) m += a.m;
  return m;
}

double HarmonicWeight::boundary_mass() const {
  if (has_extension()) return std::numeric_limits<double>::infinity();
  double m = total_atom_mass();
  for (size_t i = 0; i + 1 < knots_.size(); ++i)
    m += 0.5 * (vals_[i] + vals_[i + 1]) * (knots_[i + 1] - knots_[i]);
  return m;
}

double HarmonicWeight::support_radius() const {
  double r = 0;
  for (const auto& a : atoms_) r = std::max(r, std::abs(a.t));
  for (double t : knots_) r = std::max(r, std::abs(t));
  return r;
}

double HarmonicWeight::integrability_integral(double gamma) const {
  if (has_extension()) return std::numeric_limits<double>::infinity();
  double p = -1.0 + 1.0 / gamma;
  double s = 0;
  for (const auto& a : atoms_) s += a.m * std::pow(std::abs(a.t), p);
  if (!knots_.empty()) {
    // fine midpoint grid; the |t|^p singularity at 0 is integrable
    const int n = 4000;
    double lo = knots_.front(), hi = knots_.back();
    double h = (hi - lo) / n;
    for (int i = 0; i < n; ++i) {
      double t = lo + (i + 0.5) * h;
      s += eval(t, 0.0) * std::pow(std::abs(t), p) * h;
    }
  }
  return s;
}

void HarmonicWeight::scale(double f) {
  for (auto& a : atoms_) a.m *= f;
  for (auto& v : vals_) v *= f;
}

double harmonic_mean_value_residual(const HarmonicWeight& H, double U, double V,
                                    double rho, int n) {
  double center = H.eval(U, V);
  double avg = 0.0;
  for (int i = 0; i < n; ++i) {
    double a = 2.0 * kPi * i / n;
    avg += H.eval(U + rho * std::cos(a), V + rho * std::sin(a));
  }
  avg /= n;
  return std::abs(avg - center);
}

double poisson_harnack_kappa() {
  // For |w - w'| <= 1 with heights V, V' >= 2 and any t real:
  //   K(t;w')/K(t;w) = (V'/V) (V^2+(t-U)^2)/(V'^2+(t-U')^2)
  // V'/V <= 2, and with D^2 = V^2+(t-U)^2 >= 4 one checks
  // V'^2+(t-U')^2 >= ... the reverse quotient is <= 3.5, giving kappa = 7.
  return 7.0;
}

double sector_weight(const SectorModel& S, const HarmonicWeight& H, cplx zeta) {
  cplx w = S.phi(zeta);
  double V = w.imag();
  if (V < 0) {
    if (V > -1e-9 * (1.0 + std::abs(w))) V = 0.0;
    else throw BranchViolation("sector weight below the boundary");
  }
  return H.eval(w.real(), V);
}

HarmonicWeight default_weight_family(const SectorModel& S, cplx alpha) {
  // atoms at Phi-images of points on both edges of the sector; the radii
  // are jittered deterministically by alpha so distinct leaves carry
  // distinct weights; masses scale to integrability integral 1
  uint64_t h = 0x9e3779b97f4a7c15ull;
  double la = std::log(std::abs(alpha)), aa = std::arg(alpha);
  uint64_t bits;
  static_assert(sizeof(double) == sizeof(uint64_t));
  std::memcpy(&bits, &la, 8);
  h ^= bits + (h << 6);
  std::memcpy(&bits, &aa, 8);
  h ^= bits + (h << 6);
  std::vector<HarmonicWeight::Atom> atoms;
  const double radii[4] = {0.25, 0.5, 1.0, 2.0};
  for (int e = 0; e < 2; ++e)
    for (int i = 0; i < 4; ++i) {
      double jit = 1.0 + 0.15 * (double(splitmix64(h) >> 11) * 0x1.0p-53 - 0.5);
      double t = std::pow(radii[i] * jit, S.gamma());
      atoms.push_back({e == 0 ? t : -t, 1.0});
    }
  HarmonicWeight H = HarmonicWeight::from_atoms(atoms);
  double I = H.integrability_integral(S.gamma());
  H.scale(1.0 / I);
  return H;
}

// ---------------------------------------------------------------------------
// quadrature

namespace {

// Gauss-Legendre nodes on (-1,1)
const double kG4x[4] = {-0.8611363115940526, -0.3399810435848563,
                        0.3399810435848563, 0.8611363115940526};
const double kG4w[4] = {0.3478548451374538, 0.6521451548625461,
                        0.6521451548625461, 0.3478548451374538};
const double kG8x[8] = {-0.9602898564975363, -0.7966664774136267,
                        -0.5255324099163290, -0.1834346424956498,
                        0.1834346424956498,  0.5255324099163290,
                        0.7966664774136267,  0.9602898564975363};
const double kG8w[8] = {0.1012285362903763, 0.2223810344533745,
                        0.3137066458778873, 0.3626837833783620,
                        0.3626837833783620, 0.3137066458778873,
                        0.2223810344533745, 0.1012285362903763};

double gauss4(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0;
  for (int i = 0; i < 4; ++i) s += kG4w[i] * f(c + h * kG4x[i]);
  return s * h;
}
double gauss8(const std::function<double(double)>& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0;
  for (int i = 0; i < 8; ++i) s += kG8w[i] * f(c + h * kG8x[i]);
  return s * h;
}

double adaptive_gauss(const std::function<double(double)>& f, double a,
                      double b, double tol, int depth = 0) {
  double c4 = gauss4(f, a, b), c8 = gauss8(f, a, b);
  double err = std::abs(c8 - c4);
  if (err <= tol * (1.0 + std::abs(c8)) || depth >= 28 || (b - a) < 1e-14)
    return c8;
  double m = 0.5 * (a + b);
  return adaptive_gauss(f, a, m, tol * 0.7, depth + 1) +
         adaptive_gauss(f, m, b, tol * 0.7, depth + 1);
}

}  // namespace

double expectation(const std::function<double(double)>& f, double s,
                   double rel_tol) {
  if (!(s > 0)) throw std::invalid_argument("expectation needs s > 0");
  double v = adaptive_gauss(f, 0.0, s, rel_tol);
  if (!std::isfinite(v)) throw QuadratureFailure("expectation did not converge");
  return v / s;
}

// ---------------------------------------------------------------------------
// line integrals with certified tails

namespace {

// kernel-decay tail: for |zeta| >= (2T)^{1/gamma} and |zeta| >= 2|zeta0|,
// H(zeta) <= (4 M / pi) |zeta|^{-gamma}, so the tail along zeta0 + l d is
// bounded by (4M/pi) (l|d| - |zeta0|)^{1-gamma} / ((gamma-1)|d|).
struct TailCert {
  double M, T, gamma, absd, absz0;
  double valid_from_l() const {
    double need = std::max(std::pow(2.0 * std::max(T, 1e-6), 1.0 / gamma),
                           2.0 * absz0 + 1.0);
    return (need + absz0) / absd;
  }
  double bound(double l0) const {
    double base = l0 * absd - absz0;
    return 4.0 * M / kPi * std::pow(base, 1.0 - gamma) / ((gamma - 1.0) * absd);
  }
};

LineIntegral line_integral_with_tail(const SectorModel& S,
                                     const HarmonicWeight& H, cplx z0, cplx d,
                                     double l_start, double tail_frac) {
  if (!H.compact())
    throw TailBoundFailure("tail certificate needs compactly supported data");
  TailCert cert{H.boundary_mass(), H.support_radius(), S.gamma(), std::abs(d),
                std::abs(z0)};
  auto h = [&](double l) -> double {
    cplx z = z0 + l * d;
    if (!S.in_sector(z, 1e-12 * (1.0 + std::abs(z)))) return 0.0;
    return sector_weight(S, H, z);
  };
  double l0 = std::max(l_start + 4.0, cert.valid_from_l());
  LineIntegral out{0.0, 0.0, 0.0};
  // head over geometric panels, then extend until the tail certificate
  // clears the requested fraction
  double a = l_start, panel = 1.0;
  while (a < l0) {
    double b = std::min(a + panel, l0);
    out.head += adaptive_gauss(h, a, b, 1e-10);
    a = b;
    panel *= 2.0;
  }
  out.l_max = l0;
  for (int it = 0; it < 60; ++it) {
    out.tail_bound = cert.bound(out.l_max);
    double ref = std::max(out.head, 1e-12);
    if (out.tail_bound <= tail_frac * ref) return out;
    double next = out.l_max * 2.0;
    out.head += adaptive_gauss(h, out.l_max, next, 1e-10);
    out.l_max = next;
    if (out.l_max > 1e13)
      throw TailBoundFailure("tail bound exceeds the requested fraction");
  }
  throw TailBoundFailure("tail bound iteration did not converge");
}

}  // namespace

LineIntegral g_integral(const SectorModel& S, const HarmonicWeight& H,
                        int branch, double s, double tail_frac) {
  if (s < 0) throw std::invalid_argument("g_integral needs s >= 0");
  cplx z0 = branch == 1 ? S.lambda1_point(s, 0.0) : S.lambda2_point(s, 0.0);
  cplx d = branch == 1 ? cplx(1.0, 0.0) : -std::conj(S.eta());
  return line_integral_with_tail(S, H, z0, d, 0.0, tail_frac);
}

LineIntegral ray_integral(const SectorModel& S, const HarmonicWeight& H,
                          cplx zhat, double tail_frac) {
  if (!(S.in_sector(zhat) &&
        S.in_sector(zhat, -1e-9 * std::abs(zhat))))
    throw std::invalid_argument("ray direction must be interior to the sector");
  return line_integral_with_tail(S, H, 0.0, zhat, 0.0, tail_frac);
}

LineIntegral axe_sum_integral(const SectorModel& S, const HarmonicWeight& H,
                              int branch, double s, double hbar) {
  cplx z0 = branch == 1 ? S.lambda1_point(s, 0.0) : S.lambda2_point(s, 0.0);
  cplx d = branch == 1 ? cplx(1.0, 0.0) : -std::conj(S.eta());
  return line_integral_with_tail(S, H, z0, d, hbar * s, 0.1);
}

// ---------------------------------------------------------------------------
// intersections

namespace {

struct LeafCache {
  cplx eta, alpha, beta;
  double la, lb;  // log|alpha|/b, log|beta|/b
  cplx x1(cplx z) const {
    return alpha * std::exp(cplx(0, 1) * eta * (z + la));
  }
  cplx x2(cplx z) const { return std::exp(cplx(0, 1) * (z + la)); }
  cplx y1(cplx z) const {
    return beta * std::exp(cplx(0, 1) * eta * (z + lb));
  }
  cplx y2(cplx z) const { return std::exp(cplx(0, 1) * (z + lb)); }
};

}  // namespace

IntersectionSet solve_intersections(const SectorModel& S, cplx alpha, cplx beta,
                                    const Vec2c& theta, double lambda,
                                    const SolveOptions& opt) {
  IntersectionSet out;
  out.alpha = alpha;
  out.beta = beta;
  out.theta = theta;
  out.lambda = lambda;

  const double b = S.b();
  LeafCache L{S.eta(), alpha, beta, std::log(std::abs(alpha)) / b,
              std::log(std::abs(beta)) / b};
  const cplx I(0, 1);
  const cplx t1 = theta(0) / lambda, t2 = theta(1) / lambda;
  const double s = std::log(lambda);
  const double t_max = std::max(4.0, s) + opt.t_max_extra;
  const double res_gate = 1e-10 * theta.norm() / lambda;

  const cplx kmult = std::exp(2.0 * kPi * I * S.eta());  // y1 shift per k

  std::vector<std::pair<cplx, cplx>> seeds;

  const int n = std::max(2, int(t_max / opt.scan_step));
  const double step = t_max / n;
  for (int i1 = 1; i1 <= n; ++i1)
    for (int i2 = 1; i2 <= n; ++i2) {
      out.cells_scanned++;
      cplx z = S.from_coords(i1 * step, i2 * step);
      cplx x1 = L.x1(z), x2 = L.x2(z);
      cplx w2 = x2 - t2;
      if (w2 == cplx(0, 0)) continue;
      // zcheck solves the second equation exactly, up to the 2 pi k lattice
      cplx zc0 = -I * std::log(w2) - L.lb;
      auto [c1, c2] = S.to_coords(zc0);
      if (c2 <= 0.0 || c2 > t_max) continue;
      int klo = int(std::ceil((-c1) / (2.0 * kPi)));
      int khi = int(std::floor((t_max - c1) / (2.0 * kPi)));
      cplx y1 = L.y1(zc0 + 2.0 * kPi * double(klo));
      for (int k = klo; k <= khi; ++k, y1 *= kmult) {
        double R = std::abs(x1 - y1 - t1);
        double scale = std::abs(x1) + std::abs(y1) + std::abs(t1);
        if (R < 0.35 * scale)
          seeds.emplace_back(z, zc0 + 2.0 * kPi * double(k));
      }
    }

  // damped Newton on the full 2x2 complex system from every seed
  auto newton = [&](cplx z, cplx zc) -> std::optional<IntersectionRoot> {
    for (int it = 0; it < 60; ++it) {
      cplx x1 = L.x1(z), x2 = L.x2(z), y1 = L.y1(zc), y2 = L.y2(zc);
      cplx F1 = x1 - y1 - t1, F2 = x2 - y2 - t2;
      Mat2c J;
      J << I * S.eta() * x1, -I * S.eta() * y1, I * x2, -I * y2;
      Eigen::FullPivLU<Mat2c> lu(J);
      if (!lu.isInvertible()) return std::nullopt;
      Vec2c d = lu.solve(Vec2c(F1, F2));
      double damp = 1.0;
      double f0 = std::hypot(std::abs(F1), std::abs(F2));
      cplx zn = z, zcn = zc;
      for (int bt = 0; bt < 8; ++bt) {
        zn = z - damp * d(0);
        zcn = zc - damp * d(1);
        cplx G1 = L.x1(zn) - L.y1(zcn) - t1, G2 = L.x2(zn) - L.y2(zcn) - t2;
        if (std::hypot(std::abs(G1), std::abs(G2)) < f0) break;
        damp *= 0.5;
      }
      z = zn;
      zc = zcn;
      if (std::abs(d(0)) * damp + std::abs(d(1)) * damp < 1e-12) {
        cplx x1f = L.x1(z), y1f = L.y1(zc), x2f = L.x2(z), y2f = L.y2(zc);
        double res = std::hypot(std::abs(x1f - y1f - t1),
                                std::abs(x2f - y2f - t2));
        if (res > res_gate) return std::nullopt;
        if (!S.in_sector(z) || !S.in_sector(zc)) return std::nullopt;
        auto [cs1, cs2] = S.to_coords(z);
        auto [cc1, cc2] = S.to_coords(zc);
        if (std::max({cs1, cs2, cc1, cc2}) > t_max) return std::nullopt;
        IntersectionRoot r;
        r.zeta = z;
        r.zcheck = zc;
        r.residual = res;
        r.rho1 = x1f / y1f;
        r.rho2 = x2f / y2f;
        bool a1 = std::abs(r.rho1 - 1.0) <= opt.epsilon;
        bool a2 = std::abs(r.rho2 - 1.0) <= opt.epsilon;
        r.region = a1 && a2 ? 'A' : (!a1 && !a2 ? 'C' : 'B');
        return r;
      }
    }
    return std::nullopt;
  };

  for (const auto& [z, zc] : seeds) {
    auto root = newton(z, zc);
    if (!root) {
      out.newton_stalls++;
      continue;
    }
    bool merged = false;
    for (auto& r : out.roots)
      if (std::abs(r.zeta - root->zeta) + std::abs(r.zcheck - root->zcheck) <
          opt.dedup) {
        merged = true;
        break;
      }
    if (!merged) out.roots.push_back(*root);
  }

  std::sort(out.roots.begin(), out.roots.end(),
            [](const IntersectionRoot& a, const IntersectionRoot& b) {
              if (a.zeta.real() != b.zeta.real())
                return a.zeta.real() < b.zeta.real();
              return a.zeta.imag() < b.zeta.imag();
            });
  return out;
}

ConditionAA condition_aa(cplx eta, cplx alpha, cplx beta, double n_factor,
                         double epsilon) {
  double aa = std::arg(alpha), ab = std::arg(beta);
  if (aa < 0) aa += 2.0 * kPi;
  if (ab < 0) ab += 2.0 * kPi;
  cplx base = (aa - ab) -
              cplx(0, 1) * (std::log(std::abs(alpha)) - std::log(std::abs(beta)));
  ConditionAA best{false, base, 0, 0};
  double bmin = std::numeric_limits<double>::infinity();
  for (int nn = -8; nn <= 8; ++nn)
    for (int mm = -8; mm <= 8; ++mm) {
      cplx d = base - 2.0 * kPi * double(nn) + 2.0 * kPi * eta * double(mm);
      if (std::abs(d) < bmin) {
        bmin = std::abs(d);
        best.delta = d;
        best.n = nn;
        best.m = mm;
      }
    }
  best.holds = bmin <= n_factor * epsilon;
  return best;
}

bool sparse_check(const std::vector<Eigen::VectorXd>& points, int N,
                  int* observed_max) {
  if (points.empty()) {
    if (observed_max) *observed_max = 0;
    return true;
  }
  const double rad = 1.0 - 1e-9;
  std::vector<Eigen::VectorXd> centers = points;
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      if ((points[i] - points[j]).norm() < 2.0)
        centers.push_back(0.5 * (points[i] + points[j]));
  if (points[0].size() <= 2) {
    Eigen::VectorXd lo = points[0], hi = points[0];
    for (const auto& p : points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    const double h = 0.05;
    if (points[0].size() == 2) {
      for (double x = lo(0) - 1; x <= hi(0) + 1; x += h)
        for (double y = lo(1) - 1; y <= hi(1) + 1; y += h) {
          Eigen::VectorXd c(2);
          c << x, y;
          centers.push_back(c);
        }
    }
  }
  int mx = 0;
  for (const auto& c : centers) {
    int cnt = 0;
    for (const auto& p : points)
      if ((p - c).norm() < rad) ++cnt;
    mx = std::max(mx, cnt);
  }
  if (observed_max) *observed_max = mx;
  return mx <= N;
}

bool dominated_check(const std::vector<Eigen::VectorXd>& z,
                     const std::vector<Eigen::VectorXd>& zprime, double kappa) {
  for (const auto& p : z) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : zprime) best = std::min(best, (p - q).norm());
    if (!(best <= kappa)) return false;
  }
  return true;
}

SliceMass slice_mass(const SectorModel& S, cplx alpha, cplx beta,
                     const Vec2c& theta, double lambda,
                     const HarmonicWeight& Ha, const HarmonicWeight& Hb,
                     const SolveOptions& opt) {
  SliceMass out{0.0, 0.0, solve_intersections(S, alpha, beta, theta, lambda, opt)};
  for (const auto& r : out.roots.roots)
    out.value += double(r.multiplicity) * sector_weight(S, Ha, r.zeta) *
                 sector_weight(S, Hb, r.zcheck);

  // Reported truncation tail.  Roots beyond the box are dominated by the
  // structured half-lines (regions B and C of the classification), and the
  // weights there obey the kernel decay H <= (4M/pi)|zeta|^{-gamma}.  The
  // missed sum is bounded by sparse-count x Harnack x the certified
  // half-line tail integrals beyond the box.
  const double s = std::log(lambda);
  const double box = std::max(4.0, s) + opt.t_max_extra;
  const double kappa = poisson_harnack_kappa();
  auto tail_beyond = [&](const HarmonicWeight& H) -> double {
    if (!H.compact()) return std::numeric_limits<double>::infinity();
    double M = H.boundary_mass();
    double g = S.gamma();
    // integral of (4M/pi) l^{-gamma} over l >= box, once per dominating
    // direction family (Q, Lambda_1, Lambda_2)
    return 3.0 * 4.0 * M / kPi * std::pow(box, 1.0 - g) / (g - 1.0);
  };
  auto near_corner = [&](const HarmonicWeight& H) -> double {
    double m = 0.0;
    for (double ss : {std::max(1.0, s), std::max(1.0, s) * 0.5})
      m = std::max(m, sector_weight(S, H, S.zeta_s(ss)));
    return kappa * m;
  };
  int nobs = std::max<int>(1, int(out.roots.roots.size()));
  out.tail_bound = kappa * nobs *
                   (tail_beyond(Ha) * near_corner(Hb) +
                    tail_beyond(Hb) * near_corner(Ha));
  return out;
}

AnnulusMeasure sobol_annulus_measure(const SectorModel& S, int n) {
  AnnulusMeasure mu;
  Sobol2 sob;
  double range = 2.0 * kPi * S.b();
  for (int i = 0; i < n; ++i) {
    auto [u, v] = sob.point(uint64_t(i) + 1);
    double la = -range * (0.01 + 0.98 * u);
    double aa = 2.0 * kPi * v;
    mu.alphas.push_back(std::polar(std::exp(la), aa));
    mu.weights.push_back(1.0 / n);
  }
  return mu;
}

LocalCurrentModel assemble_local_current(const SectorModel& S,
                                         const AnnulusMeasure& mu,
                                         int n_zeta) {
  // precondition: mu without atoms (finite surrogate: distinct points, no
  // dominant weight)
  double tot = 0;
  for (double w : mu.weights) tot += w;
  for (double w : mu.weights)
    if (w > 0.05 * tot)
      throw AtomDetected("a mu weight exceeds 5% of the total");
  for (size_t i = 0; i < mu.alphas.size(); ++i)
    for (size_t j = i + 1; j < mu.alphas.size(); ++j)
      if (std::abs(mu.alphas[i] - mu.alphas[j]) == 0.0)
        throw AtomDetected("coincident alpha samples");

  LocalCurrentModel model{S, mu, {}, {}};
  double b = S.b(), mod = std::abs(S.eta());
  double s1_max = 6.0 / b, s2_max = 6.0 * mod / b;
  double d1 = s1_max / n_zeta, d2 = s2_max / n_zeta;
  double area_jac = b / mod;  // zeta-area per unit sector coordinates

  for (size_t ia = 0; ia < mu.alphas.size(); ++ia) {
    cplx alpha = mu.alphas[ia];
    HarmonicWeight H = default_weight_family(S, alpha);
    model.weights.push_back(H);
    std::vector<CloudSample> local;
    double mass = 0.0;
    for (int i = 0; i < n_zeta; ++i)
      for (int j = 0; j < n_zeta; ++j) {
        cplx z = S.from_coords((i + 0.5) * d1, (j + 0.5) * d2);
        Vec2c x = leaf_point(S.eta(), alpha, z);
        Vec2c v(S.eta() * x(0), x(1));
        double speed2 = v.squaredNorm();
        double w = sector_weight(S, H, z) * speed2 * d1 * d2 * area_jac;
        if (!(w > 0)) continue;
        CloudSample smp{0, x, v / std::sqrt(speed2), w};
        local.push_back(smp);
        mass += w;
      }
    if (mass <= 0) continue;
    // the leaf mass of T_alpha in the bidisc is normalized to 1
    for (auto& smp : local) {
      smp.w *= mu.weights[ia] / mass;
      model.cloud.samples.push_back(smp);
    }
  }
  return model;
}

}  // namespace fol
