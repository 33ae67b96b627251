#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "foliscope/atlas.hpp"

// Embedded Dormand-Prince 5(4) with Hairer's quartic dense output, on
// states in C^2.  The complex-time leaf equation dx/dzeta = v(x) along a
// straight segment zeta(s) = zeta0 + s*dz, s in [0,1], is integrated as
// dx/ds = dz * v(x).

namespace fol {

struct StepUnderflow : std::runtime_error {
  explicit StepUnderflow(const std::string& m) : std::runtime_error(m) {}
};

struct DenseStep {
  double s0, h;
  Vec2c r1, r2, r3, r4, r5;  // contd5 coefficients
  Vec2c eval(double s) const {
    double th = (s - s0) / h, th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
  }
  Vec2c deriv(double s) const {  // d/ds
    double th = (s - s0) / h;
    Vec2c d = r2 + (1.0 - 2.0 * th) * r3 + th * (2.0 - 3.0 * th) * r4 +
              2.0 * th * (1.0 - th) * (1.0 - 2.0 * th) * r5;
    return d / h;
  }
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

// Integrates dX/ds = f(X) over s in [0,1].  The monitor is called after
// every accepted step with the dense record; returning false aborts the
// integration (the caller decides what the abort means).
template <class Rhs, class Monitor>
bool integrate_dp54(const Rhs& f, Vec2c& x, double tol, OdeStats& stats,
                    const Monitor& monitor, std::vector<DenseStep>* dense = nullptr) {
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                      a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static const double d1 = -12715105075.0 / 11282082432.0,
                      d3 = 87487479700.0 / 32700410799.0,
                      d4 = -10690763975.0 / 1880347072.0,
                      d5 = 701980252875.0 / 199316789632.0,
                      d6 = -1453857185.0 / 822651844.0,
                      d7 = 69997945.0 / 29380423.0;
  (void)c2; (void)c3; (void)c4; (void)c5;

  double s = 0.0, h = 0.1;
  const double hmin = 1e-14;
  Vec2c k1 = f(x);
  stats.rhs_evals++;
  while (s < 1.0) {
    if (h < hmin) throw StepUnderflow("step size underflow in dp54");
    if (s + h > 1.0) h = 1.0 - s;
    Vec2c k2 = f(x + h * (a21 * k1));
    Vec2c k3 = f(x + h * (a31 * k1 + a32 * k2));
    Vec2c k4 = f(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Vec2c k5 = f(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vec2c k6 = f(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec2c x1 = x + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    Vec2c k7 = f(x1);
    stats.rhs_evals += 6;
    Vec2c errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double scale = tol * (1.0 + std::max(x.norm(), x1.norm()));
    double err = errv.norm() / scale;
    if (err <= 1.0 || h <= 2 * hmin) {
      DenseStep ds;
      ds.s0 = s;
      ds.h = h;
      Vec2c ydiff = x1 - x;
      Vec2c bspl = h * k1 - ydiff;
      ds.r1 = x;
      ds.r2 = ydiff;
      ds.r3 = bspl;
      ds.r4 = ydiff - h * k7 - bspl;
      ds.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      s += h;
      x = x1;
      k1 = k7;  // FSAL
      stats.accepted++;
      if (dense) dense->push_back(ds);
      if (!monitor(ds, s, x)) return false;
      h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    } else {
      stats.rejected++;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
    }
  }
  return true;
}

}  // namespace fol
