#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

// Charts of the projective plane, transition maps and the Fubini-Study
// form normalized so that a projective line has mass 1 and the total
// volume is 1.  Every other module works through these coordinates.

namespace fol {

using cplx = std::complex<double>;
using Vec2c = Eigen::Vector2cd;
using Vec3c = Eigen::Vector3cd;
using Mat2c = Eigen::Matrix2cd;

constexpr double kPi = 3.14159265358979323846264338327950288;

struct ChartUndefined : std::runtime_error {
  explicit ChartUndefined(const std::string& m) : std::runtime_error(m) {}
};

// Indices of the two affine coordinates of chart k, in increasing order.
inline std::pair<int, int> chart_slots(int k) {
  switch (k) {
    case 0: return {1, 2};
    case 1: return {0, 2};
    default: return {0, 1};
  }
}

// A point of P^2 carried in an affine chart, with homogeneous backing.
// The active chart is one where the dehomogenizing coordinate has maximal
// modulus (ties broken by lowest index), so both affine coordinates have
// modulus <= 1.
class SurfacePoint {
 public:
  SurfacePoint() : chart_(0) { homog_ << 1, 0, 0; affine_.setZero(); }

  static SurfacePoint from_homogeneous(const Vec3c& z);
  static SurfacePoint from_affine(int chart, const Vec2c& x);

  int chart() const { return chart_; }
  const Vec2c& affine() const { return affine_; }
  const Vec3c& homogeneous() const { return homog_; }

  // affine coordinates of this point in chart k
  Vec2c in_chart(int k) const;

 private:
  Vec3c homog_;
  Vec2c affine_;
  int chart_;
};

// best chart for a homogeneous vector: maximal modulus, lowest index tie-break
int active_chart(const Vec3c& z);

Vec3c affine_to_homogeneous(int chart, const Vec2c& x);

// pair (affine in chart k); throws ChartUndefined when the dehomogenizing
// coordinate vanishes
Vec2c to_chart(const SurfacePoint& p, int k);

// Transition map chart j -> chart k and its complex Jacobian at x (affine
// coordinates of chart j).
Vec2c transition(int j, int k, const Vec2c& x);
Mat2c transition_jacobian(int j, int k, const Vec2c& x);

// Coefficient matrix M of the Fubini-Study form in chart coordinates,
// omega = sum M_jk (i/2) dx_j ^ dxbar_k, with M Hermitian positive.
// Normalization: omega = (i/2pi) ddbar log(1+|x|^2), so that the integral
// over a line is 1 and the total volume integral of omega^2 is 1.
Mat2c fs_matrix(const Vec2c& x);

// omega evaluated on the complex line through direction xi:
// the FS area density of a curve with velocity xi, per unit parameter area.
double fs_on_direction(const Vec2c& x, const Vec2c& xi);

// density of omega^2 against the Euclidean volume element of the chart
double fs_volume_density(const Vec2c& x);

struct FsDensity {
  Mat2c omega;     // coefficient matrix of omega
  double omega2;   // omega^2 / Euclidean volume
};
FsDensity fs_density(const Vec2c& x);

// Transport a weighted directed sample (unit direction xi, Euclidean area
// weight w) from chart j to chart k.  Area scales with the squared speed of
// the transported parametrization.
struct Transported {
  Vec2c x;
  Vec2c dir;
  double w;
};
Transported transport_directed(int j, int k, const Vec2c& x, const Vec2c& dir,
                               double w);

// Window in one chart: ball or bidisc of given radius around the center.
struct ChartWindow {
  enum class Shape { Ball, Bidisc };
  int chart = 0;
  Vec2c center = Vec2c::Zero();
  double radius = 1.0;
  Shape shape = Shape::Bidisc;

  bool contains(const Vec2c& x) const {
    if (radius <= 0) throw std::invalid_argument("window radius must be > 0");
    if (shape == Shape::Ball) return (x - center).norm() <= radius;
    return std::abs(x(0) - center(0)) <= radius &&
           std::abs(x(1) - center(1)) <= radius;
  }
};

// Quadrature of a chart-local integrand over the region of this chart where
// it is the active one (the bidisc |x1|,|x2|<=1 up to ties).  Polar product
// rule, nr x na nodes per complex coordinate.
double integrate_active_cell(int chart, int nr, int na,
                             const std::function<double(const Vec2c&)>& f);

// total FS volume of P^2 computed chart by chart
double fs_total_volume(int nr = 24, int na = 48);

}  // namespace fol
