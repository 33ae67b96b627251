#pragma once

#include <array>
#include <optional>
#include <vector>

#include "foliscope/atlas.hpp"

// A holomorphic foliation of P^2 given by one polynomial vector field per
// chart, parallel across chart overlaps up to a nonvanishing factor.

namespace fol {

struct SolverDiverged : std::runtime_error {
  explicit SolverDiverged(const std::string& m) : std::runtime_error(m) {}
};
struct TooCloseToSingularity : std::runtime_error {
  explicit TooCloseToSingularity(const std::string& m) : std::runtime_error(m) {}
};

// Bivariate complex polynomial, dense list of monomials c * x^i y^j.
class Poly2 {
 public:
  struct Mono {
    int i, j;
    cplx c;
  };

  Poly2() = default;
  explicit Poly2(std::vector<Mono> terms) : terms_(std::move(terms)) {}

  static Poly2 zero() { return Poly2(); }
  static Poly2 constant(cplx c) { return Poly2({{0, 0, c}}); }

  cplx eval(const Vec2c& x) const;
  cplx dx(const Vec2c& x) const;
  cplx dy(const Vec2c& x) const;

  const std::vector<Mono>& terms() const { return terms_; }
  int degree() const;

 private:
  std::vector<Mono> terms_;
};

struct ChartField {
  Poly2 vx, vy;
  Vec2c eval(const Vec2c& x) const { return Vec2c(vx.eval(x), vy.eval(x)); }
  Mat2c jacobian(const Vec2c& x) const {
    Mat2c J;
    J << vx.dx(x), vx.dy(x), vy.dx(x), vy.dy(x);
    return J;
  }
};

struct Singularity {
  SurfacePoint location;
  cplx lambda1, lambda2;  // eigenvalues of the linearization
  cplx eta;               // lambda1/lambda2 normalized to Im(eta) > 0
  bool hyperbolic;
};

class FoliationSpec {
 public:
  FoliationSpec(int degree, std::array<ChartField, 3> charts)
      : degree_(degree), charts_(std::move(charts)) {}

  int degree() const { return degree_; }
  const ChartField& chart_field(int k) const { return charts_[k]; }

  Vec2c eval_in_chart(int k, const Vec2c& x) const {
    return charts_[k].eval(x);
  }
  Vec2c eval_field(const SurfacePoint& p) const {
    return charts_[p.chart()].eval(p.affine());
  }

  // presets resolvable by name: "linear:eta=a+bi", "jouanolou:d"
  static FoliationSpec preset(const std::string& name);
  static FoliationSpec linear_model(cplx eta);
  static FoliationSpec jouanolou(int d);

  static FoliationSpec from_json_file(const std::string& path);
  void to_json_file(const std::string& path) const;

  // chart-overlap parallelism of the fields at x (chart j coordinates):
  // modulus of the cross product of pushforward(v_j) with v_k, both normalized
  double overlap_residual(int j, int k, const Vec2c& x) const;

 private:
  int degree_;
  std::array<ChartField, 3> charts_;
};

struct SingularitySearchReport {
  std::vector<Singularity> singularities;
  bool count_matches_generic;  // count == d^2+d+1 (warning only when false)
};

SingularitySearchReport find_singularities(const FoliationSpec& F,
                                           double grid_step = 0.15,
                                           double polish_tol = 1e-12);

// chordal distance on P^2 (used to deduplicate singularities across charts
// and for singularity cutoffs)
double chordal_distance(const Vec3c& z, const Vec3c& w);
double distance_to_singularities(const std::vector<Singularity>& sings,
                                 const SurfacePoint& p);

// Straightened flow box around a regular point: an orthonormal frame
// (e1 along the field, e2 transversal) and plaques as graphs x2 = phi_a(x1)
// over the box coordinates.
class FlowBox {
 public:
  FlowBox(const FoliationSpec& F, const SurfacePoint& p, double size);

  // plaque through transversal parameter a, evaluated at box coordinate x1
  cplx plaque(cplx alpha, cplx x1) const;

  // point of P^2 under the box frame
  SurfacePoint embed(cplx x1, cplx x2) const;

  double size() const { return size_; }

  // measured two-sided Lipschitz constant of a -> phi_a over sampled pairs
  double measured_kappa0(int n_alpha = 6, int n_x = 5) const;

  // tangency defect of the plaque field against the foliation at (alpha, x1)
  double tangency_residual(cplx alpha, cplx x1) const;

 private:
  const FoliationSpec* F_;
  int chart_;
  Vec2c base_;
  Vec2c e1_, e2_;  // unitary frame, e1 parallel to the field at the base
  double size_;
};

FlowBox regular_flow_box(const FoliationSpec& F,
                         const std::vector<Singularity>& sings,
                         const SurfacePoint& p, double size,
                         double cutoff = 1e-3);

}  // namespace fol
