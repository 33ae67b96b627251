#pragma once

#include <optional>

#include "foliscope/currents.hpp"
#include "foliscope/rng.hpp"

// The hyperbolic local-model machinery: sector geometry, leaf
// parametrization, Poisson-represented harmonic weights, expectation and
// line integrals, the intersection system of the diagonal dilation, sparse
// and dominated point sets, and slice masses.

namespace fol {

struct BranchViolation : std::runtime_error {
  explicit BranchViolation(const std::string& m) : std::runtime_error(m) {}
};
struct QuadratureFailure : std::runtime_error {
  explicit QuadratureFailure(const std::string& m) : std::runtime_error(m) {}
};
struct TailBoundFailure : std::runtime_error {
  explicit TailBoundFailure(const std::string& m) : std::runtime_error(m) {}
};
struct NewtonStall : std::runtime_error {
  explicit NewtonStall(const std::string& m) : std::runtime_error(m) {}
};
struct AtomDetected : std::runtime_error {
  explicit AtomDetected(const std::string& m) : std::runtime_error(m) {}
};

// Sector S = { v > 0, b u + a v > 0 } for eta = a + i b, b > 0, spanned by
// 1 and -conj(eta).  gamma = pi / angle(S) > 1; Phi(z) = z^gamma maps S
// biholomorphically to the upper half-plane fixing the R+ edge.
class SectorModel {
 public:
  explicit SectorModel(cplx eta);

  cplx eta() const { return eta_; }
  double a() const { return eta_.real(); }
  double b() const { return eta_.imag(); }
  double angle() const { return angle_; }
  double gamma() const { return gamma_; }

  bool in_sector(cplx z, double slack = 0.0) const {
    return z.imag() > -slack && b() * z.real() + a() * z.imag() > -slack;
  }
  bool in_sector_prime(cplx z) const { return in_sector(z, std::log(3.0)); }

  // half-lines and their anchor points
  cplx lambda1_point(double s, double l) const {
    return -std::conj(eta_) * (s / b()) + l;
  }
  cplx lambda2_point(double s, double l) const {
    return s / b() - std::conj(eta_) * l;
  }
  cplx zeta_s(double s) const { return (1.0 - std::conj(eta_)) * (s / b()); }

  // residuals of the defining line equations
  double lambda1_residual(double s, cplx z) const {
    return (cplx(0, 1) * z).real() + s;
  }
  double lambda2_residual(double s, cplx z) const {
    return (cplx(0, 1) * eta_ * z).real() + s;
  }
  double q_residual(cplx z) const {
    return (cplx(0, 1) * (eta_ - 1.0) * z).real();
  }

  // sector coordinates: z = s1 + s2 * (-conj(eta))/|eta|; S = {s1,s2 > 0}
  cplx from_coords(double s1, double s2) const {
    return s1 + s2 * edge2_;
  }
  std::pair<double, double> to_coords(cplx z) const {
    double s2 = z.imag() / edge2_.imag();
    return {z.real() - s2 * edge2_.real(), s2};
  }

  cplx phi(cplx z) const;      // z^gamma, principal on the sector
  cplx phi_inv(cplx w) const;  // w^{1/gamma}

 private:
  cplx eta_;
  cplx edge2_;  // unit vector along the -conj(eta) edge
  double angle_, gamma_;
};

double gamma_of(cplx eta);

// leaf of the local model through annulus parameter alpha (works for any
// eta with Im(eta) != 0, so the axis-flip identities can be exercised)
Vec2c leaf_point(cplx eta, cplx alpha, cplx zeta);
Vec2c leaf_direction(cplx eta, const Vec2c& x);  // (eta x1, x2) normalized

// Positive harmonic function on the upper half-plane, represented by
// boundary atoms and an optional piecewise-linear density with constant
// extension; the Poisson integral is in closed form per segment.
class HarmonicWeight {
 public:
  struct Atom {
    double t, m;
  };

  HarmonicWeight() = default;

  static HarmonicWeight from_atoms(std::vector<Atom> atoms);
  // knots (t_i, value_i); extend_left/right: constant tails beyond knots
  static HarmonicWeight from_density(std::vector<double> knots,
                                     std::vector<double> values,
                                     bool extend = false);
  static HarmonicWeight constant(double c);

  // Poisson evaluation at U + iV, V > 0; boundary values at V = 0
  double eval(double U, double V) const;

  double total_atom_mass() const;
  bool has_extension() const { return extend_ && !knots_.empty(); }
  bool compact() const { return !has_extension(); }
  double boundary_mass() const;  // total mass of atoms + density (compact only)
  double support_radius() const;

  // int H(t) |t|^{-1+1/gamma} dt (atoms exactly, density by quadrature)
  double integrability_integral(double gamma) const;

  void scale(double f);

  const std::vector<Atom>& atoms() const { return atoms_; }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> knots_, vals_;
  bool extend_ = false;
};

// mean-value residual of the Poisson evaluation over a circle of radius rho
double harmonic_mean_value_residual(const HarmonicWeight& H, double U, double V,
                                    double rho, int n = 64);

// Harnack bound for the half-plane kernel: for two points at mutual
// distance <= 1 and heights >= 2, values of any positive harmonic function
// with boundary data differ by at most this factor.
double poisson_harnack_kappa();

// Harmonic weight on the sector: H(zeta) = poisson(Phi(zeta))
double sector_weight(const SectorModel& S, const HarmonicWeight& H, cplx zeta);

// default family: atoms at Phi-images of points on both sector edges,
// masses scaled so the integrability integral equals 1; jitter decorrelates
// the families of different alpha
HarmonicWeight default_weight_family(const SectorModel& S, cplx alpha);

// E(f)(s) = s^{-1} int_0^s f, adaptive quadrature (integrable endpoint
// singularities are allowed)
double expectation(const std::function<double(double)>& f, double s,
                   double rel_tol = 1e-9);

struct LineIntegral {
  double head;       // quadrature over [0, l_max]
  double tail_bound; // certified bound on the remainder
  double l_max;
};

// G_{1,alpha}(s), G_{2,alpha}(s): integrals of the harmonic weight along
// the half-lines Lambda_{1,s}, Lambda_{2,s}; the tail certificate uses the
// kernel decay H(zeta) <= (4 M / pi) |zeta|^{-gamma} far from the data.
LineIntegral g_integral(const SectorModel& S, const HarmonicWeight& H,
                        int branch, double s, double tail_frac = 0.1);

// int_0^inf H(l zhat) dl along an interior direction
LineIntegral ray_integral(const SectorModel& S, const HarmonicWeight& H,
                          cplx zhat, double tail_frac = 0.1);

// axe-sum integral: int_{l >= hbar s} H(lambda_{branch} anchor + l dir) dl
LineIntegral axe_sum_integral(const SectorModel& S, const HarmonicWeight& H,
                              int branch, double s, double hbar);

// ---------------------------------------------------------------------------
// intersection system of the dilated tensor product

struct IntersectionRoot {
  cplx zeta, zcheck;
  double residual;
  int multiplicity = 1;
  cplx rho1, rho2;
  char region = '?';  // 'A', 'B' or 'C'
};

struct IntersectionSet {
  cplx alpha, beta;
  Vec2c theta;
  double lambda;
  std::vector<IntersectionRoot> roots;
  long newton_stalls = 0;
  long cells_scanned = 0;
};

struct SolveOptions {
  double t_max_extra = 20.0;  // truncation T_max = s + extra
  double scan_step = 0.15;
  double epsilon = 0.05;  // region tagging
  double dedup = 1e-6;
};

IntersectionSet solve_intersections(const SectorModel& S, cplx alpha,
                                    cplx beta, const Vec2c& theta,
                                    double lambda, const SolveOptions& opt = {});

// condition (AA): arg/log matching of alpha and beta up to the lattice
// 2 pi (n - m eta); n, m searched over |n|,|m| <= 8
struct ConditionAA {
  bool holds;
  cplx delta;
  int n, m;
};
ConditionAA condition_aa(cplx eta, cplx alpha, cplx beta, double n_factor,
                         double epsilon);

// N-sparse: every open unit ball holds at most N points (counted with
// multiplicity).  Candidate centers: the points, pairwise midpoints and,
// in dimension <= 2, a covering grid.
bool sparse_check(const std::vector<Eigen::VectorXd>& points, int N,
                  int* observed_max = nullptr);
bool dominated_check(const std::vector<Eigen::VectorXd>& z,
                     const std::vector<Eigen::VectorXd>& zprime, double kappa);

// slice mass |vartheta^lambda_{alpha,beta,theta}| = sum over roots of
// H_alpha(zeta) H_beta(zcheck), with a reported truncation tail bound
struct SliceMass {
  double value;
  double tail_bound;
  IntersectionSet roots;
};
SliceMass slice_mass(const SectorModel& S, cplx alpha, cplx beta,
                     const Vec2c& theta, double lambda,
                     const HarmonicWeight& Ha, const HarmonicWeight& Hb,
                     const SolveOptions& opt = {});

// ---------------------------------------------------------------------------
// synthesized local current T = int T_alpha dmu(alpha)

struct AnnulusMeasure {
  std::vector<cplx> alphas;
  std::vector<double> weights;
};

// 64 Sobol points in (log|alpha|, arg alpha) with equal weights
AnnulusMeasure sobol_annulus_measure(const SectorModel& S, int n = 64);

struct LocalCurrentModel {
  SectorModel sector;
  AnnulusMeasure mu;
  std::vector<HarmonicWeight> weights;  // one per alpha
  SampleCloudCurrent cloud;             // assembled samples, chart 0 local
};

LocalCurrentModel assemble_local_current(const SectorModel& S,
                                         const AnnulusMeasure& mu,
                                         int n_zeta = 48);

}  // namespace fol
