#pragma once

#include "foliscope/currents.hpp"

// Tangent currents of tensor products along the diagonal: the dilation
// (z,w) = (lambda(x-y), y) of sample-cloud pairs, density-measure mass
// estimation against the Euclidean volume of the z-window, and the Young
// integral operators on radial profiles over the unit ball of C^2.

namespace fol {

struct FrameMismatch : std::runtime_error {
  explicit FrameMismatch(const std::string& m) : std::runtime_error(m) {}
};
struct NonConvergent : std::runtime_error {
  explicit NonConvergent(const std::string& m) : std::runtime_error(m) {}
};

// Diagonal frame: coordinates (z,w) = (x-y, y) over one chart, a w-window,
// the z-ball radius, and the theta window parameter (|theta_i - 1| < eps0).
struct DiagonalFrame {
  int chart = 0;
  ChartWindow w_window;     // same chart
  double z_radius = 1.0;
  double eps0 = 0.1;        // in (0, 0.3]
  int grid_n = 64;          // w-grid resolution of the dilation output

  void validate() const {
    if (w_window.chart != chart) throw FrameMismatch("w-window chart differs");
    if (!(eps0 > 0.0 && eps0 <= 0.3))
      throw FrameMismatch("eps0 must lie in (0, 0.3]");
    if (!(z_radius > 0)) throw FrameMismatch("z radius must be positive");
  }
};

struct DilationResult {
  GridMeasure w_grid;      // pair weights binned over w = y
  double window_sum = 0;   // total pair weight with |lambda(x-y)| < z_radius
  double vertical_sum = 0; // z1-w2 mixed component (verticality diagnostic)
  long pairs_used = 0;
  long pairs_considered = 0;
};

// Push pairs through a_lambda.  Per pair: point (lambda(x-y), y), weight
// wx wy |xi1 psi2 - xi2 psi1|^2 (the wedge of the two direction planes
// against the Euclidean volume of z).  Weights carry no lambda factor, so
// masses obey the exact rescaling identity between (c lambda, rho) and
// (lambda, rho/c).
DilationResult tensor_dilate(const SampleCloudCurrent& T1,
                             const SampleCloudCurrent& T2, double lambda,
                             const DiagonalFrame& frame,
                             long pair_budget = 10000000,
                             uint64_t seed = 17);

struct DensityEstimate {
  std::vector<double> lambdas;
  std::vector<double> masses;  // per-lambda estimates of |vartheta| on the frames
  double theta_mass = 0.0;     // extrapolated limit, linear in 1/lambda
  double error = 0.0;
};

// vartheta mass over a frame set: per lambda, lambda^4 x window sum divided
// by the Euclidean volume of the z-ball, summed over frames; Richardson
// extrapolation in 1/lambda.  Throws NonConvergent when successive
// estimates differ by more than 3x the error bar.
DensityEstimate density_mass_estimate(const SampleCloudCurrent& T1,
                                      const SampleCloudCurrent& T2,
                                      const std::vector<double>& lambdas,
                                      const std::vector<DiagonalFrame>& frames,
                                      long pair_budget = 10000000,
                                      uint64_t seed = 17);

// the three chart frames whose w-windows tile the diagonal (active cells)
std::vector<DiagonalFrame> full_diagonal_frames(int grid_n = 64);

// ---------------------------------------------------------------------------
// Young operators on radial profiles f(|x|) over the unit ball of C^2.
// (P f)(s) = cellwise quadrature of the kernel against f; radial grids keep
// the 4-dimensional convolution tractable at refinement 128 -> 256.

enum class YoungKernel { InverseSquare, ConvolutionR };

class YoungOperator {
 public:
  // r is the convolution radius (ignored for InverseSquare); delta records
  // the Young exponent the kernel satisfies (in [0,1) for InverseSquare,
  // 0 for ConvolutionR)
  YoungOperator(YoungKernel kind, int n, double r = 0.1, double delta = 0.0);

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

  // L^2(ball) norm of a radial profile
  double l2_norm(const Eigen::VectorXd& f) const;
  double norm_ratio(const Eigen::VectorXd& f) const;

  int n() const { return n_; }
  double delta() const { return delta_; }

 private:
  int n_;
  double r_, delta_;
  Eigen::MatrixXd A_;        // kernel matrix with cell quadrature
  Eigen::VectorXd cell_vol_; // 4-volume of each radial shell
};

Eigen::VectorXd random_radial_profile(int n, uint64_t seed);

}  // namespace fol
