#pragma once

#include <vector>

#include "foliscope/atlas.hpp"
#include "foliscope/foliation.hpp"
#include "foliscope/rng.hpp"

// Discretized positive directed (1,1)-currents: weighted point samples with
// complex leaf directions, and grid measures for comparing averaging
// experiments.  A sample of weight w and unit direction xi stands for a
// piece of complex curve of Euclidean parameter area w tangent to xi; the
// pairing with a smooth (1,1)-form evaluates the form on that plane.

namespace fol {

struct GridMismatch : std::runtime_error {
  explicit GridMismatch(const std::string& m) : std::runtime_error(m) {}
};

struct CloudSample {
  int chart;
  Vec2c x;
  Vec2c dir;  // unit complex 2-vector, defined up to phase
  double w;   // positive Euclidean area weight in this chart
};

struct SampleCloudCurrent {
  std::vector<CloudSample> samples;
  bool normalized = false;

  // <T, omega>: FS mass; exactly 1 after normalize()
  double mass() const;
  void normalize();

  // largest tangency defect against a foliation (for directed clouds)
  double directedness_residual(const FoliationSpec& F) const;

  void save_csv(const std::string& path) const;
  static SampleCloudCurrent load_csv(const std::string& path);
};

// Masses on an N x N rectangular grid over the first complex coordinate of
// a chart window; membership in the window gates deposits, the second
// coordinate is not binned.  Cells are half-open [lo, hi) with the last
// cell closed, so boundary points land deterministically.
struct GridMeasure {
  ChartWindow window;
  int n = 0;
  std::vector<double> masses;  // row-major, n*n

  GridMeasure() = default;
  GridMeasure(const ChartWindow& w, int n_)
      : window(w), n(n_), masses(size_t(n_) * n_, 0.0) {}

  double total() const;
  void normalize();

  // cell index of a chart point, or -1 when outside the window
  int cell_of(const Vec2c& x) const;
  void deposit(const Vec2c& x, double w) {
    int c = cell_of(x);
    if (c >= 0) masses[c] += w;
  }

  void save_csv(const std::string& path) const;
  void save_pgm(const std::string& path) const;
  static GridMeasure load_csv(const std::string& path, const ChartWindow& w);
};

// L1 distance of two grid measures after normalizing both to mass 1
double l1_distance(const GridMeasure& g1, const GridMeasure& g2);

// sum of |difference| over a family of per-chart grids (normalizing the
// total mass across the family)
double l1_distance(const std::vector<GridMeasure>& a,
                   const std::vector<GridMeasure>& b);

SampleCloudCurrent restrict_cloud(const SampleCloudCurrent& T,
                                  const ChartWindow& w);
GridMeasure to_grid(const SampleCloudCurrent& T, const ChartWindow& w, int n);

// Lelong mass indicator nu(T,a,r): ball mass of the trace measure of T
// around a, normalized by pi r^2.  Samples from other charts are
// transported into a's chart.  Equals 1 for the integration current on a
// line through a.
struct LelongValue {
  double value;
  double sigma;  // Monte Carlo error estimate
};
LelongValue lelong_indicator(const SampleCloudCurrent& T, const SurfacePoint& a,
                             double r);

// Monte Carlo cloud representing the Fubini-Study form omega as a directed
// current: points ~ omega^2, two direction samples per point from the
// complement decomposition, mass exactly 1.
SampleCloudCurrent omega_cloud(int n_points, uint64_t seed);

// Deterministic quadrature cloud of the integration current on the
// projective line through homogeneous points P and Q (mass 1 up to
// quadrature error).
SampleCloudCurrent line_cloud(const Vec3c& P, const Vec3c& Q, int n_radial = 48,
                              int n_angular = 64);

}  // namespace fol
