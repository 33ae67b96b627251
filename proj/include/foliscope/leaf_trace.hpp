#pragma once

#include <optional>

#include "foliscope/currents.hpp"
#include "foliscope/ode.hpp"

// Numerical leaf following in complex time and the two leafwise averaging
// schemes: Nevanlinna-style flow-disc averaging and leafwise Brownian
// occupation.  Leaves are parametrized by the flow time of the active
// chart's vector field; the parametrization is renormalized at chart
// switches (the flow clock is chart-local, the leaf is not).

namespace fol {

struct SingularApproach : std::runtime_error {
  explicit SingularApproach(const std::string& m) : std::runtime_error(m) {}
};
struct DomainTooSingular : std::runtime_error {
  explicit DomainTooSingular(const std::string& m) : std::runtime_error(m) {}
};

constexpr double kSingularCutoff = 1e-3;  // chart units
constexpr double kOdeTol = 1e-9;

class LeafTracer {
 public:
  LeafTracer(const FoliationSpec& F, std::vector<Singularity> sings)
      : F_(&F), sings_(std::move(sings)) {}

  const FoliationSpec& foliation() const { return *F_; }
  const std::vector<Singularity>& singularities() const { return sings_; }

  // Flow from p by complex time dz of the active chart's field.  Switches
  // chart when the affine coordinates leave the comfort zone.  Throws
  // SingularApproach when the path enters the singularity cutoff.
  struct FlowResult {
    SurfacePoint point;
    int chart_switches;
    OdeStats stats;
  };
  FlowResult flow(const SurfacePoint& p, cplx dz) const;

 private:
  const FoliationSpec* F_;
  std::vector<Singularity> sings_;
};

struct LeafPath {
  std::vector<cplx> times;           // complex-time samples along the polyline
  std::vector<SurfacePoint> points;  // images
  int chart_switches = 0;
  OdeStats stats;
  double max_defect = 0.0;  // dense-output ODE defect, per unit step
};

// Follow the leaf along a polyline in complex time, recording vertices.
LeafPath integrate_leaf(const LeafTracer& tracer, const SurfacePoint& x0,
                        const std::vector<cplx>& path);

struct AveragingReport {
  double index_r = 0.0;           // Nevanlinna index or step horizon
  double characteristic = 0.0;    // estimated Ahlfors-Shimizu T^x(r)
  std::vector<GridMeasure> grids; // one per chart, normalized to total 1
  long sample_count = 0;
  double stat_error = 0.0;        // half-sample L1 wobble estimate
  long singular_events = 0;
  std::optional<SampleCloudCurrent> cloud;  // visited samples, if requested
};

struct AveragingOptions {
  int grid_n = 128;
  bool keep_cloud = false;
  std::optional<ChartWindow> window;  // reflecting window; absent = global
};

// Nevanlinna-style average: the flow-time disc of hyperbolic radius
// 2 artanh(r) is sampled by radial rays, each ray integrated with the
// log+(r/|zeta|) weight against the FS area element of the leaf.
AveragingReport nevanlinna_average(const LeafTracer& tracer,
                                   const SurfacePoint& x0, double r,
                                   int n_rays, uint64_t seed,
                                   const AveragingOptions& opt = {});

// Leafwise Brownian occupation: complex Gaussian increments of variance dt
// in flow time, each visit deposited with the FS weight of the full leaf
// velocity.  Steps that would cross the singularity cutoff or leave the
// window are resampled / reflected.
AveragingReport brownian_average(const LeafTracer& tracer,
                                 const SurfacePoint& x0, long n_steps,
                                 double dt, uint64_t seed,
                                 const AveragingOptions& opt = {});

}  // namespace fol
