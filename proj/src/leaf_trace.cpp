#include "foliscope/leaf_trace.hpp"

namespace fol {

namespace {

// grid family: one bidisc grid per chart (global runs), or a single grid
// over the requested window
struct DepositGrids {
  std::vector<GridMeasure> grids;
  bool windowed;

  DepositGrids(int n, const std::optional<ChartWindow>& win)
      : windowed(win.has_value()) {
    if (win) {
      grids.emplace_back(*win, n);
    } else {
      for (int k = 0; k < 3; ++k) {
        ChartWindow w;
        w.chart = k;
        w.center = Vec2c::Zero();
        w.radius = 1.0;
        w.shape = ChartWindow::Shape::Bidisc;
        grids.emplace_back(w, n);
      }
    }
  }
  void deposit(const SurfacePoint& p, double w) {
    if (windowed) {
      if (p.chart() == grids[0].window.chart) grids[0].deposit(p.affine(), w);
    } else {
      grids[p.chart()].deposit(p.affine(), w);
    }
  }
};

double grids_total(const std::vector<GridMeasure>& gs) {
  double t = 0;
  for (const auto& g : gs) t += g.total();
  return t;
}

void grids_scale(std::vector<GridMeasure>& gs, double f) {
  for (auto& g : gs)
    for (double& m : g.masses) m *= f;
}

}  // namespace

LeafTracer::FlowResult LeafTracer::flow(const SurfacePoint& p, cplx dz) const {
  FlowResult res{p, 0, {}};
  int chart = p.chart();
  Vec2c x = p.affine();
  cplx remaining = dz;
  const FoliationSpec& F = *F_;

  // integrate in the current chart until the point drifts out of its
  // comfort zone, then renormalize (switch chart, keep the remaining time)
  for (int leg = 0; leg < 64; ++leg) {
    if (std::abs(remaining) == 0.0) break;
    const ChartField& field = F.chart_field(chart);
    cplx seg = remaining;
    bool switched = false;
    auto rhs = [&](const Vec2c& y) -> Vec2c { return seg * field.eval(y); };
    bool ok = true;
    auto monitor = [&](const DenseStep&, double s, const Vec2c& y) -> bool {
      if (y.norm() > 1.6) {  // leave the chart, renormalize
        remaining = seg * (1.0 - s);
        switched = true;
        return false;
      }
      SurfacePoint q = SurfacePoint::from_affine(chart, y);
      if (distance_to_singularities(sings_, q) < kSingularCutoff) {
        ok = false;
        return false;
      }
      return true;
    };
    Vec2c y = x;
    bool finished = integrate_dp54(rhs, y, kOdeTol, res.stats, monitor);
    if (!ok) throw SingularApproach("flow entered the singularity cutoff");
    if (finished) {
      x = y;
      remaining = 0.0;
      break;
    }
    if (!switched) throw SingularApproach("flow aborted");
    SurfacePoint q = SurfacePoint::from_affine(chart, y);
    int next = q.chart();
    if (next == chart) {
      x = y;  // still inside, keep going in the same chart
      continue;
    }
    x = q.affine();
    chart = next;
    res.chart_switches++;
  }
  if (std::abs(remaining) > 0.0)
    throw SingularApproach("flow did not converge within chart legs");
  res.point = SurfacePoint::from_affine(chart, x);
  return res;
}

LeafPath integrate_leaf(const LeafTracer& tracer, const SurfacePoint& x0,
                        const std::vector<cplx>& path) {
  if (distance_to_singularities(tracer.singularities(), x0) < kSingularCutoff)
    throw SingularApproach("base point too close to a singularity");
  LeafPath lp;
  lp.times.push_back(0.0);
  lp.points.push_back(x0);
  SurfacePoint cur = x0;
  cplx t = 0.0;
  for (cplx target : path) {
    cplx dz = target - t;
    // dense-output defect probe for the leg, in the current chart
    const auto& F = tracer.foliation();
    if (std::abs(dz) > 0) {
      int chart = cur.chart();
      const ChartField& field = F.chart_field(chart);
      auto rhs = [&](const Vec2c& y) -> Vec2c { return dz * field.eval(y); };
      std::vector<DenseStep> dense;
      Vec2c y = cur.affine();
      OdeStats st;
      bool inside = true;
      try {
        integrate_dp54(
            rhs, y, kOdeTol, st,
            [&](const DenseStep&, double, const Vec2c& z) {
              if (z.norm() > 1.6) {
                inside = false;
                return false;
              }
              return true;
            },
            &dense);
      } catch (const StepUnderflow&) {
        inside = false;
      }
      if (inside)
        for (const auto& dsp : dense)
          for (double th : {0.31, 0.71}) {
            double s = dsp.s0 + th * dsp.h;
            Vec2c ys = dsp.eval(s);
            Vec2c defect = dsp.deriv(s) - dz * field.eval(ys);
            lp.max_defect =
                std::max(lp.max_defect,
                         defect.norm() / (std::abs(dz) * (1.0 + ys.norm())));
          }
    }
    auto res = tracer.flow(cur, dz);
    cur = res.point;
    lp.chart_switches += res.chart_switches;
    lp.stats.accepted += res.stats.accepted;
    lp.stats.rejected += res.stats.rejected;
    lp.stats.rhs_evals += res.stats.rhs_evals;
    t = target;
    lp.times.push_back(t);
    lp.points.push_back(cur);
  }
  return lp;
}

AveragingReport nevanlinna_average(const LeafTracer& tracer,
                                   const SurfacePoint& x0, double r,
                                   int n_rays, uint64_t seed,
                                   const AveragingOptions& opt) {
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("nevanlinna index r must be in (0,1)");
  if (distance_to_singularities(tracer.singularities(), x0) < kSingularCutoff)
    throw SingularApproach("base point too close to a singularity");
  const FoliationSpec& F = tracer.foliation();

  DepositGrids acc(opt.grid_n, opt.window), half1(opt.grid_n, opt.window),
      half2(opt.grid_n, opt.window);
  double mass_total = 0.0;
  long singular = 0;
  Rng rng(seed);
  AveragingReport rep;
  rep.index_r = r;
  if (opt.keep_cloud) rep.cloud = SampleCloudCurrent{};

  // The universal-cover proxy: the disc coordinate rho in (0, r) is sent to
  // flow radius R(rho) = 2 artanh(rho), so the index r keeps its (0,1) range
  // while the explored flow radius grows without bound as r -> 1.  A ray at
  // angle phi carries the area element R'(rho) R(rho) drho dphi.
  const int n_rho = 160;
  const double dphi = 2.0 * kPi / n_rays;
  for (int ray = 0; ray < n_rays; ++ray) {
    double phi = 2.0 * kPi * rng.uniform();
    cplx dir = std::polar(1.0, phi);
    SurfacePoint cur = x0;
    double flow_prev = 0.0;
    for (int i = 0; i < n_rho; ++i) {
      double rho = (i + 0.5) * r / n_rho;
      double drho = r / n_rho;
      double flow_mid = 2.0 * std::atanh(rho);
      cplx dz = dir * (flow_mid - flow_prev);
      try {
        cur = tracer.flow(cur, dz).point;
      } catch (const SingularApproach&) {
        ++singular;
        break;
      } catch (const StepUnderflow&) {
        ++singular;
        break;
      }
      flow_prev = flow_mid;
      Vec2c v = F.eval_in_chart(cur.chart(), cur.affine());
      double stretch = 2.0 / (1.0 - rho * rho);  // R'(rho)
      double area = stretch * flow_mid * drho * dphi;
      double w = std::log(r / rho) * fs_on_direction(cur.affine(), v) * area;
      if (w <= 0) continue;
      mass_total += w;  // characteristic counts everything
      acc.deposit(cur, w);
      (ray % 2 ? half2 : half1).deposit(cur, w);
      if (rep.cloud) {
        double speed2 = v.squaredNorm();
        if (speed2 > 0)
          rep.cloud->samples.push_back({cur.chart(), cur.affine(),
                                        v / std::sqrt(speed2),
                                        std::log(r / rho) * speed2 * area});
      }
      rep.sample_count++;
    }
  }
  if (singular * 2 > n_rays)
    throw DomainTooSingular("more than half of the rays hit the cutoff");

  rep.characteristic = mass_total;
  rep.singular_events = singular;
  if (grids_total(half1.grids) > 0 && grids_total(half2.grids) > 0)
    rep.stat_error = l1_distance(half1.grids, half2.grids);
  double tot = grids_total(acc.grids);
  if (tot <= 0) throw DomainTooSingular("empty nevanlinna average");
  grids_scale(acc.grids, 1.0 / tot);
  rep.grids = std::move(acc.grids);
  return rep;
}

AveragingReport brownian_average(const LeafTracer& tracer,
                                 const SurfacePoint& x0, long n_steps,
                                 double dt, uint64_t seed,
                                 const AveragingOptions& opt) {
  if (distance_to_singularities(tracer.singularities(), x0) < kSingularCutoff)
    throw SingularApproach("base point too close to a singularity");
  const FoliationSpec& F = tracer.foliation();

  DepositGrids acc(opt.grid_n, opt.window), half1(opt.grid_n, opt.window),
      half2(opt.grid_n, opt.window);
  Rng rng(seed);
  AveragingReport rep;
  rep.index_r = double(n_steps);
  if (opt.keep_cloud) rep.cloud = SampleCloudCurrent{};

  SurfacePoint cur = x0;
  long singular = 0;
  for (long k = 0; k < n_steps; ++k) {
    cplx xi = rng.complex_gaussian(dt);
    bool moved = false;
    for (int attempt = 0; attempt < 100; ++attempt) {
      try {
        auto res = tracer.flow(cur, xi);
        const SurfacePoint& nxt = res.point;
        if (opt.window && !(nxt.chart() == opt.window->chart &&
                            opt.window->contains(nxt.affine()))) {
          auto back = tracer.flow(cur, -xi);  // reflect at the boundary
          if (back.point.chart() == opt.window->chart &&
              opt.window->contains(back.point.affine()))
            cur = back.point;
          // otherwise stay put for this step
        } else {
          cur = nxt;
        }
        moved = true;
        break;
      } catch (const SingularApproach&) {
        ++singular;
        xi = rng.complex_gaussian(dt);
      } catch (const StepUnderflow&) {
        ++singular;
        xi = rng.complex_gaussian(dt);
      }
    }
    if (!moved)
      throw DomainTooSingular("a site rejected >90% of its increments");
    Vec2c v = F.eval_in_chart(cur.chart(), cur.affine());
    double w = fs_on_direction(cur.affine(), v);
    acc.deposit(cur, w);
    ((k / 1024) % 2 ? half2 : half1).deposit(cur, w);
    if (rep.cloud) {
      double speed2 = v.squaredNorm();
      if (speed2 > 0)
        rep.cloud->samples.push_back(
            {cur.chart(), cur.affine(), v / std::sqrt(speed2), speed2});
    }
    rep.sample_count++;
  }

  rep.singular_events = singular;
  if (grids_total(half1.grids) > 0 && grids_total(half2.grids) > 0)
    rep.stat_error = l1_distance(half1.grids, half2.grids);
  double tot = grids_total(acc.grids);
  if (tot <= 0) throw DomainTooSingular("empty brownian average");
  rep.characteristic = tot;
  grids_scale(acc.grids, 1.0 / tot);
  rep.grids = std::move(acc.grids);
  return rep;
}

}  // namespace fol
