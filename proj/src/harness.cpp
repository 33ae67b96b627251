#include "foliscope/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "foliscope/density.hpp"
#include "foliscope/leaf_trace.hpp"
#include "foliscope/sector.hpp"

namespace fol {

using nlohmann::json;
namespace fs = std::filesystem;

int default_jobs() {
  if (const char* env = std::getenv("FOLISCOPE_JOBS")) {
    int j = std::atoi(env);
    if (j > 0) return j;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

void atomic_write(const fs::path& path, const std::string& body) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << body;
  }
  fs::rename(tmp, path);
}

uint64_t fnv1a_hash(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string ExperimentConfig::canonical_json() const {
  json j;
  j["experiment"] = experiment;
  j["foliation"] = foliation;
  j["seed"] = seed;
  j["steps"] = steps;
  j["dt"] = dt;
  j["r"] = r;
  j["grid"] = grid;
  j["lambda_schedule"] = lambda_schedule;
  j["eta"] = eta;
  j["s_range"] = s_range;
  j["epsilon"] = epsilon;
  j["eps0"] = eps0;
  j["window"] = window;
  j["t1"] = t1;
  j["t2"] = t2;
  return j.dump();
}

namespace {

cplx parse_complex(const std::string& text) {
  // forms: "a+bi", "a-bi", "bi", "a"
  std::string v = text;
  double a = 0, b = 0;
  size_t ipos = v.find('i');
  if (ipos == std::string::npos) return cplx(std::stod(v), 0.0);
  std::string body = v.substr(0, ipos);
  size_t split = body.find_first_of("+-", 1);
  if (split == std::string::npos) {
    if (body.empty() || body == "+") b = 1;
    else if (body == "-") b = -1;
    else b = std::stod(body);
  } else {
    a = std::stod(body.substr(0, split));
    std::string bs = body.substr(split);
    if (bs == "+") b = 1;
    else if (bs == "-") b = -1;
    else b = std::stod(bs);
  }
  return cplx(a, b);
}

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) if (!tok.empty()) out.push_back(std::stod(tok));
  return out;
}

std::vector<double> parse_range(const std::string& text) {
  // "lo:hi:step"
  double lo, hi, st;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &st) != 3)
    throw std::invalid_argument("range must be lo:hi:step");
  std::vector<double> out;
  for (double s = lo; s <= hi + 1e-12; s += st) out.push_back(s);
  return out;
}

std::optional<ChartWindow> parse_window(const std::string& text) {
  if (text.empty()) return std::nullopt;
  int chart;
  double cr, ci, dr, di, rad;
  if (std::sscanf(text.c_str(), "%d:%lf,%lf,%lf,%lf,%lf", &chart, &cr, &ci, &dr,
                  &di, &rad) != 6)
    throw std::invalid_argument(
        "window must be chart:cxre,cxim,cyre,cyim,radius");
  ChartWindow w;
  w.chart = chart;
  w.center = Vec2c(cplx(cr, ci), cplx(dr, di));
  w.radius = rad;
  w.shape = ChartWindow::Shape::Bidisc;
  return w;
}

FoliationSpec load_foliation(const std::string& name) {
  if (name.find(':') != std::string::npos || name == "jouanolou" ||
      name == "linear")
    return FoliationSpec::preset(name);
  if (fs::exists(name)) return FoliationSpec::from_json_file(name);
  return FoliationSpec::preset(name);
}

SampleCloudCurrent load_cloud(const std::string& name, uint64_t seed) {
  if (name.rfind("omega", 0) == 0) {
    int n = 200000;
    auto colon = name.find(':');
    if (colon != std::string::npos) n = std::stoi(name.substr(colon + 1));
    return omega_cloud(n, seed);
  }
  if (name.rfind("line", 0) == 0) {
    // a line in general position
    Vec3c P(cplx(1, 0.1), cplx(0.3, -0.2), cplx(-0.25, 0.15));
    Vec3c Q(cplx(0.2, -0.3), cplx(1, 0.05), cplx(0.4, 0.35));
    return line_cloud(P, Q, 96, 128);
  }
  return SampleCloudCurrent::load_csv(name);
}

struct Manifest {
  fs::path dir;
  json j;
  std::chrono::steady_clock::time_point t0;

  Manifest(const ExperimentConfig& cfg) : t0(std::chrono::steady_clock::now()) {
    dir = cfg.out_dir;
    j["experiment"] = cfg.experiment;
    j["config"] = json::parse(cfg.canonical_json());
    j["config_hash"] = cfg.hash();
    j["version"] = "0.1.0";
    j["artifacts"] = json::array();
  }
  void add(const std::string& name) { j["artifacts"].push_back(name); }
  void finish() {
    auto dt = std::chrono::steady_clock::now() - t0;
    j["wall_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
    j["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                         std::chrono::system_clock::now().time_since_epoch())
                         .count();
    atomic_write(dir / "manifest.json", j.dump(1) + "\n");
  }
  // true when a previous run with the same config completed all artifacts
  bool already_done(uint64_t hash) const {
    fs::path m = dir / "manifest.json";
    if (!fs::exists(m)) return false;
    std::ifstream in(m);
    json old;
    try {
      in >> old;
    } catch (...) {
      return false;
    }
    if (!old.contains("config_hash") || old["config_hash"] != hash) return false;
    for (const auto& a : old["artifacts"])
      if (!fs::exists(dir / a.get<std::string>())) return false;
    return true;
  }
};

std::string grid_csv_name(const std::string& stem, int chart) {
  return stem + "_chart" + std::to_string(chart) + ".csv";
}

void emit_grids(Manifest& man, const std::string& stem,
                const std::vector<GridMeasure>& grids, bool pgm = true) {
  for (size_t i = 0; i < grids.size(); ++i) {
    std::string name = grid_csv_name(stem, grids[i].window.chart);
    grids[i].save_csv((man.dir / name).string());
    man.add(name);
    if (pgm) {
      std::string p = stem + "_chart" + std::to_string(grids[i].window.chart) +
                      ".pgm";
      grids[i].save_pgm((man.dir / p).string());
      man.add(p);
    }
  }
}

// deterministic regular starting points for the ergodicity experiment
std::vector<SurfacePoint> regular_starts(const FoliationSpec& F,
                                         const std::vector<Singularity>& sings,
                                         int count, uint64_t seed) {
  Rng rng(seed, 987);
  std::vector<SurfacePoint> pts;
  while (int(pts.size()) < count) {
    Vec2c x(0.85 * rng.unit_disc(), 0.85 * rng.unit_disc());
    SurfacePoint p = SurfacePoint::from_affine(0, x);
    if (distance_to_singularities(sings, p) < 0.05) continue;
    if (F.eval_field(p).norm() < 1e-3) continue;
    pts.push_back(p);
  }
  return pts;
}

int run_unique_ergodicity(const ExperimentConfig& cfg, Manifest& man) {
  FoliationSpec F = load_foliation(cfg.foliation);
  auto rep = find_singularities(F);
  LeafTracer tracer(F, rep.singularities);
  auto starts = regular_starts(F, rep.singularities, 5, cfg.seed);

  int jobs = cfg.jobs > 0 ? cfg.jobs : default_jobs();
  AveragingOptions opt;
  opt.grid_n = cfg.grid;

  std::function<AveragingReport(int)> shard = [&](int i) {
    return brownian_average(tracer, starts[i], cfg.steps, cfg.dt,
                            cfg.seed + 1000 * (i + 1), opt);
  };
  auto reports = parallel_shards<AveragingReport>(5, jobs, shard);

  for (int i = 0; i < 5; ++i)
    emit_grids(man, "brownian_start" + std::to_string(i), reports[i].grids);

  // pairwise distance matrix
  std::ostringstream l1csv;
  l1csv << "i,j,l1\n";
  double max_l1 = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      double d = l1_distance(reports[i].grids, reports[j].grids);
      max_l1 = std::max(max_l1, d);
      l1csv << i << "," << j << "," << std::setprecision(17) << d << "\n";
    }
  atomic_write(man.dir / "l1_matrix.csv", l1csv.str());
  man.add("l1_matrix.csv");

  // Brownian consensus and the Nevanlinna cross-check (reported; the
  // averaging schemes are different surrogates of the covering map)
  std::vector<GridMeasure> consensus = reports[0].grids;
  for (int i = 1; i < 5; ++i)
    for (size_t k = 0; k < consensus.size(); ++k)
      for (size_t c = 0; c < consensus[k].masses.size(); ++c)
        consensus[k].masses[c] += reports[i].grids[k].masses[c];

  std::function<AveragingReport(int)> nev = [&](int i) {
    return nevanlinna_average(tracer, starts[i], cfg.r, 12000,
                              cfg.seed + 77 * (i + 1), opt);
  };
  auto nevs = parallel_shards<AveragingReport>(3, jobs, nev);
  json cross = json::array();
  double max_cross = 0.0;
  for (int i = 0; i < 3; ++i) {
    emit_grids(man, "nevanlinna_start" + std::to_string(i), nevs[i].grids);
    double d = l1_distance(nevs[i].grids, consensus);
    cross.push_back(d);
    max_cross = std::max(max_cross, d);
  }

  json summary;
  summary["max_pairwise_l1"] = max_l1;
  summary["brownian_pass"] = max_l1 <= 0.05;
  summary["cross_l1"] = cross;
  summary["max_cross_l1"] = max_cross;
  summary["cross_agrees"] = max_cross <= 0.10;
  summary["singular_events"] = reports[0].singular_events;
  atomic_write(man.dir / "summary.json", summary.dump(1) + "\n");
  man.add("summary.json");
  std::cout << summary.dump(1) << "\n";
  return 0;
}

int run_density(const ExperimentConfig& cfg, Manifest& man) {
  SampleCloudCurrent T1 = load_cloud(cfg.t1.empty() ? "omega" : cfg.t1, cfg.seed);
  SampleCloudCurrent T2 =
      load_cloud(cfg.t2.empty() ? "omega" : cfg.t2, cfg.seed + 1);
  auto lambdas = parse_schedule(cfg.lambda_schedule);
  auto frames = full_diagonal_frames(cfg.grid);
  auto est = density_mass_estimate(T1, T2, lambdas, frames, 10000000, cfg.seed);

  std::ostringstream csv;
  csv << "lambda,mass\n";
  for (size_t i = 0; i < est.lambdas.size(); ++i)
    csv << std::setprecision(17) << est.lambdas[i] << "," << est.masses[i]
        << "\n";
  atomic_write(man.dir / "per_lambda.csv", csv.str());
  man.add("per_lambda.csv");

  json out;
  out["theta_mass"] = est.theta_mass;
  out["error"] = est.error;
  atomic_write(man.dir / "density.json", out.dump(1) + "\n");
  man.add("density.json");
  std::cout << out.dump(1) << "\n";
  return 0;
}

int run_sector_lab(const ExperimentConfig& cfg, Manifest& man) {
  SectorModel S(parse_complex(cfg.eta));
  auto mu = sobol_annulus_measure(S, 64);
  auto svals = parse_range(cfg.s_range);
  std::string exp = cfg.experiment;

  if (exp == "lemma-axe-sum" || exp == "lemma-g-int" || exp == "lemma-diag") {
    HarmonicWeight H = default_weight_family(S, mu.alphas[0]);
    std::ostringstream csv;
    if (exp == "lemma-axe-sum") {
      csv << "s,axe1,axe2\n";
      for (double s : svals) {
        auto v1 = axe_sum_integral(S, H, 1, s, 1.0);
        auto v2 = axe_sum_integral(S, H, 2, s, 1.0);
        csv << std::setprecision(17) << s << "," << v1.head + v1.tail_bound
            << "," << v2.head + v2.tail_bound << "\n";
      }
    } else if (exp == "lemma-g-int") {
      csv << "s,Eg1,Eg2\n";
      // cumulative trapezoid of G_i over a fine grid gives E(G_i)
      double smax = svals.back();
      int ns = std::max(40, int(smax / 0.25));
      std::vector<double> g1(ns + 1), g2(ns + 1);
      for (int i = 0; i <= ns; ++i) {
        double s = smax * i / ns;
        g1[i] = g_integral(S, H, 1, std::max(s, 1e-3)).head;
        g2[i] = g_integral(S, H, 2, std::max(s, 1e-3)).head;
      }
      auto mean_to = [&](const std::vector<double>& g, double s) {
        double h = smax / ns;
        int k = std::min<int>(ns, int(s / h));
        double acc = 0;
        for (int i = 0; i < k; ++i) acc += 0.5 * (g[i] + g[i + 1]) * h;
        return k > 0 ? acc / (k * h) : g[0];
      };
      for (double s : svals)
        csv << std::setprecision(17) << s << "," << mean_to(g1, s) << ","
            << mean_to(g2, s) << "\n";
    } else {
      csv << "t,value,tail\n";
      for (double t : {0.15, 0.3, 0.5, 0.7, 0.85}) {
        cplx dir = std::polar(1.0, S.angle() * t);
        auto v = ray_integral(S, H, dir);
        csv << std::setprecision(17) << t << "," << v.head << ","
            << v.tail_bound << "\n";
      }
    }
    atomic_write(man.dir / "curve.csv", csv.str());
    man.add("curve.csv");
    return 0;
  }

  if (exp == "roots") {
    cplx alpha = mu.alphas[1], beta = mu.alphas[2];
    Vec2c theta(cplx(1.0, 0.02), cplx(0.97, -0.03));
    double lambda = std::exp(svals.back());
    SolveOptions opt;
    opt.epsilon = cfg.epsilon;
    auto set = solve_intersections(S, alpha, beta, theta, lambda, opt);
    json dump = json::array();
    for (const auto& r : set.roots) {
      json e;
      e["zeta"] = {r.zeta.real(), r.zeta.imag()};
      e["zcheck"] = {r.zcheck.real(), r.zcheck.imag()};
      e["rho1"] = {r.rho1.real(), r.rho1.imag()};
      e["rho2"] = {r.rho2.real(), r.rho2.imag()};
      e["region"] = std::string(1, r.region);
      e["residual"] = r.residual;
      dump.push_back(e);
    }
    atomic_write(man.dir / "roots.json", dump.dump(1) + "\n");
    man.add("roots.json");
    std::cout << dump.dump(1) << "\n";
    return 0;
  }

  if (exp == "theta-slice") {
    // sup over a theta grid of the pair-averaged expectation E(|vartheta|)
    std::vector<Vec2c> thetas = {Vec2c(cplx(1, 0), cplx(1, 0)),
                                 Vec2c(cplx(1.05, 0.02), cplx(0.95, -0.03)),
                                 Vec2c(cplx(0.93, -0.04), cplx(1.06, 0.02))};
    const int n_pairs = 48;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n_pairs; ++i) pairs.push_back({i, (i + 17) % 64});

    int jobs = cfg.jobs > 0 ? cfg.jobs : default_jobs();
    // curve of |vartheta| on the s grid, per pair and theta, then Cesaro
    std::vector<double> sgrid = svals;
    struct Curve {
      std::vector<double> v;
    };
    std::function<Curve(int)> shard = [&](int idx) {
      int pi = idx / int(thetas.size());
      int ti = idx % int(thetas.size());
      cplx a = mu.alphas[pairs[pi].first], b = mu.alphas[pairs[pi].second];
      HarmonicWeight Ha = default_weight_family(S, a);
      HarmonicWeight Hb = default_weight_family(S, b);
      Curve c;
      for (double s : sgrid) {
        auto sm = slice_mass(S, a, b, thetas[ti], std::exp(s), Ha, Hb);
        c.v.push_back(sm.value);
      }
      return c;
    };
    auto curves = parallel_shards<Curve>(int(pairs.size() * thetas.size()),
                                         jobs, shard);

    std::ostringstream csv;
    csv << "s,sup_theta_mean_expectation\n";
    std::vector<double> final_curve;
    for (size_t k = 0; k < sgrid.size(); ++k) {
      double sup = 0.0;
      for (size_t ti = 0; ti < thetas.size(); ++ti) {
        double mean = 0.0;
        for (size_t pi = 0; pi < pairs.size(); ++pi) {
          const auto& cv = curves[pi * thetas.size() + ti].v;
          // Cesaro mean over (0, s]: constant extension below the first
          // grid point, trapezoid on the grid afterwards
          double acc = cv[0] * sgrid[0];
          for (size_t q = 0; q + 1 <= k; ++q)
            acc += 0.5 * (cv[q] + cv[q + 1]) * (sgrid[q + 1] - sgrid[q]);
          mean += (acc / sgrid[k]) / pairs.size();
        }
        sup = std::max(sup, mean);
      }
      final_curve.push_back(sup);
      csv << std::setprecision(17) << sgrid[k] << "," << sup << "\n";
    }
    atomic_write(man.dir / "theta_slice.csv", csv.str());
    man.add("theta_slice.csv");
    json out;
    out["first"] = final_curve.front();
    out["last"] = final_curve.back();
    out["decay_ratio"] =
        final_curve.front() > 0 ? final_curve.back() / final_curve.front() : 0;
    atomic_write(man.dir / "theta_slice.json", out.dump(1) + "\n");
    man.add("theta_slice.json");
    std::cout << out.dump(1) << "\n";
    return 0;
  }

  std::cerr << json{{"error", "unknown experiment"}}.dump() << "\n";
  return 2;
}

int run_lemma_check(const ExperimentConfig& cfg, Manifest& man) {
  json all = json::array();
  for (const char* etas : {"0+1i", "1+1i", "-1+2i"}) {
    SectorModel S(parse_complex(etas));
    auto mu = sobol_annulus_measure(S, 8);
    HarmonicWeight H = default_weight_family(S, mu.alphas[0]);
    json r;
    r["eta"] = etas;
    r["gamma"] = S.gamma();
    // (a) Poisson constant
    HarmonicWeight one = HarmonicWeight::constant(1.0);
    double worst_const = 0.0;
    for (double U : {-3.0, 0.0, 2.5})
      for (double V : {0.1, 1.0, 7.0})
        worst_const = std::max(worst_const, std::abs(one.eval(U, V) - 1.0));
    r["poisson_constant_err"] = worst_const;
    // (b) harmonicity
    double worst_mv = 0.0;
    for (double U : {-1.0, 0.4})
      for (double V : {1.0, 3.0})
        worst_mv = std::max(
            worst_mv, harmonic_mean_value_residual(H, U, V, V / 2.1) /
                          std::max(1e-12, H.eval(U, V)));
    r["mean_value_residual"] = worst_mv;
    // (c) axe-sum decay over [1, 40]
    double mx = 0, terminal = 0;
    for (double s = 1.0; s <= 40.0; s += 1.0) {
      auto v = axe_sum_integral(S, H, 1, s, 1.0);
      double val = v.head + v.tail_bound;
      mx = std::max(mx, val);
      if (s >= 39.0) terminal = val;
    }
    r["axe_sum_max"] = mx;
    r["axe_sum_terminal"] = terminal;
    r["axe_sum_pass"] = terminal <= 0.1 * mx;
    // (d) E(G_i) decay
    double gmax = 0, gterm = 0;
    {
      const int ns = 160;
      std::vector<double> g(ns + 1);
      for (int i = 0; i <= ns; ++i)
        g[i] = g_integral(S, H, 1, std::max(40.0 * i / ns, 1e-3)).head;
      double h = 40.0 / ns, acc = 0;
      for (int i = 0; i < ns; ++i) {
        acc += 0.5 * (g[i] + g[i + 1]) * h;
        double eg = acc / ((i + 1) * h);
        double s = (i + 1) * h;
        if (s >= 1.0) gmax = std::max(gmax, eg);
        if (i == ns - 1) gterm = eg;
      }
    }
    r["eg_max"] = gmax;
    r["eg_terminal"] = gterm;
    r["eg_pass"] = gterm <= 0.1 * gmax;
    // (e) diag ray integrals with certified tails
    bool rays_ok = true;
    double worst_tail_frac = 0.0;
    for (double t : {0.25, 0.5, 0.75}) {
      auto v = ray_integral(S, H, std::polar(1.0, S.angle() * t));
      rays_ok = rays_ok && std::isfinite(v.head);
      worst_tail_frac =
          std::max(worst_tail_frac, v.tail_bound / std::max(v.head, 1e-12));
    }
    r["ray_finite"] = rays_ok;
    r["ray_tail_frac"] = worst_tail_frac;
    all.push_back(r);
  }
  atomic_write(man.dir / "lemma_check.json", all.dump(1) + "\n");
  man.add("lemma_check.json");
  std::cout << all.dump(1) << "\n";
  (void)cfg;
  return 0;
}

int run_average(const ExperimentConfig& cfg, Manifest& man, bool brownian) {
  FoliationSpec F = load_foliation(cfg.foliation);
  auto rep = find_singularities(F);
  LeafTracer tracer(F, rep.singularities);
  auto starts = regular_starts(F, rep.singularities, 1, cfg.seed);
  AveragingOptions opt;
  opt.grid_n = cfg.grid;
  opt.window = parse_window(cfg.window);
  AveragingReport r =
      brownian
          ? brownian_average(tracer, starts[0], cfg.steps, cfg.dt, cfg.seed, opt)
          : nevanlinna_average(tracer, starts[0], cfg.r, int(cfg.steps), cfg.seed,
                               opt);
  emit_grids(man, brownian ? "brownian" : "nevanlinna", r.grids);
  json out;
  out["characteristic"] = r.characteristic;
  out["samples"] = r.sample_count;
  out["stat_error"] = r.stat_error;
  out["singular_events"] = r.singular_events;
  atomic_write(man.dir / "report.json", out.dump(1) + "\n");
  man.add("report.json");
  std::cout << out.dump(1) << "\n";
  return 0;
}

int run_trace(const ExperimentConfig& cfg, Manifest& man) {
  FoliationSpec F = load_foliation(cfg.foliation);
  auto rep = find_singularities(F);
  LeafTracer tracer(F, rep.singularities);
  auto starts = regular_starts(F, rep.singularities, 1, cfg.seed);
  // a unit square loop in complex time
  std::vector<cplx> path = {cplx(0.5, 0), cplx(0.5, 0.5), cplx(0, 0.5),
                            cplx(0, 0)};
  LeafPath lp = integrate_leaf(tracer, starts[0], path);
  json out;
  out["vertices"] = json::array();
  for (size_t i = 0; i < lp.points.size(); ++i) {
    const auto& p = lp.points[i];
    out["vertices"].push_back({{"chart", p.chart()},
                               {"x",
                                {p.affine()(0).real(), p.affine()(0).imag(),
                                 p.affine()(1).real(), p.affine()(1).imag()}}});
  }
  out["chart_switches"] = lp.chart_switches;
  out["max_defect"] = lp.max_defect;
  atomic_write(man.dir / "trace.json", out.dump(1) + "\n");
  man.add("trace.json");
  std::cout << out.dump(1) << "\n";
  return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  try {
    Manifest man(cfg);
    if (man.already_done(cfg.hash())) {
      std::cout << "{\"skipped\": \"artifacts complete for this config\"}\n";
      return 0;
    }
    int rc;
    const std::string& e = cfg.experiment;
    if (e == "unique-ergodicity") rc = run_unique_ergodicity(cfg, man);
    else if (e == "density") rc = run_density(cfg, man);
    else if (e == "brownian") rc = run_average(cfg, man, true);
    else if (e == "nevanlinna") rc = run_average(cfg, man, false);
    else if (e == "trace") rc = run_trace(cfg, man);
    else if (e == "lemma-check") rc = run_lemma_check(cfg, man);
    else if (e == "lemma-axe-sum" || e == "lemma-g-int" || e == "lemma-diag" ||
             e == "theta-slice" || e == "roots")
      rc = run_sector_lab(cfg, man);
    else {
      std::cerr << nlohmann::json{{"error", "unknown experiment"}}.dump()
                << "\n";
      return 2;
    }
    if (rc == 0) man.finish();
    return rc;
  } catch (const std::exception& ex) {
    std::cerr << nlohmann::json{{"error", ex.what()}}.dump() << "\n";
    return 1;
  }
}

}  // namespace fol
