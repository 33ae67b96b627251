#include "foliscope/foliation.hpp"

#include <fstream>
#include <map>

#include "json.hpp"

namespace fol {

cplx Poly2::eval(const Vec2c& x) const {
  // powers are tiny (degree <= d+1), direct accumulation is fine
  cplx s = 0.0;
  for (const auto& t : terms_) {
    cplx p = t.c;
    for (int k = 0; k < t.i; ++k) p *= x(0);
    for (int k = 0; k < t.j; ++k) p *= x(1);
    s += p;
  }
  return s;
}

cplx Poly2::dx(const Vec2c& x) const {
  cplx s = 0.0;
  for (const auto& t : terms_) {
    if (t.i == 0) continue;
    cplx p = t.c * double(t.i);
    for (int k = 0; k < t.i - 1; ++k) p *= x(0);
    for (int k = 0; k < t.j; ++k) p *= x(1);
    s += p;
  }
  return s;
}

cplx Poly2::dy(const Vec2c& x) const {
  cplx s = 0.0;
  for (const auto& t : terms_) {
    if (t.j == 0) continue;
    cplx p = t.c * double(t.j);
    for (int k = 0; k < t.i; ++k) p *= x(0);
    for (int k = 0; k < t.j - 1; ++k) p *= x(1);
    s += p;
  }
  return s;
}

int Poly2::degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.i + t.j);
  return d;
}

FoliationSpec FoliationSpec::linear_model(cplx eta) {
  // chart 0: (eta x, y); pushed to the other charts and cleared of poles
  ChartField c0{Poly2({{1, 0, eta}}), Poly2({{0, 1, 1.0}})};
  ChartField c1{Poly2({{1, 0, -eta}}), Poly2({{0, 1, 1.0 - eta}})};
  ChartField c2{Poly2({{1, 0, -1.0}}), Poly2({{0, 1, eta - 1.0}})};
  return FoliationSpec(1, {c0, c1, c2});
}

FoliationSpec FoliationSpec::jouanolou(int d) {
  // chart 0: (y^d - x^{d+1}, 1 - x^d y); charts 1, 2 are the cleared
  // pushforwards (chart 2 has the same shape by the cyclic symmetry).
  ChartField c0{Poly2({{0, d, 1.0}, {d + 1, 0, -1.0}}),
                Poly2({{0, 0, 1.0}, {d, 1, -1.0}})};
  ChartField c1{Poly2({{0, 0, 1.0}, {1, d, -1.0}}),
                Poly2({{d, 0, 1.0}, {0, d + 1, -1.0}})};
  ChartField c2{Poly2({{0, d, 1.0}, {d + 1, 0, -1.0}}),
                Poly2({{0, 0, 1.0}, {d, 1, -1.0}})};
  return FoliationSpec(d, {c0, c1, c2});
}

FoliationSpec FoliationSpec::preset(const std::string& name) {
  auto colon = name.find(':');
  std::string kind = name.substr(0, colon);
  if (kind == "linear") {
    std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
    auto eq = arg.find('=');
    std::string val = eq == std::string::npos ? arg : arg.substr(eq + 1);
    // parse a+bi
    double a = 0, b = 1;
    if (!val.empty()) {
      size_t ipos = val.find('i');
      std::string body = ipos == std::string::npos ? val : val.substr(0, ipos);
      size_t split = body.find_first_of("+-", 1);
      if (split == std::string::npos) {
        if (ipos != std::string::npos) { a = 0; b = std::stod(body.empty() ? "1" : body); }
        else { a = std::stod(body); b = 0; }
      } else {
        a = std::stod(body.substr(0, split));
        std::string bs = body.substr(split);
        if (bs == "+" || bs == "-") bs += "1";
        b = std::stod(bs);
      }
    }
    return linear_model(cplx(a, b));
  }
  if (kind == "jouanolou") {
    int d = 2;
    if (colon != std::string::npos) d = std::stoi(name.substr(colon + 1));
    return jouanolou(d);
  }
  throw std::invalid_argument("unknown foliation preset: " + name);
}

static Poly2 poly_from_json(const nlohmann::json& arr) {
  std::vector<Poly2::Mono> terms;
  for (const auto& m : arr)
    terms.push_back({m.at(0).get<int>(), m.at(1).get<int>(),
                     cplx(m.at(2).get<double>(), m.at(3).get<double>())});
  return Poly2(terms);
}

static nlohmann::json poly_to_json(const Poly2& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : p.terms())
    arr.push_back({t.i, t.j, t.c.real(), t.c.imag()});
  return arr;
}

FoliationSpec FoliationSpec::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open foliation file: " + path);
  nlohmann::json j;
  in >> j;
  int d = j.at("degree").get<int>();
  const auto& charts = j.at("charts");
  if (charts.size() != 3)
    throw std::runtime_error("foliation file must list 3 charts");
  std::array<ChartField, 3> cf;
  for (int k = 0; k < 3; ++k)
    cf[k] = ChartField{poly_from_json(charts[k].at("vx")),
                       poly_from_json(charts[k].at("vy"))};
  return FoliationSpec(d, cf);
}

void FoliationSpec::to_json_file(const std::string& path) const {
  nlohmann::json j;
  j["degree"] = degree_;
  j["charts"] = nlohmann::json::array();
  for (int k = 0; k < 3; ++k)
    j["charts"].push_back({{"vx", poly_to_json(charts_[k].vx)},
                           {"vy", poly_to_json(charts_[k].vy)}});
  std::ofstream out(path);
  out << j.dump(1);
}

double FoliationSpec::overlap_residual(int j, int k, const Vec2c& x) const {
  Vec2c vj = charts_[j].eval(x);
  Mat2c J = transition_jacobian(j, k, x);
  Vec2c push = J * vj;
  Vec2c vk = charts_[k].eval(transition(j, k, x));
  double n1 = push.norm(), n2 = vk.norm();
  if (n1 == 0 || n2 == 0) return 0.0;
  cplx cross = push(0) * vk(1) - push(1) * vk(0);
  return std::abs(cross) / (n1 * n2);
}

double chordal_distance(const Vec3c& z, const Vec3c& w) {
  // sin of the Fubini-Study angle
  cplx ip = z.dot(w);
  double c2 = std::norm(ip) / (z.squaredNorm() * w.squaredNorm());
  return std::sqrt(std::max(0.0, 1.0 - c2));
}

double distance_to_singularities(const std::vector<Singularity>& sings,
                                 const SurfacePoint& p) {
  double best = 1.0;
  for (const auto& s : sings)
    best = std::min(best,
                    chordal_distance(s.location.homogeneous(), p.homogeneous()));
  return best;
}

static std::optional<Vec2c> newton_zero(const ChartField& f, Vec2c x,
                                        double tol, int iters = 60) {
  for (int it = 0; it < iters; ++it) {
    Vec2c v = f.eval(x);
    if (!v.allFinite() || x.norm() > 8.0) return std::nullopt;
    Mat2c J = f.jacobian(x);
    Eigen::FullPivLU<Mat2c> lu(J);
    if (!lu.isInvertible()) return std::nullopt;
    Vec2c dx = lu.solve(v);
    x -= dx;
    if (dx.norm() < tol) {
      if (f.eval(x).norm() <= 1e-10) return x;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

SingularitySearchReport find_singularities(const FoliationSpec& F,
                                           double grid_step,
                                           double polish_tol) {
  SingularitySearchReport report;
  std::vector<Vec3c> found;

  for (int k = 0; k < 3; ++k) {
    const ChartField& f = F.chart_field(k);
    // grid scan of the closed unit bidisc of the chart, Newton polish
    int n = int(2.0 / grid_step) + 1;
    for (int i0 = 0; i0 <= n; ++i0)
      for (int i1 = 0; i1 <= n; ++i1)
        for (int i2 = 0; i2 <= n; ++i2)
          for (int i3 = 0; i3 <= n; ++i3) {
            Vec2c x(cplx(-1.0 + 2.0 * i0 / n, -1.0 + 2.0 * i1 / n),
                    cplx(-1.0 + 2.0 * i2 / n, -1.0 + 2.0 * i3 / n));
            auto z = newton_zero(f, x, polish_tol);
            if (!z) continue;
            if (std::abs((*z)(0)) > 1.0 + 1e-9 || std::abs((*z)(1)) > 1.0 + 1e-9)
              continue;  // belongs to another chart's cell
            Vec3c h = affine_to_homogeneous(k, *z);
            bool dup = false;
            for (const auto& g : found)
              if (chordal_distance(g, h) < 1e-8) { dup = true; break; }
            if (!dup) found.push_back(h);
          }
  }

  for (const auto& h : found) {
    SurfacePoint p = SurfacePoint::from_homogeneous(h);
    const ChartField& f = F.chart_field(p.chart());
    // a final polish in the active chart
    auto z = newton_zero(f, p.affine(), polish_tol);
    Vec2c loc = z ? *z : p.affine();
    if (f.eval(loc).norm() > 1e-10)
      throw SolverDiverged("singularity failed residual certification");
    Singularity s;
    s.location = SurfacePoint::from_affine(p.chart(), loc);
    Mat2c J = f.jacobian(loc);
    Eigen::ComplexEigenSolver<Mat2c> es(J);
    s.lambda1 = es.eigenvalues()(0);
    s.lambda2 = es.eigenvalues()(1);
    cplx eta = s.lambda1 / s.lambda2;
    if (eta.imag() < 0) {
      std::swap(s.lambda1, s.lambda2);
      eta = s.lambda1 / s.lambda2;
    }
    s.eta = eta;
    s.hyperbolic = std::abs(eta.imag()) > 1e-9 * std::abs(eta);
    report.singularities.push_back(s);
  }

  // deterministic order: chart, then lexicographic location
  std::sort(report.singularities.begin(), report.singularities.end(),
            [](const Singularity& a, const Singularity& b) {
              if (a.location.chart() != b.location.chart())
                return a.location.chart() < b.location.chart();
              const Vec2c &u = a.location.affine(), &v = b.location.affine();
              for (int i = 0; i < 2; ++i) {
                if (u(i).real() != v(i).real()) return u(i).real() < v(i).real();
                if (u(i).imag() != v(i).imag()) return u(i).imag() < v(i).imag();
              }
              return false;
            });

  int d = F.degree();
  report.count_matches_generic =
      int(report.singularities.size()) == d * d + d + 1;
  return report;
}

FlowBox::FlowBox(const FoliationSpec& F, const SurfacePoint& p, double size)
    : F_(&F), chart_(p.chart()), base_(p.affine()), size_(size) {
  Vec2c v = F.eval_in_chart(chart_, base_);
  double n = v.norm();
  if (n == 0) throw TooCloseToSingularity("flow box at a singular point");
  e1_ = v / n;
  e2_ = Vec2c(-std::conj(e1_(1)), std::conj(e1_(0)));  // unitary complement
}

SurfacePoint FlowBox::embed(cplx x1, cplx x2) const {
  return SurfacePoint::from_affine(chart_, base_ + x1 * e1_ + x2 * e2_);
}

cplx FlowBox::plaque(cplx alpha, cplx x1) const {
  // integrate d phi / d x1 = <v, e2> / <v, e1> radially from the transversal
  int nsteps = 64;
  cplx phi = alpha;
  cplx step = x1 / double(nsteps);
  auto rhs = [&](cplx t, cplx f) -> cplx {
    Vec2c pos = base_ + t * e1_ + f * e2_;
    Vec2c v = F_->eval_in_chart(chart_, pos);
    cplx a = e1_.dot(v), b = e2_.dot(v);
    if (std::abs(a) < 1e-14) throw TooCloseToSingularity("plaque turns vertical");
    return b / a;
  };
  cplx t = 0.0;
  for (int i = 0; i < nsteps; ++i) {
    // classical RK4; the graphs are analytic and the boxes are small
    cplx k1 = rhs(t, phi);
    cplx k2 = rhs(t + 0.5 * step, phi + 0.5 * step * k1);
    cplx k3 = rhs(t + 0.5 * step, phi + 0.5 * step * k2);
    cplx k4 = rhs(t + step, phi + step * k3);
    phi += step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    t += step;
  }
  return phi;
}

double FlowBox::measured_kappa0(int n_alpha, int n_x) const {
  double lo = 1e300, hi = 0.0;
  for (int i = 0; i < n_alpha; ++i)
    for (int j = i + 1; j < n_alpha; ++j) {
      // transversal parameters live on the e2 axis
      cplx a = size_ * (-0.8 + 1.6 * i / (n_alpha - 1));
      cplx b = size_ * (-0.8 + 1.6 * j / (n_alpha - 1));
      for (int m = 0; m < n_x; ++m) {
        double ang = 2.0 * kPi * m / n_x;
        cplx x1 = 0.8 * size_ * std::polar(1.0, ang);
        double ratio = std::abs(plaque(a, x1) - plaque(b, x1)) / std::abs(a - b);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
    }
  return std::max(hi, 1.0 / lo);
}

double FlowBox::tangency_residual(cplx alpha, cplx x1) const {
  // compare the graph slope with the field direction
  cplx h = 1e-5 * size_;
  cplx f0 = plaque(alpha, x1 - h), f1 = plaque(alpha, x1 + h);
  cplx slope = (f1 - f0) / (2.0 * h);
  Vec2c pos = base_ + x1 * e1_ + plaque(alpha, x1) * e2_;
  Vec2c v = F_->eval_in_chart(chart_, pos);
  cplx a = e1_.dot(v), b = e2_.dot(v);
  return std::abs(slope - b / a) / (1.0 + std::abs(b / a));
}

FlowBox regular_flow_box(const FoliationSpec& F,
                         const std::vector<Singularity>& sings,
                         const SurfacePoint& p, double size, double cutoff) {
  if (distance_to_singularities(sings, p) < cutoff)
    throw TooCloseToSingularity("flow box too close to a singularity");
  return FlowBox(F, p, size);
}

}  // namespace fol
