#include "cocontact/lagrangian.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>

#include "cocontact/errors.hpp"
#include "tally.hpp"

namespace cocontact {

namespace {

using detail::require_smooth;
using detail::Tally;

const char* kAssumption =
    "regular Lagrangian on the sampler box; verdicts are sampled certificates, not proofs";

void require_lagrangian(const ChartSpec& chart) {
  if (chart.kind != ChartKind::lagrangian) throw ChartMismatch("expected a lagrangian chart");
}

// Order-2 jet of L with its velocity Hessian, checked for regularity.
struct Fiber {
  Jet L;
  Eigen::MatrixXd W;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

Fiber fiber_data(const LagrangianSystem& sys, std::span<const double> x) {
  const ChartSpec& c = sys.chart;
  Fiber f{sys.L.jet(x, 2), Eigen::MatrixXd(c.n, c.n), {}};
  require_smooth(f.L);
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = 0; j < c.n; ++j) f.W(i, j) = f.L.hess(c.fiber_index(i), c.fiber_index(j));
  const double scale = f.W.cwiseAbs().maxCoeff();
  f.lu.compute(f.W);
  const double det = f.lu.determinant();
  if (scale == 0.0 || std::abs(det) < 1e-12 * std::pow(scale, static_cast<double>(c.n)))
    throw RegularityError("velocity Hessian of L is singular (det " + std::to_string(det) + ")");
  return f;
}

// W^-1 b for a mixed second derivative column b_j = L_{v_j, k}.
Eigen::VectorXd solve_mixed(const ChartSpec& c, const Fiber& f, std::size_t k) {
  Eigen::VectorXd b(c.n);
  for (std::size_t j = 0; j < c.n; ++j) b(j) = f.L.hess(c.fiber_index(j), k);
  return f.lu.solve(b);
}

TangentVector gamma_from(const ChartSpec& c, std::span<const double> x, const Fiber& f) {
  const std::size_t d = c.dim(), z = c.z_index();
  const Jet& L = f.L;
  Eigen::VectorXd rhs(c.n);
  for (std::size_t j = 0; j < c.n; ++j) {
    const std::size_t vj = c.fiber_index(j);
    double r = L.grad(c.q_index(j)) - L.hess(0, vj) - L.value() * L.hess(z, vj) + L.grad(z) * L.grad(vj);
    for (std::size_t k = 0; k < c.n; ++k) r -= x[c.fiber_index(k)] * L.hess(c.q_index(k), vj);
    rhs(j) = r;
  }
  const Eigen::VectorXd acc = f.lu.solve(rhs);
  TangentVector g{std::vector<double>(d, 0.0)};
  g[0] = 1.0;
  for (std::size_t i = 0; i < c.n; ++i) {
    g[c.q_index(i)] = x[c.fiber_index(i)];
    g[c.fiber_index(i)] = acc(i);
  }
  g[z] = L.value();
  return g;
}

double dot_grad(const TangentVector& v, const Jet& j, double* scale = nullptr) {
  double s = 0.0, a = 0.0;
  for (std::size_t k = 0; k < v.c.size(); ++k) {
    s += v[k] * j.grad(k);
    a += std::abs(v[k] * j.grad(k));
  }
  if (scale) *scale = a;
  return s;
}

std::vector<double> lag_coords(const ChartSpec& c, std::span<const double> ham, std::span<const double> v) {
  std::vector<double> x(ham.begin(), ham.end());
  for (std::size_t i = 0; i < c.n; ++i) x[c.fiber_index(i)] = v[i];
  return x;
}

// Legendre inverse with a warm start shared between evaluations.
class WarmLegendre {
 public:
  explicit WarmLegendre(LagrangianSystem sys) : sys_(std::move(sys)) {}

  std::vector<double> solve(std::span<const double> ham) {
    std::vector<double> guess;
    {
      std::lock_guard<std::mutex> lk(m_);
      guess = last_;
    }
    PhasePoint lp;
    try {
      lp = legendre_inverse(sys_, PhasePoint({ham.begin(), ham.end()}), guess);
    } catch (const NewtonNoConvergence&) {
      if (guess.empty()) throw;
      lp = legendre_inverse(sys_, PhasePoint({ham.begin(), ham.end()}));
    }
    std::vector<double> v(sys_.chart.n);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = lp.fiber(i);
    std::lock_guard<std::mutex> lk(m_);
    last_ = v;
    return std::move(lp.data());
  }

  const LagrangianSystem& sys() const { return sys_; }

 private:
  LagrangianSystem sys_;
  std::mutex m_;
  std::vector<double> last_;
};

bool is_fiber(const ChartSpec& c, std::size_t k) { return k >= c.fiber_index(0) && k < c.z_index(); }

SymmetryReport make_report(std::string subject, const LagrangianSystem& sys, const Sampler& s,
                           const Tolerance& tol, std::initializer_list<const Tally*> tallies) {
  SymmetryReport r;
  r.subject = std::move(subject);
  r.system = sys.label;
  r.seed = s.seed;
  r.samples = s.count;
  r.tol = tol;
  r.assumptions = {kAssumption};
  for (const Tally* t : tallies) r.classes.push_back(t->result(s));
  return r;
}

void check_names(const ScalarField& f, const NameSet& allowed, const std::string& what) {
  if (!f.expr()) return;
  for (const auto& name : free_variables(*f.expr()))
    if (!allowed.count(name))
      throw DependenceViolation(what + " may not depend on '" + name + "'");
}

}  // namespace

LagrangianSystem LagrangianSystem::from_expr(std::string_view source, std::size_t n, ParamMap params) {
  ChartSpec chart{n, ChartKind::lagrangian};
  NameSet names;
  for (const auto& [k, v] : params) names.insert(k);
  const Expr e = parse(source, chart, names);
  return {chart, ScalarField::from_expr(e, params), std::move(params), std::string(source)};
}

LagrangianGeometry lagrangian_geometry(const LagrangianSystem& sys, const PhasePoint& x) {
  const ChartSpec& c = sys.chart;
  require_lagrangian(c);
  const Fiber f = fiber_data(sys, x.coords());
  const std::size_t d = c.dim();
  LagrangianGeometry g;
  g.theta_L.c.assign(d, 0.0);
  g.eta_L.c.assign(d, 0.0);
  g.eta_L[c.z_index()] = 1.0;
  double delta = 0.0;
  for (std::size_t i = 0; i < c.n; ++i) {
    const double lv = f.L.grad(c.fiber_index(i));
    delta += x.fiber(i) * lv;
    g.theta_L[c.q_index(i)] = lv;
    g.eta_L[c.q_index(i)] = -lv;
  }
  g.E_L = delta - f.L.value();
  const Eigen::MatrixXd inv = f.lu.inverse();
  g.W.resize(c.n * c.n);
  g.W_inv.resize(c.n * c.n);
  for (std::size_t i = 0; i < c.n; ++i)
    for (std::size_t j = 0; j < c.n; ++j) {
      g.W[i * c.n + j] = f.W(i, j);
      g.W_inv[i * c.n + j] = inv(i, j);
    }
  return g;
}

PhasePoint legendre_map(const LagrangianSystem& sys, const PhasePoint& x) {
  require_lagrangian(sys.chart);
  const Jet L = sys.L.jet(x.coords(), 1);
  std::vector<double> y(x.coords().begin(), x.coords().end());
  for (std::size_t i = 0; i < sys.chart.n; ++i) y[sys.chart.fiber_index(i)] = L.grad(sys.chart.fiber_index(i));
  return PhasePoint(std::move(y));
}

PhasePoint legendre_inverse(const LagrangianSystem& sys, const PhasePoint& ham_point,
                            std::span<const double> v_guess) {
  const ChartSpec& c = sys.chart;
  require_lagrangian(c);
  const auto h = ham_point.coords();
  if (h.size() != c.dim()) throw std::invalid_argument("legendre_inverse: point has the wrong dimension");
  Eigen::VectorXd p(c.n), v(c.n);
  for (std::size_t i = 0; i < c.n; ++i) {
    p(i) = h[c.fiber_index(i)];
    v(i) = v_guess.size() == c.n ? v_guess[i] : p(i);
  }
  const double tol = 1e-12 * std::max(1.0, p.cwiseAbs().maxCoeff());
  for (int it = 0;; ++it) {
    auto x = lag_coords(c, h, std::span<const double>(v.data(), c.n));
    std::optional<Fiber> f;
    try {
      f = fiber_data(sys, x);
    } catch (const RegularityError&) {
      if (it == 0) throw;
      break;  // the iterate left the regular region
    }
    Eigen::VectorXd res(c.n);
    for (std::size_t i = 0; i < c.n; ++i) res(i) = f->L.grad(c.fiber_index(i)) - p(i);
    if (!res.allFinite()) break;
    const bool done = res.cwiseAbs().maxCoeff() < tol;
    if (!done && it == 50) break;
    v -= f->lu.solve(res);
    if (done) {
      // One more correction at no extra evaluation cost.
      for (std::size_t i = 0; i < c.n; ++i) x[c.fiber_index(i)] = v(i);
      return PhasePoint(std::move(x));
    }
  }
  throw NewtonNoConvergence("Legendre inverse did not converge in 50 iterations",
                            std::vector<double>(v.data(), v.data() + c.n));
}

LagrangianReeb reeb_fields_L(const LagrangianSystem& sys, const PhasePoint& x) {
  const ChartSpec& c = sys.chart;
  require_lagrangian(c);
  const Fiber f = fiber_data(sys, x.coords());
  LagrangianReeb r{unit_vector(c, 0), unit_vector(c, c.z_index())};
  const Eigen::VectorXd at = solve_mixed(c, f, 0), az = solve_mixed(c, f, c.z_index());
  for (std::size_t i = 0; i < c.n; ++i) {
    r.R_t[c.fiber_index(i)] = -at(i);
    r.R_z[c.fiber_index(i)] = -az(i);
  }
  return r;
}

TangentVector herglotz_field(const LagrangianSystem& sys, const PhasePoint& x) {
  require_lagrangian(sys.chart);
  return gamma_from(sys.chart, x.coords(), fiber_data(sys, x.coords()));
}

VectorField herglotz_vector_field(const LagrangianSystem& sys) {
  require_lagrangian(sys.chart);
  const std::size_t d = sys.chart.dim();
  return VectorField(
      d,
      [sys, d](std::span<const double> x, int) {
        const TangentVector g = gamma_from(sys.chart, x, fiber_data(sys, x));
        std::vector<Jet> out;
        out.reserve(d);
        for (double v : g.c) out.push_back(Jet::constant(v, d));
        return out;
      },
      0, "Gamma_L", Differentiability::fd);
}

TangentVector vertical_endomorphism(const ChartSpec& chart, const TangentVector& v) {
  TangentVector s{std::vector<double>(chart.dim(), 0.0)};
  for (std::size_t i = 0; i < chart.n; ++i) s[chart.fiber_index(i)] = v[chart.q_index(i)];
  return s;
}

LiftSpec LiftSpec::from_exprs(const ChartSpec& chart, const std::vector<std::string>& y, std::string_view zeta,
                              const ParamMap& params) {
  if (y.size() != chart.n) throw std::invalid_argument("lift needs one base component per degree of freedom");
  NameSet names;
  for (const auto& [k, v] : params) names.insert(k);
  LiftSpec s;
  for (const auto& src : y) s.Y.push_back(ScalarField::from_expr(parse(src, chart, names), params));
  s.zeta = ScalarField::from_expr(parse(zeta, chart, names), params);
  s.validate(chart);
  return s;
}

void LiftSpec::validate(const ChartSpec& chart) const {
  NameSet qs;
  for (std::size_t i = 0; i < chart.n; ++i) qs.insert(chart.coordinate_name(chart.q_index(i)));
  for (std::size_t i = 0; i < Y.size(); ++i) check_names(Y[i], qs, "base component Y" + std::to_string(i + 1));
  check_names(zeta, {"z"}, "zeta");
}

VectorField lift_field(const LiftSpec& spec, LiftKind kind, const ChartSpec& chart) {
  require_lagrangian(chart);
  if (spec.Y.size() != chart.n) throw std::invalid_argument("lift needs one base component per degree of freedom");
  spec.validate(chart);
  int max_order = spec.zeta.max_order();
  for (const auto& y : spec.Y) max_order = std::min(max_order, y.max_order() - (kind == LiftKind::complete ? 1 : 0));
  if (max_order < 0) throw std::invalid_argument("complete lift needs differentiable base components");
  const std::size_t d = chart.dim();
  auto fn = [spec, kind, chart, d](std::span<const double> x, int order) {
    const Jet zero = Jet::from_parts(0.0, d, order >= 1 ? std::vector<double>(d, 0.0) : std::vector<double>{},
                                     order >= 2 ? std::vector<double>(d * d, 0.0) : std::vector<double>{});
    std::vector<Jet> out(d, zero);
    if (kind == LiftKind::vertical) {
      for (std::size_t i = 0; i < chart.n; ++i) out[chart.fiber_index(i)] = spec.Y[i].jet(x, order);
      return out;
    }
    for (std::size_t i = 0; i < chart.n; ++i) {
      const Jet yi = spec.Y[i].jet(x, order + 1);
      out[chart.q_index(i)] = yi.truncated(order);
      Jet acc = out[chart.fiber_index(i)];
      for (std::size_t j = 0; j < chart.n; ++j) {
        const std::size_t vj = chart.fiber_index(j);
        acc += Jet::variable(x[vj], d, vj, order) * yi.partial(chart.q_index(j));
      }
      out[chart.fiber_index(i)] = acc;
    }
    out[chart.z_index()] = spec.zeta.jet(x, order);
    return out;
  };
  return VectorField(d, fn, max_order, kind == LiftKind::complete ? "Y^C" : "Y^V");
}

TangentVector lift(const LiftSpec& spec, LiftKind kind, const ChartSpec& chart, const PhasePoint& x) {
  return lift_field(spec, kind, chart)(x.coords());
}

ExtendedNaturalResult check_extended_natural(const LiftSpec& spec, const LagrangianSystem& sys,
                                             const Sampler& sampler, Tolerance tol) {
  const ChartSpec& c = sys.chart;
  const VectorField yc = lift_field(spec, LiftKind::complete, c);
  ScalarField f = -1.0 * spec.zeta;
  for (std::size_t i = 0; i < c.n; ++i) f = f + spec.Y[i] * partial(sys.L, c.fiber_index(i));

  Tally sym("extended_natural"), diss("extended_natural_dissipation");
  const auto pts = sampler.draw();
  for_each_sample(pts, [&](std::size_t, const PhasePoint& p) {
    const auto x = p.coords();
    const Fiber fd = fiber_data(sys, x);
    const Jet& L = fd.L;
    const double zeta_prime = spec.zeta.jet(x, 1).grad(c.z_index());
    double scale = 0.0;
    const double yl = dot_grad(yc(x), L, &scale);
    sym.add(std::abs(yl - zeta_prime * L.value()), scale + std::abs(zeta_prime * L.value()), tol);

    const Jet fj = f.jet(x, 1);
    require_smooth(fj);
    const TangentVector g = gamma_from(c, x, fd);
    const double lz = L.grad(c.z_index());
    const double gf = dot_grad(g, fj, &scale);
    diss.add(std::abs(gf - lz * fj.value()), scale + std::abs(lz * fj.value()), tol);
  });
  ExtendedNaturalResult r{make_report(yc.label(), sys, sampler, tol, {&sym, &diss}), std::move(f)};
  return r;
}

double lagrangian_quantity_residual(const ScalarField& f, const LagrangianSystem& sys, QuantityKind kind,
                                    const PhasePoint& x, double* scale) {
  require_lagrangian(sys.chart);
  const Fiber fd = fiber_data(sys, x.coords());
  const Jet fj = f.jet(x.coords(), 1);
  require_smooth(fj);
  double s = 0.0;
  double r = dot_grad(gamma_from(sys.chart, x.coords(), fd), fj, &s);
  if (kind == QuantityKind::dissipated) {
    const double lz = fd.L.grad(sys.chart.z_index());
    r -= lz * fj.value();
    s += std::abs(lz * fj.value());
  }
  if (scale) *scale = s;
  return r;
}

SymmetryReport check_action_symmetry(const ScalarField& zeta, const LagrangianSystem& sys, const Sampler& sampler,
                                     Tolerance tol) {
  const ChartSpec& c = sys.chart;
  require_lagrangian(c);
  Tally t("action_symmetry");
  const auto pts = sampler.draw();
  for_each_sample(pts, [&](std::size_t, const PhasePoint& p) {
    const auto x = p.coords();
    const Fiber fd = fiber_data(sys, x);
    const Jet zj = zeta.jet(x, 1);
    require_smooth(zj);
    double scale = 0.0;
    const double gz = dot_grad(gamma_from(c, x, fd), zj, &scale);
    const double rhs = zj.value() * fd.L.grad(c.z_index());
    t.add(std::abs(gz - rhs), scale + std::abs(rhs), tol);
  });
  return make_report(zeta.label().empty() ? "zeta d/dz" : zeta.label() + " d/dz", sys, sampler, tol, {&t});
}

SymmetryReport check_action_map(const ScalarField& phi_z, const LagrangianSystem& sys, const Sampler& sampler,
                                Tolerance tol) {
  const ChartSpec& c = sys.chart;
  require_lagrangian(c);
  Tally t("action_symmetry");
  const auto pts = sampler.draw();
  for_each_sample(pts, [&](std::size_t i, const PhasePoint& p) {
    const auto x = p.coords();
    const Fiber fd = fiber_data(sys, x);
    const Jet pj = phi_z.jet(x, 1);
    require_smooth(pj);
    if (std::abs(pj.grad(c.z_index())) < 1e-12)
      throw JacobianSingular("change of action has vanishing z-derivative at sample " + std::to_string(i));
    std::vector<double> image(x.begin(), x.end());
    image[c.z_index()] = pj.value();
    const double l_image = sys.L(image);
    double scale = 0.0;
    const double gp = dot_grad(gamma_from(c, x, fd), pj, &scale);
    t.add(std::abs(gp - l_image), scale + std::abs(l_image), tol);
  });
  return make_report(phi_z.label(), sys, sampler, tol, {&t});
}

HamiltonianSystem to_hamiltonian(const LagrangianSystem& sys) {
  require_lagrangian(sys.chart);
  const ChartSpec lc = sys.chart;
  const ChartSpec hc{lc.n, ChartKind::hamiltonian};
  auto solver = std::make_shared<WarmLegendre>(sys);
  ScalarField::Fn fn = [solver, lc](std::span<const double> h, int order) {
    const std::size_t d = lc.dim(), n = lc.n;
    const auto xl = solver->solve(h);
    const Fiber f = fiber_data(solver->sys(), xl);
    const Jet& L = f.L;
    double delta = 0.0;
    for (std::size_t i = 0; i < n; ++i) delta += xl[lc.fiber_index(i)] * h[lc.fiber_index(i)];
    const double value = delta - L.value();
    if (order == 0) return Jet::constant(value, d);
    std::vector<double> g(d);
    for (std::size_t k = 0; k < d; ++k) g[k] = is_fiber(lc, k) ? xl[k] : -L.grad(k);
    if (order == 1) return Jet::from_parts(value, d, std::move(g));
    // Columns W^-1 L_{v, k} for every coordinate k (fiber columns give I).
    Eigen::MatrixXd M(n, d);
    for (std::size_t k = 0; k < d; ++k) M.col(k) = solve_mixed(lc, f, k);
    const Eigen::MatrixXd winv = f.lu.inverse();
    std::vector<double> hs(d * d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) {
        const bool fa = is_fiber(lc, a), fb = is_fiber(lc, b);
        double v;
        if (fa && fb) {
          v = winv(a - lc.fiber_index(0), b - lc.fiber_index(0));
        } else if (fa) {
          v = -M(a - lc.fiber_index(0), b);
        } else if (fb) {
          v = -M(b - lc.fiber_index(0), a);
        } else {
          v = -L.hess(a, b);
          for (std::size_t i = 0; i < n; ++i) v += L.hess(a, lc.fiber_index(i)) * M(i, b);
        }
        hs[a * d + b] = hs[b * d + a] = v;
      }
    return Jet::from_parts(value, d, std::move(g), std::move(hs));
  };
  return {hc, ScalarField(std::move(fn), 2, "E_L o FL^-1"), sys.params, "Legendre transform of " + sys.label};
}

double pushforward_residual(const LagrangianSystem& sys, const HamiltonianSystem& ham, const PhasePoint& x) {
  const ChartSpec& c = sys.chart;
  require_lagrangian(c);
  const Fiber f = fiber_data(sys, x.coords());
  const TangentVector g = gamma_from(c, x.coords(), f);
  TangentVector push = g;
  for (std::size_t i = 0; i < c.n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.dim(); ++k) s += f.L.hess(c.fiber_index(i), k) * g[k];
    push[c.fiber_index(i)] = s;
  }
  const TangentVector xh = hamiltonian_vector_field(ham, legendre_map(sys, x));
  double r = 0.0;
  for (std::size_t k = 0; k < c.dim(); ++k) r = std::max(r, std::abs(push[k] - xh[k]));
  return r;
}

ScalarField pullback_to_hamiltonian(const LagrangianSystem& sys, const ScalarField& f) {
  require_lagrangian(sys.chart);
  const ChartSpec lc = sys.chart;
  auto solver = std::make_shared<WarmLegendre>(sys);
  ScalarField::Fn fn = [solver, lc, f](std::span<const double> h, int order) {
    const std::size_t d = lc.dim(), n = lc.n;
    const auto xl = solver->solve(h);
    const Jet fj = f.jet(xl, order);
    if (order == 0) return Jet::constant(fj.value(), d);
    const Fiber fd = fiber_data(solver->sys(), xl);
    Eigen::VectorXd fv(n);
    for (std::size_t i = 0; i < n; ++i) fv(i) = fj.grad(lc.fiber_index(i));
    // W is symmetric, so f_v W^-1 = (W^-1 f_v)^T.
    const Eigen::VectorXd a = fd.lu.solve(fv);
    std::vector<double> g(d);
    for (std::size_t k = 0; k < d; ++k) {
      if (is_fiber(lc, k)) {
        g[k] = a(k - lc.fiber_index(0));
      } else {
        double s = fj.grad(k);
        for (std::size_t j = 0; j < n; ++j) s -= a(j) * fd.L.hess(lc.fiber_index(j), k);
        g[k] = s;
      }
    }
    return Jet::from_parts(fj.value(), d, std::move(g), {}, fj.nonsmooth());
  };
  return ScalarField(std::move(fn), std::min(1, f.max_order()), f.label());
}

ScalarField pullback_to_lagrangian(const LagrangianSystem& sys, const ScalarField& g) {
  require_lagrangian(sys.chart);
  const ChartSpec lc = sys.chart;
  ScalarField::Fn fn = [sys, lc, g](std::span<const double> x, int order) {
    const std::size_t d = lc.dim(), n = lc.n;
    const Jet L = sys.L.jet(x, order + 1);
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < n; ++i) y[lc.fiber_index(i)] = L.grad(lc.fiber_index(i));
    const Jet gj = g.jet(y, order);
    if (order == 0) return Jet::constant(gj.value(), d);
    std::vector<double> grad(d);
    for (std::size_t k = 0; k < d; ++k) {
      double s = is_fiber(lc, k) ? 0.0 : gj.grad(k);
      for (std::size_t i = 0; i < n; ++i) s += gj.grad(lc.fiber_index(i)) * L.hess(lc.fiber_index(i), k);
      grad[k] = s;
    }
    return Jet::from_parts(gj.value(), d, std::move(grad), {}, gj.nonsmooth());
  };
  return ScalarField(std::move(fn), std::min({1, g.max_order(), sys.L.max_order() - 1}), g.label());
}

}  // namespace cocontact
