#include "cocontact/symmetry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "cocontact/errors.hpp"
#include "json.hpp"
#include "tally.hpp"

namespace cocontact {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_applicable: return "not-applicable";
  }
  return "?";
}

Sampler Sampler::box(const ChartSpec& chart, double lo, double hi, std::size_t count, std::uint64_t seed) {
  Sampler s;
  s.lo.assign(chart.dim(), lo);
  s.hi.assign(chart.dim(), hi);
  s.count = count;
  s.seed = seed;
  return s;
}

std::vector<PhasePoint> Sampler::draw() const {
  if (lo.size() != hi.size()) throw std::invalid_argument("sampler bounds differ in size");
  std::mt19937_64 rng(seed);
  // Fixed mapping from 64-bit words to [0,1) so results do not depend on the
  // standard library's distribution implementation.
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<PhasePoint> pts;
  pts.reserve(count);
  const std::size_t max_attempts = 1000 * std::max<std::size_t>(count, 1);
  std::size_t attempts = 0;
  while (pts.size() < count) {
    if (++attempts > max_attempts)
      throw SampleDomainError("exclusion predicate rejected almost every sample");
    std::vector<double> x(lo.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = lo[k] + (hi[k] - lo[k]) * unit();
    if (exclude && exclude(x)) continue;
    pts.emplace_back(std::move(x));
  }
  return pts;
}

const ClassResult& SymmetryReport::at(std::string_view name) const {
  for (const auto& c : classes)
    if (c.name == name) return c;
  throw std::out_of_range("report has no class '" + std::string(name) + "'");
}

std::string SymmetryReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["subject"] = subject;
  j["system"] = system;
  j["seed"] = seed;
  j["samples"] = samples;
  j["tolerance"] = {{"abs", tol.abs}, {"rel", tol.rel}};
  j["assumptions"] = assumptions;
  j["lattice_consistent"] = lattice_consistent;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : classes) {
    nlohmann::ordered_json e;
    e["class"] = c.name;
    e["verdict"] = to_string(c.verdict);
    e["max_residual"] = c.max_residual;
    e["samples"] = c.samples;
    e["seed"] = c.seed;
    if (c.rho_estimate) e["rho_estimate"] = {{"min", c.rho_estimate->min}, {"max", c.rho_estimate->max}};
    arr.push_back(std::move(e));
  }
  j["classes"] = std::move(arr);
  return j.dump(2);
}

void for_each_sample(const std::vector<PhasePoint>& pts,
                     const std::function<void(std::size_t, const PhasePoint&)>& fn) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    try {
      fn(i, pts[i]);
    } catch (const DomainError& e) {
      throw SampleDomainError("sample " + std::to_string(i) + ": " + e.what());
    } catch (const DenominatorVanishes& e) {
      throw SampleDomainError("sample " + std::to_string(i) + ": " + e.what());
    }
  }
}

namespace {

using detail::require_smooth;
using detail::Tally;

const char* kAssumption =
    "M = R x N with t the canonical coordinate of R (Darboux chart); verdicts are sampled "
    "certificates on the sampler box, not proofs";

double eta_of(const ChartSpec& chart, std::span<const double> x, std::span<const double> v) {
  double r = v[chart.z_index()];
  for (std::size_t i = 0; i < chart.n; ++i) r -= x[chart.fiber_index(i)] * v[chart.q_index(i)];
  return r;
}

// L_Y eta from Y's value and Jacobian (row-major, rows = components).
CoVector lie_eta(const ChartSpec& chart, std::span<const double> x, const TangentVector& y,
                 const std::vector<double>& J) {
  const std::size_t d = chart.dim(), z = chart.z_index();
  CoVector l = contract_deta(chart, y);
  for (std::size_t k = 0; k < d; ++k) {
    double g = J[z * d + k];
    for (std::size_t i = 0; i < chart.n; ++i) g -= x[chart.fiber_index(i)] * J[chart.q_index(i) * d + k];
    l[k] += g;
  }
  for (std::size_t i = 0; i < chart.n; ++i) l[chart.fiber_index(i)] -= y[chart.q_index(i)];
  return l;
}

void check_jets_smooth(const VectorField& y, std::span<const double> x) {
  if (!y.uses_ad()) return;
  for (const auto& j : y.jets(x, 1)) require_smooth(j);
}

}  // namespace

CoVector lie_derivative_eta(const ChartSpec& chart, const VectorField& y, const PhasePoint& x) {
  if (chart.kind != ChartKind::hamiltonian) throw ChartMismatch("lie_derivative_eta needs a hamiltonian chart");
  return lie_eta(chart, x.coords(), y(x.coords()), y.jacobian(x.coords()));
}

SymmetryReport classify_infinitesimal(const VectorField& y, const HamiltonianSystem& sys,
                                      const Sampler& sampler, Tolerance tol) {
  const ChartSpec& chart = sys.chart;
  if (y.dim() != chart.dim()) throw std::invalid_argument("field dimension does not match chart");
  const std::size_t d = chart.dim(), z = chart.z_index();
  const VectorField xh = hamiltonian_field(sys);
  Tally gen(std::string{kGeneralized}), dyn(std::string{kDynamical}),
      coco(std::string{kConformalCocontact}), conham(std::string{kConformalHamiltonian}),
      strict(std::string{kStrictHamiltonian});

  const auto pts = sampler.draw();
  for_each_sample(pts, [&](std::size_t, const PhasePoint& p) {
    const auto x = p.coords();
    const Jet h = sys.H.jet(x, 1);
    require_smooth(h);
    check_jets_smooth(y, x);
    const TangentVector yv = y(x);
    const std::vector<double> J = y.jacobian(x);
    const TangentVector br = lie_bracket(y, xh, x);

    const double yt = std::abs(yv[0]);
    double dyt = 0.0;
    for (std::size_t k = 0; k < d; ++k) dyt = std::max(dyt, std::abs(J[k]));

    double eta_scale = std::abs(br[z]);
    for (std::size_t i = 0; i < chart.n; ++i)
      eta_scale += std::abs(x[chart.fiber_index(i)] * br[chart.q_index(i)]);
    const TangentVector xv = xh(x);
    double br_scale = 0.0;
    for (std::size_t k = 0; k < d; ++k) br_scale = std::max({br_scale, std::abs(xv[k]), std::abs(yv[k])});
    gen.add(std::max(yt, std::abs(eta_of(chart, x, br.c))), eta_scale + br_scale, tol);
    dyn.add(std::max(yt, max_abs(br.c)), br_scale, tol);

    const CoVector l = lie_eta(chart, x, yv, J);
    const double rho = l[z];
    const CoVector eta = eta_form(chart, p);
    double conf = 0.0;
    for (std::size_t k = 0; k < d; ++k) conf = std::max(conf, std::abs(l[k] - rho * eta[k]));
    const double lscale = max_abs(l.c) + std::abs(rho) * max_abs(eta.c);
    coco.add(std::max({yt, dyt, conf}), lscale, tol);
    coco.add_rho(rho);

    double yh = 0.0, yh_scale = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      yh += yv[k] * h.grad(k);
      yh_scale += std::abs(yv[k] * h.grad(k));
    }
    conham.add(std::max({yt, dyt, conf, std::abs(yh - rho * h.value())}),
               lscale + yh_scale + std::abs(rho * h.value()), tol);
    conham.add_rho(rho);
    strict.add(std::max({yt, dyt, max_abs(l.c), std::abs(yh)}), max_abs(l.c) + yh_scale, tol);
  });

  SymmetryReport r;
  r.subject = y.label();
  r.system = sys.label;
  r.seed = sampler.seed;
  r.samples = sampler.count;
  r.tol = tol;
  r.assumptions = {kAssumption};
  for (const Tally* t : {&gen, &dyn, &coco, &conham, &strict}) r.classes.push_back(t->result(sampler));
  auto passes = [&](std::string_view n) { return r.verdict(n) == Verdict::pass; };
  auto implies = [&](std::string_view a, std::string_view b) { return !passes(a) || passes(b); };
  r.lattice_consistent = implies(kStrictHamiltonian, kConformalHamiltonian) &&
                         implies(kConformalHamiltonian, kConformalCocontact) &&
                         implies(kConformalHamiltonian, kGeneralized) &&
                         implies(kDynamical, kGeneralized);
  return r;
}

CartanResult check_cartan(const VectorField& y, const CartanWitness& w, const HamiltonianSystem& sys,
                          const Sampler& sampler, Tolerance tol) {
  const ChartSpec& chart = sys.chart;
  const std::size_t d = chart.dim(), z = chart.z_index();
  const VectorField xh = hamiltonian_field(sys);
  ScalarField f = w.g + quantity_from_symmetry(chart, y);
  VectorField Z = (y - w.g * VectorField::constant(reeb_z(chart), "R_z")).relabeled(y.label() + " - g R_z");
  const bool f_differentiable = f.max_order() >= 1;

  Tally cartan(std::string{kCartan}), diss("cartan_quantity_dissipated"),
      reduced("cartan_reduced_generalized");
  const auto pts = sampler.draw();
  for_each_sample(pts, [&](std::size_t, const PhasePoint& p) {
    const auto x = p.coords();
    const Jet h = sys.H.jet(x, 1);
    require_smooth(h);
    check_jets_smooth(y, x);
    const TangentVector yv = y(x);
    const std::vector<double> J = y.jacobian(x);
    const CoVector l = lie_eta(chart, x, yv, J);
    const double rho = w.rho(x);
    const Jet g = w.g.jet(x, 1);
    const CoVector eta = eta_form(chart, p);

    double r_eta = 0.0;
    for (std::size_t k = 0; k < d; ++k) r_eta = std::max(r_eta, std::abs(l[k] - rho * eta[k] - g.grad(k)));
    double yh = 0.0, yh_scale = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      yh += yv[k] * h.grad(k);
      yh_scale += std::abs(yv[k] * h.grad(k));
    }
    const double r_h = std::abs(yh - rho * h.value() - g.value() * h.grad(z));
    cartan.add(std::max({std::abs(yv[0]), r_eta, r_h}),
               max_abs(l.c) + std::abs(rho) * max_abs(eta.c) + max_abs(g.gradient()) + yh_scale +
                   std::abs(rho * h.value()) + std::abs(g.value() * h.grad(z)),
               tol);

    if (f_differentiable) {
      diss.add(std::abs(quantity_residual(f, sys, QuantityKind::dissipated, p)),
               quantity_residual_scale(f, sys, p), tol);
    }
    const TangentVector br = lie_bracket(Z, xh, x);
    double scale = std::abs(br[z]);
    for (std::size_t i = 0; i < chart.n; ++i) scale += std::abs(x[chart.fiber_index(i)] * br[chart.q_index(i)]);
    reduced.add(std::max(std::abs(Z(x)[0]), std::abs(eta_of(chart, x, br.c))), scale + max_abs(xh(x).c), tol);
  });

  CartanResult out{{}, std::move(f), std::move(Z)};
  SymmetryReport& r = out.report;
  r.subject = y.label();
  r.system = sys.label;
  r.seed = sampler.seed;
  r.samples = sampler.count;
  r.tol = tol;
  r.assumptions = {kAssumption};
  r.classes.push_back(cartan.result(sampler));
  ClassResult dr = diss.result(sampler);
  if (!f_differentiable) dr.verdict = Verdict::not_applicable;
  r.classes.push_back(dr);
  r.classes.push_back(reduced.result(sampler));
  // A Cartan symmetry always yields a dissipated f and a generalized Z.
  r.lattice_consistent = cartan.ok ? (dr.verdict != Verdict::fail && reduced.ok) : true;
  return out;
}

DiffeoKind diffeo_kind_from_string(std::string_view s) {
  if (s == "dynamical") return DiffeoKind::dynamical;
  if (s == "generalized" || s == kGeneralized) return DiffeoKind::generalized;
  if (s == "conformal-hamiltonian" || s == kConformalHamiltonian) return DiffeoKind::conformal_hamiltonian;
  if (s == "strict-hamiltonian" || s == kStrictHamiltonian) return DiffeoKind::strict_hamiltonian;
  throw std::invalid_argument("unknown map kind '" + std::string(s) + "'");
}

DiffeoSpec DiffeoSpec::from_exprs(const std::vector<Expr>& comps, const ParamMap& params, std::string label) {
  const VectorField f = VectorField::from_exprs(comps, params, label);
  DiffeoSpec s;
  s.label = f.label();
  s.forward = [f](std::span<const double> x) { return f(x).c; };
  s.jacobian = [f](std::span<const double> x) { return f.jacobian(x); };
  return s;
}

std::vector<double> DiffeoSpec::jacobian_at(std::span<const double> x) const {
  if (jacobian) return jacobian(x);
  const std::size_t d = x.size();
  std::vector<double> J(d * d), e(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    e[i] = 1.0;
    const auto col = directional_derivative_fd(forward, x, e, fd_step);
    e[i] = 0.0;
    if (col.size() != d) throw std::invalid_argument("map must return a point of the same dimension");
    for (std::size_t k = 0; k < d; ++k) J[k * d + i] = col[k];
  }
  return J;
}

SymmetryReport check_diffeomorphism(const DiffeoSpec& phi, const HamiltonianSystem& sys,
                                    const Sampler& sampler, DiffeoKind kind, Tolerance tol) {
  const ChartSpec& chart = sys.chart;
  const std::size_t d = chart.dim(), z = chart.z_index();
  std::string name;
  switch (kind) {
    case DiffeoKind::dynamical: name = kDynamical; break;
    case DiffeoKind::generalized: name = kGeneralized; break;
    case DiffeoKind::conformal_hamiltonian: name = kConformalHamiltonian; break;
    case DiffeoKind::strict_hamiltonian: name = kStrictHamiltonian; break;
  }
  Tally t(name);
  const auto pts = sampler.draw();
  for_each_sample(pts, [&](std::size_t, const PhasePoint& p) {
    const auto x = p.coords();
    const std::vector<double> yv = phi.forward(x);
    if (yv.size() != d) throw std::invalid_argument("map must return a point of the same dimension");
    const PhasePoint y(yv);
    const std::vector<double> J = phi.jacobian_at(x);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(J.data(), d, d);
    const double big = M.cwiseAbs().maxCoeff();
    if (!(std::abs(M.determinant()) > 1e-12 * std::pow(std::max(big, 1e-300), static_cast<double>(d))))
      throw JacobianSingular("map Jacobian is singular at a sample");

    // Phi^* t = t: the t-row of the Jacobian is dt and t is unchanged.
    double tau_res = std::abs(yv[0] - x[0]);
    for (std::size_t k = 0; k < d; ++k) tau_res = std::max(tau_res, std::abs(J[k] - (k == 0 ? 1.0 : 0.0)));

    const Jet hx = sys.H.jet(x, 1), hy = sys.H.jet(yv, 1);
    require_smooth(hx);
    require_smooth(hy);
    if (kind == DiffeoKind::dynamical || kind == DiffeoKind::generalized) {
      const TangentVector xh_x = hamiltonian_vector_field(sys, p);
      const TangentVector xh_y = hamiltonian_vector_field(sys, y);
      TangentVector push{std::vector<double>(d, 0.0)};
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t j = 0; j < d; ++j) push[k] += J[k * d + j] * xh_x[j];
      const double scale = max_abs(push.c) + max_abs(xh_y.c);
      if (kind == DiffeoKind::dynamical) {
        double r = 0.0;
        for (std::size_t k = 0; k < d; ++k) r = std::max(r, std::abs(push[k] - xh_y[k]));
        t.add(std::max(tau_res, r), scale, tol);
      } else {
        const double r = std::abs(eta_of(chart, yv, push.c) - eta_of(chart, yv, xh_y.c));
        t.add(std::max(tau_res, r), scale * (1.0 + max_abs(yv)), tol);
      }
      return;
    }
    // (Phi^* eta)_k = sum_j eta_j(Phi(x)) J[j][k]; conformal factor from dz.
    const CoVector eta_y = eta_form(chart, y), eta_x = eta_form(chart, p);
    std::vector<double> pull(d, 0.0);
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t j = 0; j < d; ++j) pull[k] += eta_y[j] * J[j * d + k];
    const double fhat = pull[z];
    double r = tau_res;
    for (std::size_t k = 0; k < d; ++k) r = std::max(r, std::abs(pull[k] - fhat * eta_x[k]));
    r = std::max(r, std::abs(hy.value() - fhat * hx.value()));
    if (std::abs(fhat) < 1e-12) r = std::max(r, 1.0);
    if (kind == DiffeoKind::strict_hamiltonian) r = std::max(r, std::abs(fhat - 1.0));
    t.add(r, max_abs(pull) + std::abs(fhat) * max_abs(eta_x.c) + std::abs(hy.value()) + std::abs(fhat * hx.value()), tol);
    t.add_rho(fhat);
  });

  SymmetryReport r;
  r.subject = phi.label;
  r.system = sys.label;
  r.seed = sampler.seed;
  r.samples = sampler.count;
  r.tol = tol;
  r.assumptions = {kAssumption};
  r.classes.push_back(t.result(sampler));
  return r;
}

}  // namespace cocontact
