#include "cocontact/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "cocontact/errors.hpp"
#include "json.hpp"

namespace cocontact {

const char* to_string(Method m) { return m == Method::rk4 ? "rk4" : "adaptive45"; }

void IntegratorConfig::validate() const {
  if (method == Method::rk4 && !(dt > 0.0)) throw std::invalid_argument("rk4 step must be positive");
  if (method == Method::adaptive45 && !(rtol > 0.0 && atol > 0.0))
    throw std::invalid_argument("adaptive tolerances must be positive");
  if (max_step < 0.0) throw std::invalid_argument("max_step must be non-negative");
  if (stride == 0) throw std::invalid_argument("stride must be at least 1");
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

using Vec = std::vector<double>;

// y + h * sum_j a_j k_j
Vec combine(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec out = y;
  for (const auto& [a, k] : terms) {
    if (a == 0.0) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * a * (*k)[i];
  }
  return out;
}

class Integrator {
 public:
  Integrator(const ChartSpec& chart, const FlowField& field, const IntegratorConfig& cfg)
      : chart_(chart), field_(field), cfg_(cfg) {}

  Vec eval(const Vec& y) {
    TangentVector v = field_(PhasePoint(y));
    v[0] = 1.0;  // t is the curve parameter
    return std::move(v.c);
  }

  Trajectory run(const PhasePoint& initial, double t1, std::string label) {
    cfg_.validate();
    if (initial.dim() != chart_.dim()) throw std::invalid_argument("initial point has the wrong dimension");
    if (!(t1 > initial.t())) throw std::invalid_argument("integration interval must have t1 > t0");
    Trajectory tr;
    tr.chart = chart_;
    tr.system = std::move(label);
    tr.config = cfg_;
    tr.points.push_back(initial);
    Vec y(initial.coords().begin(), initial.coords().end());
    if (cfg_.method == Method::rk4) rk4(tr, y, t1);
    else dp45(tr, y, t1);
    return tr;
  }

 private:
  void record(Trajectory& tr, const Vec& y, bool last) {
    ++tr.steps;
    if (last || tr.steps % cfg_.stride == 0) tr.points.emplace_back(y);
  }

  void check_finite(const Vec& y, double t) {
    for (double v : y)
      if (!std::isfinite(v)) throw StepFailure("state became non-finite near t = " + fmt17(t));
  }

  void rk4(Trajectory& tr, Vec y, double t1) {
    const double t0 = y[0], span = t1 - t0;
    const auto steps = static_cast<std::size_t>(std::ceil(span / cfg_.dt - 1e-9));
    if (steps > cfg_.max_steps) throw StepFailure("rk4 would need more than max_steps steps");
    const double h = span / static_cast<double>(steps);
    for (std::size_t s = 1; s <= steps; ++s) {
      const Vec k1 = eval(y);
      const Vec k2 = eval(combine(y, h, {{0.5, &k1}}));
      const Vec k3 = eval(combine(y, h, {{0.5, &k2}}));
      const Vec k4 = eval(combine(y, h, {{1.0, &k3}}));
      y = combine(y, h, {{1.0 / 6, &k1}, {1.0 / 3, &k2}, {1.0 / 3, &k3}, {1.0 / 6, &k4}});
      // Pin t to the grid to avoid drift.
      y[0] = s == steps ? t1 : t0 + static_cast<double>(s) * h;
      check_finite(y, y[0]);
      record(tr, y, s == steps);
    }
  }

  // Mixed rtol/atol RMS norm of e relative to states a and b, skipping t.
  double norm(const Vec& e, const Vec& a, const Vec& b) const {
    double s = 0.0;
    for (std::size_t i = 1; i < e.size(); ++i) {
      const double sc = cfg_.atol + cfg_.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
      s += (e[i] / sc) * (e[i] / sc);
    }
    return std::sqrt(s / static_cast<double>(e.size() - 1));
  }

  double initial_step(const Vec& y, const Vec& f0, double span) {
    const Vec zero(y.size(), 0.0);
    const double d0 = norm(y, y, zero), d1 = norm(f0, y, zero);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const Vec f1 = eval(combine(y, h0, {{1.0, &f0}}));
    Vec df(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) df[i] = f1[i] - f0[i];
    const double d2 = norm(df, y, zero) / h0;
    const double m = std::max(d1, d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
    return std::min({100 * h0, h1, span});
  }

  void dp45(Trajectory& tr, Vec y, double t1) {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    Vec k1 = eval(y);
    double h = initial_step(y, k1, t1 - y[0]);
    if (cfg_.max_step > 0.0) h = std::min(h, cfg_.max_step);
    double err_old = 1e-4;
    bool rejected_last = false;
    std::size_t attempts = 0;
    while (true) {
      const double t = y[0];
      const bool last = t + h >= t1 - 1e-12 * std::max(1.0, std::abs(t1));
      if (last) h = t1 - t;
      if (h <= 16 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t)))
        throw StepFailure("adaptive step underflow at t = " + fmt17(t));
      if (++attempts > cfg_.max_steps) throw StepFailure("adaptive integrator exceeded max_steps");

      const Vec k2 = eval(combine(y, h, {{a21, &k1}}));
      const Vec k3 = eval(combine(y, h, {{a31, &k1}, {a32, &k2}}));
      const Vec k4 = eval(combine(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
      const Vec k5 = eval(combine(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
      const Vec k6 = eval(combine(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
      Vec ynew = combine(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
      ynew[0] = last ? t1 : t + h;
      bool finite = true;
      for (double v : ynew) finite = finite && std::isfinite(v);
      Vec k7;
      double err = std::numeric_limits<double>::infinity();
      if (finite) {
        k7 = eval(ynew);
        Vec e(y.size());
        for (std::size_t i = 0; i < y.size(); ++i)
          e[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        err = norm(e, y, ynew);
      }
      if (err <= 1.0) {
        err = std::max(err, 1e-10);
        double fac = 0.9 * std::pow(err, -0.17) * std::pow(err_old, 0.04);
        fac = std::clamp(fac, 0.2, rejected_last ? 1.0 : 5.0);
        err_old = err;
        rejected_last = false;
        y = std::move(ynew);
        k1 = std::move(k7);  // first-same-as-last
        record(tr, y, last);
        if (last) return;
        h *= fac;
        if (cfg_.max_step > 0.0) h = std::min(h, cfg_.max_step);
      } else {
        ++tr.rejected;
        rejected_last = true;
        h *= std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      }
    }
  }

  ChartSpec chart_;
  const FlowField& field_;
  IntegratorConfig cfg_;
};

std::vector<std::string> header(const ChartSpec& chart, const std::vector<Series>& extra) {
  auto names = chart.coordinate_names();
  for (const auto& [n, v] : extra) names.push_back(n);
  return names;
}

// Rate of decay and its derivative along the flow at one point.
struct Rate {
  double r = 0.0;
  double dr = 0.0;
};

AlongReport check_along(const Trajectory& traj, const ScalarField& f, QuantityKind kind, double tol,
                        const std::function<TangentVector(const PhasePoint&)>& field,
                        const std::function<Rate(const PhasePoint&, const TangentVector&)>& rate) {
  AlongReport rep;
  rep.quantity = f.label();
  rep.kind = kind;
  rep.tol = tol;
  rep.samples = traj.size();
  const std::size_t n = traj.size();
  std::vector<double> fv(n), r(n, 0.0), dr(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const PhasePoint& x = traj.points[k];
    const TangentVector X = field(x);
    const Jet fj = f.max_order() >= 1 ? f.jet(x.coords(), 1) : f.jet(x.coords(), 0);
    fv[k] = fj.value();
    if (kind == QuantityKind::dissipated) {
      const Rate rt = rate(x, X);
      r[k] = rt.r;
      dr[k] = rt.dr;
    }
    double xf = 0.0, scale = std::abs(r[k] * fv[k]);
    for (std::size_t i = 0; i < X.dim(); ++i) {
      xf += X[i] * fj.grad(i);
      scale += std::abs(X[i] * fj.grad(i));
    }
    if (f.max_order() >= 1)
      rep.max_differential = std::max(rep.max_differential, std::abs(xf + r[k] * fv[k]) / std::max(1.0, scale));
  }
  double fmax = 0.0;
  for (double v : fv) fmax = std::max(fmax, std::abs(v));
  // Trapezoid with the endpoint derivative correction, which is exact for cubics.
  double integral = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      const double h = traj.points[k].t() - traj.points[k - 1].t();
      integral += 0.5 * h * (r[k - 1] + r[k]) + h * h / 12.0 * (dr[k - 1] - dr[k]);
    }
    const double pred = fv[0] * std::exp(-integral);
    const double denom = std::max(std::abs(pred), 1e-9 * fmax);
    const double dev = denom > 0.0 ? std::abs(fv[k] - pred) / denom : 0.0;
    rep.max_integral = std::max(rep.max_integral, dev);
  }
  rep.pass = rep.max_differential <= tol && rep.max_integral <= tol;
  return rep;
}

}  // namespace

std::string Trajectory::to_csv(const std::vector<Series>& extra) const {
  for (const auto& [n, v] : extra)
    if (v.size() != points.size()) throw std::invalid_argument("series '" + n + "' has the wrong length");
  std::string out;
  const auto names = header(chart, extra);
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  out += '\n';
  for (std::size_t k = 0; k < points.size(); ++k) {
    bool first = true;
    for (double v : points[k].coords()) {
      out += (first ? "" : ",") + fmt17(v);
      first = false;
    }
    for (const auto& [n, v] : extra) out += "," + fmt17(v[k]);
    out += '\n';
  }
  return out;
}

std::string Trajectory::to_json(const std::vector<Series>& extra) const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["system"] = system;
  j["chart"] = {{"kind", chart.kind == ChartKind::hamiltonian ? "hamiltonian" : "lagrangian"}, {"n", chart.n}};
  nlohmann::ordered_json m;
  m["method"] = to_string(config.method);
  if (config.method == Method::rk4) {
    m["dt"] = config.dt;
  } else {
    m["rtol"] = config.rtol;
    m["atol"] = config.atol;
  }
  m["stride"] = config.stride;
  m["accepted_steps"] = steps;
  m["rejected_steps"] = rejected;
  j["integrator"] = std::move(m);
  j["columns"] = header(chart, extra);
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < points.size(); ++k) {
    std::vector<double> row(points[k].coords().begin(), points[k].coords().end());
    for (const auto& [n, v] : extra) row.push_back(v.at(k));
    rows.push_back(row);
  }
  j["rows"] = std::move(rows);
  return j.dump(2);
}

Trajectory integrate_flow(const ChartSpec& chart, const FlowField& field, const PhasePoint& initial, double t1,
                          const IntegratorConfig& cfg, std::string label) {
  return Integrator(chart, field, cfg).run(initial, t1, std::move(label));
}

Trajectory integrate(const HamiltonianSystem& sys, const PhasePoint& initial, double t1, const IntegratorConfig& cfg) {
  const FlowField f = [&sys](const PhasePoint& x) { return hamiltonian_vector_field(sys, x); };
  return integrate_flow(sys.chart, f, initial, t1, cfg, sys.label);
}

Trajectory integrate(const LagrangianSystem& sys, const PhasePoint& initial, double t1, const IntegratorConfig& cfg) {
  const FlowField f = [&sys](const PhasePoint& x) { return herglotz_field(sys, x); };
  return integrate_flow(sys.chart, f, initial, t1, cfg, sys.label);
}

std::vector<Series> monitor(const Trajectory& traj, const std::vector<Observable>& observables) {
  std::vector<Series> out;
  for (const auto& [name, f] : observables) {
    std::vector<double> v;
    v.reserve(traj.size());
    for (const auto& p : traj.points) v.push_back(f(p.coords()));
    out.emplace_back(name, std::move(v));
  }
  return out;
}

std::string AlongReport::to_json() const {
  nlohmann::ordered_json j;
  j["schema_version"] = 1;
  j["quantity"] = quantity;
  j["kind"] = to_string(kind);
  j["verdict"] = pass ? "pass" : "fail";
  j["tol"] = tol;
  j["max_differential"] = max_differential;
  j["max_integral"] = max_integral;
  j["samples"] = samples;
  return j.dump(2);
}

AlongReport verify_dissipation_along(const Trajectory& traj, const ScalarField& f, const HamiltonianSystem& sys,
                                     QuantityKind kind, double tol) {
  const std::size_t z = sys.chart.z_index();
  return check_along(
      traj, f, kind, tol, [&](const PhasePoint& x) { return hamiltonian_vector_field(sys, x); },
      [&](const PhasePoint& x, const TangentVector& X) {
        if (sys.H.max_order() < 2) return Rate{sys.H.jet(x.coords(), 1).grad(z), 0.0};
        const Jet hz = sys.H.jet(x.coords(), 2).partial(z);
        double dr = 0.0;
        for (std::size_t i = 0; i < X.dim(); ++i) dr += X[i] * hz.grad(i);
        return Rate{hz.value(), dr};
      });
}

AlongReport verify_dissipation_along(const Trajectory& traj, const ScalarField& f, const LagrangianSystem& sys,
                                     QuantityKind kind, double tol) {
  const std::size_t z = sys.chart.z_index();
  return check_along(
      traj, f, kind, tol, [&](const PhasePoint& x) { return herglotz_field(sys, x); },
      [&](const PhasePoint& x, const TangentVector& X) {
        const Jet lz = sys.L.jet(x.coords(), 2).partial(z);
        double dr = 0.0;
        for (std::size_t i = 0; i < X.dim(); ++i) dr -= X[i] * lz.grad(i);
        return Rate{-lz.value(), dr};
      });
}

std::vector<double> derivative_weights(double x0, std::span<const double> x) {
  // Fornberg's recursion, first derivative only.
  const std::size_t n = x.size();
  std::vector<std::vector<double>> c(n, std::vector<double>(2, 0.0));
  c[0][0] = 1.0;
  double c1 = 1.0, c4 = x[0] - x0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

HerglotzResiduals herglotz_residuals(const Trajectory& traj, const LagrangianSystem& sys) {
  // Eighth-order stencils: close Kepler passes at rtol 1e-10 leave seventh
  // order differencing errors around 1e-6.
  constexpr std::size_t kStencil = 9;
  const ChartSpec& c = sys.chart;
  const std::size_t m = traj.size();
  if (m < kStencil) throw std::invalid_argument("herglotz_residuals needs at least 9 samples");
  std::vector<std::vector<double>> P(m, std::vector<double>(c.n)), Q = P;
  std::vector<double> z(m), L(m), t(m);
  for (std::size_t k = 0; k < m; ++k) {
    const auto x = traj.points[k].coords();
    const Jet j = sys.L.jet(x, 1);
    t[k] = x[0];
    z[k] = x[c.z_index()];
    L[k] = j.value();
    for (std::size_t i = 0; i < c.n; ++i) {
      P[k][i] = j.grad(c.fiber_index(i));
      Q[k][i] = j.grad(c.q_index(i)) + j.grad(c.z_index()) * P[k][i];
    }
  }
  HerglotzResiduals r;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t lo = std::min(k >= kStencil / 2 ? k - kStencil / 2 : 0, m - kStencil);
    const auto w = derivative_weights(t[k], std::span<const double>(t).subspan(lo, kStencil));
    double dz = 0.0;
    for (std::size_t a = 0; a < kStencil; ++a) dz += w[a] * z[lo + a];
    r.action = std::max(r.action, std::abs(dz - L[k]));
    for (std::size_t i = 0; i < c.n; ++i) {
      double dp = 0.0;
      for (std::size_t a = 0; a < kStencil; ++a) dp += w[a] * P[lo + a][i];
      r.momentum = std::max(r.momentum, std::abs(dp - Q[k][i]));
    }
  }
  return r;
}

}  // namespace cocontact
