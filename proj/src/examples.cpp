#include "cocontact/examples.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "cocontact/errors.hpp"

namespace cocontact {

namespace {

using Type = ParamSpec::Type;

std::string join(const NameSet& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

ParamText resolve(std::string_view example, const std::vector<ParamSpec>& schema, const ParamText& given) {
  ParamText out;
  for (const auto& s : schema) out[s.name] = s.default_value;
  for (const auto& [k, v] : given) {
    auto it = out.find(k);
    if (it == out.end()) {
      NameSet known;
      for (const auto& s : schema) known.insert(s.name);
      throw ParamSchemaError("example '" + std::string(example) + "' has no parameter '" + k + "'" +
                             (known.empty() ? std::string(" (it takes none)") : "; known: " + join(known)));
    }
    it->second = v;
  }
  return out;
}

double number(const ParamText& p, const std::string& name) {
  const std::string& s = p.at(name);
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw ParamSchemaError("parameter '" + name + "' must be a number, got '" + s + "'");
  return v;
}

double positive(const ParamText& p, const std::string& name) {
  const double v = number(p, name);
  if (!(v > 0)) throw ParamSchemaError("parameter '" + name + "' must be positive");
  return v;
}

/// User expression for parameter `name`. It may read the chart variables in
/// `vars` and the placeholders in `names`.
Expr user_expr(const ParamText& p, const std::string& name, const ChartSpec& chart, const NameSet& vars,
               const NameSet& names = {}) {
  const std::string& text = p.at(name);
  const Expr e = [&] {
    try {
      return parse(text, chart, names);
    } catch (const Error& err) {
      throw ParamSchemaError("parameter '" + name + "': " + err.what());
    }
  }();
  for (const auto& v : free_variables(e))
    if (!vars.contains(v))
      throw ParamSchemaError("parameter '" + name + "' may only depend on " +
                             (vars.empty() ? std::string("its placeholders") : join(vars)) + ", not " + v);
  return e;
}

/// m(t) has to stay positive over the times the examples are run on.
void check_positive_in_t(const Expr& e, const ChartSpec& chart, const std::string& name) {
  std::vector<double> x(chart.dim(), 0.0);
  for (int k = 0; k <= 100; ++k) {
    x[0] = 0.1 * k;
    const double v = evaluate(e, x);
    if (!(v > 0) || !std::isfinite(v))
      throw ParamSchemaError("parameter '" + name + "' must be positive for t in [0, 10]");
  }
}

/// Parses internal templates whose placeholders are numeric parameters
/// (bound by ScalarField) or expression parameters (substituted).
struct Scope {
  ChartSpec chart;
  ParamMap nums;
  std::map<std::string, Expr, std::less<>> subs;

  Expr expr(std::string_view src) const {
    NameSet names;
    for (const auto& [k, v] : nums) names.insert(k);
    for (const auto& [k, v] : subs) names.insert(k);
    Expr e = parse(src, chart, names);
    for (const auto& [k, v] : subs) e = substitute(e, k, v);
    return e;
  }
  ScalarField scalar(std::string_view src, std::string label = {}) const {
    return ScalarField::from_expr(expr(src), nums, label.empty() ? std::string(src) : std::move(label));
  }
  VectorField field(const std::vector<std::string>& comps, std::string label) const {
    std::vector<Expr> es;
    for (const auto& c : comps) es.push_back(expr(c));
    return VectorField::from_exprs(es, nums, std::move(label));
  }
  HamiltonianSystem hamiltonian(std::string_view src) const {
    const Expr e = expr(src);
    return {chart, ScalarField::from_expr(e, nums), nums, to_string(e)};
  }
  LagrangianSystem lagrangian(std::string_view src) const {
    const Expr e = expr(src);
    return {chart, ScalarField::from_expr(e, nums), nums, to_string(e)};
  }
};

std::map<std::string, Verdict, std::less<>> verdicts(
    std::initializer_list<std::pair<std::string_view, Verdict>> list) {
  std::map<std::string, Verdict, std::less<>> out;
  for (const auto& [k, v] : list) out.emplace(std::string(k), v);
  return out;
}

constexpr Verdict kPass = Verdict::pass;
constexpr Verdict kFail = Verdict::fail;

void default_box(ExampleEntry& e, std::size_t dim) {
  e.lo.assign(dim, -2.0);
  e.hi.assign(dim, 2.0);
  e.lo[0] = 0.0;
}

IntegratorConfig rk4(double dt) {
  IntegratorConfig c;
  c.method = Method::rk4;
  c.dt = dt;
  return c;
}

IntegratorConfig adaptive(double tol) {
  IntegratorConfig c;
  c.method = Method::adaptive45;
  c.rtol = c.atol = tol;
  return c;
}

/// exp(-int_0^t kappa/m(s) ds) by Gauss-Kronrod quadrature. Reads only t,
/// so it works on either chart.
ScalarField decay_by_quadrature(const Expr& m, std::size_t dim, double kappa) {
  auto rate = [m, dim, kappa](double t) {
    std::vector<double> x(dim, 0.0);
    x[0] = t;
    return kappa / evaluate(m, x);
  };
  auto fn = [m, rate, kappa](std::span<const double> x, int order) {
    const double t = x[0];
    const double integral =
        t == 0.0 ? 0.0 : boost::math::quadrature::gauss_kronrod<double, 21>::integrate(rate, 0.0, t, 15, 1e-13);
    const double val = std::exp(-integral);
    if (order == 0) return Jet::from_parts(val, x.size());
    std::vector<double> g(x.size(), 0.0);
    const double r = rate(t);
    g[0] = -r * val;
    if (order == 1) return Jet::from_parts(val, x.size(), std::move(g));
    // d/dt (-r f) = (r^2 - r') f with r' = -kappa m' / m^2.
    const Jet mj = eval_jet(m, PhasePoint(std::vector<double>(x.begin(), x.end())), {}, 1);
    const double dr = -kappa * mj.grad(0) / (mj.value() * mj.value());
    std::vector<double> h(x.size() * x.size(), 0.0);
    h[0] = (r * r - dr) * val;
    return Jet::from_parts(val, x.size(), std::move(g), std::move(h));
  };
  return ScalarField(fn, 2, "exp(-int kappa/m)");
}

// ---------------------------------------------------------------------------

ExampleEntry free_particle_tdm(const ParamText& given) {
  ExampleEntry e;
  e.name = "free_particle_tdm";
  e.description = "free particle with time-dependent mass and linear friction in z";
  e.schema = {
      {"m", Type::expression, "1", "t", "mass m(t) > 0"},
      {"kappa", Type::number, "1", "", "friction coefficient >= 0"},
      {"int_kappa_over_m", Type::expression, "", "t", "closed form of int_0^t kappa/m(s) ds (optional)"},
  };
  e.params = resolve(e.name, e.schema, given);
  const double kappa = number(e.params, "kappa");
  if (kappa < 0) throw ParamSchemaError("parameter 'kappa' must be >= 0");

  const ChartSpec hc{1, ChartKind::hamiltonian}, lc{1, ChartKind::lagrangian};
  Scope h{hc, {{"kappa", kappa}}, {}}, l{lc, {{"kappa", kappa}}, {}};
  h.subs.emplace("M", user_expr(e.params, "m", hc, {"t"}));
  l.subs.emplace("M", user_expr(e.params, "m", lc, {"t"}));
  check_positive_in_t(h.subs.at("M"), hc, "m");

  e.hamiltonian = h.hamiltonian("p1^2/(2*M) + kappa*z/M");
  e.lagrangian = l.lagrangian("M*v1^2/2 - kappa*z/M");

  // exp(-int kappa/m): closed form when m is constant or the integral is
  // supplied, quadrature otherwise.
  ScalarField fh, fl;
  double ftol = 1e-6;
  const bool constant_mass = free_variables(h.subs.at("M")).empty();
  if (constant_mass) {
    fh = h.scalar("exp(-kappa*t/M)", "exp(-int kappa/m)");
    fl = l.scalar("exp(-kappa*t/M)", "exp(-int kappa/m)");
  } else if (!e.params.at("int_kappa_over_m").empty()) {
    h.subs.emplace("I", user_expr(e.params, "int_kappa_over_m", hc, {"t"}, {"kappa"}));
    l.subs.emplace("I", user_expr(e.params, "int_kappa_over_m", lc, {"t"}, {"kappa"}));
    fh = h.scalar("exp(-(I))", "exp(-int kappa/m)");
    fl = l.scalar("exp(-(I))", "exp(-int kappa/m)");
  } else {
    fh = decay_by_quadrature(h.subs.at("M"), hc.dim(), kappa);
    fl = fh;
  }

  e.quantities = {
      {"exp(-int kappa/m)", QuantityKind::dissipated, fh, ChartKind::hamiltonian, ftol},
      {"p1", QuantityKind::dissipated, h.scalar("p1"), ChartKind::hamiltonian},
      {"exp(-int kappa/m)", QuantityKind::dissipated, fl, ChartKind::lagrangian, ftol},
      {"m*v1", QuantityKind::dissipated, l.scalar("M*v1", "m*v1"), ChartKind::lagrangian},
  };

  RegisteredSymmetry yf;
  yf.name = "Y_f";
  yf.field = VectorField::from_components({ScalarField::constant(0), ScalarField::constant(0),
                                           ScalarField::constant(0), -1.0 * fh},
                                          "-exp(-int kappa/m) d/dz");
  yf.cartan = CartanWitness{ScalarField::constant(0.0), -1.0 * fh};
  yf.expected = verdicts({{kGeneralized, kPass}, {kDynamical, kPass}, {kCartan, kPass}});

  RegisteredSymmetry yq;
  yq.name = "Y_p";
  yq.field = h.field({"0", "1", "0", "0"}, "d/dq");
  yq.expected = verdicts({{kGeneralized, kPass}, {kDynamical, kPass}, {kStrictHamiltonian, kPass}});
  e.symmetries = {yf, yq};

  e.lifts = {{"translation", LiftSpec::from_exprs(lc, {"1"})}};
  e.actions = {{"exp(-int kappa/m)", fl}};
  e.extra_observables = {{"H", e.hamiltonian->H}};

  default_box(e, hc.dim());
  e.initial = PhasePoint({0, 0, 1, 0});
  e.t1 = 1.0;
  e.integrator = rk4(1e-3);
  return e;
}

ExampleEntry central_potential_tdm(const ParamText& given) {
  ExampleEntry e;
  e.name = "central_potential_tdm";
  e.description = "planar particle in an action-dependent central potential, time-dependent mass";
  e.schema = {
      {"m", Type::expression, "1", "t", "mass m(t) > 0"},
      {"V", Type::expression, "0.5*s + 0.1*z", "t,s,z", "potential V(t, s, z) with s = x^2 + y^2"},
  };
  e.params = resolve(e.name, e.schema, given);
  e.primary = ChartKind::lagrangian;

  const ChartSpec hc{2, ChartKind::hamiltonian}, lc{2, ChartKind::lagrangian};
  auto scope = [&](const ChartSpec& c) {
    Scope s{c, {}, {}};
    s.subs.emplace("M", user_expr(e.params, "m", c, {"t"}));
    const Expr v = user_expr(e.params, "V", c, {"t", "z"}, {"s"});
    s.subs.emplace("VV", substitute(v, "s", parse("q1^2 + q2^2", c)));
    return s;
  };
  const Scope h = scope(hc), l = scope(lc);
  check_positive_in_t(l.subs.at("M"), lc, "m");

  e.lagrangian = l.lagrangian("M/2*(v1^2 + v2^2) - VV");
  e.hamiltonian = h.hamiltonian("(p1^2 + p2^2)/(2*M) + VV");

  e.quantities = {
      {"angular_momentum", QuantityKind::dissipated, l.scalar("M*(q1*v2 - q2*v1)", "m*(x*vy - y*vx)"),
       ChartKind::lagrangian},
      {"angular_momentum", QuantityKind::dissipated, h.scalar("q1*p2 - q2*p1", "x*py - y*px"),
       ChartKind::hamiltonian},
  };

  RegisteredSymmetry rot;
  rot.name = "rotation";
  rot.field = h.field({"0", "-q2", "q1", "-p2", "p1", "0"}, "rotation");
  rot.expected = verdicts({{kGeneralized, kPass}, {kDynamical, kPass}, {kStrictHamiltonian, kPass}});
  e.symmetries = {rot};
  e.lifts = {{"rotation", LiftSpec::from_exprs(lc, {"-q2", "q1"})}};
  e.extra_observables = {{"E_L", l.scalar("M/2*(v1^2 + v2^2) + VV", "E_L")}};

  default_box(e, lc.dim());
  e.initial = PhasePoint({0, 1, 0, 0, 0.8, 0});
  e.t1 = 5.0;
  e.integrator = adaptive(1e-10);
  return e;
}

ExampleEntry two_body_friction(const ParamText& given) {
  ExampleEntry e;
  e.name = "two_body_friction";
  e.description = "two bodies in a central potential with time-dependent linear friction";
  e.schema = {
      {"m1", Type::number, "1", "", "mass of body 1 > 0"},
      {"m2", Type::number, "1", "", "mass of body 2 > 0"},
      {"gamma", Type::expression, "0.1", "t", "friction gamma(t)"},
      {"U", Type::expression, "-G*m1*m2/r", "r", "potential U(r); may use G, m1, m2"},
      {"G", Type::number, "1", "", "coupling constant in the default potential"},
  };
  e.params = resolve(e.name, e.schema, given);
  e.primary = ChartKind::lagrangian;
  const double m1 = positive(e.params, "m1"), m2 = positive(e.params, "m2");
  const ParamMap nums{{"m1", m1}, {"m2", m2}, {"G", number(e.params, "G")}};

  const ChartSpec hc{6, ChartKind::hamiltonian}, lc{6, ChartKind::lagrangian};
  auto scope = [&](const ChartSpec& c) {
    Scope s{c, nums, {}};
    s.subs.emplace("GAM", user_expr(e.params, "gamma", c, {"t"}));
    const Expr u = user_expr(e.params, "U", c, {}, {"r", "G", "m1", "m2"});
    s.subs.emplace("UU", substitute(u, "r", parse("sqrt((q4-q1)^2 + (q5-q2)^2 + (q6-q3)^2)", c)));
    return s;
  };
  const Scope h = scope(hc), l = scope(lc);
  const Expr& gamma = l.subs.at("GAM");
  const bool frictionless = free_variables(gamma).empty() && evaluate(gamma, std::vector<double>(lc.dim())) == 0.0;
  const QuantityKind kind = frictionless ? QuantityKind::conserved : QuantityKind::dissipated;

  e.lagrangian =
      l.lagrangian("m1/2*(v1^2 + v2^2 + v3^2) + m2/2*(v4^2 + v5^2 + v6^2) - UU - GAM*z");
  e.hamiltonian =
      h.hamiltonian("(p1^2 + p2^2 + p3^2)/(2*m1) + (p4^2 + p5^2 + p6^2)/(2*m2) + UU + GAM*z");

  const std::array<const char*, 3> axis{"x", "y", "z"};
  const std::array<std::string, 3> r{"(q4-q1)", "(q5-q2)", "(q6-q3)"};
  // mu * rdot on each chart.
  const std::array<std::string, 3> wl{"(m1*m2/(m1+m2)*(v4-v1))", "(m1*m2/(m1+m2)*(v5-v2))",
                                      "(m1*m2/(m1+m2)*(v6-v3))"};
  const std::array<std::string, 3> wh{"((m1*p4 - m2*p1)/(m1+m2))", "((m1*p5 - m2*p2)/(m1+m2))",
                                      "((m1*p6 - m2*p3)/(m1+m2))"};
  for (int k = 0; k < 3; ++k) {
    const std::string a = std::to_string(k + 1), b = std::to_string(k + 4);
    const std::string name = std::string("Rdot_") + axis[k];
    e.quantities.push_back({name, kind, l.scalar("(m1*v" + a + " + m2*v" + b + ")/(m1+m2)", name),
                            ChartKind::lagrangian});
    e.quantities.push_back({name, kind, h.scalar("(p" + a + " + p" + b + ")/(m1+m2)", name),
                            ChartKind::hamiltonian});
  }
  for (int k = 0; k < 3; ++k) {
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    const std::string name = std::string("L_") + axis[k];
    e.quantities.push_back(
        {name, kind, l.scalar(r[i] + "*" + wl[j] + " - " + r[j] + "*" + wl[i], name), ChartKind::lagrangian});
    e.quantities.push_back(
        {name, kind, h.scalar(r[i] + "*" + wh[j] + " - " + r[j] + "*" + wh[i], name), ChartKind::hamiltonian});
  }

  for (int k = 0; k < 3; ++k) {
    std::vector<std::string> y(6, "0");
    y[k] = y[k + 3] = "1/(m1+m2)";
    const std::string name = std::string("Y_Rdot_") + axis[k];
    e.lifts.push_back({name, LiftSpec::from_exprs(lc, y, "0", nums)});

    std::vector<std::string> comps(hc.dim(), "0");
    comps[1 + k] = comps[4 + k] = "1/(m1+m2)";
    RegisteredSymmetry s;
    s.name = name;
    s.field = h.field(comps, name);
    s.expected = verdicts({{kGeneralized, kPass}, {kDynamical, kPass}, {kStrictHamiltonian, kPass}});
    e.symmetries.push_back(std::move(s));
  }
  for (int k = 0; k < 3; ++k) {
    // Rotation of the relative position about e_k, shared between the
    // bodies so that Y^V(L) is mu (r x rdot)_k.
    const int i = (k + 1) % 3, j = (k + 2) % 3;
    std::vector<std::string> y(6, "0");
    y[i] = "m2/(m1+m2)*" + r[j];
    y[j] = "-m2/(m1+m2)*" + r[i];
    y[i + 3] = "-m1/(m1+m2)*" + r[j];
    y[j + 3] = "m1/(m1+m2)*" + r[i];
    const std::string name = std::string("Y_L_") + axis[k];
    e.lifts.push_back({name, LiftSpec::from_exprs(lc, y, "0", nums)});
  }
  const std::size_t nh = e.quantities.size();
  for (std::size_t q = 0; q < nh; ++q) {
    const auto& rq = e.quantities[q];
    if (rq.side != ChartKind::hamiltonian || rq.name.rfind("L_", 0) != 0) continue;
    RegisteredSymmetry s;
    s.name = "Y_" + rq.name;
    s.field = symmetry_from_dissipated(hc, rq.field).relabeled(s.name);
    s.expected = verdicts({{kGeneralized, kPass}});
    e.symmetries.push_back(std::move(s));
  }

  e.extra_observables = {
      {"E_mec", l.scalar("m1/2*(v1^2 + v2^2 + v3^2) + m2/2*(v4^2 + v5^2 + v6^2) + UU", "E_mec")},
  };

  default_box(e, lc.dim());
  e.exclude = [](std::span<const double> x) {
    const double dx = x[4] - x[1], dy = x[5] - x[2], dz = x[6] - x[3];
    return dx * dx + dy * dy + dz * dz < 0.09;
  };
  // Tilted bound orbit with a drifting centre of mass.
  const double M = m1 + m2;
  const std::array<double, 3> rr{1.0, 0.0, 0.2}, rd{-0.1, 1.2, 0.3}, vcm{0.2, 0.1, 0.05};
  std::vector<double> x0(lc.dim(), 0.0);
  for (int k = 0; k < 3; ++k) {
    x0[1 + k] = -m2 / M * rr[k];
    x0[4 + k] = m1 / M * rr[k];
    x0[7 + k] = vcm[k] - m2 / M * rd[k];
    x0[10 + k] = vcm[k] + m1 / M * rd[k];
  }
  e.initial = PhasePoint(std::move(x0));
  e.t1 = 10.0;
  e.integrator = adaptive(1e-10);
  return e;
}

ExampleEntry r4_linear(const ParamText& given) {
  ExampleEntry e;
  e.name = "r4_linear";
  e.description = "H = p^2/2 + z on R^4 minus the origin";
  e.schema = {{"r", Type::number, "1", "", "momentum shift of the map Phi^r (nonzero)"}};
  e.params = resolve(e.name, e.schema, given);
  const double shift = number(e.params, "r");
  if (shift == 0.0) throw ParamSchemaError("parameter 'r' must be nonzero");

  const ChartSpec hc{1, ChartKind::hamiltonian};
  const Scope h{hc, {{"r", shift}}, {}};
  e.hamiltonian = h.hamiltonian("p1^2/2 + z");
  e.quantities = {{"p1", QuantityKind::dissipated, h.scalar("p1"), ChartKind::hamiltonian}};

  RegisteredSymmetry y, z, yz, phi;
  y.name = "Y";
  y.field = h.field({"0", "0", "1", "0"}, "d/dp");
  y.expected = verdicts({{kGeneralized, kPass}, {kDynamical, kFail}});
  z.name = "Z";
  z.field = h.field({"0", "q1/2", "p1/2", "z + p1"}, "Z");
  z.expected = verdicts({{kDynamical, kPass}});
  yz.name = "[Y,Z]";
  yz.field = lie_bracket_field(*y.field, *z.field).relabeled("[Y,Z]");
  yz.expected = verdicts({{kGeneralized, kFail}});
  phi.name = "Phi^r";
  phi.map = DiffeoSpec::from_exprs({h.expr("t"), h.expr("q1"), h.expr("p1 + r"), h.expr("z")}, h.nums, "Phi^r");
  phi.map_kind = DiffeoKind::generalized;
  phi.expected = verdicts({{kGeneralized, kFail}});
  e.symmetries = {y, z, yz, phi};
  e.extra_observables = {{"H", e.hamiltonian->H}};

  default_box(e, hc.dim());
  e.exclude = [](std::span<const double> x) { return max_abs(x) == 0.0; };
  e.initial = PhasePoint({0, 0.5, 1, 0.2});
  e.t1 = 2.0;
  e.integrator = rk4(1e-3);
  return e;
}

ExampleEntry cartan_counterexample(const ParamText& given) {
  ExampleEntry e;
  e.name = "cartan_counterexample";
  e.description = "H = exp(q - z): Cartan symmetries that are not generalized symmetries";
  e.params = resolve(e.name, e.schema, given);
  const ChartSpec hc{1, ChartKind::hamiltonian};
  const Scope h{hc, {}, {}};
  e.hamiltonian = h.hamiltonian("exp(q1 - z)");
  e.quantities = {{"H", QuantityKind::dissipated, h.scalar("exp(q1 - z)"), ChartKind::hamiltonian}};

  RegisteredSymmetry y1, y2;
  y1.name = "Y1";
  y1.field = h.field({"0", "0", "0", "q1"}, "q d/dz");
  y1.cartan = CartanWitness{ScalarField::constant(0.0), h.scalar("q1")};
  y1.expected = verdicts({{kCartan, kPass}, {kGeneralized, kFail}});
  y2.name = "Y2";
  y2.field = h.field({"0", "0", "(p1 - 1)*exp(q1 - z)", "-exp(q1 - z)"}, "Y2");
  y2.cartan = CartanWitness{h.scalar("exp(q1 - z)"), ScalarField::constant(0.0)};
  y2.expected = verdicts({{kCartan, kPass},
                          {kDynamical, kPass},
                          {kConformalHamiltonian, kPass},
                          {kStrictHamiltonian, kFail}});
  e.symmetries = {y1, y2};
  e.extra_observables = {{"H", e.hamiltonian->H}};

  default_box(e, hc.dim());
  e.initial = PhasePoint({0, 0.1, 0.5, 0.3});
  e.t1 = 1.0;
  e.integrator = rk4(1e-3);
  return e;
}

ExampleEntry h_preserving_counterexample(const ParamText& given) {
  ExampleEntry e;
  e.name = "h_preserving_counterexample";
  e.description = "H = p^2/2 with Y = z d/dz: Y(H) = 0 but Y is no symmetry";
  e.params = resolve(e.name, e.schema, given);
  const ChartSpec hc{1, ChartKind::hamiltonian};
  const Scope h{hc, {}, {}};
  e.hamiltonian = h.hamiltonian("p1^2/2");
  e.quantities = {
      {"p1", QuantityKind::conserved, h.scalar("p1"), ChartKind::hamiltonian},
      {"H", QuantityKind::conserved, h.scalar("p1^2/2", "H"), ChartKind::hamiltonian},
  };
  RegisteredSymmetry y;
  y.name = "Y";
  y.field = h.field({"0", "0", "0", "z"}, "z d/dz");
  y.expected = verdicts({{kGeneralized, kFail}});
  e.symmetries = {y};

  default_box(e, hc.dim());
  e.initial = PhasePoint({0, 0, 1, 0});
  e.t1 = 1.0;
  e.integrator = rk4(1e-3);
  return e;
}

using Builder = ExampleEntry (*)(const ParamText&);
const std::vector<std::pair<std::string, Builder>>& catalog() {
  static const std::vector<std::pair<std::string, Builder>> c{
      {"free_particle_tdm", free_particle_tdm},
      {"central_potential_tdm", central_potential_tdm},
      {"two_body_friction", two_body_friction},
      {"r4_linear", r4_linear},
      {"cartan_counterexample", cartan_counterexample},
      {"h_preserving_counterexample", h_preserving_counterexample},
  };
  return c;
}

}  // namespace

std::size_t ExampleEntry::dof() const { return chart(primary).n; }

const ChartSpec& ExampleEntry::chart(ChartKind side) const {
  if (side == ChartKind::hamiltonian && hamiltonian) return hamiltonian->chart;
  if (side == ChartKind::lagrangian && lagrangian) return lagrangian->chart;
  throw std::logic_error("example '" + name + "' has no system on that chart");
}

Sampler ExampleEntry::sampler(std::size_t count, std::uint64_t seed) const {
  Sampler s;
  s.lo = lo;
  s.hi = hi;
  s.count = count;
  s.seed = seed;
  s.exclude = exclude;
  return s;
}

std::vector<Observable> ExampleEntry::observables() const {
  std::vector<Observable> out;
  for (const auto& q : quantities)
    if (q.side == primary) out.emplace_back(q.name, q.field);
  out.insert(out.end(), extra_observables.begin(), extra_observables.end());
  return out;
}

ExampleEntry build_example(std::string_view name, const ParamText& params) {
  for (const auto& [n, build] : catalog())
    if (n == name) return build(params);
  throw UnknownExample(std::string(name));
}

std::vector<std::string> example_names() {
  std::vector<std::string> out;
  for (const auto& [n, b] : catalog()) out.push_back(n);
  return out;
}

SymmetryReport classify_registered(const RegisteredSymmetry& s, const HamiltonianSystem& sys,
                                   const Sampler& sampler, Tolerance tol) {
  if (s.map) return check_diffeomorphism(*s.map, sys, sampler, s.map_kind, tol);
  SymmetryReport r = classify_infinitesimal(*s.field, sys, sampler, tol);
  if (s.cartan) {
    const CartanResult c = check_cartan(*s.field, *s.cartan, sys, sampler, tol);
    r.classes.insert(r.classes.end(), c.report.classes.begin(), c.report.classes.end());
    r.assumptions.insert(r.assumptions.end(), c.report.assumptions.begin(), c.report.assumptions.end());
  }
  r.subject = s.name;
  return r;
}

std::vector<std::string> verdict_mismatches(const RegisteredSymmetry& s, const SymmetryReport& report) {
  std::vector<std::string> out;
  for (const auto& [cls, v] : s.expected) {
    const auto it = std::find_if(report.classes.begin(), report.classes.end(),
                                 [&](const ClassResult& c) { return c.name == cls; });
    if (it == report.classes.end() || it->verdict != v) out.push_back(cls);
  }
  return out;
}

std::string describe(const ExampleEntry& e) {
  auto names = [](const auto& items) {
    std::string s;
    NameSet seen;  // quantities registered on both charts appear once
    for (const auto& it : items)
      if (seen.insert(it.name).second) s += (s.empty() ? "" : ",") + it.name;
    return s.empty() ? std::string("-") : s;
  };
  std::ostringstream os;
  os << e.name << "  dof=" << e.dof()
     << "  side=" << (e.primary == ChartKind::hamiltonian ? "hamiltonian" : "lagrangian")
     << "  quantities=" << names(e.quantities) << "  symmetries=" << names(e.symmetries);
  if (!e.lifts.empty()) os << "  lifts=" << names(e.lifts);
  if (!e.actions.empty()) os << "  actions=" << names(e.actions);
  return os.str();
}

}  // namespace cocontact
