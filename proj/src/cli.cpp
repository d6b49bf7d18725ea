#include "cocontact/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "cocontact/errors.hpp"
#include "json.hpp"

namespace cocontact::cli {

namespace {

using json = nlohmann::ordered_json;

/// Command-line input that parses but makes no sense (wrong component
/// count, malformed box, missing option pair).
class UsageError : public Error {
 public:
  using Error::Error;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double to_number(std::string_view s, const std::string& what) {
  const std::string t = trim(s);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v))
    throw ParamSchemaError(what + ": '" + t + "' is not a number");
  return v;
}

NameSet names_of(const ParamMap& params) {
  NameSet n;
  for (const auto& [k, v] : params) n.insert(k);
  return n;
}

bool is_literal_zero(const Expr& e, std::size_t dim) {
  return free_variables(e).empty() && parameters(e).empty() && evaluate(e, std::vector<double>(dim, 0.0)) == 0.0;
}

/// "lo:hi" for every non-t coordinate, or one "lo:hi" per coordinate.
void apply_box(std::vector<double>& lo, std::vector<double>& hi, std::string_view box, std::size_t dim) {
  const auto parts = split(box, ',');
  if (parts.size() != 1 && parts.size() != dim)
    throw ParamSchemaError("box needs 1 or " + std::to_string(dim) + " lo:hi entries, got " +
                           std::to_string(parts.size()));
  lo.resize(dim, 0.0);
  hi.resize(dim, 0.0);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto lh = split(parts[k], ':');
    if (lh.size() != 2) throw ParamSchemaError("box entry '" + parts[k] + "' is not lo:hi");
    const double a = to_number(lh[0], "box"), b = to_number(lh[1], "box");
    if (!(a < b)) throw ParamSchemaError("box entry '" + parts[k] + "' needs lo < hi");
    if (parts.size() == 1) {
      for (std::size_t i = 1; i < dim; ++i) lo[i] = a, hi[i] = b;
    } else {
      lo[k] = a, hi[k] = b;
    }
  }
}

std::vector<double> coordinate_list(std::string_view text, std::size_t dim, const std::string& what) {
  const auto parts = split(text, ',');
  if (parts.size() != dim - 1)
    throw ParamSchemaError(what + " needs " + std::to_string(dim - 1) + " values (every coordinate but t)");
  std::vector<double> x{0.0};
  for (const auto& p : parts) x.push_back(to_number(p, what));
  return x;
}

std::vector<Expr> parse_list(std::string_view text, const ChartSpec& chart, const ParamMap& params) {
  std::vector<Expr> out;
  for (const auto& s : split(text, ';')) out.push_back(parse(s, chart, names_of(params)));
  return out;
}

std::map<std::string, Verdict, std::less<>> parse_expectations(std::string_view text, char sep) {
  std::map<std::string, Verdict, std::less<>> out;
  for (const auto& item : split(text, ',')) {
    const auto kv = split(item, sep);
    if (kv.size() != 2 || (kv[1] != "pass" && kv[1] != "fail"))
      throw ParamSchemaError("expectation '" + item + "' is not class" + sep + "pass|fail");
    out[kv[0]] = kv[1] == "pass" ? Verdict::pass : Verdict::fail;
  }
  return out;
}

const HamiltonianSystem& hamiltonian_of(const ExampleEntry& e) {
  if (!e.hamiltonian) throw UsageError("system '" + e.name + "' has no hamiltonian description");
  return *e.hamiltonian;
}

ChartKind pick_side(const ExampleEntry& e, const std::string& side) {
  if (side.empty()) return e.primary;
  if (side == "hamiltonian" && e.hamiltonian) return ChartKind::hamiltonian;
  if (side == "lagrangian" && e.lagrangian) return ChartKind::lagrangian;
  throw UsageError("system '" + e.name + "' has no " + side + " side");
}

const ParamMap& params_on(const ExampleEntry& e, ChartKind side) {
  return side == ChartKind::hamiltonian ? e.hamiltonian->params : e.lagrangian->params;
}

const std::string& label_on(const ExampleEntry& e, ChartKind side) {
  return side == ChartKind::hamiltonian ? e.hamiltonian->label : e.lagrangian->label;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    if (text.empty() || text.back() != '\n') out << '\n';
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
}

// ---------------------------------------------------------------------------
// Options shared by every system-bound subcommand.

struct Common {
  std::string system;
  std::vector<std::string> sets;
  std::string side;
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  std::string box;
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("--system", system, "example name or system file")->required();
    app->add_option("--set", sets, "parameter override k=v (repeatable)");
    app->add_option("--side", side, "hamiltonian or lagrangian (default: the system's own)")
        ->check(CLI::IsMember({"hamiltonian", "lagrangian"}));
    app->add_option("--samples", samples, "number of sample points")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "sampler seed");
    app->add_option("--box", box, "lo:hi for all non-t coordinates, or one lo:hi per coordinate");
    app->add_option("--out", out, "output file (default: standard output)");
  }

  ExampleEntry load() const {
    ParamText overrides;
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError("--set expects k=v, got '" + s + "'");
      overrides[trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
    }
    return load_system(system, overrides);
  }

  Sampler sampler(const ExampleEntry& e) const {
    Sampler s = e.sampler(samples, seed);
    if (!box.empty()) apply_box(s.lo, s.hi, box, s.lo.size());
    return s;
  }
};

/// Step options; unset values keep the system's default integrator.
struct Stepping {
  double t0 = std::numeric_limits<double>::quiet_NaN();
  double t1 = std::numeric_limits<double>::quiet_NaN();
  double dt = 0.0, rtol = 0.0, atol = 0.0;
  std::size_t stride = 1;

  void attach(CLI::App* app) {
    app->add_option("--t0", t0, "start time (default: the system's initial t)");
    app->add_option("--t1", t1, "end time");
    auto* d = app->add_option("--dt", dt, "fixed RK4 step");
    auto* r = app->add_option("--rtol", rtol, "adaptive relative tolerance");
    auto* a = app->add_option("--atol", atol, "adaptive absolute tolerance");
    d->excludes(r)->excludes(a);
    app->add_option("--stride", stride, "record every stride-th step")->check(CLI::PositiveNumber);
  }

  IntegratorConfig config(const ExampleEntry& e) const {
    IntegratorConfig c = e.integrator;
    if (dt != 0.0) {
      c.method = Method::rk4;
      c.dt = dt;
    } else if (rtol != 0.0 || atol != 0.0) {
      c.method = Method::adaptive45;
      c.rtol = rtol != 0.0 ? rtol : atol;
      c.atol = atol != 0.0 ? atol : rtol;
    }
    c.stride = stride;
    c.validate();
    return c;
  }
};

/// Default initial point of `e` moved to `side` and to time t0.
PhasePoint start_point(const ExampleEntry& e, ChartKind side, const std::string& initial, double t0) {
  PhasePoint x;
  if (!initial.empty()) {
    x = PhasePoint(coordinate_list(initial, e.chart(side).dim(), "--initial"));
    x[0] = e.initial.t();
  } else if (side == e.primary) {
    x = e.initial;
  } else if (side == ChartKind::hamiltonian) {
    x = legendre_map(*e.lagrangian, e.initial);
  } else {
    x = legendre_inverse(*e.lagrangian, e.initial);
  }
  if (!std::isnan(t0)) x[0] = t0;
  return x;
}

Trajectory run_default(const ExampleEntry& e, ChartKind side, const PhasePoint& x0, double t1,
                       const IntegratorConfig& cfg) {
  const double end = std::isnan(t1) ? e.t1 : t1;
  if (!(end > x0.t())) throw UsageError("--t1 must exceed the start time");
  return side == ChartKind::hamiltonian ? integrate(*e.hamiltonian, x0, end, cfg)
                                        : integrate(*e.lagrangian, x0, end, cfg);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Common& c, const Stepping& st, const std::string& initial,
                 const std::vector<std::string>& observe, bool registered, std::ostream& out) {
  const ExampleEntry e = c.load();
  const ChartKind side = pick_side(e, c.side);
  const ChartSpec& chart = e.chart(side);
  const IntegratorConfig cfg = st.config(e);
  const Trajectory tr = run_default(e, side, start_point(e, side, initial, st.t0), st.t1, cfg);

  std::vector<Observable> obs;
  if (registered) {
    for (const auto& q : e.quantities)
      if (q.side == side) obs.emplace_back(q.name, q.field);
    if (side == e.primary)
      obs.insert(obs.end(), e.extra_observables.begin(), e.extra_observables.end());
  }
  for (const auto& src : observe)
    obs.emplace_back(src, ScalarField::from_expr(parse(src, chart, names_of(params_on(e, side))), params_on(e, side)));
  const auto series = monitor(tr, obs);
  const bool as_json = c.out.size() >= 5 && c.out.compare(c.out.size() - 5, 5, ".json") == 0;
  emit(as_json ? tr.to_json(series) : tr.to_csv(series), c.out, out);
  return ok;
}

int cmd_verify_quantity(const Common& c, const Stepping& st, const std::string& expr, const std::string& name,
                        std::string kind_text, bool along, double tol, double along_tol, std::ostream& out) {
  const ExampleEntry e = c.load();
  const ChartKind side = pick_side(e, c.side);
  const ChartSpec& chart = e.chart(side);

  ScalarField f;
  std::string label = expr;
  double registered_tol = 1e-6;
  if (!name.empty()) {
    const auto it = std::find_if(e.quantities.begin(), e.quantities.end(),
                                 [&](const RegisteredQuantity& q) { return q.name == name && q.side == side; });
    if (it == e.quantities.end()) throw UsageError("system '" + e.name + "' registers no quantity '" + name + "' on this side");
    f = it->field;
    label = name;
    registered_tol = it->tol;
    if (kind_text.empty()) kind_text = to_string(it->kind);
  } else {
    f = ScalarField::from_expr(parse(expr, chart, names_of(params_on(e, side))), params_on(e, side), expr);
  }
  const QuantityKind kind = quantity_kind_from_string(kind_text.empty() ? "dissipated" : kind_text);

  const Sampler sampler = c.sampler(e);
  const auto pts = sampler.draw();
  double worst = 0.0;
  for_each_sample(pts, [&](std::size_t, const PhasePoint& x) {
    double r = 0.0, scale = 0.0;
    if (side == ChartKind::hamiltonian) {
      r = quantity_residual(f, *e.hamiltonian, kind, x);
      scale = quantity_residual_scale(f, *e.hamiltonian, x);
    } else {
      r = lagrangian_quantity_residual(f, *e.lagrangian, kind, x, &scale);
    }
    worst = std::max(worst, std::abs(r) / std::max(1.0, scale));
  });
  bool pass = worst <= tol;

  json j;
  j["schema_version"] = 1;
  j["command"] = "verify quantity";
  j["system"] = label_on(e, side);
  j["side"] = side == ChartKind::hamiltonian ? "hamiltonian" : "lagrangian";
  j["quantity"] = label;
  j["kind"] = to_string(kind);
  j["samples"] = pts.size();
  j["seed"] = sampler.seed;
  j["tol"] = tol;
  j["max_residual"] = worst;
  j["pointwise"] = worst <= tol ? "pass" : "fail";
  if (along) {
    const Trajectory tr = run_default(e, side, start_point(e, side, "", st.t0), st.t1, st.config(e));
    const double at = std::isnan(along_tol) ? registered_tol : along_tol;
    AlongReport r = side == ChartKind::hamiltonian ? verify_dissipation_along(tr, f, *e.hamiltonian, kind, at)
                                                   : verify_dissipation_along(tr, f, *e.lagrangian, kind, at);
    r.quantity = label;
    j["along"] = json::parse(r.to_json());
    pass = pass && r.pass;
  }
  j["verdict"] = pass ? "pass" : "fail";
  emit(j.dump(2), c.out, out);
  return pass ? ok : verification_failed;
}

Tolerance tolerance(double tol) {
  Tolerance t;
  if (!std::isnan(tol)) t.abs = t.rel = tol;
  return t;
}

int finish_report(SymmetryReport r, const RegisteredSymmetry& s, const std::string& out_path, std::ostream& out) {
  emit(r.to_json(), out_path, out);
  return verdict_mismatches(s, r).empty() ? ok : verification_failed;
}

int cmd_classify_field(const Common& c, const std::string& comps, const std::string& rho, const std::string& g,
                       const std::string& expect, double tol, std::ostream& out, std::ostream& err) {
  const ExampleEntry e = c.load();
  const HamiltonianSystem& sys = hamiltonian_of(e);
  const ChartSpec& chart = sys.chart;
  std::vector<Expr> es = parse_list(comps, chart, sys.params);
  if (es.size() == chart.dim() - 1) es.insert(es.begin(), Expr::constant(0.0));
  if (es.size() != chart.dim())
    throw UsageError("--components needs " + std::to_string(chart.dim()) + " expressions (or " +
                     std::to_string(chart.dim() - 1) + " without t), got " + std::to_string(es.size()));
  if (!is_literal_zero(es[0], chart.dim())) {
    err << "warning: t-component '" << to_string(es[0]) << "' forced to 0\n";
    es[0] = Expr::constant(0.0);
  }
  RegisteredSymmetry s;
  s.name = comps;
  s.field = VectorField::from_exprs(es, sys.params, comps);
  if (!rho.empty() || !g.empty()) {
    if (rho.empty() || g.empty()) throw UsageError("--cartan-rho and --cartan-g go together");
    const NameSet names = names_of(sys.params);
    s.cartan = CartanWitness{ScalarField::from_expr(parse(rho, chart, names), sys.params),
                             ScalarField::from_expr(parse(g, chart, names), sys.params)};
  }
  if (!expect.empty()) s.expected = parse_expectations(expect, '=');
  SymmetryReport r = classify_registered(s, sys, c.sampler(e), tolerance(tol));
  r.subject = comps;
  r.system = sys.label;
  return finish_report(std::move(r), s, c.out, out);
}

int cmd_classify_map(const Common& c, const std::string& map, const std::string& kind, const std::string& expect,
                     double tol, std::ostream& out) {
  const ExampleEntry e = c.load();
  const HamiltonianSystem& sys = hamiltonian_of(e);
  const ChartSpec& chart = sys.chart;
  std::vector<Expr> es = parse_list(map, chart, sys.params);
  if (es.size() == chart.dim() - 1) es.insert(es.begin(), parse("t", chart));
  if (es.size() != chart.dim())
    throw UsageError("--map needs " + std::to_string(chart.dim()) + " expressions, got " + std::to_string(es.size()));
  RegisteredSymmetry s;
  s.name = map;
  s.map = DiffeoSpec::from_exprs(es, sys.params, map);
  s.map_kind = diffeo_kind_from_string(kind);
  if (!expect.empty()) s.expected = parse_expectations(expect, '=');
  SymmetryReport r = classify_registered(s, sys, c.sampler(e), tolerance(tol));
  r.subject = map;
  r.system = sys.label;
  return finish_report(std::move(r), s, c.out, out);
}

int cmd_list(std::ostream& out) {
  for (const auto& n : example_names()) out << describe(build_example(n)) << '\n';
  return ok;
}

}  // namespace

// ---------------------------------------------------------------------------

ExampleEntry parse_system_file(std::string_view text, const ParamText& overrides, std::string name) {
  std::map<std::string, std::string, std::less<>> kv;
  std::vector<std::string> order;
  std::istringstream in{std::string(text)};
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParamSchemaError("system file line " + std::to_string(no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (!kv.emplace(key, trim(line.substr(eq + 1))).second)
      throw ParamSchemaError("system file: duplicate key '" + key + "'");
    order.push_back(key);
  }
  auto need = [&](const std::string& key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParamSchemaError("system file: missing '" + key + "'");
    return it->second;
  };

  const std::string& kind = need("kind");
  if (kind != "hamiltonian" && kind != "lagrangian")
    throw ParamSchemaError("system file: kind must be hamiltonian or lagrangian");
  const double nd = to_number(need("n"), "n");
  if (nd < 1 || nd != std::floor(nd)) throw ParamSchemaError("system file: n must be a positive integer");
  const auto n = static_cast<std::size_t>(nd);

  ExampleEntry e;
  e.name = std::move(name);
  e.description = "system file";
  ParamMap params;
  for (const auto& key : order)
    if (key.rfind("param.", 0) == 0) {
      const std::string p = key.substr(6);
      params[p] = to_number(kv.at(key), "param." + p);
      e.schema.push_back({p, ParamSpec::Type::number, kv.at(key), "", ""});
      e.params[p] = kv.at(key);
    }
  for (const auto& [k, v] : overrides) {
    if (!params.contains(k)) throw ParamSchemaError("system file has no parameter '" + k + "'");
    params[k] = to_number(v, "--set " + k);
    e.params[k] = v;
  }

  const std::string& source = need("expression");
  if (kind == "hamiltonian") {
    e.primary = ChartKind::hamiltonian;
    e.hamiltonian = HamiltonianSystem::from_expr(source, n, params);
  } else {
    e.primary = ChartKind::lagrangian;
    e.lagrangian = LagrangianSystem::from_expr(source, n, params);
    e.hamiltonian = to_hamiltonian(*e.lagrangian);
  }
  const ChartSpec chart = e.chart(e.primary);
  const std::size_t d = chart.dim();
  const NameSet names = names_of(params);

  e.lo.assign(d, -2.0);
  e.hi.assign(d, 2.0);
  e.lo[0] = 0.0;
  e.initial = PhasePoint(std::vector<double>(d, 0.0));
  e.integrator.method = Method::rk4;
  e.integrator.dt = 1e-3;

  std::map<std::string, RegisteredSymmetry, std::less<>> syms;
  std::vector<std::string> sym_order;
  auto sym = [&](const std::string& key) -> RegisteredSymmetry& {
    auto [it, fresh] = syms.try_emplace(key);
    if (fresh) {
      it->second.name = key;
      sym_order.push_back(key);
    }
    return it->second;
  };

  for (const auto& key : order) {
    const std::string& value = kv.at(key);
    if (key == "kind" || key == "n" || key == "expression" || key.rfind("param.", 0) == 0) continue;
    if (key == "domain") {
      const Expr g = parse(value, chart, names);
      e.exclude = [g, params](std::span<const double> x) { return !(evaluate(g, x, params) > 0.0); };
    } else if (key == "initial") {
      e.initial = PhasePoint(coordinate_list(value, d, "initial"));
    } else if (key == "t1") {
      e.t1 = to_number(value, "t1");
    } else if (key == "box") {
      apply_box(e.lo, e.hi, value, d);
    } else if (key.rfind("quantity.", 0) == 0) {
      const auto colon = value.find(':');
      if (colon == std::string::npos) throw ParamSchemaError(key + " must read 'kind: expression'");
      const std::string src = trim(value.substr(colon + 1));
      RegisteredQuantity q;
      q.name = key.substr(9);
      q.kind = quantity_kind_from_string(trim(value.substr(0, colon)));
      q.field = ScalarField::from_expr(parse(src, chart, names), params, src);
      q.side = e.primary;
      e.quantities.push_back(std::move(q));
    } else if (key.rfind("symmetry.", 0) == 0) {
      const HamiltonianSystem& h = *e.hamiltonian;
      std::vector<Expr> es = parse_list(value, h.chart, params);
      if (es.size() != d) throw ParamSchemaError(key + " needs " + std::to_string(d) + " components");
      if (!is_literal_zero(es[0], d)) throw ParamSchemaError(key + ": the t-component must be 0");
      sym(key.substr(9)).field = VectorField::from_exprs(es, params, key.substr(9));
    } else if (key.rfind("expect.", 0) == 0) {
      sym(key.substr(7)).expected = parse_expectations(value, ':');
    } else if (key.rfind("cartan.", 0) == 0) {
      const auto parts = parse_list(value, e.hamiltonian->chart, params);
      if (parts.size() != 2) throw ParamSchemaError(key + " must read 'rho; g'");
      sym(key.substr(7)).cartan =
          CartanWitness{ScalarField::from_expr(parts[0], params), ScalarField::from_expr(parts[1], params)};
    } else {
      throw ParamSchemaError("system file: unknown key '" + key + "'");
    }
  }
  for (const auto& k : sym_order) {
    if (!syms.at(k).field) throw ParamSchemaError("system file: expect/cartan for '" + k + "' without symmetry." + k);
    e.symmetries.push_back(std::move(syms.at(k)));
  }
  if (e.exclude && e.exclude(e.initial.coords()))
    throw ParamSchemaError("system file: initial point lies outside the domain");
  return e;
}

ExampleEntry load_system(const std::string& spec, const ParamText& overrides) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(spec, ec)) return build_example(spec, overrides);
  std::ifstream f(spec, std::ios::binary);
  std::ostringstream buf;
  buf << f.rdbuf();
  if (!f) throw std::runtime_error("cannot read '" + spec + "'");
  return parse_system_file(buf.str(), overrides, std::filesystem::path(spec).stem().string());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cocontact Hamiltonian and Lagrangian mechanics: simulate, verify, classify", "cocontact"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "help for every subcommand");

  Common c;
  Stepping st;
  std::string initial, expr, quantity, kind, comps, rho, g, expect, map;
  std::vector<std::string> observe;
  bool registered = false, along = false;
  double tol = std::numeric_limits<double>::quiet_NaN();
  double along_tol = std::numeric_limits<double>::quiet_NaN();

  auto* sim = app.add_subcommand("simulate", "integrate a system and write CSV or JSON");
  c.attach(sim);
  st.attach(sim);
  sim->add_option("--initial", initial, "initial point: every coordinate but t, comma separated");
  sim->add_option("--observe", observe, "expression to monitor (repeatable)");
  sim->add_flag("--registered", registered, "also monitor the system's registered quantities");

  auto* verify = app.add_subcommand("verify", "check a quantity")->require_subcommand(1);
  auto* vq = verify->add_subcommand("quantity", "pointwise and along-trajectory dissipation laws");
  Common cq;
  cq.attach(vq);
  Stepping sq;
  sq.attach(vq);
  auto* oe = vq->add_option("--expr", expr, "quantity as an expression");
  auto* on = vq->add_option("--quantity", quantity, "a registered quantity by name");
  oe->excludes(on);
  vq->add_option("--kind", kind, "dissipated or conserved")->check(CLI::IsMember({"dissipated", "conserved"}));
  vq->add_flag("--along", along, "also check the laws along the default trajectory");
  vq->add_option("--tol", tol, "pointwise relative tolerance (default 1e-9)");
  vq->add_option("--along-tol", along_tol, "along-trajectory tolerance (default 1e-6)");

  auto* classify = app.add_subcommand("classify", "classify a vector field or a map")->require_subcommand(1);
  auto* cf = classify->add_subcommand("field", "infinitesimal symmetry classes");
  Common cfc;
  cfc.attach(cf);
  cf->add_option("--components", comps, "components in chart order, ';' separated")->required();
  auto* orho = cf->add_option("--cartan-rho", rho, "Cartan witness rho");
  auto* og = cf->add_option("--cartan-g", g, "Cartan witness g");
  orho->needs(og);
  og->needs(orho);
  cf->add_option("--expect", expect, "class=pass|fail,...; exit 3 when not reproduced");
  cf->add_option("--tol", tol, "absolute and relative tolerance (default 1e-9)");

  auto* cm = classify->add_subcommand("map", "finite symmetry classes of a diffeomorphism");
  Common cmc;
  cmc.attach(cm);
  cm->add_option("--map", map, "image coordinates in chart order, ';' separated")->required();
  cm->add_option("--kind", kind, "dynamical, generalized, conformal_hamiltonian or strict_hamiltonian")->required();
  cm->add_option("--expect", expect, "class=pass|fail,...; exit 3 when not reproduced");
  cm->add_option("--tol", tol, "absolute and relative tolerance (default 1e-9)");

  auto* list = app.add_subcommand("list-examples", "one line per built-in example");

  std::vector<const char*> argv{"cocontact"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? ok : usage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(c, st, initial, observe, registered, out);
    if (vq->parsed()) {
      if (expr.empty() && quantity.empty()) throw UsageError("verify quantity needs --expr or --quantity");
      return cmd_verify_quantity(cq, sq, expr, quantity, kind, along, std::isnan(tol) ? 1e-9 : tol, along_tol, out);
    }
    if (cf->parsed()) return cmd_classify_field(cfc, comps, rho, g, expect, tol, out, err);
    if (cm->parsed()) return cmd_classify_map(cmc, map, kind, expect, tol, out);
    if (list->parsed()) return cmd_list(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const SyntaxError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const UnknownIdentifier& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const UnboundParam& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const UnknownExample& e) {
    err << "error: " << e.what() << " (see list-examples)\n";
    return usage;
  } catch (const ParamSchemaError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return runtime;
  }
  return usage;
}

}  // namespace cocontact::cli
