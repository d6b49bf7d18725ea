#include <algorithm>
#include <array>
#include <cmath>

#include "cocontact/errors.hpp"
#include "cocontact/examples.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cocontact;

namespace {

const HamiltonianSystem& ham(const ExampleEntry& e) { return *e.hamiltonian; }

/// Default trajectory on either chart; the other chart's initial point is
/// the Legendre image of the primary one.
Trajectory default_run(const ExampleEntry& e, ChartKind side) {
  if (side == ChartKind::hamiltonian) {
    const PhasePoint x0 = e.primary == side ? e.initial : legendre_map(*e.lagrangian, e.initial);
    return integrate(*e.hamiltonian, x0, e.t1, e.integrator);
  }
  const PhasePoint x0 = e.primary == side ? e.initial : legendre_inverse(*e.lagrangian, e.initial);
  return integrate(*e.lagrangian, x0, e.t1, e.integrator);
}

Sampler sampler_on(const ExampleEntry& e, std::size_t count = 100, std::uint64_t seed = 11) {
  return e.sampler(count, seed);
}

}  // namespace

TEST_CASE("catalog") {
  const auto names = example_names();
  REQUIRE(names.size() == 6);
  for (const auto& n : names) {
    const ExampleEntry e = build_example(n);
    CHECK(e.name == n);
    CHECK_FALSE(e.quantities.empty());
    CHECK(describe(e).rfind(n + "  dof=", 0) == 0);
    CHECK(e.lo.size() == e.chart(e.primary).dim());
    CHECK(e.initial.coords().size() == e.chart(e.primary).dim());
  }
  CHECK(build_example("two_body_friction").dof() == 6);
  CHECK(describe(build_example("r4_linear")).find("symmetries=Y,Z,[Y,Z],Phi^r") != std::string::npos);
  CHECK_THROWS_AS(build_example("three_body"), UnknownExample);
}

TEST_CASE("parameter schema") {
  CHECK_THROWS_AS(build_example("free_particle_tdm", {{"mass", "2"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("free_particle_tdm", {{"kappa", "-1"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("free_particle_tdm", {{"kappa", "1x"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("free_particle_tdm", {{"m", "1 + q1"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("free_particle_tdm", {{"m", "1 - t"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("free_particle_tdm", {{"m", "(1 +"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("two_body_friction", {{"m1", "0"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("two_body_friction", {{"gamma", "0.1*z"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("two_body_friction", {{"U", "t/r"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("central_potential_tdm", {{"V", "q1^2"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("cartan_counterexample", {{"m", "1"}}), ParamSchemaError);
  CHECK_THROWS_AS(build_example("r4_linear", {{"r", "0"}}), ParamSchemaError);

  const auto e = build_example("free_particle_tdm", {{"m", "2"}, {"kappa", "0.5"}});
  CHECK(e.params.at("m") == "2");
  // H = p^2/(2m) + kappa z / m.
  CHECK(std::abs(e.hamiltonian->H(std::vector<double>{0, 0, 2, 4}) - (1.0 + 1.0)) < 1e-15);
}

TEST_CASE("registered quantities hold pointwise") {
  for (const auto& n : example_names()) {
    const ExampleEntry e = build_example(n);
    const auto pts = sampler_on(e).draw();
    for (const auto& q : e.quantities) {
      INFO(n << " " << q.name);
      double worst = 0.0;
      for (const auto& x : pts) {
        double r = 0.0, scale = 0.0;
        if (q.side == ChartKind::hamiltonian) {
          r = quantity_residual(q.field, ham(e), q.kind, x);
          scale = quantity_residual_scale(q.field, ham(e), x);
        } else {
          r = lagrangian_quantity_residual(q.field, *e.lagrangian, q.kind, x, &scale);
        }
        worst = std::max(worst, std::abs(r) / std::max(1.0, scale));
      }
      CHECK(worst < 1e-9);
    }
  }
}

TEST_CASE("registered quantities hold along default trajectories") {
  for (const auto& n : example_names()) {
    const ExampleEntry e = build_example(n);
    for (ChartKind side : {ChartKind::hamiltonian, ChartKind::lagrangian}) {
      if ((side == ChartKind::hamiltonian && !e.hamiltonian) || (side == ChartKind::lagrangian && !e.lagrangian))
        continue;
      const Trajectory tr = default_run(e, side);
      for (const auto& q : e.quantities) {
        if (q.side != side) continue;
        INFO(n << " " << q.name);
        const AlongReport r = side == ChartKind::hamiltonian
                                  ? verify_dissipation_along(tr, q.field, ham(e), q.kind, q.tol)
                                  : verify_dissipation_along(tr, q.field, *e.lagrangian, q.kind, q.tol);
        CHECK(r.pass);
      }
      if (side == ChartKind::lagrangian) CHECK(herglotz_residuals(tr, *e.lagrangian).max_abs() < 1e-6);
    }
  }
}

TEST_CASE("registered symmetries reproduce their verdicts") {
  for (const auto& n : example_names()) {
    const ExampleEntry e = build_example(n);
    for (const auto& s : e.symmetries) {
      INFO(n << " " << s.name);
      const SymmetryReport r = classify_registered(s, ham(e), sampler_on(e));
      const auto bad = verdict_mismatches(s, r);
      CHECK(bad.empty());
      for (const auto& b : bad) MESSAGE("mismatch in class " << b);
    }
  }
}

TEST_CASE("lifts and action symmetries") {
  for (const auto& n : example_names()) {
    const ExampleEntry e = build_example(n);
    for (const auto& l : e.lifts) {
      INFO(n << " " << l.name);
      const auto r = check_extended_natural(l.spec, *e.lagrangian, sampler_on(e));
      CHECK(r.report.verdict("extended_natural") == Verdict::pass);
      CHECK(r.report.verdict("extended_natural_dissipation") == Verdict::pass);
    }
    for (const auto& a : e.actions) {
      INFO(n << " " << a.name);
      CHECK(check_action_symmetry(a.zeta, *e.lagrangian, sampler_on(e)).verdict("action_symmetry") == Verdict::pass);
    }
  }
}

TEST_CASE("two-body lifts give the registered quantities") {
  const ExampleEntry e = build_example("two_body_friction", {{"m1", "1.5"}, {"m2", "0.7"}});
  const auto pts = sampler_on(e, 30).draw();
  for (const auto& l : e.lifts) {
    const std::string qname = l.name.substr(2);  // Y_L_x -> L_x
    const auto it = std::find_if(e.quantities.begin(), e.quantities.end(), [&](const RegisteredQuantity& q) {
      return q.name == qname && q.side == ChartKind::lagrangian;
    });
    REQUIRE(it != e.quantities.end());
    const ScalarField f = check_extended_natural(l.spec, *e.lagrangian, sampler_on(e, 5)).f;
    for (const auto& x : pts) CHECK(std::abs(f(x.coords()) - it->field(x.coords())) < 1e-12);
  }
}

TEST_CASE("explicit Hamiltonians are the Legendre transforms") {
  for (const char* n : {"free_particle_tdm", "central_potential_tdm", "two_body_friction"}) {
    const ExampleEntry e = build_example(n, std::string(n) == "free_particle_tdm" ? ParamText{{"m", "1+t"}}
                                                                                   : ParamText{});
    const HamiltonianSystem th = to_hamiltonian(*e.lagrangian);
    for (const auto& x : sampler_on(e, 40).draw()) {
      INFO(n);
      const Jet a = e.hamiltonian->H.jet(x.coords(), 1), b = th.H.jet(x.coords(), 1);
      CHECK(testing::rel_dev(a.value(), b.value()) < 1e-10);
      for (std::size_t k = 0; k < x.coords().size(); ++k) CHECK(testing::rel_dev(a.grad(k), b.grad(k)) < 1e-9);
    }
  }
}

TEST_CASE("decay factor for a time-dependent mass") {
  // m = 1 + t, kappa = 1: exp(-int_0^t 1/(1+s) ds) = 1/(1+t).
  const ExampleEntry quad = build_example("free_particle_tdm", {{"m", "1+t"}});
  const ExampleEntry closed =
      build_example("free_particle_tdm", {{"m", "1+t"}, {"int_kappa_over_m", "kappa*ln(1+t)"}});
  const ScalarField& fq = quad.quantities.front().field;
  const ScalarField& fc = closed.quantities.front().field;
  CHECK(fq.label() == "exp(-int kappa/m)");
  CHECK(fc.expr().has_value());
  for (double t : {0.0, 0.3, 1.0, 4.5}) {
    const std::vector<double> x{t, 0.2, 0.4, 0.1};
    const Jet jq = fq.jet(x, 2), jc = fc.jet(x, 2);
    CHECK(std::abs(jq.value() - 1 / (1 + t)) < 1e-12);
    CHECK(std::abs(jc.value() - 1 / (1 + t)) < 1e-14);
    CHECK(std::abs(jq.grad(0) - jc.grad(0)) < 1e-12);
    CHECK(std::abs(jq.hess(0, 0) - jc.hess(0, 0)) < 1e-12);
  }
}

TEST_CASE("frictionless two-body conserves its quantities") {
  const ExampleEntry e = build_example("two_body_friction", {{"gamma", "0"}});
  const Trajectory tr = default_run(e, ChartKind::lagrangian);
  for (const auto& q : e.quantities) {
    CHECK(q.kind == QuantityKind::conserved);
    if (q.side != ChartKind::lagrangian) continue;
    INFO(q.name);
    CHECK(verify_dissipation_along(tr, q.field, *e.lagrangian, QuantityKind::conserved).pass);
  }
}

TEST_CASE("two-body energy balance and angular momentum direction") {
  const ExampleEntry e = build_example("two_body_friction", {{"gamma", "0.1 + 0.02*t"}});
  const LagrangianSystem& lag = *e.lagrangian;
  const ScalarField emec = e.extra_observables.front().second;
  const ScalarField loss =
      ScalarField::from_expr(parse("(0.1 + 0.02*t)*(v1^2 + v2^2 + v3^2 + v4^2 + v5^2 + v6^2)", lag.chart));
  // Gamma_L(E_mec) = -gamma (m1 |v1|^2 + m2 |v2|^2) pointwise.
  for (const auto& x : sampler_on(e, 50).draw()) {
    const TangentVector g = herglotz_field(lag, x);
    const Jet j = emec.jet(x.coords(), 1);
    double d = 0.0;
    for (std::size_t k = 0; k < g.c.size(); ++k) d += g[k] * j.grad(k);
    CHECK(std::abs(d + loss(x.coords())) < 1e-9 * std::max(1.0, std::abs(d)));
  }
  // The direction of L stays fixed along the flow.
  const Trajectory tr = default_run(e, ChartKind::lagrangian);
  std::vector<ScalarField> lk;
  for (const auto& q : e.quantities)
    if (q.side == ChartKind::lagrangian && q.name.rfind("L_", 0) == 0) lk.push_back(q.field);
  REQUIRE(lk.size() == 3);
  auto unit = [&](const PhasePoint& x) {
    std::array<double, 3> u{};
    double s = 0.0;
    for (int k = 0; k < 3; ++k) s += std::pow(u[k] = lk[k](x.coords()), 2);
    for (auto& c : u) c /= std::sqrt(s);
    return u;
  };
  const auto u0 = unit(tr.points.front());
  double drift = 0.0;
  for (const auto& x : tr.points) {
    const auto u = unit(x);
    for (int k = 0; k < 3; ++k) drift = std::max(drift, std::abs(u[k] - u0[k]));
  }
  CHECK(drift < 1e-6);
}

TEST_CASE("Y = z d/dz preserves H = p^2/2") {
  const ExampleEntry e = build_example("h_preserving_counterexample");
  const VectorField& y = *e.symmetries.front().field;
  for (const auto& x : sampler_on(e).draw()) CHECK(apply(y, e.hamiltonian->H, x.coords()) == 0.0);
}
