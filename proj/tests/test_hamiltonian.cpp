#include <cmath>

#include "cocontact/errors.hpp"
#include "cocontact/hamiltonian.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cocontact;

namespace {

const ChartSpec kC1{1, ChartKind::hamiltonian};

ScalarField field(std::string_view s, const ChartSpec& c = kC1, const ParamMap& params = {}) {
  NameSet names;
  for (const auto& [k, v] : params) names.insert(k);
  return ScalarField::from_expr(parse(s, c, names), params);
}

// Oracle: the bracket from its definition through the inverse flat map,
// {f,g} = -d eta(flat^-1 df, flat^-1 dg) - f R_z(g) + g R_z(f).
double bracket_by_definition(const ScalarField& f, const ScalarField& g, const ChartSpec& c,
                             const PhasePoint& x) {
  const Jet fj = f.jet(x.coords(), 1), gj = g.jet(x.coords(), 1);
  const TangentVector a = flat_inv(c, x, CoVector{fj.gradient()});
  const TangentVector b = flat_inv(c, x, CoVector{gj.gradient()});
  const std::size_t z = c.z_index();
  return -deta_pair(c, a, b) - fj.value() * gj.grad(z) + gj.value() * fj.grad(z);
}

}  // namespace

TEST_CASE("hamiltonian_vector_field examples") {
  auto sys = HamiltonianSystem::from_expr("p1^2/2 + z", 1);
  TangentVector x = hamiltonian_vector_field(sys, PhasePoint({0, 0, 1, 0}));
  CHECK(x.c == std::vector<double>{1, 1, -1, 0.5});

  auto fp = HamiltonianSystem::from_expr("p1^2/(2*m) + kappa*z/m", 1, {{"m", 1.0}, {"kappa", 1.0}});
  x = hamiltonian_vector_field(fp, PhasePoint({0.3, 0.2, 1, 0}));
  CHECK(x.c == std::vector<double>{1, 1, -1, 0.5});

  auto zero = HamiltonianSystem::from_expr("0", 2);
  x = hamiltonian_vector_field(zero, PhasePoint({1, 2, 3, 4, 5, 6}));
  CHECK(x.c == std::vector<double>{1, 0, 0, 0, 0, 0});
}

TEST_CASE("field equation residuals vanish for X_H") {
  const std::vector<HamiltonianSystem> systems{
      HamiltonianSystem::from_expr("p1^2/(2*(1+t)) + kappa*z/(1+t)", 1, {{"kappa", 0.7}}),
      HamiltonianSystem::from_expr("p1^2/2 + z", 1),
      HamiltonianSystem::from_expr("exp(q1 - z)", 1),
      HamiltonianSystem::from_expr("p1^2/2", 1),
      HamiltonianSystem::from_expr("(p1^2 + p2^2)/(2*(1+t)) + 0.5*(q1^2+q2^2) + 0.1*z", 2),
      HamiltonianSystem::from_expr("3.5", 2),
  };
  testing::Rng rng(4);
  for (const auto& sys : systems) {
    for (int i = 0; i < 100; ++i) {
      const PhasePoint x = rng.point(sys.chart.dim(), -1, 1);
      CHECK(field_equation_residuals(sys, x).max_abs() < 1e-11);
    }
  }
  // A perturbed field is caught in the dq slot.
  const auto& sys = systems[1];
  const PhasePoint x({0.1, 0.2, 0.3, 0.4});
  TangentVector bad = hamiltonian_vector_field(sys, x);
  bad[2] += 1.0;
  const auto r = field_equation_residuals(sys, x, bad);
  CHECK(std::abs(r.r1[1] + 1.0) < 1e-15);
}

TEST_CASE("Jacobi bracket: shortcut agrees with the definition") {
  const ChartSpec c2{2, ChartKind::hamiltonian};
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"z^2", "1"},
      {"q1*p1 + z", "p1^2/2 + z"},
      {"exp(-t)*p2 + q1*z", "sin(q2)*p1 - t*z^2"},
      {"p1*p2*z", "exp(q1 - z) + t"},
  };
  testing::Rng rng(12);
  for (const auto& [fs, gs] : pairs) {
    const ScalarField f = field(fs, c2), g = field(gs, c2);
    for (int i = 0; i < 100; ++i) {
      const PhasePoint x = rng.point(c2.dim(), -1.5, 1.5);
      const double short_form = jacobi_bracket(f, g, c2, x);
      CHECK(std::abs(short_form - bracket_by_definition(f, g, c2, x)) < 1e-10);
      CHECK(std::abs(short_form + jacobi_bracket(g, f, c2, x)) < 1e-10);
    }
  }
  // {f, 1} = R_z(f) for f = z^2 at z = 2.
  const PhasePoint x({0, 0, 0, 2});
  CHECK(jacobi_bracket(field("z^2"), ScalarField::constant(1.0), kC1, x) == doctest::Approx(4.0));
}

TEST_CASE("dissipated p for H = p^2/2 + z via the bracket") {
  const auto sys = HamiltonianSystem::from_expr("p1^2/2 + z", 1);
  const ScalarField p = field("p1");
  testing::Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const PhasePoint x = rng.point(4, -2, 2);
    // {p, H} = R_t(p) = 0 and hence {H, p} + R_t(p) = 0.
    CHECK(std::abs(jacobi_bracket(sys.H, p, kC1, x)) < 1e-12);
    CHECK(std::abs(quantity_residual(p, sys, QuantityKind::dissipated, x)) < 1e-12);
  }
}

TEST_CASE("quantity residuals") {
  const ParamMap params{{"m", 2.0}, {"kappa", 0.5}};
  const auto sys = HamiltonianSystem::from_expr("p1^2/(2*m) + kappa*z/m", 1, params);
  const ScalarField decay = field("exp(-kappa*t/m)", kC1, params);
  const ScalarField p = field("p1");
  const auto free = HamiltonianSystem::from_expr("p1^2/2 + 0.3*z + q1^2", 1);
  testing::Rng rng(14);
  for (int i = 0; i < 100; ++i) {
    const PhasePoint x = rng.point(4, -2, 2);
    CHECK(std::abs(quantity_residual(decay, sys, QuantityKind::dissipated, x)) < 1e-12);
    const Quantity ratio = combine_quantities(CombineOp::quotient, {{p, QuantityKind::dissipated},
                                                                   {decay, QuantityKind::dissipated}});
    CHECK(ratio.kind == QuantityKind::conserved);
    CHECK(std::abs(quantity_residual(ratio.field, sys, QuantityKind::conserved, x)) < 1e-10);
    const Quantity lin = combine_quantities(CombineOp::linear, {{p, QuantityKind::dissipated},
                                                               {decay, QuantityKind::dissipated}},
                                            {2.0, -3.0});
    CHECK(lin.kind == QuantityKind::dissipated);
    CHECK(std::abs(quantity_residual(lin.field, sys, QuantityKind::dissipated, x)) < 1e-10);
    // Time-independent H is dissipated.
    CHECK(std::abs(quantity_residual(free.H, free, QuantityKind::dissipated, x)) < 1e-12);
  }
  const Quantity prod = combine_quantities(CombineOp::product, {{decay, QuantityKind::dissipated},
                                                               {ScalarField::constant(1.0), QuantityKind::conserved}});
  CHECK(prod.kind == QuantityKind::dissipated);
  const PhasePoint x({0.4, 0.1, 0.2, 0.3});
  CHECK(prod.field(x.coords()) == decay(x.coords()));
  const PhasePoint origin({0, 0, 0, 0});
  const Quantity bad = combine_quantities(CombineOp::quotient, {{decay, QuantityKind::dissipated},
                                                               {p, QuantityKind::dissipated}});
  CHECK_THROWS_AS(bad.field(origin.coords()), DenominatorVanishes);
}

TEST_CASE("Noether correspondence") {
  const auto sys = HamiltonianSystem::from_expr("p1^2/2 + z", 1);
  const VectorField y = symmetry_from_dissipated(kC1, field("p1"));
  const PhasePoint x({0.2, -0.4, 1.1, 0.7});
  CHECK(y(x.coords()).c == std::vector<double>{0, 1, 0, 0});

  const ParamMap params{{"m", 1.0}, {"kappa", 1.0}};
  const ScalarField decay = field("exp(-kappa*t/m)", kC1, params);
  const TangentVector yf = symmetry_from_dissipated(kC1, decay)(x.coords());
  CHECK(yf[0] == 0.0);
  CHECK(yf[1] == 0.0);
  CHECK(yf[2] == 0.0);
  CHECK(yf[3] == doctest::Approx(-std::exp(-0.2)).epsilon(1e-15));

  testing::Rng rng(15);
  const ScalarField f = field("q1*p1 - sin(t)*z + p1^3");
  const ScalarField back = quantity_from_symmetry(kC1, symmetry_from_dissipated(kC1, f));
  for (int i = 0; i < 100; ++i) {
    const PhasePoint pt = rng.point(4, -2, 2);
    CHECK(std::abs(back(pt.coords()) - f(pt.coords())) < 1e-12);
  }
}
