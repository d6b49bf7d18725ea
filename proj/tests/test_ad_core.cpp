#include <cmath>
#include <limits>

#include "cocontact/errors.hpp"
#include "cocontact/expr.hpp"
#include "cocontact/jet.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cocontact;

TEST_CASE("lift_point seeds unit gradients") {
  const std::vector<double> one{1.0};
  auto j = lift_point(one, 1);
  REQUIRE(j.size() == 1);
  CHECK(j[0].value() == 1.0);
  CHECK(j[0].grad(0) == 1.0);

  const std::vector<double> two{2.0, 3.0};
  auto k = lift_point(two, 2)[1];
  CHECK(k.value() == 3.0);
  CHECK(k.grad(0) == 0.0);
  CHECK(k.grad(1) == 1.0);
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) CHECK(k.hess(a, b) == 0.0);

  const std::vector<double> three{3.0};
  const Jet x = lift_point(three, 2)[0];
  const Jet sq = x * x;
  CHECK(sq.value() == 9.0);
  CHECK(sq.grad(0) == 6.0);
  CHECK(sq.hess(0, 0) == 2.0);
}

TEST_CASE("jet_apply elementary ops") {
  const Jet x0 = Jet::variable(0.0, 1, 0, 2);
  const Jet e = jet_apply(JetOp::exp, {x0});
  CHECK(e.value() == 1.0);
  CHECK(e.grad(0) == 1.0);
  CHECK(e.hess(0, 0) == 1.0);

  const Jet x = Jet::variable(2.0, 2, 0, 2), y = Jet::variable(3.0, 2, 1, 2);
  const Jet m = jet_apply(JetOp::mul, {x, y});
  CHECK(m.value() == 6.0);
  CHECK(m.grad(0) == 3.0);
  CHECK(m.grad(1) == 2.0);
  CHECK(m.hess(0, 0) == 0.0);
  CHECK(m.hess(0, 1) == 1.0);
  CHECK(m.hess(1, 0) == 1.0);
  CHECK(m.hess(1, 1) == 0.0);

  CHECK_THROWS_AS(jet_apply(JetOp::ln, {Jet::variable(-1.0, 1, 0, 1)}), DomainError);
  CHECK_THROWS_AS(jet_apply(JetOp::sqrt, {Jet::variable(-1.0, 1, 0, 1)}), DomainError);
  CHECK_THROWS_AS(jet_apply(JetOp::div, {x, Jet::constant(0.0, 2)}), DomainError);
  CHECK_THROWS_AS(jet_apply(JetOp::pow, {Jet::constant(0.0, 2), Jet::constant(-1.0, 2)}), DomainError);
}

TEST_CASE("abs at zero is flagged non-smooth with zero subgradient") {
  const Jet a = jet_apply(JetOp::abs, {Jet::variable(0.0, 1, 0, 2)});
  CHECK(a.value() == 0.0);
  CHECK(a.grad(0) == 0.0);
  CHECK(a.nonsmooth());
  CHECK_FALSE(jet_apply(JetOp::abs, {Jet::variable(-2.0, 1, 0, 2)}).nonsmooth());
}

TEST_CASE("order-0 and order-1 jets carry no higher derivatives") {
  const Jet c = Jet::constant(4.0, 3);
  CHECK(c.order() == 0);
  CHECK(c.gradient() == std::vector<double>(3, 0.0));
  const Jet v = Jet::variable(1.5, 3, 2, 1);
  const Jet s = sin(v) * v;
  CHECK(s.order() == 1);
  CHECK(s.hessian() == std::vector<double>(9, 0.0));
}

TEST_CASE("multiplication commutes bitwise") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = rng.vec(4, -2, 2);
    const auto js = lift_point(p, 2);
    const Jet a = sin(js[0]) * js[1] + exp(js[2] * js[3]);
    const Jet b = cos(js[1] - js[3]) / (2.0 + js[0] * js[0]);
    const Jet ab = jet_apply(JetOp::mul, {a, b}), ba = jet_apply(JetOp::mul, {b, a});
    CHECK(ab.value() == ba.value());
    CHECK(ab.gradient() == ba.gradient());
    CHECK(ab.hessian() == ba.hessian());
  }
}

TEST_CASE("hessians are exactly symmetric and exact for quadratics") {
  testing::Rng rng(3);
  const auto p = rng.vec(5, -3, 3);
  const auto js = lift_point(p, 2);
  const Jet q = 3.0 * js[0] * js[1] - 2.0 * js[2] * js[2] + js[3] * js[4] + 0.5 * js[0] * js[0];
  CHECK(q.hess(0, 1) == 3.0);
  CHECK(q.hess(1, 0) == 3.0);
  CHECK(q.hess(2, 2) == -4.0);
  CHECK(q.hess(3, 4) == 1.0);
  CHECK(q.hess(0, 0) == 1.0);
  const Jet w = exp(js[0] * js[1]) * log(2.0 + sin(js[2])) / sqrt(1.0 + js[3] * js[3]);
  for (std::size_t a = 0; a < 5; ++a)
    for (std::size_t b = 0; b < 5; ++b) CHECK(w.hess(a, b) == w.hess(b, a));
}

TEST_CASE("directional_derivative_fd") {
  const VectorMap sq = [](std::span<const double> x) { return std::vector<double>{x[0] * x[0]}; };
  const std::vector<double> x{3.0}, dir{1.0}, zero{0.0};
  CHECK(std::abs(directional_derivative_fd(sq, x, dir, 1e-3)[0] - 6.0) < 1e-10);
  CHECK(directional_derivative_fd(sq, x, zero, 1e-3)[0] == 0.0);

  // Components of X_H for H = p^2/2 + z in (t, x, p, z): (1, p, -p, p^2/2 - z).
  const VectorMap xh = [](std::span<const double> y) {
    return std::vector<double>{1.0, y[2], -y[2], 0.5 * y[2] * y[2] - y[3]};
  };
  const std::vector<double> pt{0.3, -0.7, 1.3, 0.4}, dp{0, 0, 1, 0};
  const auto col = directional_derivative_fd(xh, pt, dp);
  // Oracle: order-2 AD of the same components.
  const ChartSpec chart{1, ChartKind::hamiltonian};
  const Expr ez = parse("p1^2/2 - z", chart);
  const Jet jz = eval_jet(ez, PhasePoint(pt), {}, 2);
  CHECK(std::abs(col[0]) < 1e-12);
  CHECK(std::abs(col[1] - 1.0) < 1e-8);
  CHECK(std::abs(col[2] + 1.0) < 1e-8);
  CHECK(std::abs(col[3] - jz.grad(2)) < 1e-8);
}

TEST_CASE("AD against central finite differences on random expressions") {
  const ChartSpec chart{1, ChartKind::hamiltonian};
  const std::vector<std::string> vars{"t", "q1", "p1", "z"};
  testing::Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Expr e = parse(testing::random_expr(rng, 4, vars), chart);
    const auto x = rng.vec(4, -1.5, 1.5);
    const Jet j = eval_jet(e, PhasePoint(x), {}, 2);
    auto f = [&](std::vector<double> y) { return evaluate(e, y); };
    const double h = 1e-4;
    for (std::size_t a = 0; a < 4; ++a) {
      auto xp = x, xm = x, xpp = x, xmm = x;
      xp[a] += h, xm[a] -= h, xpp[a] += 2 * h, xmm[a] -= 2 * h;
      const double g = (8 * (f(xp) - f(xm)) - (f(xpp) - f(xmm))) / (12 * h);
      worst = std::max(worst, testing::rel_dev(j.grad(a), g));
      for (std::size_t b = 0; b < 4; ++b) {
        auto pp = x, pm = x, mp = x, mm = x;
        pp[a] += h, pp[b] += h;
        pm[a] += h, pm[b] -= h;
        mp[a] -= h, mp[b] += h;
        mm[a] -= h, mm[b] -= h;
        const double hab = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
        worst = std::max(worst, testing::rel_dev(j.hess(a, b), hab));
      }
    }
  }
  CHECK(worst < 1e-6);
}
