#include <cmath>

#include "cocontact/errors.hpp"
#include "cocontact/integrate.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cocontact;

namespace {

const ParamMap kUnit{{"m", 1.0}, {"kappa", 1.0}};

HamiltonianSystem friction_h() { return HamiltonianSystem::from_expr("p1^2/(2*m) + kappa*z/m", 1, kUnit); }

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

// Closed form at m = kappa = 1, p0 = 1, z0 = 0.
double p_exact(double t) { return std::exp(-t); }
double z_exact(double t) { return std::exp(-t) * 0.5 * (1 - std::exp(-t)); }

}  // namespace

TEST_CASE("closed-form reproduction with RK4 and the adaptive pair") {
  const auto sys = friction_h();
  const PhasePoint x0({0, 0, 1, 0});
  const Trajectory tr = integrate(sys, x0, 1.0, rk4(1e-3));
  CHECK(tr.steps == 1000);
  CHECK(tr.back().t() == 1.0);
  CHECK(std::abs(tr.back().fiber(0) - p_exact(1)) / p_exact(1) < 1e-9);
  CHECK(std::abs(tr.back().z() - z_exact(1)) / z_exact(1) < 1e-8);
  for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr.points[k].t() > tr.points[k - 1].t());

  const Trajectory ad = integrate(sys, x0, 1.0, adaptive(1e-11));
  CHECK(ad.back().t() == 1.0);
  CHECK(std::abs(ad.back().fiber(0) - p_exact(1)) < 1e-9);
  CHECK(std::abs(ad.back().z() - z_exact(1)) < 1e-9);
  CHECK(std::abs(ad.back().q(0) - tr.back().q(0)) < 1e-9);
}

TEST_CASE("RK4 converges at fourth order") {
  const auto sys = friction_h();
  const PhasePoint x0({0, 0, 1, 0});
  auto err = [&](double h) {
    const auto tr = integrate(sys, x0, 1.0, rk4(h));
    return std::abs(tr.back().fiber(0) - p_exact(1)) + std::abs(tr.back().z() - z_exact(1));
  };
  const double factor = err(0.1) / err(0.05);
  CHECK(factor >= 12.0);
  CHECK(factor <= 20.0);
}

TEST_CASE("zero Hamiltonian leaves the state fixed") {
  const auto sys = HamiltonianSystem::from_expr("0", 2);
  const PhasePoint x0({0.5, 1, 2, 3, 4, 5});
  for (const auto& cfg : {rk4(0.1), adaptive(1e-8)}) {
    const auto tr = integrate(sys, x0, 2.0, cfg);
    for (const auto& p : tr.points)
      for (std::size_t k = 1; k < 6; ++k) CHECK(p.coords()[k] == x0.coords()[k]);
  }
}

TEST_CASE("blow-up is reported as a step failure") {
  // z' = -z^2 from z = -1 explodes at t = 1.
  const auto sys = HamiltonianSystem::from_expr("z^2", 1);
  CHECK_THROWS_AS(integrate(sys, PhasePoint({0, 0, 0, -1}), 2.0, adaptive(1e-8)), StepFailure);
}

TEST_CASE("monitor") {
  const auto sys = friction_h();
  const auto tr = integrate(sys, PhasePoint({0, 0, 1, 0}), 2.0, rk4(1e-3));
  const auto series = monitor(tr, {{"H", sys.H}, {"one", ScalarField::constant(1.0)}});
  REQUIRE(series.size() == 2);
  for (std::size_t k = 0; k < tr.size(); ++k) {
    // H(t) = exp(-t)/2 along this solution.
    CHECK(std::abs(series[0].second[k] - 0.5 * std::exp(-tr.points[k].t())) < 1e-9);
    CHECK(series[1].second[k] == 1.0);
  }
  CHECK(series[0].second.back() < series[0].second.front());
}

TEST_CASE("finite-difference weights") {
  const std::vector<double> u{-2, -1, 0, 1, 2};
  const auto w = derivative_weights(0.0, u);
  const std::vector<double> expect{1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
  for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(w[i] - expect[i]) < 1e-14);
  // Exact on quartics over an uneven grid, including one-sided stencils.
  const std::vector<double> g{0.0, 0.1, 0.25, 0.3, 0.55};
  auto f = [](double x) { return 1 - 2 * x + 3 * x * x - x * x * x + 0.5 * x * x * x * x; };
  auto df = [](double x) { return -2 + 6 * x - 3 * x * x + 2 * x * x * x; };
  for (double x0 : {0.0, 0.25, 0.55}) {
    const auto v = derivative_weights(x0, g);
    double s = 0.0;
    for (std::size_t i = 0; i < 5; ++i) s += v[i] * f(g[i]);
    CHECK(std::abs(s - df(x0)) < 1e-11);
  }
}

TEST_CASE("dissipation laws along trajectories") {
  const auto sys = friction_h();
  const auto tr = integrate(sys, PhasePoint({0, 0.3, 1, 0.2}), 3.0, adaptive(1e-10));
  const ChartSpec c{1, ChartKind::hamiltonian};
  const auto p = verify_dissipation_along(tr, ScalarField::from_expr(parse("p1", c)), sys);
  CHECK(p.pass);
  CHECK(p.max_integral < 1e-8);
  CHECK(verify_dissipation_along(tr, ScalarField::constant(0.0), sys).pass);
  CHECK_FALSE(verify_dissipation_along(tr, ScalarField::from_expr(parse("q1", c)), sys).pass);
  // p / exp(-t) is conserved.
  const auto ratio = ScalarField::from_expr(parse("p1*exp(t)", c));
  CHECK(verify_dissipation_along(tr, ratio, sys, QuantityKind::conserved).pass);
  CHECK(p.to_json().find("\"verdict\": \"pass\"") != std::string::npos);
}

TEST_CASE("Lagrangian trajectories") {
  const auto lag = LagrangianSystem::from_expr("(1+t)*v1^2/2 - 0.5*q1^2 - 0.3*z", 1);
  const PhasePoint x0({0, 1, 0.5, 0});
  const auto tr = integrate(lag, x0, 3.0, adaptive(1e-10));
  CHECK(herglotz_residuals(tr, lag).max_abs() < 1e-6);

  // The Legendre image of the trajectory is the Hamiltonian trajectory.
  const auto ham = to_hamiltonian(lag);
  const auto th = integrate(ham, legendre_map(lag, x0), 3.0, adaptive(1e-10));
  const PhasePoint end = legendre_map(lag, tr.back());
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(end.coords()[k] - th.back().coords()[k]) < 1e-7);

  // Perturbing the path breaks the residuals.
  Trajectory bad = tr;
  for (auto& p : bad.points) p[2] += 0.01 * std::sin(5 * p.t());
  CHECK(herglotz_residuals(bad, lag).momentum > 1e-3);
}

TEST_CASE("serialization") {
  const auto sys = friction_h();
  IntegratorConfig cfg = rk4(0.25);
  const auto tr = integrate(sys, PhasePoint({0, 0, 1, 0}), 1.0, cfg);
  const auto obs = monitor(tr, {{"p1", ScalarField::from_expr(parse("p1", sys.chart))}});
  const std::string csv = tr.to_csv(obs);
  CHECK(csv.rfind("t,q1,p1,z,p1\n0,0,1,0,1\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
  const std::string js = tr.to_json(obs);
  CHECK(js.find("\"schema_version\": 1") != std::string::npos);
  CHECK(js.find("\"method\": \"rk4\"") != std::string::npos);
  CHECK(js == integrate(sys, PhasePoint({0, 0, 1, 0}), 1.0, cfg).to_json(obs));

  cfg.stride = 2;
  CHECK(integrate(sys, PhasePoint({0, 0, 1, 0}), 1.0, cfg).size() == 3);
  cfg.dt = -1;
  CHECK_THROWS_AS(integrate(sys, PhasePoint({0, 0, 1, 0}), 1.0, cfg), std::invalid_argument);
}
