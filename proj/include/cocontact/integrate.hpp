#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cocontact/hamiltonian.hpp"
#include "cocontact/lagrangian.hpp"

namespace cocontact {

enum class Method { rk4, adaptive45 };
const char* to_string(Method m);

struct IntegratorConfig {
  Method method = Method::rk4;
  double dt = 1e-3;  // rk4 step
  double rtol = 1e-10;
  double atol = 1e-10;
  /// Upper bound on adaptive steps; 0 means unbounded.
  double max_step = 0.0;
  std::size_t max_steps = 1000000;
  /// Record every stride-th accepted step (the last step is always kept).
  std::size_t stride = 1;

  /// Throws std::invalid_argument on non-positive steps or tolerances.
  void validate() const;
};

/// Accepted points of an integral curve. t is both the curve parameter and
/// the first coordinate of every point.
struct Trajectory {
  ChartSpec chart;
  std::vector<PhasePoint> points;
  std::string system;
  IntegratorConfig config;
  std::size_t steps = 0;     // accepted
  std::size_t rejected = 0;  // adaptive only

  std::size_t size() const { return points.size(); }
  const PhasePoint& back() const { return points.back(); }

  /// CSV with header t,q1..qn,p1..pn|v1..vn,z followed by the named columns,
  /// values printed with 17 significant digits.
  std::string to_csv(const std::vector<std::pair<std::string, std::vector<double>>>& extra = {}) const;
  std::string to_json(const std::vector<std::pair<std::string, std::vector<double>>>& extra = {}) const;
};

/// Right-hand side of the flow: full tangent vector at a point (t-slot 1).
using FlowField = std::function<TangentVector(const PhasePoint&)>;

Trajectory integrate_flow(const ChartSpec& chart, const FlowField& field, const PhasePoint& initial, double t1,
                          const IntegratorConfig& cfg, std::string label = {});
/// Flow of X_H from initial.t() to t1.
Trajectory integrate(const HamiltonianSystem& sys, const PhasePoint& initial, double t1, const IntegratorConfig& cfg);
/// Flow of Gamma_L from initial.t() to t1.
Trajectory integrate(const LagrangianSystem& sys, const PhasePoint& initial, double t1, const IntegratorConfig& cfg);

using Observable = std::pair<std::string, ScalarField>;
using Series = std::pair<std::string, std::vector<double>>;

std::vector<Series> monitor(const Trajectory& traj, const std::vector<Observable>& observables);

struct AlongReport {
  std::string quantity;
  QuantityKind kind = QuantityKind::dissipated;
  bool pass = false;
  double tol = 1e-6;
  /// max |X(f) + rate f| / max(1, |terms|) over samples.
  double max_differential = 0.0;
  /// max |f(t) - f(t0) exp(-int rate)| / |f(t0) exp(-int rate)|.
  double max_integral = 0.0;
  std::size_t samples = 0;

  std::string to_json() const;
};

/// Differential and integral dissipation laws along a trajectory of X_H. The
/// rate is R_z(H); conserved quantities use rate 0.
AlongReport verify_dissipation_along(const Trajectory& traj, const ScalarField& f, const HamiltonianSystem& sys,
                                     QuantityKind kind = QuantityKind::dissipated, double tol = 1e-6);
/// Same along Gamma_L with rate -L_z.
AlongReport verify_dissipation_along(const Trajectory& traj, const ScalarField& f, const LagrangianSystem& sys,
                                     QuantityKind kind = QuantityKind::dissipated, double tol = 1e-6);

struct HerglotzResiduals {
  double momentum = 0.0;  // max |d/dt L_v - L_q - L_z L_v|
  double action = 0.0;    // max |dz/dt - L|
  double max_abs() const { return std::max(momentum, action); }
};

/// Herglotz-Euler-Lagrange residuals with time derivatives taken by 9-point
/// finite-difference stencils over the recorded samples. Needs >= 9 points.
HerglotzResiduals herglotz_residuals(const Trajectory& traj, const LagrangianSystem& sys);

/// Weights w such that f'(x0) ~ sum w_i f(x_i) on an arbitrary grid.
std::vector<double> derivative_weights(double x0, std::span<const double> x);

}  // namespace cocontact
