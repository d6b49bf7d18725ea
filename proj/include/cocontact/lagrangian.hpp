#pragma once

#include <string>
#include <vector>

#include "cocontact/field.hpp"
#include "cocontact/hamiltonian.hpp"
#include "cocontact/phase_space.hpp"
#include "cocontact/symmetry.hpp"

namespace cocontact {

struct LagrangianSystem {
  ChartSpec chart;  // kind == lagrangian
  ScalarField L;
  ParamMap params;
  std::string label;

  static LagrangianSystem from_expr(std::string_view source, std::size_t n, ParamMap params = {});
};

/// Velocity-Hessian data at one point. Matrices are n x n, row-major.
struct LagrangianGeometry {
  double E_L = 0.0;
  CoVector theta_L;  // L_v dq
  CoVector eta_L;    // dz - L_v dq
  std::vector<double> W;
  std::vector<double> W_inv;
};

/// Throws RegularityError when |det W| < 1e-12 * max|W_ij|^n.
LagrangianGeometry lagrangian_geometry(const LagrangianSystem& sys, const PhasePoint& x);

/// (t, q, v, z) -> (t, q, L_v, z) on the hamiltonian chart.
PhasePoint legendre_map(const LagrangianSystem& sys, const PhasePoint& x);
/// Newton solve of L_v(t, q, v, z) = p starting from `v_guess` (p when
/// empty). Stops when the residual drops below 1e-12 * max(1, |p|_inf);
/// throws NewtonNoConvergence after 50 iterations.
PhasePoint legendre_inverse(const LagrangianSystem& sys, const PhasePoint& ham_point,
                            std::span<const double> v_guess = {});

struct LagrangianReeb {
  TangentVector R_t;
  TangentVector R_z;
};
LagrangianReeb reeb_fields_L(const LagrangianSystem& sys, const PhasePoint& x);

/// Herglotz-Euler-Lagrange field Gamma_L.
TangentVector herglotz_field(const LagrangianSystem& sys, const PhasePoint& x);
/// Gamma_L as a vector field. It needs third derivatives of L to
/// differentiate, so it is marked for finite differences.
VectorField herglotz_vector_field(const LagrangianSystem& sys);

/// S(V): the q-components of V moved into the v slots.
TangentVector vertical_endomorphism(const ChartSpec& chart, const TangentVector& v);

/// Base field Y^i(q) d/dq^i + zeta(z) d/dz on Q x R, given on the lagrangian
/// chart of the system it will be lifted into.
struct LiftSpec {
  std::vector<ScalarField> Y;
  ScalarField zeta = ScalarField::constant(0.0);

  static LiftSpec from_exprs(const ChartSpec& chart, const std::vector<std::string>& y,
                             std::string_view zeta = "0", const ParamMap& params = {});
  /// Throws DependenceViolation when an expression-backed component reads a
  /// coordinate it may not depend on. Opaque fields are trusted.
  void validate(const ChartSpec& chart) const;
};

enum class LiftKind { complete, vertical };

TangentVector lift(const LiftSpec& spec, LiftKind kind, const ChartSpec& chart, const PhasePoint& x);
VectorField lift_field(const LiftSpec& spec, LiftKind kind, const ChartSpec& chart);

struct ExtendedNaturalResult {
  /// Classes: extended_natural (Y^C(L) = zeta' L) and
  /// extended_natural_dissipation (Gamma_L f - L_z f = 0).
  SymmetryReport report;
  /// f = Y^V(L) - zeta.
  ScalarField f;
};

ExtendedNaturalResult check_extended_natural(const LiftSpec& spec, const LagrangianSystem& sys,
                                             const Sampler& sampler, Tolerance tol = {});

/// dissipated: Gamma_L(f) - L_z f; conserved: Gamma_L(f). The scale is the
/// sum of the magnitudes of the terms, for relative tolerances.
double lagrangian_quantity_residual(const ScalarField& f, const LagrangianSystem& sys, QuantityKind kind,
                                    const PhasePoint& x, double* scale = nullptr);

/// Infinitesimal: Gamma_L(zeta) - zeta L_z. Class "action_symmetry".
SymmetryReport check_action_symmetry(const ScalarField& zeta, const LagrangianSystem& sys,
                                     const Sampler& sampler, Tolerance tol = {});
/// Finite change of action z -> phi_z(t, q, v, z): Gamma_L(phi_z) - L o Phi.
SymmetryReport check_action_map(const ScalarField& phi_z, const LagrangianSystem& sys,
                                const Sampler& sampler, Tolerance tol = {});

/// H = E_L o FL^-1 with exact first and second derivatives. Each evaluation
/// re-solves the Legendre inverse, warm-started from the previous solution.
HamiltonianSystem to_hamiltonian(const LagrangianSystem& sys);

/// max |DFL Gamma_L(x) - X_H(FL(x))|.
double pushforward_residual(const LagrangianSystem& sys, const HamiltonianSystem& ham, const PhasePoint& x);

/// f o FL^-1 on the hamiltonian chart, up to first derivatives.
ScalarField pullback_to_hamiltonian(const LagrangianSystem& sys, const ScalarField& f);
/// g o FL on the lagrangian chart, up to first derivatives.
ScalarField pullback_to_lagrangian(const LagrangianSystem& sys, const ScalarField& g);

}  // namespace cocontact
