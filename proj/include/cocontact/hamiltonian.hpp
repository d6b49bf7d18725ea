#pragma once

#include <string>
#include <vector>

#include "cocontact/field.hpp"
#include "cocontact/phase_space.hpp"

namespace cocontact {

struct HamiltonianSystem {
  ChartSpec chart;
  ScalarField H;
  ParamMap params;
  std::string label;

  /// Parse `source` on a hamiltonian chart with n degrees of freedom.
  static HamiltonianSystem from_expr(std::string_view source, std::size_t n, ParamMap params = {});
};

enum class QuantityKind { dissipated, conserved };

const char* to_string(QuantityKind k);
QuantityKind quantity_kind_from_string(std::string_view s);

/// Absolute plus relative residual tolerance.
struct Tolerance {
  double abs = 1e-9;
  double rel = 1e-9;
  bool accepts(double residual, double scale) const { return residual <= abs + rel * scale; }
};

/// X_f for an arbitrary function f (f plays the role of the Hamiltonian).
/// `fj` must be an order >= 1 jet of f at x.
TangentVector contact_hamiltonian_vector(const ChartSpec& chart, std::span<const double> x, const Jet& fj);

TangentVector hamiltonian_vector_field(const HamiltonianSystem& sys, const PhasePoint& x);
/// X_f as a vector field. Its max order is one below f's.
VectorField contact_hamiltonian_field(const ChartSpec& chart, const ScalarField& f);
VectorField hamiltonian_field(const HamiltonianSystem& sys);

struct FieldEquationResiduals {
  CoVector r1;  // i_X d eta - (dH - R_z(H) eta - R_t(H) tau)
  double r2;    // eta(X) + H
  double r3;    // tau(X) - 1
  double max_abs() const;
};

FieldEquationResiduals field_equation_residuals(const HamiltonianSystem& sys, const PhasePoint& x);
/// Residuals of an arbitrary candidate X against the equations for H.
FieldEquationResiduals field_equation_residuals(const HamiltonianSystem& sys, const PhasePoint& x,
                                                const TangentVector& X);

/// {f, g} = -X_g(f) - R_z(g) f + R_t(f).
double jacobi_bracket(const ScalarField& f, const ScalarField& g, const ChartSpec& chart,
                      const PhasePoint& x);

/// dissipated: X_H(f) + R_z(H) f; conserved: X_H(f).
double quantity_residual(const ScalarField& f, const HamiltonianSystem& sys, QuantityKind kind,
                         const PhasePoint& x);
/// Magnitude of the terms entering quantity_residual, for relative tolerances.
double quantity_residual_scale(const ScalarField& f, const HamiltonianSystem& sys, const PhasePoint& x);

/// Y = X_f - R_t.
VectorField symmetry_from_dissipated(const ChartSpec& chart, const ScalarField& f);
/// f = -eta(Y).
ScalarField quantity_from_symmetry(const ChartSpec& chart, const VectorField& y);

struct Quantity {
  ScalarField field;
  QuantityKind kind;
};

enum class CombineOp { quotient, product, linear };

/// quotient(f1, f2), product(f1, f2) or linear sum coeffs[i] * f_i, tagged
/// with the kind the combination is expected to have.
Quantity combine_quantities(CombineOp op, const std::vector<Quantity>& inputs,
                            const std::vector<double>& coeffs = {});

}  // namespace cocontact
