#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cocontact/field.hpp"
#include "cocontact/hamiltonian.hpp"

namespace cocontact {

enum class Verdict { pass, fail, not_applicable };
const char* to_string(Verdict v);

/// Uniform sampling over an axis-aligned box in chart coordinates.
struct Sampler {
  std::vector<double> lo, hi;
  std::size_t count = 100;
  std::uint64_t seed = 1;
  /// Points for which this returns true are redrawn.
  std::function<bool(std::span<const double>)> exclude;

  static Sampler box(const ChartSpec& chart, double lo, double hi, std::size_t count = 100,
                     std::uint64_t seed = 1);
  /// Deterministic for a given seed. Throws SampleDomainError if the
  /// exclusion predicate rejects nearly everything.
  std::vector<PhasePoint> draw() const;
};

struct Range {
  double min = 0.0;
  double max = 0.0;
};

struct ClassResult {
  std::string name;
  Verdict verdict = Verdict::not_applicable;
  double max_residual = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::optional<Range> rho_estimate;
};

struct SymmetryReport {
  std::string subject;
  std::string system;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  Tolerance tol;
  std::vector<ClassResult> classes;
  std::vector<std::string> assumptions;
  bool lattice_consistent = true;

  const ClassResult& at(std::string_view name) const;
  Verdict verdict(std::string_view name) const { return at(name).verdict; }
  /// Pretty-printed JSON with a fixed key order.
  std::string to_json() const;
};

// Class names used in reports.
inline constexpr std::string_view kGeneralized = "generalized_dynamical";
inline constexpr std::string_view kDynamical = "dynamical";
inline constexpr std::string_view kConformalCocontact = "conformal_cocontactomorphism";
inline constexpr std::string_view kConformalHamiltonian = "conformal_hamiltonian";
inline constexpr std::string_view kStrictHamiltonian = "strict_hamiltonian";
inline constexpr std::string_view kCartan = "cartan";

/// L_Y eta = i_Y d eta + d(eta(Y)), in the d-basis.
CoVector lie_derivative_eta(const ChartSpec& chart, const VectorField& y, const PhasePoint& x);

SymmetryReport classify_infinitesimal(const VectorField& y, const HamiltonianSystem& sys,
                                      const Sampler& sampler, Tolerance tol = {});

struct CartanWitness {
  ScalarField rho;
  ScalarField g;
};

struct CartanResult {
  /// Classes: cartan, cartan_quantity_dissipated, cartan_reduced_generalized.
  SymmetryReport report;
  /// f = g - eta(Y).
  ScalarField f;
  /// Z = Y - g R_z.
  VectorField Z;
};

CartanResult check_cartan(const VectorField& y, const CartanWitness& witness,
                          const HamiltonianSystem& sys, const Sampler& sampler, Tolerance tol = {});

enum class DiffeoKind { dynamical, generalized, conformal_hamiltonian, strict_hamiltonian };
DiffeoKind diffeo_kind_from_string(std::string_view s);

struct DiffeoSpec {
  using Map = std::function<std::vector<double>(std::span<const double>)>;
  Map forward;
  /// Optional row-major Jacobian of `forward`; finite differences otherwise.
  Map jacobian;
  double fd_step = 0.0;
  std::string label;

  static DiffeoSpec from_exprs(const std::vector<Expr>& comps, const ParamMap& params = {},
                               std::string label = {});
  std::vector<double> jacobian_at(std::span<const double> x) const;
};

SymmetryReport check_diffeomorphism(const DiffeoSpec& phi, const HamiltonianSystem& sys,
                                    const Sampler& sampler, DiffeoKind kind, Tolerance tol = {});

/// Run `fn` for every sample, converting evaluation failures into
/// SampleDomainError that names the offending sample.
void for_each_sample(const std::vector<PhasePoint>& pts,
                     const std::function<void(std::size_t, const PhasePoint&)>& fn);

}  // namespace cocontact
