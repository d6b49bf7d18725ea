#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cocontact/hamiltonian.hpp"
#include "cocontact/integrate.hpp"
#include "cocontact/lagrangian.hpp"
#include "cocontact/symmetry.hpp"

namespace cocontact {

/// Raw parameter text as given on the command line ("m" -> "1+t").
using ParamText = std::map<std::string, std::string, std::less<>>;

struct ParamSpec {
  enum class Type { number, expression };
  std::string name;
  Type type = Type::number;
  std::string default_value;
  /// For expressions: the variables it may read, e.g. "t" or "t,s,z".
  std::string variables;
  std::string help;
};

struct RegisteredQuantity {
  std::string name;
  QuantityKind kind = QuantityKind::dissipated;
  ScalarField field;
  ChartKind side = ChartKind::hamiltonian;
  /// Relative tolerance for the along-trajectory laws. Quantities built on
  /// numerical quadrature get 1e-6.
  double tol = 1e-6;
};

/// A vector field or finite map on the hamiltonian chart with the verdicts
/// the classifier has to reproduce.
struct RegisteredSymmetry {
  std::string name;
  std::optional<VectorField> field;
  std::optional<DiffeoSpec> map;
  DiffeoKind map_kind = DiffeoKind::generalized;
  std::optional<CartanWitness> cartan;
  std::map<std::string, Verdict, std::less<>> expected;
};

/// Lifted base field on the lagrangian chart; expected to be an extended
/// natural symmetry.
struct RegisteredLift {
  std::string name;
  LiftSpec spec;
};

/// zeta with Gamma_L(zeta) = zeta L_z.
struct RegisteredAction {
  std::string name;
  ScalarField zeta;
};

struct ExampleEntry {
  std::string name;
  std::string description;
  std::vector<ParamSpec> schema;
  ParamText params;  // resolved, defaults filled in

  /// The chart the example is stated on. Mechanical examples carry both
  /// systems; the hamiltonian one is the explicit Legendre transform.
  ChartKind primary = ChartKind::hamiltonian;
  std::optional<HamiltonianSystem> hamiltonian;
  std::optional<LagrangianSystem> lagrangian;

  std::vector<RegisteredQuantity> quantities;
  std::vector<RegisteredSymmetry> symmetries;
  std::vector<RegisteredLift> lifts;
  std::vector<RegisteredAction> actions;
  std::vector<Observable> extra_observables;

  /// Points that leave the domain (origin, collisions). Same coordinates on
  /// both charts.
  std::function<bool(std::span<const double>)> exclude;
  // Sampling box per coordinate; identical on both charts.
  std::vector<double> lo, hi;

  /// Default run of the primary system.
  PhasePoint initial;
  double t1 = 1.0;
  IntegratorConfig integrator;

  std::size_t dof() const;
  const ChartSpec& chart(ChartKind side) const;
  Sampler sampler(std::size_t count = 100, std::uint64_t seed = 1) const;
  /// Primary-side quantities followed by the extra observables.
  std::vector<Observable> observables() const;
};

/// Throws UnknownExample or ParamSchemaError (unknown key, bad number,
/// non-positive mass, negative kappa, expression reading a variable it
/// should not).
ExampleEntry build_example(std::string_view name, const ParamText& params = {});

std::vector<std::string> example_names();

/// Classifier run for one registered symmetry (plus the Cartan check when a
/// witness is registered), merged into one report.
SymmetryReport classify_registered(const RegisteredSymmetry& s, const HamiltonianSystem& sys,
                                   const Sampler& sampler, Tolerance tol = {});
/// Expected classes whose observed verdict differs; empty when reproduced.
std::vector<std::string> verdict_mismatches(const RegisteredSymmetry& s, const SymmetryReport& report);
/// "name  dof=N  side=...  quantities=...  symmetries=..."
std::string describe(const ExampleEntry& e);

}  // namespace cocontact
