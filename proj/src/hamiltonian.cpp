#include "cocontact/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

#include "cocontact/errors.hpp"

namespace cocontact {

namespace {

void require_hamiltonian(const ChartSpec& chart) {
  if (chart.kind != ChartKind::hamiltonian)
    throw ChartMismatch("operation requires a hamiltonian chart");
}

}  // namespace

HamiltonianSystem HamiltonianSystem::from_expr(std::string_view source, std::size_t n, ParamMap params) {
  ChartSpec chart{n, ChartKind::hamiltonian};
  NameSet names;
  for (const auto& [k, v] : params) names.insert(k);
  const Expr e = parse(source, chart, names);
  return {chart, ScalarField::from_expr(e, params), std::move(params), std::string(source)};
}

const char* to_string(QuantityKind k) { return k == QuantityKind::dissipated ? "dissipated" : "conserved"; }

QuantityKind quantity_kind_from_string(std::string_view s) {
  if (s == "dissipated") return QuantityKind::dissipated;
  if (s == "conserved") return QuantityKind::conserved;
  throw std::invalid_argument("quantity kind must be 'dissipated' or 'conserved'");
}

TangentVector contact_hamiltonian_vector(const ChartSpec& chart, std::span<const double> x, const Jet& fj) {
  require_hamiltonian(chart);
  TangentVector v{std::vector<double>(chart.dim(), 0.0)};
  const std::size_t z = chart.z_index();
  v[0] = 1.0;
  double zc = -fj.value();
  for (std::size_t i = 0; i < chart.n; ++i) {
    const std::size_t q = chart.q_index(i), p = chart.fiber_index(i);
    v[q] = fj.grad(p);
    v[p] = -(fj.grad(q) + x[p] * fj.grad(z));
    zc += x[p] * fj.grad(p);
  }
  v[z] = zc;
  return v;
}

TangentVector hamiltonian_vector_field(const HamiltonianSystem& sys, const PhasePoint& x) {
  return contact_hamiltonian_vector(sys.chart, x.coords(), sys.H.jet(x.coords(), 1));
}

VectorField contact_hamiltonian_field(const ChartSpec& chart, const ScalarField& f) {
  require_hamiltonian(chart);
  if (f.max_order() < 1) throw std::logic_error("X_f needs a differentiable f");
  return VectorField(
      chart.dim(),
      [chart, f](std::span<const double> x, int order) {
        const std::size_t d = chart.dim(), z = chart.z_index();
        const Jet fj = f.jet(x, order + 1);
        const Jet fz = fj.partial(z);
        std::vector<Jet> out(d);
        out[0] = Jet::constant(1.0, d);
        Jet zc = -fj.truncated(order);
        for (std::size_t i = 0; i < chart.n; ++i) {
          const std::size_t q = chart.q_index(i), p = chart.fiber_index(i);
          const Jet pi = Jet::variable(x[p], d, p, order);
          const Jet fp = fj.partial(p);
          out[q] = fp;
          out[p] = -(fj.partial(q) + pi * fz);
          zc += pi * fp;
        }
        out[z] = zc;
        return out;
      },
      f.max_order() - 1, "X[" + f.label() + "]");
}

VectorField hamiltonian_field(const HamiltonianSystem& sys) {
  return contact_hamiltonian_field(sys.chart, sys.H).relabeled("X_H");
}

double FieldEquationResiduals::max_abs() const {
  double m = std::max(std::abs(r2), std::abs(r3));
  return std::max(m, cocontact::max_abs(r1.c));
}

FieldEquationResiduals field_equation_residuals(const HamiltonianSystem& sys, const PhasePoint& x) {
  return field_equation_residuals(sys, x, hamiltonian_vector_field(sys, x));
}

FieldEquationResiduals field_equation_residuals(const HamiltonianSystem& sys, const PhasePoint& x,
                                                const TangentVector& X) {
  const ChartSpec& chart = sys.chart;
  const Jet h = sys.H.jet(x.coords(), 1);
  const double rz = h.grad(chart.z_index()), rt = h.grad(0);
  const CoVector eta = eta_form(chart, x);
  CoVector r1 = contract_deta(chart, X);
  for (std::size_t k = 0; k < chart.dim(); ++k) {
    double rhs = h.grad(k) - rz * eta[k];
    if (k == 0) rhs -= rt;
    r1[k] -= rhs;
  }
  return {r1, eta_pair(chart, x, X) + h.value(), tau_pair(X) - 1.0};
}

double jacobi_bracket(const ScalarField& f, const ScalarField& g, const ChartSpec& chart,
                      const PhasePoint& x) {
  const Jet fj = f.jet(x.coords(), 1), gj = g.jet(x.coords(), 1);
  const TangentVector xg = contact_hamiltonian_vector(chart, x.coords(), gj);
  double xgf = 0.0;
  for (std::size_t k = 0; k < chart.dim(); ++k) xgf += xg[k] * fj.grad(k);
  return -xgf - gj.grad(chart.z_index()) * fj.value() + fj.grad(0);
}

double quantity_residual(const ScalarField& f, const HamiltonianSystem& sys, QuantityKind kind,
                         const PhasePoint& x) {
  const TangentVector xh = hamiltonian_vector_field(sys, x);
  const Jet fj = f.jet(x.coords(), 1);
  double r = 0.0;
  for (std::size_t k = 0; k < xh.dim(); ++k) r += xh[k] * fj.grad(k);
  if (kind == QuantityKind::dissipated) r += sys.H.jet(x.coords(), 1).grad(sys.chart.z_index()) * fj.value();
  return r;
}

double quantity_residual_scale(const ScalarField& f, const HamiltonianSystem& sys, const PhasePoint& x) {
  const TangentVector xh = hamiltonian_vector_field(sys, x);
  const Jet fj = f.jet(x.coords(), 1);
  double s = std::abs(sys.H.jet(x.coords(), 1).grad(sys.chart.z_index()) * fj.value());
  for (std::size_t k = 0; k < xh.dim(); ++k) s += std::abs(xh[k] * fj.grad(k));
  return s;
}

VectorField symmetry_from_dissipated(const ChartSpec& chart, const ScalarField& f) {
  return (contact_hamiltonian_field(chart, f) - VectorField::constant(reeb_t(chart), "R_t"))
      .relabeled("X[" + f.label() + "] - R_t");
}

ScalarField quantity_from_symmetry(const ChartSpec& chart, const VectorField& y) {
  require_hamiltonian(chart);
  return ScalarField(
      [chart, y](std::span<const double> x, int order) {
        const auto js = y.jets(x, order);
        Jet e = js[chart.z_index()];
        for (std::size_t i = 0; i < chart.n; ++i) {
          const std::size_t p = chart.fiber_index(i);
          e -= Jet::variable(x[p], chart.dim(), p, order) * js[chart.q_index(i)];
        }
        return -e;
      },
      y.max_order(), "-eta(" + y.label() + ")");
}

Quantity combine_quantities(CombineOp op, const std::vector<Quantity>& inputs,
                            const std::vector<double>& coeffs) {
  using K = QuantityKind;
  switch (op) {
    case CombineOp::quotient: {
      if (inputs.size() != 2) throw std::invalid_argument("quotient takes two quantities");
      const K a = inputs[0].kind, b = inputs[1].kind;
      if (a == K::conserved && b == K::dissipated)
        throw std::invalid_argument("conserved / dissipated has no registered kind");
      return {inputs[0].field / inputs[1].field, a == b ? K::conserved : K::dissipated};
    }
    case CombineOp::product: {
      if (inputs.size() != 2) throw std::invalid_argument("product takes two quantities");
      const K a = inputs[0].kind, b = inputs[1].kind;
      if (a == K::dissipated && b == K::dissipated)
        throw std::invalid_argument("product of two dissipated quantities has no registered kind");
      return {inputs[0].field * inputs[1].field, a == b ? K::conserved : K::dissipated};
    }
    case CombineOp::linear: {
      if (inputs.empty()) throw std::invalid_argument("linear combination of nothing");
      const K kind = inputs.front().kind;
      for (const auto& q : inputs)
        if (q.kind != kind) throw std::invalid_argument("linear combination mixes quantity kinds");
      // Conserved combinations may carry one extra constant term.
      const bool offset = coeffs.size() == inputs.size() + 1;
      if (coeffs.size() != inputs.size() && !(offset && kind == K::conserved))
        throw std::invalid_argument("coefficient count does not match inputs");
      ScalarField sum = coeffs[0] * inputs[0].field;
      for (std::size_t i = 1; i < inputs.size(); ++i) sum = sum + coeffs[i] * inputs[i].field;
      if (offset) sum = sum + ScalarField::constant(coeffs.back());
      return {sum, kind};
    }
  }
  throw std::logic_error("unknown combine op");
}

}  // namespace cocontact
