#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cocontact/expr.hpp"
#include "cocontact/jet.hpp"
#include "cocontact/phase_space.hpp"

namespace cocontact {

/// Scalar function on a chart, evaluable as a jet up to max_order().
///
/// The evaluator receives the point in chart order and the requested order
/// and must return a jet of that order over point.size() coordinates.
class ScalarField {
 public:
  using Fn = std::function<Jet(std::span<const double>, int)>;

  ScalarField() = default;
  ScalarField(Fn fn, int max_order, std::string label = {});

  /// Parameters are bound once at construction.
  static ScalarField from_expr(const Expr& e, const ParamMap& params = {}, std::string label = {});
  static ScalarField constant(double c);

  Jet jet(std::span<const double> point, int order) const;
  double operator()(std::span<const double> point) const;

  int max_order() const noexcept { return max_order_; }
  const std::string& label() const noexcept { return label_; }
  /// Source expression, when the field was built from one.
  const std::optional<Expr>& expr() const noexcept { return expr_; }
  bool empty() const noexcept { return !fn_; }

 private:
  Fn fn_;
  int max_order_ = 0;
  std::string label_;
  std::optional<Expr> expr_;
};

/// d f / d x^k as a field (one order lower).
ScalarField partial(const ScalarField& f, std::size_t k);
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double a, const ScalarField& b);
/// Throws DenominatorVanishes when |b| < 1e-12 at an evaluation point.
ScalarField operator/(const ScalarField& a, const ScalarField& b);

enum class Differentiability { ad2, fd };

/// Vector field given by d component jets. Fields marked `fd`, or whose
/// max_order is 0, are differentiated by finite differences.
class VectorField {
 public:
  using BatchFn = std::function<std::vector<Jet>(std::span<const double>, int)>;

  VectorField() = default;
  VectorField(std::size_t dim, BatchFn fn, int max_order, std::string label = {},
              Differentiability diff = Differentiability::ad2);

  static VectorField from_components(std::vector<ScalarField> comps, std::string label = {});
  static VectorField from_exprs(const std::vector<Expr>& comps, const ParamMap& params = {},
                                std::string label = {});
  static VectorField constant(TangentVector v, std::string label = {});

  std::size_t dim() const noexcept { return dim_; }
  int max_order() const noexcept { return max_order_; }
  Differentiability differentiability() const noexcept { return diff_; }
  const std::string& label() const noexcept { return label_; }
  bool uses_ad() const noexcept { return diff_ == Differentiability::ad2 && max_order_ >= 1; }

  std::vector<Jet> jets(std::span<const double> point, int order) const;
  TangentVector operator()(std::span<const double> point) const;
  ScalarField component(std::size_t k) const;

  /// Row-major d x d Jacobian, rows = components. AD when available, FD
  /// otherwise.
  std::vector<double> jacobian(std::span<const double> point) const;

  /// Same field, forced onto the finite-difference route.
  VectorField as_fd() const;
  VectorField relabeled(std::string label) const;

 private:
  std::size_t dim_ = 0;
  BatchFn fn_;
  int max_order_ = 0;
  std::string label_;
  Differentiability diff_ = Differentiability::ad2;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
/// Pointwise product f * Y.
VectorField operator*(const ScalarField& f, const VectorField& y);

/// X(f) at a point.
double apply(const VectorField& x, const ScalarField& f, std::span<const double> point);
/// X(f) as a field; max order min(X, f - 1).
ScalarField apply_field(const VectorField& x, const ScalarField& f);

/// [Y, X]^k = Y(X^k) - X(Y^k).
TangentVector lie_bracket(const VectorField& y, const VectorField& x, std::span<const double> point);
VectorField lie_bracket_field(const VectorField& y, const VectorField& x);

}  // namespace cocontact
