#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

namespace cocontact {

/// Value of a scalar field together with its exact gradient and Hessian,
/// truncated at `order` (0, 1 or 2), with respect to `dim` coordinates.
///
/// Order-0 jets carry no derivative storage and behave as constants; order-1
/// jets carry a gradient only. The Hessian is stored densely and kept exactly
/// symmetric (only the upper triangle is computed and then mirrored).
class Jet {
 public:
  Jet() = default;

  static Jet constant(double value, std::size_t dim = 0);
  /// Coordinate `index` seeded with a unit gradient.
  static Jet variable(double value, std::size_t dim, std::size_t index, int order);
  /// Assemble from raw parts. The order is 2 if `hess` is given (dim*dim,
  /// symmetric), 1 if only `grad` is given, else 0.
  static Jet from_parts(double value, std::size_t dim, std::vector<double> grad = {},
                        std::vector<double> hess = {}, bool nonsmooth = false);

  double value() const noexcept { return value_; }
  std::size_t dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }

  double grad(std::size_t i) const noexcept { return order_ >= 1 ? grad_[i] : 0.0; }
  double hess(std::size_t i, std::size_t j) const noexcept {
    return order_ >= 2 ? hess_[i * dim_ + j] : 0.0;
  }
  /// Dense gradient (zeros for order 0).
  std::vector<double> gradient() const;
  /// Dense row-major Hessian (zeros below order 2).
  std::vector<double> hessian() const;

  /// Set when a non-smooth operation (abs at 0) was evaluated somewhere in the
  /// expression graph; derivatives are then subgradients.
  bool nonsmooth() const noexcept { return nonsmooth_; }

  /// Jet of f(u) given f(u0), f'(u0), f''(u0) where u0 = value().
  Jet compose(double f0, double f1, double f2) const;

  /// Jet of the partial derivative along coordinate k, one order lower.
  Jet partial(std::size_t k) const;

  /// Truncate to a lower order.
  Jet truncated(int order) const;

  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);

  friend Jet operator+(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a, const Jet& b);
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator-(const Jet& a);

  friend Jet operator+(const Jet& a, double b);
  friend Jet operator+(double a, const Jet& b);
  friend Jet operator-(const Jet& a, double b);
  friend Jet operator-(double a, const Jet& b);
  friend Jet operator*(const Jet& a, double b);
  friend Jet operator*(double a, const Jet& b);
  friend Jet operator/(const Jet& a, double b);
  friend Jet operator/(double a, const Jet& b);
  friend Jet abs(const Jet& u);

 private:
  Jet(double value, std::size_t dim, int order);
  static Jet like(const Jet& a, const Jet& b);

  double value_ = 0.0;
  std::size_t dim_ = 0;
  int order_ = 0;
  bool nonsmooth_ = false;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet tan(const Jet& u);
Jet sqrt(const Jet& u);
Jet abs(const Jet& u);
Jet pow(const Jet& base, const Jet& exponent);
Jet pow(const Jet& base, double exponent);

enum class JetOp { add, sub, mul, div, pow, neg, exp, ln, sin, cos, tan, sqrt, abs };

/// Dispatch an elementary operation by tag. Binary ops take two arguments,
/// the rest take one.
Jet jet_apply(JetOp op, std::span<const Jet> args);
Jet jet_apply(JetOp op, std::initializer_list<Jet> args);

/// One jet per coordinate, each seeded with its unit gradient.
std::vector<Jet> lift_point(std::span<const double> point, int order);

using VectorMap = std::function<std::vector<double>(std::span<const double>)>;

/// Central difference of `map` along `dir` with one Richardson step combining
/// steps h and h/2, i.e. (4 D_{h/2} - D_h) / 3. A non-positive h selects
/// cbrt(eps) * max(1, |point|_inf).
std::vector<double> directional_derivative_fd(const VectorMap& map,
                                              std::span<const double> point,
                                              std::span<const double> dir, double h = 0.0);

}  // namespace cocontact
