#include "cocontact/jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "cocontact/errors.hpp"

namespace cocontact {

Jet::Jet(double value, std::size_t dim, int order) : value_(value), dim_(dim), order_(order) {
  if (order_ >= 1) grad_.assign(dim_, 0.0);
  if (order_ >= 2) hess_.assign(dim_ * dim_, 0.0);
}

Jet Jet::constant(double value, std::size_t dim) { return Jet(value, dim, 0); }

Jet Jet::variable(double value, std::size_t dim, std::size_t index, int order) {
  if (order < 0 || order > 2) throw std::invalid_argument("jet order must be 0, 1 or 2");
  if (index >= dim) throw std::out_of_range("jet variable index out of range");
  Jet j(value, dim, order);
  if (order >= 1) j.grad_[index] = 1.0;
  return j;
}

Jet Jet::from_parts(double value, std::size_t dim, std::vector<double> grad,
                    std::vector<double> hess, bool nonsmooth) {
  const int order = !hess.empty() ? 2 : (!grad.empty() ? 1 : 0);
  if (order >= 1 && grad.size() != dim) throw std::invalid_argument("gradient size mismatch");
  if (order == 2 && hess.size() != dim * dim) throw std::invalid_argument("hessian size mismatch");
  Jet j(value, 0, 0);
  j.dim_ = dim;
  j.order_ = order;
  j.nonsmooth_ = nonsmooth;
  j.grad_ = std::move(grad);
  j.hess_ = std::move(hess);
  return j;
}

Jet Jet::partial(std::size_t k) const {
  if (order_ < 1) throw std::logic_error("partial derivative needs an order >= 1 jet");
  if (k >= dim_) throw std::out_of_range("partial index out of range");
  Jet r(grad_[k], dim_, order_ - 1);
  r.nonsmooth_ = nonsmooth_;
  if (order_ == 2)
    for (std::size_t i = 0; i < dim_; ++i) r.grad_[i] = hess_[k * dim_ + i];
  return r;
}

std::vector<double> Jet::gradient() const {
  if (order_ >= 1) return grad_;
  return std::vector<double>(dim_, 0.0);
}

std::vector<double> Jet::hessian() const {
  if (order_ >= 2) return hess_;
  return std::vector<double>(dim_ * dim_, 0.0);
}

Jet Jet::truncated(int order) const {
  if (order >= order_) return *this;
  Jet r(value_, dim_, order);
  r.nonsmooth_ = nonsmooth_;
  if (order >= 1) r.grad_ = grad_;
  return r;
}

// Result shell for a binary op; order-0 operands adapt to the other's dim.
Jet Jet::like(const Jet& a, const Jet& b) {
  if (a.order_ > 0 && b.order_ > 0 && a.dim_ != b.dim_)
    throw std::invalid_argument("jet dimension mismatch");
  const std::size_t dim = a.order_ > 0 ? a.dim_ : (b.order_ > 0 ? b.dim_ : std::max(a.dim_, b.dim_));
  Jet r(0.0, dim, std::max(a.order_, b.order_));
  r.nonsmooth_ = a.nonsmooth_ || b.nonsmooth_;
  return r;
}

Jet Jet::compose(double f0, double f1, double f2) const {
  Jet r(f0, dim_, order_);
  r.nonsmooth_ = nonsmooth_;
  if (order_ >= 1)
    for (std::size_t i = 0; i < dim_; ++i) r.grad_[i] = f1 * grad_[i];
  if (order_ >= 2) {
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j) {
        const double h = f1 * hess_[i * dim_ + j] + f2 * grad_[i] * grad_[j];
        r.hess_[i * dim_ + j] = h;
        r.hess_[j * dim_ + i] = h;
      }
  }
  return r;
}

Jet& Jet::operator+=(const Jet& rhs) { return *this = *this + rhs; }
Jet& Jet::operator-=(const Jet& rhs) { return *this = *this - rhs; }

Jet operator+(const Jet& a, const Jet& b) {
  Jet r = Jet::like(a, b);
  r.value_ = a.value_ + b.value_;
  const std::size_t n = r.dim_;
  if (r.order_ >= 1)
    for (std::size_t i = 0; i < n; ++i) r.grad_[i] = a.grad(i) + b.grad(i);
  if (r.order_ >= 2)
    for (std::size_t k = 0; k < n * n; ++k)
      r.hess_[k] = (a.order_ >= 2 ? a.hess_[k] : 0.0) + (b.order_ >= 2 ? b.hess_[k] : 0.0);
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  Jet r = Jet::like(a, b);
  r.value_ = a.value_ - b.value_;
  const std::size_t n = r.dim_;
  if (r.order_ >= 1)
    for (std::size_t i = 0; i < n; ++i) r.grad_[i] = a.grad(i) - b.grad(i);
  if (r.order_ >= 2)
    for (std::size_t k = 0; k < n * n; ++k)
      r.hess_[k] = (a.order_ >= 2 ? a.hess_[k] : 0.0) - (b.order_ >= 2 ? b.hess_[k] : 0.0);
  return r;
}

Jet operator-(const Jet& a) {
  Jet r = a;
  r.value_ = -r.value_;
  for (double& g : r.grad_) g = -g;
  for (double& h : r.hess_) h = -h;
  return r;
}

// Grouping is written so that a*b and b*a are bitwise identical.
Jet operator*(const Jet& a, const Jet& b) {
  Jet r = Jet::like(a, b);
  r.value_ = a.value_ * b.value_;
  const std::size_t n = r.dim_;
  if (r.order_ >= 1)
    for (std::size_t i = 0; i < n; ++i) r.grad_[i] = a.value_ * b.grad(i) + b.value_ * a.grad(i);
  if (r.order_ >= 2) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        const double h = (a.value_ * b.hess(i, j) + b.value_ * a.hess(i, j)) +
                         (a.grad(i) * b.grad(j) + b.grad(i) * a.grad(j));
        r.hess_[i * n + j] = h;
        r.hess_[j * n + i] = h;
      }
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  const double v = b.value();
  if (v == 0.0) throw DomainError("division by zero");
  if (b.order() == 0) return a * (1.0 / v);
  return a * b.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v));
}

Jet operator+(const Jet& a, double b) {
  Jet r = a;
  r.value_ += b;
  return r;
}
Jet operator+(double a, const Jet& b) { return b + a; }
Jet operator-(const Jet& a, double b) { return a + (-b); }
Jet operator-(double a, const Jet& b) { return (-b) + a; }

Jet operator*(const Jet& a, double b) {
  Jet r = a;
  r.value_ *= b;
  for (double& g : r.grad_) g *= b;
  for (double& h : r.hess_) h *= b;
  return r;
}
Jet operator*(double a, const Jet& b) { return b * a; }

Jet operator/(const Jet& a, double b) {
  if (b == 0.0) throw DomainError("division by zero");
  return a * (1.0 / b);
}
Jet operator/(double a, const Jet& b) { return Jet::constant(a, b.dim()) / b; }

Jet exp(const Jet& u) {
  const double e = std::exp(u.value());
  return u.compose(e, e, e);
}

Jet log(const Jet& u) {
  const double x = u.value();
  if (!(x > 0.0)) throw DomainError("ln of non-positive argument " + std::to_string(x));
  return u.compose(std::log(x), 1.0 / x, -1.0 / (x * x));
}

Jet sin(const Jet& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return u.compose(s, c, -s);
}

Jet cos(const Jet& u) {
  const double s = std::sin(u.value()), c = std::cos(u.value());
  return u.compose(c, -s, -c);
}

Jet tan(const Jet& u) {
  const double c = std::cos(u.value());
  if (c == 0.0) throw DomainError("tan at a pole");
  const double t = std::tan(u.value());
  const double sec2 = 1.0 + t * t;
  return u.compose(t, sec2, 2.0 * t * sec2);
}

Jet sqrt(const Jet& u) {
  const double x = u.value();
  if (x < 0.0) throw DomainError("sqrt of negative argument " + std::to_string(x));
  if (x == 0.0) {
    if (u.order() >= 1) throw DomainError("sqrt derivative is singular at 0");
    return u.compose(0.0, 0.0, 0.0);
  }
  const double s = std::sqrt(x);
  return u.compose(s, 0.5 / s, -0.25 / (s * x));
}

Jet abs(const Jet& u) {
  const double x = u.value();
  if (x == 0.0) {
    Jet r = u.compose(0.0, 0.0, 0.0);
    r.nonsmooth_ = true;
    return r;
  }
  const double s = x > 0.0 ? 1.0 : -1.0;
  return u.compose(std::abs(x), s, 0.0);
}

Jet pow(const Jet& base, double c) {
  const double x = base.value();
  const bool integral = std::floor(c) == c;
  if (x == 0.0 && c < 0.0) throw DomainError("0 raised to a negative power");
  if (x < 0.0 && !integral) throw DomainError("negative base with non-integer exponent");
  if (c == 0.0) return base.compose(1.0, 0.0, 0.0);
  if (x == 0.0 && base.order() >= 1 && c < static_cast<double>(base.order()) && !integral)
    throw DomainError("fractional power derivative is singular at 0");
  const double f0 = std::pow(x, c);
  const double f1 = base.order() >= 1 ? c * std::pow(x, c - 1.0) : 0.0;
  const double f2 = base.order() >= 2 && c != 1.0 ? c * (c - 1.0) * std::pow(x, c - 2.0) : 0.0;
  return base.compose(f0, f1, f2);
}

Jet pow(const Jet& base, const Jet& exponent) {
  if (exponent.order() == 0) return pow(base, exponent.value());
  bool constant_exponent = true;
  for (std::size_t i = 0; i < exponent.dim() && constant_exponent; ++i)
    constant_exponent = exponent.grad(i) == 0.0;
  for (std::size_t i = 0; i < exponent.dim() && constant_exponent; ++i)
    for (std::size_t j = 0; j < exponent.dim() && constant_exponent; ++j)
      constant_exponent = exponent.hess(i, j) == 0.0;
  if (constant_exponent) return pow(base, exponent.value()) + exponent * 0.0;
  if (!(base.value() > 0.0))
    throw DomainError("variable exponent requires a positive base");
  return exp(exponent * log(base));
}

Jet jet_apply(JetOp op, std::span<const Jet> args) {
  auto need = [&](std::size_t n) {
    if (args.size() != n)
      throw std::invalid_argument("jet_apply: expected " + std::to_string(n) + " arguments");
  };
  switch (op) {
    case JetOp::add: need(2); return args[0] + args[1];
    case JetOp::sub: need(2); return args[0] - args[1];
    case JetOp::mul: need(2); return args[0] * args[1];
    case JetOp::div: need(2); return args[0] / args[1];
    case JetOp::pow: need(2); return pow(args[0], args[1]);
    case JetOp::neg: need(1); return -args[0];
    case JetOp::exp: need(1); return exp(args[0]);
    case JetOp::ln: need(1); return log(args[0]);
    case JetOp::sin: need(1); return sin(args[0]);
    case JetOp::cos: need(1); return cos(args[0]);
    case JetOp::tan: need(1); return tan(args[0]);
    case JetOp::sqrt: need(1); return sqrt(args[0]);
    case JetOp::abs: need(1); return abs(args[0]);
  }
  throw std::invalid_argument("jet_apply: unknown op");
}

Jet jet_apply(JetOp op, std::initializer_list<Jet> args) {
  return jet_apply(op, std::span<const Jet>(args.begin(), args.size()));
}

std::vector<Jet> lift_point(std::span<const double> point, int order) {
  if (point.empty()) throw std::invalid_argument("lift_point: empty point");
  std::vector<Jet> out;
  out.reserve(point.size());
  for (std::size_t k = 0; k < point.size(); ++k)
    out.push_back(Jet::variable(point[k], point.size(), k, order));
  return out;
}

std::vector<double> directional_derivative_fd(const VectorMap& map, std::span<const double> point,
                                              std::span<const double> dir, double h) {
  if (dir.size() != point.size()) throw std::invalid_argument("direction dimension mismatch");
  if (h <= 0.0) {
    double scale = 1.0;
    for (double x : point) scale = std::max(scale, std::abs(x));
    h = std::cbrt(std::numeric_limits<double>::epsilon()) * scale;
  }
  std::vector<double> probe(point.begin(), point.end());
  auto central = [&](double step) {
    for (std::size_t k = 0; k < point.size(); ++k) probe[k] = point[k] + step * dir[k];
    std::vector<double> plus = map(probe);
    for (std::size_t k = 0; k < point.size(); ++k) probe[k] = point[k] - step * dir[k];
    std::vector<double> minus = map(probe);
    if (plus.size() != minus.size()) throw std::runtime_error("map output size changed");
    for (std::size_t i = 0; i < plus.size(); ++i) plus[i] = (plus[i] - minus[i]) / (2.0 * step);
    return plus;
  };
  std::vector<double> coarse = central(h);
  std::vector<double> fine = central(0.5 * h);
  for (std::size_t i = 0; i < fine.size(); ++i) fine[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return fine;
}

}  // namespace cocontact
