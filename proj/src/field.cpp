#include "cocontact/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cocontact/errors.hpp"

namespace cocontact {

namespace {

// Pad or truncate a jet to exactly `order`.
Jet at_order(const Jet& j, std::size_t dim, int order) {
  if (j.order() == order) return j;
  if (j.order() > order) return j.truncated(order);
  std::vector<double> g, h;
  if (order >= 1) g = j.order() >= 1 ? j.gradient() : std::vector<double>(dim, 0.0);
  if (order >= 2) h.assign(dim * dim, 0.0);
  return Jet::from_parts(j.value(), dim, std::move(g), std::move(h), j.nonsmooth());
}

void check_order(int order, int max_order, const std::string& label) {
  if (order < 0 || order > max_order)
    throw std::logic_error("field '" + label + "' supports jets up to order " +
                           std::to_string(max_order) + ", asked for " + std::to_string(order));
}

VectorMap values_of(const VectorField& f) {
  return [f](std::span<const double> x) { return f(x).c; };
}

std::vector<double> derivative_along(const VectorField& f, std::span<const double> point,
                                     std::span<const double> dir) {
  if (!f.uses_ad()) return directional_derivative_fd(values_of(f), point, dir);
  const auto js = f.jets(point, 1);
  std::vector<double> out(f.dim(), 0.0);
  for (std::size_t k = 0; k < f.dim(); ++k)
    for (std::size_t i = 0; i < dir.size(); ++i) out[k] += js[k].grad(i) * dir[i];
  return out;
}

}  // namespace

ScalarField::ScalarField(Fn fn, int max_order, std::string label)
    : fn_(std::move(fn)), max_order_(max_order), label_(std::move(label)) {}

ScalarField ScalarField::from_expr(const Expr& e, const ParamMap& params, std::string label) {
  const Expr bound = bind(e, params);
  if (label.empty()) label = to_string(e);
  ScalarField f(
      [bound](std::span<const double> x, int order) {
        const auto coords = lift_point(x, order);
        return eval_jet(bound, coords);
      },
      2, std::move(label));
  f.expr_ = e;
  return f;
}

ScalarField ScalarField::constant(double c) {
  return ScalarField([c](std::span<const double> x, int) { return Jet::constant(c, x.size()); }, 2,
                     to_string(Expr::constant(c)));
}

Jet ScalarField::jet(std::span<const double> point, int order) const {
  check_order(order, max_order_, label_);
  return at_order(fn_(point, order), point.size(), order);
}

double ScalarField::operator()(std::span<const double> point) const { return jet(point, 0).value(); }

ScalarField partial(const ScalarField& f, std::size_t k) {
  if (f.max_order() < 1) throw std::logic_error("cannot differentiate an order-0 field");
  return ScalarField([f, k](std::span<const double> x, int order) { return f.jet(x, order + 1).partial(k); },
                     f.max_order() - 1, "d(" + f.label() + ")/dx" + std::to_string(k));
}

namespace {

template <typename Op>
ScalarField combine(const ScalarField& a, const ScalarField& b, Op op, const char* sym) {
  return ScalarField(
      [a, b, op](std::span<const double> x, int order) { return op(a.jet(x, order), b.jet(x, order)); },
      std::min(a.max_order(), b.max_order()), "(" + a.label() + ")" + sym + "(" + b.label() + ")");
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& u, const Jet& v) { return u + v; }, " + ");
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& u, const Jet& v) { return u - v; }, " - ");
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& u, const Jet& v) { return u * v; }, "*");
}
ScalarField operator*(double a, const ScalarField& b) {
  return ScalarField([a, b](std::span<const double> x, int order) { return a * b.jet(x, order); },
                     b.max_order(), to_string(Expr::constant(a)) + "*(" + b.label() + ")");
}
ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  return combine(
      a, b,
      [](const Jet& u, const Jet& v) {
        if (std::abs(v.value()) < 1e-12) throw DenominatorVanishes("denominator below 1e-12");
        return u / v;
      },
      "/");
}

VectorField::VectorField(std::size_t dim, BatchFn fn, int max_order, std::string label,
                         Differentiability diff)
    : dim_(dim), fn_(std::move(fn)), max_order_(max_order), label_(std::move(label)), diff_(diff) {}

VectorField VectorField::from_components(std::vector<ScalarField> comps, std::string label) {
  int max_order = 2;
  for (const auto& c : comps) max_order = std::min(max_order, c.max_order());
  const std::size_t d = comps.size();
  return VectorField(
      d,
      [comps = std::move(comps)](std::span<const double> x, int order) {
        std::vector<Jet> out;
        out.reserve(comps.size());
        for (const auto& c : comps) out.push_back(c.jet(x, order));
        return out;
      },
      max_order, std::move(label));
}

VectorField VectorField::from_exprs(const std::vector<Expr>& comps, const ParamMap& params,
                                    std::string label) {
  std::vector<ScalarField> fs;
  for (const auto& e : comps) fs.push_back(ScalarField::from_expr(e, params));
  if (label.empty()) {
    for (std::size_t k = 0; k < comps.size(); ++k) label += (k ? ";" : "") + to_string(comps[k]);
  }
  return from_components(std::move(fs), std::move(label));
}

VectorField VectorField::constant(TangentVector v, std::string label) {
  const std::size_t d = v.dim();
  return VectorField(
      d,
      [v = std::move(v)](std::span<const double> x, int) {
        std::vector<Jet> out;
        for (double c : v.c) out.push_back(Jet::constant(c, x.size()));
        return out;
      },
      2, std::move(label));
}

std::vector<Jet> VectorField::jets(std::span<const double> point, int order) const {
  check_order(order, max_order_, label_);
  if (point.size() != dim_) throw std::invalid_argument("point dimension does not match field");
  std::vector<Jet> js = fn_(point, order);
  if (js.size() != dim_) throw std::logic_error("field '" + label_ + "' returned wrong component count");
  for (auto& j : js) j = at_order(j, dim_, order);
  return js;
}

TangentVector VectorField::operator()(std::span<const double> point) const {
  if (point.size() != dim_) throw std::invalid_argument("point dimension does not match field");
  const std::vector<Jet> js = fn_(point, 0);
  if (js.size() != dim_) throw std::logic_error("field '" + label_ + "' returned wrong component count");
  TangentVector v{std::vector<double>(dim_)};
  for (std::size_t k = 0; k < dim_; ++k) v[k] = js[k].value();
  return v;
}

ScalarField VectorField::component(std::size_t k) const {
  if (k >= dim_) throw std::out_of_range("component index out of range");
  VectorField self = *this;
  return ScalarField([self, k](std::span<const double> x, int order) { return self.jets(x, order)[k]; },
                     max_order_, label_ + "[" + std::to_string(k) + "]");
}

std::vector<double> VectorField::jacobian(std::span<const double> point) const {
  std::vector<double> J(dim_ * dim_, 0.0);
  if (uses_ad()) {
    const auto js = jets(point, 1);
    for (std::size_t k = 0; k < dim_; ++k)
      for (std::size_t i = 0; i < dim_; ++i) J[k * dim_ + i] = js[k].grad(i);
    return J;
  }
  const VectorMap map = values_of(*this);
  std::vector<double> e(dim_, 0.0);
  for (std::size_t i = 0; i < dim_; ++i) {
    e[i] = 1.0;
    const auto col = directional_derivative_fd(map, point, e);
    e[i] = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) J[k * dim_ + i] = col[k];
  }
  return J;
}

VectorField VectorField::as_fd() const {
  VectorField f = *this;
  f.diff_ = Differentiability::fd;
  return f;
}

VectorField VectorField::relabeled(std::string label) const {
  VectorField f = *this;
  f.label_ = std::move(label);
  return f;
}

namespace {

template <typename Op>
VectorField combine(const VectorField& a, const VectorField& b, Op op, const char* sym) {
  if (a.dim() != b.dim()) throw std::invalid_argument("vector field dimensions differ");
  const auto diff = a.differentiability() == Differentiability::ad2 &&
                            b.differentiability() == Differentiability::ad2
                        ? Differentiability::ad2
                        : Differentiability::fd;
  return VectorField(
      a.dim(),
      [a, b, op](std::span<const double> x, int order) {
        auto ja = a.jets(x, order);
        const auto jb = b.jets(x, order);
        for (std::size_t k = 0; k < ja.size(); ++k) ja[k] = op(ja[k], jb[k]);
        return ja;
      },
      std::min(a.max_order(), b.max_order()), "(" + a.label() + ")" + sym + "(" + b.label() + ")",
      diff);
}

}  // namespace

VectorField operator+(const VectorField& a, const VectorField& b) {
  return combine(a, b, [](const Jet& u, const Jet& v) { return u + v; }, " + ");
}
VectorField operator-(const VectorField& a, const VectorField& b) {
  return combine(a, b, [](const Jet& u, const Jet& v) { return u - v; }, " - ");
}

VectorField operator*(const ScalarField& f, const VectorField& y) {
  return VectorField(
      y.dim(),
      [f, y](std::span<const double> x, int order) {
        const Jet s = f.jet(x, order);
        auto js = y.jets(x, order);
        for (auto& j : js) j = s * j;
        return js;
      },
      std::min(f.max_order(), y.max_order()), "(" + f.label() + ")*(" + y.label() + ")",
      y.differentiability());
}

double apply(const VectorField& x, const ScalarField& f, std::span<const double> point) {
  const TangentVector v = x(point);
  const Jet j = f.jet(point, 1);
  double s = 0.0;
  for (std::size_t k = 0; k < v.dim(); ++k) s += v[k] * j.grad(k);
  return s;
}

ScalarField apply_field(const VectorField& x, const ScalarField& f) {
  const int max_order = std::min(x.max_order(), f.max_order() - 1);
  if (max_order < 0) throw std::logic_error("X(f) needs f differentiable");
  return ScalarField(
      [x, f](std::span<const double> p, int order) {
        const auto xs = x.jets(p, order);
        const Jet fj = f.jet(p, order + 1);
        Jet s = Jet::constant(0.0, p.size());
        for (std::size_t k = 0; k < xs.size(); ++k) s += xs[k] * fj.partial(k);
        return s;
      },
      max_order, x.label() + "(" + f.label() + ")");
}

TangentVector lie_bracket(const VectorField& y, const VectorField& x, std::span<const double> point) {
  const TangentVector yv = y(point), xv = x(point);
  const auto a = derivative_along(x, point, yv.c);
  const auto b = derivative_along(y, point, xv.c);
  TangentVector r{std::vector<double>(a.size())};
  for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
  return r;
}

VectorField lie_bracket_field(const VectorField& y, const VectorField& x) {
  if (y.dim() != x.dim()) throw std::invalid_argument("vector field dimensions differ");
  std::string label = "[" + y.label() + ", " + x.label() + "]";
  if (!y.uses_ad() || !x.uses_ad()) {
    return VectorField(
        y.dim(),
        [y, x](std::span<const double> p, int) {
          const TangentVector v = lie_bracket(y, x, p);
          std::vector<Jet> out;
          for (double c : v.c) out.push_back(Jet::constant(c, p.size()));
          return out;
        },
        0, std::move(label), Differentiability::fd);
  }
  return VectorField(
      y.dim(),
      [y, x](std::span<const double> p, int order) {
        const auto ys = y.jets(p, order + 1);
        const auto xs = x.jets(p, order + 1);
        const std::size_t d = ys.size();
        std::vector<Jet> out;
        out.reserve(d);
        for (std::size_t k = 0; k < d; ++k) {
          Jet s = Jet::constant(0.0, p.size());
          for (std::size_t j = 0; j < d; ++j) {
            s += ys[j].truncated(order) * xs[k].partial(j);
            s -= xs[j].truncated(order) * ys[k].partial(j);
          }
          out.push_back(s);
        }
        return out;
      },
      std::min(y.max_order(), x.max_order()) - 1, std::move(label));
}

}  // namespace cocontact
