#pragma once

// Internal helpers shared by the sampled symmetry checks.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "cocontact/errors.hpp"
#include "cocontact/symmetry.hpp"

namespace cocontact::detail {

inline void require_smooth(const Jet& j) {
  if (j.nonsmooth()) throw DomainError("non-smooth evaluation (abs at 0)");
}

// Accumulates one class over samples.
struct Tally {
  explicit Tally(std::string n) : name(std::move(n)) {}

  std::string name;
  bool ok = true;
  double worst = 0.0;
  std::optional<Range> rho;

  void add(double residual, double scale, const Tolerance& tol) {
    if (!std::isfinite(residual)) residual = std::numeric_limits<double>::infinity();
    worst = std::max(worst, residual);
    if (!tol.accepts(residual, scale)) ok = false;
  }
  void add_rho(double r) {
    if (!rho) rho = Range{r, r};
    rho->min = std::min(rho->min, r);
    rho->max = std::max(rho->max, r);
  }
  ClassResult result(const Sampler& s) const {
    return {name, ok ? Verdict::pass : Verdict::fail, worst, s.count, s.seed, rho};
  }
};

}  // namespace cocontact::detail
