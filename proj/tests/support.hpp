#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cocontact/phase_space.hpp"

namespace testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  std::vector<double> vec(std::size_t d, double lo, double hi) {
    std::vector<double> v(d);
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }
  cocontact::PhasePoint point(std::size_t d, double lo, double hi) { return cocontact::PhasePoint(vec(d, lo, hi)); }

 private:
  std::mt19937_64 gen_;
};

inline double rel_dev(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Random smooth expressions over n coordinates with bounded growth.
inline std::string random_expr(Rng& rng, int depth, const std::vector<std::string>& vars) {
  if (depth == 0 || rng.index(4) == 0) {
    if (rng.index(3) == 0) return std::to_string(rng.uniform(-2.0, 2.0));
    return vars[rng.index(vars.size())];
  }
  const std::string a = random_expr(rng, depth - 1, vars);
  switch (rng.index(9)) {
    case 0: return "(" + a + " + " + random_expr(rng, depth - 1, vars) + ")";
    case 1: return "(" + a + " - " + random_expr(rng, depth - 1, vars) + ")";
    case 2: return "(" + a + ")*(" + random_expr(rng, depth - 1, vars) + ")";
    case 3: return "(" + a + ")/(2 + sin(" + random_expr(rng, depth - 1, vars) + "))";
    case 4: return "sin(" + a + ")";
    case 5: return "cos(" + a + ")";
    case 6: return "exp(0.3*sin(" + a + "))";
    case 7: return "ln(1.5 + cos(" + a + "))";
    default: return "sqrt(1 + (" + a + ")^2)";
  }
}

}  // namespace testing
