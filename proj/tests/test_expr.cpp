#include <cmath>

#include "cocontact/errors.hpp"
#include "cocontact/expr.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace cocontact;

namespace {

const ChartSpec kH1{1, ChartKind::hamiltonian};

double eval_str(std::string_view s) {
  const std::vector<double> x(kH1.dim(), 0.0);
  return evaluate(parse(s, kH1), x);
}

std::size_t count_params(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::size_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, ParamNode>) return 1;
        else if constexpr (std::is_same_v<T, NegNode> || std::is_same_v<T, CallNode>) return count_params(n.arg);
        else if constexpr (std::is_same_v<T, BinaryNode>) return count_params(n.lhs) + count_params(n.rhs);
        else return 0;
      },
      e.node().v);
}

}  // namespace

TEST_CASE("parse resolves chart variables and declared parameters") {
  const Expr h = parse("p1^2/(2*m) + kappa*z/m", kH1, {"m", "kappa"});
  CHECK(parameters(h) == NameSet{"kappa", "m"});
  CHECK(count_params(h) == 3);  // m appears twice
  CHECK(free_variables(h) == NameSet{"p1", "z"});

  const Expr q = parse("q1", kH1);
  const auto* v = std::get_if<VarNode>(&q.node().v);
  REQUIRE(v != nullptr);
  CHECK(v->name == "q1");
  CHECK(v->index == 1);
}

TEST_CASE("parse errors") {
  try {
    parse("2**3", kH1);
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse("", kH1), SyntaxError);
  CHECK_THROWS_AS(parse("(q1 + 1", kH1), SyntaxError);
  CHECK_THROWS_AS(parse("q1 +", kH1), SyntaxError);
  CHECK_THROWS_AS(parse("v1", kH1), UnknownIdentifier);
  CHECK_THROWS_AS(parse("q2", kH1), UnknownIdentifier);
  CHECK_THROWS_AS(parse("foo(q1)", kH1), UnknownIdentifier);
  try {
    parse("q1 + mass", kH1);
    FAIL("expected UnknownIdentifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.name() == "mass");
  }
  // Lagrangian charts use v.
  CHECK(free_variables(parse("v1*q1", ChartSpec{1, ChartKind::lagrangian})) == NameSet{"q1", "v1"});
}

TEST_CASE("precedence vectors") {
  CHECK(eval_str("1+2*3") == 7.0);
  CHECK(eval_str("2^3^2") == 512.0);
  CHECK(eval_str("-2^2") == -4.0);
  CHECK(eval_str("(1+2)*3") == 9.0);
  CHECK(eval_str("8/4/2") == 1.0);
  CHECK(eval_str("2^-1") == 0.5);
  CHECK(eval_str("1 \xE2\x88\x92 3") == -2.0);  // U+2212 minus sign
}

TEST_CASE("eval_jet examples") {
  const Expr h = parse("p1^2/2 + z", kH1);
  const Jet j = eval_jet(h, PhasePoint({0.0, 0.0, 2.0, 1.0}), {}, 1);
  CHECK(j.value() == 3.0);
  CHECK(j.grad(2) == 2.0);
  CHECK(j.grad(3) == 1.0);

  const Jet c = eval_jet(parse("exp(q1-z)", kH1), PhasePoint({0.0, 1.0, 0.0, 1.0}), {}, 1);
  CHECK(c.value() == 1.0);
  CHECK(c.grad(0) == 0.0);
  CHECK(c.grad(1) == 1.0);
  CHECK(c.grad(2) == 0.0);
  CHECK(c.grad(3) == -1.0);

  CHECK_THROWS_AS(eval_jet(parse("ln(z)", kH1), PhasePoint({0, 0, 0, 0}), {}, 1), DomainError);
  CHECK_THROWS_AS(eval_jet(parse("m*z", kH1, {"m"}), PhasePoint({0, 0, 0, 0}), {}, 1), UnboundParam);
}

TEST_CASE("free_variables") {
  CHECK(free_variables(parse("p1^2/2 + z", kH1)) == NameSet{"p1", "z"});
  CHECK(free_variables(parse("3.14", kH1)).empty());
  CHECK(free_variables(parse("q1*p1 - t", kH1)) == NameSet{"p1", "q1", "t"});
}

TEST_CASE("substitute and bind") {
  const Expr h = parse("p1^2/(2*m) + kappa*z/m", kH1, {"m", "kappa"});
  const Expr m = parse("1+t", kH1);
  const Expr s = substitute(h, "m", m);
  CHECK(parameters(s) == NameSet{"kappa"});
  const Expr b = bind(s, {{"kappa", 2.0}});
  const std::vector<double> x{1.0, 0.0, 2.0, 3.0};
  CHECK(std::abs(evaluate(b, x) - (4.0 / 4.0 + 2.0 * 3.0 / 2.0)) < 1e-15);
  CHECK_THROWS_AS(bind(h, {{"m", 1.0}}), UnboundParam);
}

namespace {

Expr random_ast(testing::Rng& rng, int depth) {
  if (depth == 0 || rng.index(5) == 0) {
    switch (rng.index(4)) {
      case 0: return Expr::constant(std::round(rng.uniform(0.0, 5.0) * 1000.0) / 7.0);
      case 1: return Expr::param("a");
      default: {
        const std::size_t k = rng.index(kH1.dim());
        return Expr::variable(kH1.coordinate_name(k), k);
      }
    }
  }
  switch (rng.index(7)) {
    case 0: return Expr::negate(random_ast(rng, depth - 1));
    case 1: return Expr::call(static_cast<Function>(rng.index(3)), random_ast(rng, depth - 1));
    case 2: return Expr::binary(BinaryOp::pow, random_ast(rng, depth - 1), Expr::constant(2.0));
    default:
      return Expr::binary(static_cast<BinaryOp>(rng.index(3)), random_ast(rng, depth - 1),
                          random_ast(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("parse . print . parse is a fixpoint") {
  testing::Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Expr e = random_ast(rng, 5);
    const std::string text = to_string(e);
    const Expr back = parse(text, kH1, {"a"});
    CHECK_MESSAGE(back == e, text);
    CHECK(to_string(back) == text);
  }
}

TEST_CASE("order-0 jets agree with plain evaluation") {
  testing::Rng rng(6);
  const ParamMap params{{"a", 0.75}};
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const Expr e = random_ast(rng, 5);
    const auto x = rng.vec(kH1.dim(), -2.0, 2.0);
    double plain = 0.0;
    try {
      plain = evaluate(e, x, params);
    } catch (const DomainError&) {
      continue;
    }
    const Jet j = eval_jet(e, PhasePoint(x), params, 0);
    CHECK(j.value() == doctest::Approx(plain).epsilon(1e-15));
    ++compared;
  }
  CHECK(compared > 900);
}
