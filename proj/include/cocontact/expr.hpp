#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "cocontact/jet.hpp"
#include "cocontact/phase_space.hpp"

namespace cocontact {

using ParamMap = std::map<std::string, double, std::less<>>;
using NameSet = std::set<std::string, std::less<>>;

enum class BinaryOp { add, sub, mul, div, pow };
enum class Function { sin, cos, tan, exp, ln, sqrt, abs };

struct ExprNode;

/// Immutable scalar expression over a chart's coordinates and named
/// parameters. Grammar (loosest to tightest):
///
///   expr    := term   (('+' | '-') term)*
///   term    := unary  (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?          right-associative
///   primary := number | name | func '(' expr ')' | '(' expr ')'
///
/// func is one of sin cos tan exp ln sqrt abs. Names resolve to chart
/// coordinates first (t, z, q1.., p1.. or v1..), then to declared parameters.
class Expr {
 public:
  Expr() = default;
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  static Expr constant(double v);
  static Expr variable(std::string name, std::size_t index);
  static Expr param(std::string name);
  static Expr negate(Expr e);
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
  static Expr call(Function f, Expr arg);

  const ExprNode& node() const { return *node_; }
  bool empty() const noexcept { return !node_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  std::shared_ptr<const ExprNode> node_;
};

struct ConstNode {
  double value;
};
struct VarNode {
  std::string name;
  std::size_t index;
};
struct ParamNode {
  std::string name;
};
struct NegNode {
  Expr arg;
};
struct BinaryNode {
  BinaryOp op;
  Expr lhs, rhs;
};
struct CallNode {
  Function fn;
  Expr arg;
};

struct ExprNode {
  std::variant<ConstNode, VarNode, ParamNode, NegNode, BinaryNode, CallNode> v;
};

Expr parse(std::string_view source, const ChartSpec& chart, const NameSet& params = {});

/// Text form that parses back to an equal AST. Constants use 17 significant
/// digits.
std::string to_string(const Expr& e);

/// Evaluate on already-lifted coordinate jets. Parameters are order-0
/// constants looked up in `params`.
Jet eval_jet(const Expr& e, std::span<const Jet> coords, const ParamMap& params = {});
Jet eval_jet(const Expr& e, const PhasePoint& x, const ParamMap& params, int order);

/// Plain double evaluation (no derivatives).
double evaluate(const Expr& e, std::span<const double> point, const ParamMap& params = {});

NameSet free_variables(const Expr& e);
NameSet parameters(const Expr& e);

/// Replace every occurrence of parameter `name` by `replacement`.
Expr substitute(const Expr& e, std::string_view name, const Expr& replacement);
/// Replace parameters by constants; throws UnboundParam for missing values.
Expr bind(const Expr& e, const ParamMap& params);

}  // namespace cocontact
