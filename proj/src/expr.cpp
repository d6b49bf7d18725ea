#include "cocontact/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

#include "cocontact/errors.hpp"

namespace cocontact {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Expr make(ExprNode n) { return Expr(std::make_shared<const ExprNode>(std::move(n))); }

std::optional<Function> function_named(std::string_view s) {
  if (s == "sin") return Function::sin;
  if (s == "cos") return Function::cos;
  if (s == "tan") return Function::tan;
  if (s == "exp") return Function::exp;
  if (s == "ln") return Function::ln;
  if (s == "sqrt") return Function::sqrt;
  if (s == "abs") return Function::abs;
  return std::nullopt;
}

const char* function_name(Function f) {
  switch (f) {
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::tan: return "tan";
    case Function::exp: return "exp";
    case Function::ln: return "ln";
    case Function::sqrt: return "sqrt";
    case Function::abs: return "abs";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : src_(s) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) {
      tok_ = {Tok::end, start, {}};
      return;
    }
    const char c = src_[pos_];
    // U+2212 MINUS SIGN is accepted as '-'.
    if (src_.substr(pos_, 3) == "\xE2\x88\x92") {
      pos_ += 3;
      tok_ = {Tok::minus, start, src_.substr(start, 3)};
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      lex_number(start);
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      tok_ = {Tok::ident, start, src_.substr(start, pos_ - start)};
      return;
    }
    ++pos_;
    switch (c) {
      case '+': tok_ = {Tok::plus, start, src_.substr(start, 1)}; return;
      case '-': tok_ = {Tok::minus, start, src_.substr(start, 1)}; return;
      case '*': tok_ = {Tok::star, start, src_.substr(start, 1)}; return;
      case '/': tok_ = {Tok::slash, start, src_.substr(start, 1)}; return;
      case '^': tok_ = {Tok::caret, start, src_.substr(start, 1)}; return;
      case '(': tok_ = {Tok::lparen, start, src_.substr(start, 1)}; return;
      case ')': tok_ = {Tok::rparen, start, src_.substr(start, 1)}; return;
      default: break;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", start);
  }

  void lex_number(std::size_t start) {
    auto digits = [&] {
      std::size_t k = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_, ++k;
      return k;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw SyntaxError("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    const std::string text(src_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) throw SyntaxError("malformed number", start);
    tok_ = {Tok::number, start, src_.substr(start, pos_ - start), v};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_{Tok::end, 0, {}};
};

// ---------------------------------------------------------------------------
// Parser (precedence climbing)

int binary_precedence(Tok t) {
  switch (t) {
    case Tok::plus:
    case Tok::minus: return 1;
    case Tok::star:
    case Tok::slash: return 2;
    default: return -1;
  }
}

BinaryOp binary_op(Tok t) {
  switch (t) {
    case Tok::plus: return BinaryOp::add;
    case Tok::minus: return BinaryOp::sub;
    case Tok::star: return BinaryOp::mul;
    case Tok::slash: return BinaryOp::div;
    default: return BinaryOp::pow;
  }
}

class Parser {
 public:
  Parser(std::string_view src, const ChartSpec& chart, const NameSet& params)
      : lex_(src), chart_(chart), params_(params) {}

  Expr parse_all() {
    if (lex_.peek().kind == Tok::end) throw SyntaxError("empty expression", 0);
    Expr e = parse_binary(1);
    if (lex_.peek().kind != Tok::end)
      throw SyntaxError("unexpected '" + std::string(lex_.peek().text) + "'", lex_.peek().offset);
    return e;
  }

 private:
  Expr parse_binary(int min_prec) {
    Expr lhs = parse_unary();
    for (;;) {
      const Tok t = lex_.peek().kind;
      const int prec = binary_precedence(t);
      if (prec < min_prec) return lhs;
      lex_.take();
      Expr rhs = parse_binary(prec + 1);
      lhs = Expr::binary(binary_op(t), std::move(lhs), std::move(rhs));
    }
  }

  Expr parse_unary() {
    const Tok t = lex_.peek().kind;
    if (t == Tok::minus) {
      lex_.take();
      return Expr::negate(parse_unary());
    }
    if (t == Tok::plus) {
      lex_.take();
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (lex_.peek().kind == Tok::caret) {
      lex_.take();
      return Expr::binary(BinaryOp::pow, std::move(base), parse_unary());
    }
    return base;
  }

  Expr parse_primary() {
    Token tok = lex_.take();
    switch (tok.kind) {
      case Tok::number: return Expr::constant(tok.number);
      case Tok::lparen: {
        Expr inner = parse_binary(1);
        expect(Tok::rparen, "')'");
        return inner;
      }
      case Tok::ident: return resolve(tok);
      case Tok::end: throw SyntaxError("unexpected end of expression", tok.offset);
      default: throw SyntaxError("unexpected '" + std::string(tok.text) + "'", tok.offset);
    }
  }

  Expr resolve(const Token& tok) {
    const std::string name(tok.text);
    if (lex_.peek().kind == Tok::lparen) {
      auto fn = function_named(name);
      if (!fn) throw UnknownIdentifier(name);
      lex_.take();
      Expr arg = parse_binary(1);
      expect(Tok::rparen, "')'");
      return Expr::call(*fn, std::move(arg));
    }
    if (function_named(name)) throw SyntaxError("function '" + name + "' needs an argument", tok.offset);
    if (auto idx = chart_.index_of(name)) return Expr::variable(name, *idx);
    if (params_.count(name)) return Expr::param(name);
    throw UnknownIdentifier(name);
  }

  void expect(Tok kind, const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != kind) throw SyntaxError(std::string("expected ") + what, t.offset);
    lex_.take();
  }

  Lexer lex_;
  const ChartSpec& chart_;
  const NameSet& params_;
};

// ---------------------------------------------------------------------------
// Printing

constexpr int kAtomPrec = 5;

int precedence(const Expr& e) {
  return std::visit(overloaded{[](const NegNode&) { return 3; },
                               [](const BinaryNode& b) {
                                 switch (b.op) {
                                   case BinaryOp::add:
                                   case BinaryOp::sub: return 1;
                                   case BinaryOp::mul:
                                   case BinaryOp::div: return 2;
                                   case BinaryOp::pow: return 4;
                                 }
                                 return 0;
                               },
                               [](const auto&) { return kAtomPrec; }},
                    e.node().v);
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  return s;
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
  if (parens) out += '(';
  print(e, out);
  if (parens) out += ')';
}

void print(const Expr& e, std::string& out) {
  std::visit(overloaded{
                 [&](const ConstNode& c) {
                   // Negative constants only arise programmatically; keep them atomic.
                   if (c.value < 0 || std::signbit(c.value)) {
                     out += "(-" + format_number(-c.value) + ")";
                   } else {
                     out += format_number(c.value);
                   }
                 },
                 [&](const VarNode& v) { out += v.name; },
                 [&](const ParamNode& p) { out += p.name; },
                 [&](const NegNode& n) {
                   out += '-';
                   print_wrapped(n.arg, precedence(n.arg) < 3, out);
                 },
                 [&](const BinaryNode& b) {
                   const int p = precedence(e);
                   const int pl = precedence(b.lhs), pr = precedence(b.rhs);
                   const bool pow = b.op == BinaryOp::pow;
                   print_wrapped(b.lhs, pow ? pl <= p : pl < p, out);
                   switch (b.op) {
                     case BinaryOp::add: out += " + "; break;
                     case BinaryOp::sub: out += " - "; break;
                     case BinaryOp::mul: out += "*"; break;
                     case BinaryOp::div: out += "/"; break;
                     case BinaryOp::pow: out += "^"; break;
                   }
                   print_wrapped(b.rhs, pow ? pr < 3 : pr <= p, out);
                 },
                 [&](const CallNode& c) {
                   out += function_name(c.fn);
                   out += '(';
                   print(c.arg, out);
                   out += ')';
                 }},
             e.node().v);
}

// ---------------------------------------------------------------------------
// Evaluation

Jet apply_function(Function f, const Jet& x) {
  switch (f) {
    case Function::sin: return sin(x);
    case Function::cos: return cos(x);
    case Function::tan: return tan(x);
    case Function::exp: return exp(x);
    case Function::ln: return log(x);
    case Function::sqrt: return sqrt(x);
    case Function::abs: return abs(x);
  }
  throw std::logic_error("unknown function");
}

double apply_function(Function f, double x) {
  switch (f) {
    case Function::sin: return std::sin(x);
    case Function::cos: return std::cos(x);
    case Function::tan:
      if (std::cos(x) == 0.0) throw DomainError("tan at a pole");
      return std::tan(x);
    case Function::exp: return std::exp(x);
    case Function::ln:
      if (!(x > 0.0)) throw DomainError("ln of non-positive argument");
      return std::log(x);
    case Function::sqrt:
      if (x < 0.0) throw DomainError("sqrt of negative argument");
      return std::sqrt(x);
    case Function::abs: return std::abs(x);
  }
  throw std::logic_error("unknown function");
}

Jet eval_rec(const Expr& e, std::span<const Jet> coords, const ParamMap& params, std::size_t dim) {
  return std::visit(
      overloaded{[&](const ConstNode& c) { return Jet::constant(c.value, dim); },
                 [&](const VarNode& v) {
                   if (v.index >= coords.size())
                     throw std::out_of_range("variable '" + v.name + "' outside point");
                   return coords[v.index];
                 },
                 [&](const ParamNode& p) {
                   auto it = params.find(p.name);
                   if (it == params.end()) throw UnboundParam(p.name);
                   return Jet::constant(it->second, dim);
                 },
                 [&](const NegNode& n) { return -eval_rec(n.arg, coords, params, dim); },
                 [&](const BinaryNode& b) {
                   const Jet l = eval_rec(b.lhs, coords, params, dim);
                   // x^c with constant c stays on the cheaper single-argument path.
                   if (b.op == BinaryOp::pow) {
                     if (const auto* c = std::get_if<ConstNode>(&b.rhs.node().v))
                       return pow(l, c->value);
                   }
                   const Jet r = eval_rec(b.rhs, coords, params, dim);
                   switch (b.op) {
                     case BinaryOp::add: return l + r;
                     case BinaryOp::sub: return l - r;
                     case BinaryOp::mul: return l * r;
                     case BinaryOp::div: return l / r;
                     case BinaryOp::pow: return pow(l, r);
                   }
                   throw std::logic_error("unknown op");
                 },
                 [&](const CallNode& c) {
                   return apply_function(c.fn, eval_rec(c.arg, coords, params, dim));
                 }},
      e.node().v);
}

double pow_plain(double x, double c) {
  if (x == 0.0 && c < 0.0) throw DomainError("0 raised to a negative power");
  if (x < 0.0 && std::floor(c) != c) throw DomainError("negative base with non-integer exponent");
  return std::pow(x, c);
}

double eval_plain(const Expr& e, std::span<const double> x, const ParamMap& params) {
  return std::visit(
      overloaded{[&](const ConstNode& c) { return c.value; },
                 [&](const VarNode& v) { return x[v.index]; },
                 [&](const ParamNode& p) {
                   auto it = params.find(p.name);
                   if (it == params.end()) throw UnboundParam(p.name);
                   return it->second;
                 },
                 [&](const NegNode& n) { return -eval_plain(n.arg, x, params); },
                 [&](const BinaryNode& b) {
                   const double l = eval_plain(b.lhs, x, params);
                   const double r = eval_plain(b.rhs, x, params);
                   switch (b.op) {
                     case BinaryOp::add: return l + r;
                     case BinaryOp::sub: return l - r;
                     case BinaryOp::mul: return l * r;
                     case BinaryOp::div:
                       if (r == 0.0) throw DomainError("division by zero");
                       return l / r;
                     case BinaryOp::pow: return pow_plain(l, r);
                   }
                   throw std::logic_error("unknown op");
                 },
                 [&](const CallNode& c) { return apply_function(c.fn, eval_plain(c.arg, x, params)); }},
      e.node().v);
}

template <typename Pick>
void collect(const Expr& e, NameSet& out, Pick pick) {
  std::visit(overloaded{[&](const NegNode& n) { collect(n.arg, out, pick); },
                        [&](const BinaryNode& b) {
                          collect(b.lhs, out, pick);
                          collect(b.rhs, out, pick);
                        },
                        [&](const CallNode& c) { collect(c.arg, out, pick); },
                        [&](const auto& leaf) { pick(leaf, out); }},
             e.node().v);
}

template <typename Leaf>
Expr rewrite(const Expr& e, Leaf leaf) {
  return std::visit(
      overloaded{[&](const NegNode& n) { return Expr::negate(rewrite(n.arg, leaf)); },
                 [&](const BinaryNode& b) {
                   return Expr::binary(b.op, rewrite(b.lhs, leaf), rewrite(b.rhs, leaf));
                 },
                 [&](const CallNode& c) { return Expr::call(c.fn, rewrite(c.arg, leaf)); },
                 [&](const ParamNode& p) { return leaf(e, p); },
                 [&](const auto&) { return e; }},
      e.node().v);
}

}  // namespace

Expr Expr::constant(double v) { return make({ConstNode{v}}); }
Expr Expr::variable(std::string name, std::size_t index) { return make({VarNode{std::move(name), index}}); }
Expr Expr::param(std::string name) { return make({ParamNode{std::move(name)}}); }
Expr Expr::negate(Expr e) { return make({NegNode{std::move(e)}}); }
Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
  return make({BinaryNode{op, std::move(lhs), std::move(rhs)}});
}
Expr Expr::call(Function f, Expr arg) { return make({CallNode{f, std::move(arg)}}); }

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const auto& x = a.node().v;
  const auto& y = b.node().v;
  if (x.index() != y.index()) return false;
  return std::visit(
      overloaded{[&](const ConstNode& c) {
                   const double o = std::get<ConstNode>(y).value;
                   return c.value == o || (std::isnan(c.value) && std::isnan(o));
                 },
                 [&](const VarNode& v) {
                   const auto& o = std::get<VarNode>(y);
                   return v.name == o.name && v.index == o.index;
                 },
                 [&](const ParamNode& p) { return p.name == std::get<ParamNode>(y).name; },
                 [&](const NegNode& n) { return n.arg == std::get<NegNode>(y).arg; },
                 [&](const BinaryNode& bn) {
                   const auto& o = std::get<BinaryNode>(y);
                   return bn.op == o.op && bn.lhs == o.lhs && bn.rhs == o.rhs;
                 },
                 [&](const CallNode& c) {
                   const auto& o = std::get<CallNode>(y);
                   return c.fn == o.fn && c.arg == o.arg;
                 }},
      x);
}

Expr parse(std::string_view source, const ChartSpec& chart, const NameSet& params) {
  return Parser(source, chart, params).parse_all();
}

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

Jet eval_jet(const Expr& e, std::span<const Jet> coords, const ParamMap& params) {
  const std::size_t dim = coords.empty() ? 0 : coords.front().dim();
  return eval_rec(e, coords, params, dim);
}

Jet eval_jet(const Expr& e, const PhasePoint& x, const ParamMap& params, int order) {
  const std::vector<Jet> coords = lift_point(x.coords(), order);
  return eval_jet(e, coords, params);
}

double evaluate(const Expr& e, std::span<const double> point, const ParamMap& params) {
  return eval_plain(e, point, params);
}

NameSet free_variables(const Expr& e) {
  NameSet out;
  collect(e, out, overloaded{[](const VarNode& v, NameSet& s) { s.insert(v.name); },
                             [](const auto&, NameSet&) {}});
  return out;
}

NameSet parameters(const Expr& e) {
  NameSet out;
  collect(e, out, overloaded{[](const ParamNode& p, NameSet& s) { s.insert(p.name); },
                             [](const auto&, NameSet&) {}});
  return out;
}

Expr substitute(const Expr& e, std::string_view name, const Expr& replacement) {
  return rewrite(e, [&](const Expr& self, const ParamNode& p) { return p.name == name ? replacement : self; });
}

Expr bind(const Expr& e, const ParamMap& params) {
  return rewrite(e, [&](const Expr&, const ParamNode& p) {
    auto it = params.find(p.name);
    if (it == params.end()) throw UnboundParam(p.name);
    return Expr::constant(it->second);
  });
}

}  // namespace cocontact
