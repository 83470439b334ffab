// SPDX-License-Identifier: Apache-2.0
#pragma once

// Scalar expression language for metric entries, immersions and vector field
// coefficients. Grammar (see docs/grammar.md):
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'pi' | var | func '(' expr ')' | '(' expr ')'
//
// '^' is right associative and binds tighter than unary minus, so -u1^2 is
// -(u1^2) and 2^-1 is 2^(-1).

#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "framebundle/jet.hpp"

namespace fb {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset, std::vector<std::string> expected = {})
      : std::runtime_error(what), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

enum class Op { Num, Pi, Var, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh };

inline constexpr std::string_view kFunctionNames[] = {"sin", "cos", "tan", "exp", "log",
                                                      "sqrt", "sinh", "cosh", "tanh"};

struct ExprNode {
  Op op = Op::Num;
  double num = 0.0;
  int var = 0;  // zero-based
  Fn fn = Fn::Sin;
  std::shared_ptr<const ExprNode> a, b;
  std::size_t offset = 0, length = 0;  // source span, for diagnostics
};

using NodePtr = std::shared_ptr<const ExprNode>;

namespace detail {

inline bool integral_literal(const ExprNode& n, long& out) {
  if (n.op == Op::Num && std::abs(n.num) < 1e9 && n.num == std::floor(n.num)) {
    out = static_cast<long>(n.num);
    return true;
  }
  if (n.op == Op::Neg && n.a && integral_literal(*n.a, out)) {
    out = -out;
    return true;
  }
  return false;
}

inline double ipow(double x, long k) {
  if (k < 0) return 1.0 / ipow(x, -k);
  double r = 1.0;
  while (k > 0) {
    if (k & 1) r *= x;
    k >>= 1;
    if (k) x *= x;
  }
  return r;
}

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class Parser {
 public:
  Parser(std::string_view src, int dim, std::string_view prefix) : src_(src), dim_(dim), prefix_(prefix) {}

  NodePtr parse() {
    skip();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_, {"expression"});
    auto e = expr();
    skip();
    if (pos_ < src_.size()) {
      throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "' at offset " + std::to_string(pos_), pos_,
                       {"+", "-", "*", "/", "^", "end of input"});
    }
    return e;
  }

 private:
  void skip() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
      ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  static NodePtr binary(Op op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->op = op;
    n->offset = a->offset;
    n->length = b->offset + b->length - a->offset;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  NodePtr expr() {
    auto lhs = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        lhs = binary(Op::Add, lhs, term());
      } else if (peek('-')) {
        ++pos_;
        lhs = binary(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    while (true) {
      if (peek('*')) {
        ++pos_;
        lhs = binary(Op::Mul, lhs, unary());
      } else if (peek('/')) {
        ++pos_;
        lhs = binary(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    skip();
    const std::size_t start = pos_;
    if (peek('-')) {
      ++pos_;
      auto inner = unary();
      auto n = std::make_shared<ExprNode>();
      n->op = Op::Neg;
      n->offset = start;
      n->length = inner->offset + inner->length - start;
      n->a = std::move(inner);
      return n;
    }
    if (peek('+')) {
      ++pos_;
      return unary();
    }
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (peek('^')) {
      ++pos_;
      return binary(Op::Pow, base, unary());
    }
    return base;
  }

  NodePtr primary() {
    skip();
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_, {"number", "identifier", "("});
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expr();
      if (!peek(')')) throw ParseError("expected ')' at offset " + std::to_string(pos_), pos_, {")"});
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      const std::string_view id = src_.substr(start, pos_ - start);
      auto n = std::make_shared<ExprNode>();
      n->offset = start;
      n->length = pos_ - start;
      if (id == "pi") {
        n->op = Op::Pi;
        return n;
      }
      for (std::size_t f = 0; f < std::size(kFunctionNames); ++f) {
        if (id != kFunctionNames[f]) continue;
        if (!peek('(')) throw ParseError("expected '(' after function '" + std::string(id) + "'", pos_, {"("});
        ++pos_;
        auto arg = expr();
        if (!peek(')')) throw ParseError("expected ')' at offset " + std::to_string(pos_), pos_, {")"});
        ++pos_;
        n->op = Op::Call;
        n->fn = static_cast<Fn>(f);
        n->a = std::move(arg);
        n->length = pos_ - start;
        return n;
      }
      if (id.size() > prefix_.size() && id.substr(0, prefix_.size()) == prefix_) {
        const auto digits = id.substr(prefix_.size());
        int idx = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
        if (ec == std::errc() && ptr == digits.data() + digits.size()) {
          if (idx < 1 || idx > dim_) {
            throw ParseError("variable index out of range: '" + std::string(id) + "' (dimension " +
                                 std::to_string(dim_) + ")",
                             start);
          }
          n->op = Op::Var;
          n->var = idx - 1;
          return n;
        }
      }
      throw ParseError("unknown identifier '" + std::string(id) + "' at offset " + std::to_string(start), start,
                       {prefix_ + "1.." + prefix_ + std::to_string(dim_), "pi", "function name"});
    }
    throw ParseError("unexpected '" + std::string(1, c) + "' at offset " + std::to_string(pos_), pos_,
                     {"number", "identifier", "(", "-"});
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (ec != std::errc() || ptr != src_.data() + pos_) {
      throw ParseError("malformed number at offset " + std::to_string(start), start, {"number"});
    }
    auto n = std::make_shared<ExprNode>();
    n->op = Op::Num;
    n->num = v;
    n->offset = start;
    n->length = pos_ - start;
    return n;
  }

  std::string_view src_;
  int dim_;
  std::string prefix_;
  std::size_t pos_ = 0;
};

inline int precedence(const ExprNode& n) {
  switch (n.op) {
    case Op::Add:
    case Op::Sub:
      return 1;
    case Op::Mul:
    case Op::Div:
      return 2;
    case Op::Neg:
      return 3;
    case Op::Pow:
      return 4;
    default:
      return 5;
  }
}

inline void print(const ExprNode& n, const std::string& prefix, std::string& out);

inline void print_at(const ExprNode& n, int min_prec, const std::string& prefix, std::string& out) {
  if (precedence(n) < min_prec) {
    out += '(';
    print(n, prefix, out);
    out += ')';
  } else {
    print(n, prefix, out);
  }
}

inline void print(const ExprNode& n, const std::string& prefix, std::string& out) {
  switch (n.op) {
    case Op::Num:
      out += format_number(n.num);
      return;
    case Op::Pi:
      out += "pi";
      return;
    case Op::Var:
      out += prefix + std::to_string(n.var + 1);
      return;
    case Op::Neg:
      out += '-';
      print_at(*n.a, 3, prefix, out);
      return;
    case Op::Call:
      out += kFunctionNames[static_cast<int>(n.fn)];
      out += '(';
      print(*n.a, prefix, out);
      out += ')';
      return;
    case Op::Pow:
      print_at(*n.a, 5, prefix, out);
      out += '^';
      print_at(*n.b, 3, prefix, out);
      return;
    default: {
      const int p = precedence(n);
      const char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : '/';
      print_at(*n.a, p, prefix, out);
      out += sym;
      print_at(*n.b, p + 1, prefix, out);
      return;
    }
  }
}

inline bool same_tree(const ExprNode& x, const ExprNode& y) {
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::Num:
      return x.num == y.num;
    case Op::Pi:
      return true;
    case Op::Var:
      return x.var == y.var;
    case Op::Neg:
      return same_tree(*x.a, *y.a);
    case Op::Call:
      return x.fn == y.fn && same_tree(*x.a, *y.a);
    default:
      return same_tree(*x.a, *y.a) && same_tree(*x.b, *y.b);
  }
}

template <class S>
struct Evaluator {
  std::span<const S> vars;
  const std::string* source;

  S constant(double v) const {
    return S(v);
  }

  [[noreturn]] void domain(const ExprNode& n, const std::string& what) const {
    std::string snippet = source ? source->substr(n.offset, n.length) : std::string();
    throw DomainError(what + " in '" + snippet + "' at offset " + std::to_string(n.offset), n.offset, n.length);
  }

  S eval(const ExprNode& n) const {
    using std::cos;
    using std::cosh;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    using std::tanh;
    switch (n.op) {
      case Op::Num:
        return constant(n.num);
      case Op::Pi:
        return constant(std::numbers::pi);
      case Op::Var:
        return vars[n.var];
      case Op::Neg:
        return -eval(*n.a);
      case Op::Add:
        return eval(*n.a) + eval(*n.b);
      case Op::Sub:
        return eval(*n.a) - eval(*n.b);
      case Op::Mul:
        return eval(*n.a) * eval(*n.b);
      case Op::Div: {
        S den = eval(*n.b);
        if (value_of(den) == 0.0) domain(n, "division by zero");
        return eval(*n.a) / den;
      }
      case Op::Pow: {
        S base = eval(*n.a);
        long k = 0;
        if (integral_literal(*n.b, k)) {
          if (k < 0 && value_of(base) == 0.0) domain(n, "negative power of zero");
          if constexpr (std::is_same_v<S, double>) {
            return detail::ipow(base, k);
          } else {
            return fb::ipow(base, k);
          }
        }
        if (!(value_of(base) > 0.0)) domain(n, "non-integer power of non-positive value");
        S ex = eval(*n.b);
        return exp(ex * log(base));
      }
      case Op::Call: {
        S x = eval(*n.a);
        const double x0 = value_of(x);
        switch (n.fn) {
          case Fn::Sin:
            return sin(x);
          case Fn::Cos:
            return cos(x);
          case Fn::Tan:
            if (std::cos(x0) == 0.0) domain(n, "tan at a pole");
            if constexpr (std::is_same_v<S, double>) {
              return std::tan(x);
            } else {
              return fb::tan(x);
            }
          case Fn::Exp:
            return exp(x);
          case Fn::Log:
            if (!(x0 > 0.0)) domain(n, "log of non-positive value");
            return log(x);
          case Fn::Sqrt:
            if (x0 < 0.0) domain(n, "sqrt of negative value");
            if constexpr (!std::is_same_v<S, double>) {
              if (x0 == 0.0 && x.order() > 0) domain(n, "sqrt is not differentiable at zero");
            }
            return sqrt(x);
          case Fn::Sinh:
            return sinh(x);
          case Fn::Cosh:
            return cosh(x);
          case Fn::Tanh:
            return tanh(x);
        }
      }
    }
    throw std::logic_error("corrupt expression node");
  }
};

}  // namespace detail

/// Immutable parsed scalar expression in variables <prefix>1..<prefix>dim.
class Expression {
 public:
  Expression() = default;

  static Expression parse(std::string_view source, int dim, std::string_view var_prefix) {
    if (dim < 1 || dim > 9) throw std::invalid_argument("expression dimension must be in 1..9");
    Expression e;
    e.source_ = std::make_shared<const std::string>(source);
    e.dim_ = dim;
    e.prefix_ = std::string(var_prefix);
    e.root_ = detail::Parser(*e.source_, dim, var_prefix).parse();
    return e;
  }

  static Expression constant(double v, int dim, std::string_view var_prefix) {
    return parse(detail::format_number(v), dim, var_prefix);
  }

  bool valid() const noexcept { return root_ != nullptr; }
  int dim() const noexcept { return dim_; }
  const std::string& prefix() const noexcept { return prefix_; }
  const std::string& source() const { return *source_; }
  const ExprNode& root() const { return *root_; }

  /// Canonical serialisation; parses back to a structurally identical tree.
  std::string to_string() const {
    std::string out;
    detail::print(*root_, prefix_, out);
    return out;
  }

  bool same_structure(const Expression& o) const { return detail::same_tree(*root_, *o.root_); }

  bool is_constant_zero() const { return root_->op == Op::Num && root_->num == 0.0; }

  double operator()(std::span<const double> point) const {
    check_dim(point.size());
    return detail::Evaluator<double>{point, source_.get()}.eval(*root_);
  }

  Jet operator()(std::span<const Jet> point) const {
    check_dim(point.size());
    return detail::Evaluator<Jet>{point, source_.get()}.eval(*root_);
  }

  /// Value and exact partial derivatives up to `order` at `point`.
  Jet eval_jet(std::span<const double> point, int order) const {
    check_dim(point.size());
    auto vars = coordinate_jets(point, order);
    Jet r = (*this)(std::span<const Jet>(vars));
    if (r.is_constant()) return Jet(vars[0].layout(), r.value());
    return r;
  }

 private:
  void check_dim(std::size_t n) const {
    if (!root_) throw std::logic_error("evaluation of an empty expression");
    if (static_cast<int>(n) != dim_) {
      throw std::invalid_argument("point has " + std::to_string(n) + " coordinates, expression expects " +
                                  std::to_string(dim_));
    }
  }

  std::shared_ptr<const std::string> source_;
  NodePtr root_;
  int dim_ = 0;
  std::string prefix_;
};

}  // namespace fb
