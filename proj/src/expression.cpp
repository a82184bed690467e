#include "dpp/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <vector>

namespace dpp {

ExpressionError::ExpressionError(const std::string& message, std::size_t position)
    : std::runtime_error(message + " (at offset " + std::to_string(position) + ")"),
      position_(position) {}

struct Expression::Node {
  enum class Op { Number, Var, Time, Neg, Add, Sub, Mul, Div, Pow, Exp, Sin, Cos, Sqrt, Abs, Min, Max };
  Op op = Op::Number;
  double number = 0.0;
  int var = 0;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;

  double eval(std::span<const double> x, double t) const {
    switch (op) {
      case Op::Number: return number;
      case Op::Var: return x[static_cast<std::size_t>(var)];
      case Op::Time: return t;
      case Op::Neg: return -lhs->eval(x, t);
      case Op::Add: return lhs->eval(x, t) + rhs->eval(x, t);
      case Op::Sub: return lhs->eval(x, t) - rhs->eval(x, t);
      case Op::Mul: return lhs->eval(x, t) * rhs->eval(x, t);
      case Op::Div: return lhs->eval(x, t) / rhs->eval(x, t);
      case Op::Pow: return std::pow(lhs->eval(x, t), rhs->eval(x, t));
      case Op::Exp: return std::exp(lhs->eval(x, t));
      case Op::Sin: return std::sin(lhs->eval(x, t));
      case Op::Cos: return std::cos(lhs->eval(x, t));
      case Op::Sqrt: return std::sqrt(lhs->eval(x, t));
      case Op::Abs: return std::abs(lhs->eval(x, t));
      case Op::Min: return std::min(lhs->eval(x, t), rhs->eval(x, t));
      case Op::Max: return std::max(lhs->eval(x, t), rhs->eval(x, t));
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using Op = Node::Op;
using NodePtr = std::unique_ptr<Node>;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

NodePtr number(double v) {
  auto n = make(Op::Number);
  n->number = v;
  return n;
}

// expr   := term (('+'|'-') term)*
// term   := unary (('*'|'/') unary)*
// unary  := '-' unary | '+' unary | power
// power  := atom ('^' unary)?
// atom   := number | ident | ident '(' args ')' | '(' expr ')'
class Parser {
 public:
  Parser(const std::string& src, int dim) : src_(src), dim_(dim) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ExpressionError(msg, pos_); }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::Add, std::move(lhs), term());
      } else if (accept('-')) {
        lhs = make(Op::Sub, std::move(lhs), term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::Mul, std::move(lhs), unary());
      } else if (accept('/')) {
        lhs = make(Op::Div, std::move(lhs), unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return make(Op::Pow, std::move(base), unary());
    return base;
  }

  NodePtr atom() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr parse_number() {
    const char* begin = src_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    return number(v);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string name = src_.substr(start, pos_ - start);

    struct Fn {
      const char* name;
      Op op;
      int arity;
    };
    static constexpr Fn fns[] = {{"exp", Op::Exp, 1},   {"sin", Op::Sin, 1}, {"cos", Op::Cos, 1},
                                 {"sqrt", Op::Sqrt, 1}, {"abs", Op::Abs, 1}, {"min", Op::Min, 2},
                                 {"max", Op::Max, 2}};
    for (const Fn& fn : fns) {
      if (name != fn.name) continue;
      expect('(');
      NodePtr a = expr();
      NodePtr b;
      if (fn.arity == 2) {
        expect(',');
        b = expr();
      }
      expect(')');
      return make(fn.op, std::move(a), std::move(b));
    }
    if (name == "t") return make(Op::Time);
    if (name == "pi") return number(std::numbers::pi);
    if (name == "e") return number(std::numbers::e);
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) digits &= std::isdigit(static_cast<unsigned char>(name[i])) != 0;
      if (digits) {
        const int k = std::stoi(name.substr(1));
        if (k < 1 || k > dim_) {
          pos_ = start;
          fail("variable " + name + " out of range for dimension " + std::to_string(dim_));
        }
        auto n = make(Op::Var);
        n->var = k - 1;
        return n;
      }
    }
    pos_ = start;
    fail("unknown identifier '" + name + "'");
  }

  const std::string& src_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::string source, int dim, std::shared_ptr<const Node> root)
    : source_(std::move(source)), dim_(dim), root_(std::move(root)) {}

Expression Expression::parse(const std::string& source, int dim) {
  if (dim < 1) throw ExpressionError("dimension must be positive", 0);
  Parser p(source, dim);
  NodePtr root = p.parse();
  return Expression(source, dim, std::shared_ptr<const Node>(std::move(root)));
}

double Expression::evaluate(std::span<const double> x, double t) const {
  return root_->eval(x, t);
}

}  // namespace dpp
