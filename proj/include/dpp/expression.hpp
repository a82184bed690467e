#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>

namespace dpp {

/// Parse failure; `position()` is the 0-based byte offset into the source.
class ExpressionError : public std::runtime_error {
 public:
  ExpressionError(const std::string& message, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Compiled arithmetic expression over x1..xn and t.
///
/// Grammar: numbers, the variables x1..xn and t, the constants pi and e,
/// binary + - * / ^ (right associative power), unary minus, parentheses and
/// the functions exp sin cos sqrt abs (one argument) and min max (two).
class Expression {
 public:
  /// Parses `source` for a space of dimension `dim`; throws ExpressionError.
  static Expression parse(const std::string& source, int dim);

  double evaluate(std::span<const double> x, double t) const;
  const std::string& source() const { return source_; }
  int dim() const { return dim_; }

  struct Node;

 private:
  Expression(std::string source, int dim, std::shared_ptr<const Node> root);

  std::string source_;
  int dim_;
  std::shared_ptr<const Node> root_;
};

}  // namespace dpp
