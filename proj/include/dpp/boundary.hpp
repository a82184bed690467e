#pragma once

#include <span>
#include <string>
#include <variant>

#include "dpp/domain.hpp"
#include "dpp/expression.hpp"

namespace dpp {

/// Boundary data F on the parabolic strip, evaluable at any (x, t).
class BoundaryData {
 public:
  struct Constant {
    double c;
  };
  struct Linear {
    Vec a;
    double c;
  };
  /// exp(alpha k^2 t + k x1): a classical solution of u_t = alpha u_{x1 x1}.
  struct ExpHeat {
    double k;
    double alpha;
  };
  /// |x|^2.
  struct Quadratic {};
  using Kind = std::variant<Constant, Linear, ExpHeat, Quadratic, Expression>;

  static BoundaryData constant(double c) { return BoundaryData(Constant{c}); }
  static BoundaryData linear(Vec a, double c) { return BoundaryData(Linear{std::move(a), c}); }
  static BoundaryData exp_heat(double k, double alpha) { return BoundaryData(ExpHeat{k, alpha}); }
  static BoundaryData quadratic() { return BoundaryData(Quadratic{}); }
  static BoundaryData expression(const std::string& source, int dim) {
    return BoundaryData(Expression::parse(source, dim));
  }

  explicit BoundaryData(Kind kind) : kind_(std::move(kind)) {}

  double eval(std::span<const double> x, double t) const;

  template <class Derived>
  double operator()(const Eigen::MatrixBase<Derived>& x, double t) const {
    static_assert(Derived::IsVectorAtCompileTime);
    const auto& d = x.derived();
    if constexpr (Derived::Flags & Eigen::DirectAccessBit) {
      return eval(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())), t);
    } else {
      const Vec tmp = d;
      return eval(std::span<const double>(tmp.data(), static_cast<std::size_t>(tmp.size())), t);
    }
  }

  const Kind& kind() const { return kind_; }
  /// Kind tag used in configs and sidecars.
  std::string kind_name() const;
  /// Closed-form text of F(x, t), parseable by Expression::parse.
  std::string to_expression(int dim) const;

 private:
  Kind kind_;
};

}  // namespace dpp
