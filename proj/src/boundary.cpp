#include "dpp/boundary.hpp"

#include <cmath>
#include <sstream>

namespace dpp {

namespace {
template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;
}  // namespace

double BoundaryData::eval(std::span<const double> x, double t) const {
  return std::visit(
      Overloaded{
          [](const Constant& f) { return f.c; },
          [&](const Linear& f) {
            double s = f.c;
            for (std::size_t i = 0; i < x.size(); ++i) s += f.a[static_cast<Eigen::Index>(i)] * x[i];
            return s;
          },
          [&](const ExpHeat& f) { return std::exp(f.alpha * f.k * f.k * t + f.k * x[0]); },
          [&](const Quadratic&) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s;
          },
          [&](const Expression& e) { return e.evaluate(x, t); },
      },
      kind_);
}

std::string BoundaryData::kind_name() const {
  return std::visit(Overloaded{
                        [](const Constant&) { return std::string("constant"); },
                        [](const Linear&) { return std::string("linear"); },
                        [](const ExpHeat&) { return std::string("exp_heat"); },
                        [](const Quadratic&) { return std::string("quadratic"); },
                        [](const Expression&) { return std::string("expression"); },
                    },
                    kind_);
}

std::string BoundaryData::to_expression(int dim) const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Constant& f) { os << "(" << f.c << ")"; },
                 [&](const Linear& f) {
                   os << "(" << f.c << ")";
                   for (int i = 0; i < dim; ++i) os << " + (" << f.a[i] << ")*x" << (i + 1);
                 },
                 [&](const ExpHeat& f) {
                   os << "exp((" << f.alpha * f.k * f.k << ")*t + (" << f.k << ")*x1)";
                 },
                 [&](const Quadratic&) {
                   for (int i = 0; i < dim; ++i) os << (i ? " + " : "") << "x" << (i + 1) << "^2";
                 },
                 [&](const Expression& e) { os << e.source(); },
             },
             kind_);
  return os.str();
}

}  // namespace dpp
