#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "dpp/operators.hpp"
#include "dpp/params.hpp"

namespace dpp {

/// Coefficients of the PDE reproduced by the DPP at second order:
///   u_t = c_inf * normalized-infinity-Laplacian(u) + c_lap * Laplacian(u)
/// with c_inf = alpha - beta / (n + 1) and c_lap = beta / (n + 1).
struct EffectivePde {
  double c_inf;
  double c_lap;
};

EffectivePde effective_pde_coefficients(const DppParams& params);

/// A closed-form function of (x, t) with its derivatives.
class SmoothTestFunction {
 public:
  using ScalarFn = std::function<double(const Vec&, double)>;
  using VectorFn = std::function<Vec(const Vec&, double)>;
  using MatrixFn = std::function<Mat(const Vec&, double)>;

  /// Checks the derivatives against central differences at (probe, probe_t)
  /// and throws DomainError on mismatch.
  SmoothTestFunction(ScalarFn value, VectorFn gradient, MatrixFn hessian, ScalarFn time_derivative,
                     std::string provenance, const Vec& probe, double probe_t);

  /// 0.5 x^T H x + b.x + c + d t.
  static SmoothTestFunction quadratic(const Mat& hessian, const Vec& b, double c, double d = 0.0);
  /// exp(alpha k^2 t + k x1) in dimension n.
  static SmoothTestFunction exp_heat(double alpha, double k, int n);

  double value(const Vec& x, double t) const { return value_(x, t); }
  Vec gradient(const Vec& x, double t) const { return gradient_(x, t); }
  Mat hessian(const Vec& x, double t) const { return hessian_(x, t); }
  double time_derivative(const Vec& x, double t) const { return dt_(x, t); }
  const std::string& provenance() const { return provenance_; }

  /// Largest mismatch between analytic and central-difference derivatives.
  double derivative_mismatch(const Vec& x, double t, double step) const;

 private:
  ScalarFn value_;
  VectorFn gradient_;
  MatrixFn hessian_;
  ScalarFn dt_;
  std::string provenance_;
};

struct ExpansionResidual {
  double residual;
  /// [midrange A phi(x, nu, t - eps^2/2) - phi(x, t)] / (eps^2 / 2).
  double discrete_rate;
  /// c_inf * Delta_inf^N phi + c_lap * Delta phi - phi_t.
  double pde_rate;
  double gradient_norm;
};

/// R = discrete_rate - pde_rate, applying the operator to phi itself.
ExpansionResidual expansion_residual(const SmoothTestFunction& phi, const Vec& x, double t, const DppParams& params,
                                     const DppStencil& stencil);

/// Largest angle from any point of the sphere to the nearest direction of
/// the set. Exact (pi / K) for the uniform planar sets; for n = 3 estimated
/// from `probes` seeded random points and inflated by 25%.
double covering_angle(const DirectionSet<double>& dirs, std::size_t probes = 20000, std::uint64_t seed = 7);

/// Expansion of the DPP on 0.5 x^T H x + b.x + c + d t, split into what the
/// continuous sup/inf over the whole sphere gives and what the direction set
/// can add on top.
struct QuadraticExpansionBound {
  /// Residual with sup/inf over the whole sphere, from the secular equation.
  double sphere_residual;
  /// Bound on |R(direction set) - sphere_residual|.
  double direction_bound;
  /// |sphere_residual| + direction_bound + rounding allowance.
  double tolerance;
};

/// Requires the quadrature to integrate quadratics exactly (checked).
QuadraticExpansionBound quadratic_expansion_bound(const Mat& hessian, const Vec& gradient, const DppParams& params,
                                                  const DppStencil& stencil, double covering);

/// max over |nu| = 1 of a.nu + nu^T B nu (B symmetric).
double sphere_quadratic_max(const Vec& a, const Mat& B);

}  // namespace dpp
