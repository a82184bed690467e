#include "dpp/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dpp/rng.hpp"

namespace dpp {

EffectivePde effective_pde_coefficients(const DppParams& params) {
  const double lap = params.beta / (params.dim() + 1);
  return {params.alpha - lap, lap};
}

SmoothTestFunction::SmoothTestFunction(ScalarFn value, VectorFn gradient, MatrixFn hessian, ScalarFn time_derivative,
                                       std::string provenance, const Vec& probe, double probe_t)
    : value_(std::move(value)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)),
      dt_(std::move(time_derivative)),
      provenance_(std::move(provenance)) {
  const double step = 1e-4;
  const double scale = 1.0 + std::abs(value_(probe, probe_t)) + gradient_(probe, probe_t).norm() +
                       hessian_(probe, probe_t).norm();
  const double mismatch = derivative_mismatch(probe, probe_t, step);
  if (!(mismatch <= 1e-5 * scale)) {
    std::ostringstream os;
    os << "SmoothTestFunction(" << provenance_ << "): derivatives disagree with finite differences by " << mismatch;
    throw DomainError(os.str());
  }
}

double SmoothTestFunction::derivative_mismatch(const Vec& x, double t, double step) const {
  const Eigen::Index n = x.size();
  const Vec g = gradient_(x, t);
  const Mat h = hessian_(x, t);
  double worst = 0.0;
  for (Eigen::Index a = 0; a < n; ++a) {
    const Vec e = step * Vec::Unit(n, a);
    const double fd = (value_(x + e, t) - value_(x - e, t)) / (2 * step);
    worst = std::max(worst, std::abs(fd - g[a]));
    const Vec fd_col = (gradient_(x + e, t) - gradient_(x - e, t)) / (2 * step);
    worst = std::max(worst, (fd_col - h.col(a)).cwiseAbs().maxCoeff());
  }
  const double fd_t = (value_(x, t + step) - value_(x, t - step)) / (2 * step);
  worst = std::max(worst, std::abs(fd_t - dt_(x, t)));
  return worst;
}

SmoothTestFunction SmoothTestFunction::quadratic(const Mat& hessian, const Vec& b, double c, double d) {
  if (hessian.rows() != b.size() || hessian.cols() != b.size()) {
    throw DomainError("quadratic test function: shape mismatch");
  }
  const Mat hs = 0.5 * (hessian + hessian.transpose());
  std::ostringstream os;
  os << "quadratic 0.5 x^T H x + b.x + c + d t, d = " << d;
  return SmoothTestFunction([=](const Vec& x, double t) { return 0.5 * x.dot(hs * x) + b.dot(x) + c + d * t; },
                            [=](const Vec& x, double) -> Vec { return hs * x + b; },
                            [=](const Vec&, double) -> Mat { return hs; }, [=](const Vec&, double) { return d; },
                            os.str(), Vec::Zero(b.size()), 0.0);
}

SmoothTestFunction SmoothTestFunction::exp_heat(double alpha, double k, int n) {
  auto f = [=](const Vec& x, double t) { return std::exp(alpha * k * k * t + k * x[0]); };
  return SmoothTestFunction(
      f,
      [=](const Vec& x, double t) -> Vec {
        Vec g = Vec::Zero(x.size());
        g[0] = k * f(x, t);
        return g;
      },
      [=](const Vec& x, double t) -> Mat {
        Mat h = Mat::Zero(x.size(), x.size());
        h(0, 0) = k * k * f(x, t);
        return h;
      },
      [=](const Vec& x, double t) { return alpha * k * k * f(x, t); }, "exp(alpha k^2 t + k x1)", Vec::Zero(n),
      0.0);
}

ExpansionResidual expansion_residual(const SmoothTestFunction& phi, const Vec& x, double t, const DppParams& params,
                                     const DppStencil& stencil) {
  const Vec grad = phi.gradient(x, t);
  const double gn = grad.norm();
  if (!(gn > 1e-12)) throw DomainError("expansion_residual: gradient vanishes at the evaluation point");
  const double dt = params.time_step();
  const double earlier = t - dt;
  const Midrange m = stencil.midrange([&](const Vec& y) { return phi.value(y, earlier); }, x);
  const double discrete = (m.value - phi.value(x, t)) / dt;
  const Mat hess = phi.hessian(x, t);
  const Vec g = grad / gn;
  const EffectivePde pde = effective_pde_coefficients(params);
  const double target = pde.c_inf * g.dot(hess * g) + pde.c_lap * hess.trace() - phi.time_derivative(x, t);
  return {discrete - target, discrete, target, gn};
}

double covering_angle(const DirectionSet<double>& dirs, std::size_t probes, std::uint64_t seed) {
  const int n = dirs.dim();
  if (n == 2) return std::numbers::pi / dirs.size();
  Rng rng(seed);
  double worst = 0.0;
  Vec p(n);
  for (std::size_t s = 0; s < probes; ++s) {
    double norm2;
    do {
      for (int a = 0; a < n; ++a) p[a] = 2.0 * rng.uniform() - 1.0;
      norm2 = p.squaredNorm();
    } while (norm2 > 1.0 || norm2 < 1e-12);
    p /= std::sqrt(norm2);
    const double best = (dirs.directions.transpose() * p).maxCoeff();
    worst = std::max(worst, std::acos(std::clamp(best, -1.0, 1.0)));
  }
  return 1.25 * worst;
}

double sphere_quadratic_max(const Vec& a, const Mat& B) {
  Eigen::SelfAdjointEigenSolver<Mat> es(B);
  const Vec mu = 2.0 * es.eigenvalues();
  const Vec ai = es.eigenvectors().transpose() * a;
  const Eigen::Index top = a.size() - 1;
  const double anorm = a.norm();
  auto secular = [&](double lambda) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < ai.size(); ++i) s += ai[i] * ai[i] / ((lambda - mu[i]) * (lambda - mu[i]));
    return s;
  };
  Vec nu(a.size());
  const double floor_gap = 1e-300;
  if (anorm == 0.0 || secular(mu[top] + std::max(floor_gap, 1e-14 * anorm)) < 1.0) {
    // hard case: the top eigenvector absorbs the remaining length
    nu.setZero();
    for (Eigen::Index i = 0; i < top; ++i) {
      if (mu[top] - mu[i] > 0.0) nu[i] = ai[i] / (mu[top] - mu[i]);
    }
    nu[top] = std::sqrt(std::max(0.0, 1.0 - nu.squaredNorm()));
  } else {
    double lo = mu[top], hi = mu[top] + anorm;
    for (int it = 0; it < 300 && hi - lo > 0.0; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      (secular(mid) > 1.0 ? lo : hi) = mid;
    }
    const double lambda = hi;
    for (Eigen::Index i = 0; i < ai.size(); ++i) nu[i] = ai[i] / (lambda - mu[i]);
    nu.normalize();
  }
  const Vec v = es.eigenvectors() * nu;
  return a.dot(v) + v.dot(B * v);
}

QuadraticExpansionBound quadratic_expansion_bound(const Mat& hessian, const Vec& gradient, const DppParams& params,
                                                  const DppStencil& stencil, double covering) {
  const int n = params.dim();
  const double moment_error =
      std::abs(stencil.quadrature().second_moment().trace() - double(n - 1) / double(n + 1));
  if (moment_error > 1e-10) throw DomainError("quadratic_expansion_bound: quadrature is not exact on quadratics");
  const double g = gradient.norm();
  if (!(g > 0.0)) throw DomainError("quadratic_expansion_bound: vanishing gradient");
  const double eps = params.epsilon();
  const EffectivePde pde = effective_pde_coefficients(params);
  // A phi(x, nu) - const = a.nu + nu^T B nu on the sphere
  const Vec a = eps * params.alpha * gradient;
  const Mat B = 0.5 * eps * eps * pde.c_inf * hessian;
  const double qmax = sphere_quadratic_max(a, B);
  const double qmin = -sphere_quadratic_max(-a, -B);
  const Vec unit = gradient / g;
  QuadraticExpansionBound out;
  out.sphere_residual = (qmax + qmin) / (eps * eps) - pde.c_inf * unit.dot(hessian * unit);
  // bounds the second derivative of the direction profile along great circles
  const double h_norm = hessian.cwiseAbs().rowwise().sum().maxCoeff();
  const double curvature = a.norm() + 4.0 * std::abs(0.5 * eps * eps * pde.c_inf) * h_norm;
  out.direction_bound = curvature * covering * covering / (2.0 * eps * eps);
  const double scale = (a.norm() + B.norm()) / (eps * eps) + std::abs(pde.c_inf) * h_norm + pde.c_lap * h_norm;
  out.tolerance = std::abs(out.sphere_residual) + out.direction_bound + 1e-9 * (1.0 + scale);
  return out;
}

}  // namespace dpp
