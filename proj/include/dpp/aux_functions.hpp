#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "dpp/domain.hpp"

namespace dpp {

/// Concave modulus omega(t) = t - omega0 t^gamma on [0, omega1],
/// omega1 = (2 gamma omega0)^(-1/(gamma-1)). Not defined beyond omega1.
template <typename Scalar = double>
class ConcaveModulus {
 public:
  ConcaveModulus(Scalar gamma, Scalar omega0) : gamma_(gamma), omega0_(omega0) {
    if (!(gamma > Scalar(1) && gamma < Scalar(2))) throw DomainError("omega: gamma must lie in (1,2)");
    if (!(omega0 > Scalar(0))) throw DomainError("omega: omega0 must be positive");
    using std::pow;
    omega1_ = pow(Scalar(2) * gamma_ * omega0_, Scalar(-1) / (gamma_ - Scalar(1)));
  }

  Scalar gamma() const { return gamma_; }
  Scalar omega0() const { return omega0_; }
  Scalar omega1() const { return omega1_; }

  Scalar operator()(Scalar t) const {
    check(t);
    using std::pow;
    return t - omega0_ * pow(t, gamma_);
  }
  Scalar derivative(Scalar t) const {
    check(t);
    using std::pow;
    return Scalar(1) - gamma_ * omega0_ * pow(t, gamma_ - Scalar(1));
  }
  /// Diverges to -infinity at t = 0.
  Scalar second_derivative(Scalar t) const {
    check(t);
    using std::pow;
    return -gamma_ * (gamma_ - Scalar(1)) * omega0_ * pow(t, gamma_ - Scalar(2));
  }
  Scalar third_derivative(Scalar t) const {
    check(t);
    using std::pow;
    return -gamma_ * (gamma_ - Scalar(1)) * (gamma_ - Scalar(2)) * omega0_ * pow(t, gamma_ - Scalar(3));
  }

 private:
  void check(Scalar t) const {
    if (!(t >= Scalar(0))) throw DomainError("omega: argument must be non-negative");
    if (t > omega1_ * (Scalar(1) + Scalar(1e-12))) {
      throw DomainError("omega: argument beyond omega1, where no extension is defined");
    }
  }

  Scalar gamma_;
  Scalar omega0_;
  Scalar omega1_;
};

/// Comparison-function ingredients for the spatial regularity arguments:
///   f1(x, z) = C |x - z|^delta + M |x + z|^2   (or C omega(|x - z|) + ...)
///   f2(x, z) = C^(2(N - i)) eps^delta on the annulus A_i, 0 beyond N eps / 10
///   g(t, s)  = max(M (|t - r^2|^(delta/2) - r^delta), same with s)
///   H = f1 - f2 + g
/// Times passed to g are field times; `time_shift` maps them to the window
/// (-r^2, 0) of the estimates by subtracting it.
template <typename Scalar = double>
struct AuxiliaryFunctions {
  using Point = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar C;
  Scalar M;
  int N;
  Scalar delta;
  Scalar epsilon;
  Scalar r;
  Scalar time_shift = Scalar(0);
  /// Lipschitz variant: f1 uses omega and delta must be 1.
  bool use_omega = false;
  Scalar gamma = Scalar(1.25);
  Scalar omega0 = Scalar(1);

  void validate() const {
    if (!(C > Scalar(1) && M > Scalar(1))) throw DomainError("aux: C and M must exceed 1");
    if (N < 1) throw DomainError("aux: N must be a positive integer");
    if (!(delta > Scalar(0) && delta <= Scalar(1))) throw DomainError("aux: delta must lie in (0,1]");
    if (!(epsilon > Scalar(0) && r > Scalar(0))) throw DomainError("aux: epsilon and r must be positive");
    if (use_omega) {
      if (delta != Scalar(1)) throw DomainError("aux: the omega variant uses delta = 1");
      ConcaveModulus<Scalar>(gamma, omega0);
    }
  }

  ConcaveModulus<Scalar> omega() const { return ConcaveModulus<Scalar>(gamma, omega0); }

  /// i with (i-1) eps/10 < |x - z| <= i eps/10, 0 when x = z, -1 beyond N eps/10.
  template <class DX, class DZ>
  int annulus(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DZ>& z) const {
    const Scalar d = (x - z).norm();
    const Scalar width = epsilon / Scalar(10);
    if (d > Scalar(N) * width) return -1;
    using std::ceil;
    const int i = static_cast<int>(ceil(d / width));
    return std::clamp(i, 0, N);
  }

  template <class DX, class DZ>
  Scalar f1(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DZ>& z) const {
    using std::pow;
    const Scalar d = (x - z).norm();
    const Scalar spread = use_omega ? omega()(d) : pow(d, delta);
    return C * spread + M * (x + z).squaredNorm();
  }

  template <class DX, class DZ>
  Scalar f2(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DZ>& z) const {
    const int i = annulus(x, z);
    if (i < 0) return Scalar(0);
    using std::pow;
    return pow(C, Scalar(2 * (N - i))) * pow(epsilon, delta);
  }

  Scalar g(Scalar t, Scalar s) const {
    using std::abs;
    using std::pow;
    const Scalar tp = t - time_shift;
    const Scalar sp = s - time_shift;
    const Scalar rd = pow(r, delta);
    const Scalar gt = M * (pow(abs(tp - r * r), delta / Scalar(2)) - rd);
    const Scalar gs = M * (pow(abs(sp - r * r), delta / Scalar(2)) - rd);
    return std::max(gt, gs);
  }

  template <class DX, class DZ>
  Scalar H(const Eigen::MatrixBase<DX>& x, const Eigen::MatrixBase<DZ>& z, Scalar t, Scalar s) const {
    return f1(x, z) - f2(x, z) + g(t, s);
  }
};

enum class AuxFunction { F1, F2, G, H, Omega };

template <typename Scalar = double>
struct AuxArgs {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z;
  Scalar t = Scalar(0);
  Scalar s = Scalar(0);
};

/// Dispatches to one auxiliary function; Omega reads its argument from t.
template <typename Scalar>
Scalar aux_eval(const AuxiliaryFunctions<Scalar>& aux, AuxFunction which, const AuxArgs<Scalar>& args) {
  aux.validate();
  switch (which) {
    case AuxFunction::F1: return aux.f1(args.x, args.z);
    case AuxFunction::F2: return aux.f2(args.x, args.z);
    case AuxFunction::G: return aux.g(args.t, args.s);
    case AuxFunction::H: return aux.H(args.x, args.z, args.t, args.s);
    case AuxFunction::Omega: return aux.omega()(args.t);
  }
  return Scalar(0);
}

struct OmegaCheck {
  double gamma = 0.0;
  double omega0 = 0.0;
  double omega1 = 0.0;
  double omega_at_zero = 0.0;
  double min_derivative = 0.0;
  double max_derivative = 0.0;
  /// Largest value of omega'' on (0, omega1]; must be negative.
  double max_second_derivative = 0.0;
  /// Largest |central difference - omega'| relative to its truncation bound.
  double fd_ratio = 0.0;
  bool increasing = false;
  bool pass = false;
};

/// Samples (0, omega1]: omega' in [1/2, 1], omega'' < 0, omega increasing and
/// its central differences within their truncation bound of omega'.
template <typename Scalar = double>
OmegaCheck omega_check(Scalar gamma, Scalar omega0, int samples) {
  if (samples < 2) throw DomainError("omega_check: need at least two samples");
  const ConcaveModulus<Scalar> w(gamma, omega0);
  OmegaCheck res;
  res.gamma = static_cast<double>(gamma);
  res.omega0 = static_cast<double>(omega0);
  res.omega1 = static_cast<double>(w.omega1());
  res.omega_at_zero = static_cast<double>(w(Scalar(0)));
  res.min_derivative = std::numeric_limits<double>::infinity();
  res.max_derivative = -std::numeric_limits<double>::infinity();
  res.max_second_derivative = -std::numeric_limits<double>::infinity();
  res.increasing = true;
  Scalar prev = w(Scalar(0));
  const Scalar ulp = std::numeric_limits<Scalar>::epsilon();
  for (int i = 1; i <= samples; ++i) {
    const Scalar t = w.omega1() * Scalar(i) / Scalar(samples);
    const Scalar d1 = w.derivative(t);
    res.min_derivative = std::min(res.min_derivative, static_cast<double>(d1));
    res.max_derivative = std::max(res.max_derivative, static_cast<double>(d1));
    res.max_second_derivative = std::max(res.max_second_derivative, static_cast<double>(w.second_derivative(t)));
    const Scalar v = w(t);
    res.increasing = res.increasing && v > prev;
    prev = v;
    if (i < samples) {
      using std::abs;
      const Scalar h = std::min(w.omega1() * Scalar(1e-4), t / Scalar(2));
      const Scalar fd = (w(t + h) - w(t - h)) / (Scalar(2) * h);
      const Scalar bound = h * h / Scalar(6) * abs(w.third_derivative(t - h)) + Scalar(8) * ulp * (Scalar(1) + abs(v)) / h;
      res.fd_ratio = std::max(res.fd_ratio, static_cast<double>(abs(fd - d1) / bound));
    }
  }
  const double tol = 1e-12;
  res.pass = res.omega_at_zero == 0.0 && res.min_derivative >= 0.5 - tol && res.max_derivative <= 1.0 + tol &&
             res.max_second_derivative < 0.0 && res.increasing && res.fd_ratio <= 1.0;
  return res;
}

}  // namespace dpp
