#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

#include "tow/geometry.hpp"

namespace tow {

inline constexpr double kSqrt2 = std::numbers::sqrt2;

// Radially symmetric exact solution pair of the coupled system:
//   psi_1 = C1 e^{sqrt2 r} + C2 e^{-sqrt2 r} + a r + b,  psi_2 mirrors the
// exponential part. psi_1 is differentiable at the vertex iff
// sqrt2 (C1 - C2) + a = 0 (psi_2 with C1, C2 swapped).
struct ConePair {
  Vec vertex;
  double C1 = 0, C2 = 0, a = 0, b = 0;
};

inline std::pair<double, double> cone_profiles(const ConePair& p, double r) {
  double ep = std::exp(kSqrt2 * r);
  double en = std::exp(-kSqrt2 * r);
  double exch = p.C1 * ep + p.C2 * en;
  double lin = p.a * r + p.b;
  return {exch + lin, -exch + lin};
}

inline std::pair<double, double> cone_eval(const ConePair& p, const Vec& x) {
  return cone_profiles(p, dist(x, p.vertex));
}

// Coefficients of the cone pair matching center values u_i(x0) and sphere
// maxima M_i at radius r. Round trip: evaluating the returned pair at the
// vertex and on the sphere reproduces the four inputs.
inline ConePair fit_cone(double u10, double u20, double M1, double M2, double r,
                         const Vec& vertex = Vec{0.0, 0.0}) {
  if (!(r > 0)) throw NonpositiveRadius("fit radius must be positive");
  double ep = std::exp(kSqrt2 * r);
  double en = std::exp(-kSqrt2 * r);
  double chi = ep - en;
  double du = u10 - u20;
  double dM = M1 - M2;
  ConePair p;
  p.vertex = vertex;
  p.C1 = (-du * en + dM) / (2 * chi);
  p.C2 = (du * ep - dM) / (2 * chi);
  p.a = (M1 + M2 - u10 - u20) / (2 * r);
  p.b = (u10 + u20) / 2;
  return p;
}

// Classical solution on the closed unit ball with boundary data -1 / +1:
//   v1 = -(e^{sqrt2 |x|} + e^{-sqrt2 |x|}) / (e^{sqrt2} + e^{-sqrt2}), v2 = -v1.
inline std::pair<double, double> example1(const Vec& x, int n) {
  if (x.dim() != n) throw InvalidArgument("point dimension mismatch");
  double r = norm(x);
  if (r > 1 + 1e-9) throw OutOfBall("|x| = " + std::to_string(r) + " > 1");
  double den = std::exp(kSqrt2) + std::exp(-kSqrt2);
  double v1 = -(std::exp(kSqrt2 * r) + std::exp(-kSqrt2 * r)) / den;
  return {v1, -v1};
}

inline double example1_radial(double r) {
  double den = std::exp(kSqrt2) + std::exp(-kSqrt2);
  return -(std::exp(kSqrt2 * r) + std::exp(-kSqrt2 * r)) / den;
}

// Residual of the radial system -eta_i'' + eta_i - eta_j = 0 with the second
// derivative taken by a central difference of step delta.
inline std::pair<double, double> radial_residual(const std::function<double(double)>& eta1,
                                                 const std::function<double(double)>& eta2,
                                                 double s, double delta) {
  if (!(s > 0)) throw InvalidArgument("radius must be positive");
  if (!(delta > 0) || delta >= s) throw StepTooLarge("need 0 < delta < s");
  auto second = [&](const std::function<double(double)>& f) {
    return (f(s + delta) - 2 * f(s) + f(s - delta)) / (delta * delta);
  };
  double e1 = eta1(s), e2 = eta2(s);
  return {-second(eta1) + e1 - e2, -second(eta2) + e2 - e1};
}

// Default FD step: balances O(delta^2) truncation against roundoff for
// exponentials of modest argument.
inline double default_fd_step(double s) { return 1e-4 * std::max(1.0, s); }

struct BarrierValue {
  double w = 0;
  double residual = 0;
};

// Annulus barrier w = e^{-alpha |x|^2} - e^{-alpha R^2} with residual
// e^{-alpha |x|^2} (2 alpha - 4 alpha^2 |x|^2); strictly negative once
// alpha > 2/R^2.
inline BarrierValue barrier(double alpha, double R, const Vec& x) {
  if (!(alpha > 0)) throw InvalidArgument("alpha must be positive");
  if (!(R > 0)) throw NonpositiveRadius("R must be positive");
  double r = norm(x);
  if (!(r > R / 2 && r < R))
    throw OutOfAnnulus("|x| = " + std::to_string(r) + " outside (R/2, R)");
  double r2 = dot(x, x);
  BarrierValue v;
  v.w = std::exp(-alpha * r2) - std::exp(-alpha * R * R);
  v.residual = std::exp(-alpha * r2) * (2 * alpha - 4 * alpha * alpha * r2);
  return v;
}

}  // namespace tow
