#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "tow/exact.hpp"
#include "tow/lattice.hpp"

namespace tow {

inline constexpr int kAnalysisSamples = 256;

inline double xi(double r) {
  if (!(r > 0)) throw NonpositiveRadius("xi needs r > 0");
  return (std::exp(kSqrt2 * r) - std::exp(-kSqrt2 * r)) / r;
}

struct SlopeReport {
  Vec center;
  double r = 0;
  int samples = 0;
  double M[2] = {0, 0};   // sphere max per mode
  double m[2] = {0, 0};   // sphere min per mode
  double u0[2] = {0, 0};  // center values
  double s_plus[2] = {0, 0};
  double s_minus[2] = {0, 0};
  double sc_plus[2] = {0, 0};
  double sc_minus[2] = {0, 0};
};

struct LemmaSlack {
  double plus[2] = {0, 0};
  double minus[2] = {0, 0};
};

struct MonotoneAReport {
  std::vector<double> radii;
  std::vector<double> a;
  bool nondecreasing = true;
  double tolerance = 0;
};

struct LipschitzReport {
  double gradient_norm = 0;
  double bound = 0;
  double slack = 0;
};

struct BlowupReport {
  Vec center;
  std::vector<double> radii;                   // strictly decreasing ladder
  std::vector<double> residual[2];             // max affine-fit deviation of v_i^r
  std::vector<Vec> slope[2];                   // fitted slope vectors
  std::vector<double> s_plus[2];               // S_i^+ ladder along radii
  std::vector<double> running_sup[2];          // L_i over increasing radius
  double extrapolated_s_plus[2] = {0, 0};
  bool residuals_decreasing[2] = {true, true};
};

struct SymmetricSlopeReport {
  double s_plus[2] = {0, 0};
  double s_minus[2] = {0, 0};
  double defect[2] = {0, 0};
};

namespace detail {

inline void require_ball(const ModePair& pair, const Vec& x0, double r) {
  if (!(r > 0)) throw NonpositiveRadius("ball radius must be positive");
  if (!pair.domain) return;
  if (boundary_distance(*pair.domain, x0) < r - 1e-12)
    throw BallNotContained("ball of radius " + std::to_string(r) + " is not inside the domain");
}

// Two-point Richardson extrapolation to r -> 0 assuming first-order error.
inline double richardson(double r_small, double v_small, double r_big, double v_big) {
  return v_small + (v_small - v_big) * r_small / (r_big - r_small);
}

inline double affine_fit(const ModePair& pair, int mode, const Vec& x0, double r, int K,
                         Vec& slope_out) {
  static const double rings[] = {0.25, 0.5, 0.75, 1.0};
  const auto& dirs = probe_directions(pair.n, K);
  double u0 = pair.eval(mode, x0);

  std::vector<Vec> pts;
  std::vector<double> vals;
  pts.push_back(Vec::zero(pair.n));
  vals.push_back(0);
  for (double t : rings)
    for (const Vec& d : dirs) {
      Vec x = t * d;
      pts.push_back(x);
      vals.push_back((pair.eval(mode, x0 + r * x) - u0) / r);
    }

  // Ring symmetry zeroes the sample barycenter, so the offset is the mean.
  double q = 0;
  for (double v : vals) q += v;
  q /= static_cast<double>(vals.size());

  double a00 = 0, a01 = 0, a11 = 0, b0 = 0, b1 = 0;
  for (std::size_t s = 0; s < pts.size(); ++s) {
    const Vec& x = pts[s];
    double w = vals[s] - q;
    a00 += x[0] * x[0];
    b0 += x[0] * w;
    if (pair.n == 2) {
      a01 += x[0] * x[1];
      a11 += x[1] * x[1];
      b1 += x[1] * w;
    }
  }
  slope_out = Vec::zero(pair.n);
  if (pair.n == 1) {
    slope_out[0] = b0 / a00;
  } else {
    double det = a00 * a11 - a01 * a01;
    slope_out[0] = (b0 * a11 - b1 * a01) / det;
    slope_out[1] = (b1 * a00 - b0 * a01) / det;
  }

  double res = 0;
  for (std::size_t s = 0; s < pts.size(); ++s) {
    double fit = q + dot(slope_out, pts[s]);
    res = std::max(res, std::abs(vals[s] - fit));
  }
  return res;
}

}  // namespace detail

// Sphere slope statistics over K sampled directions, with the coupled
// correction. 1-D spheres are the two endpoints regardless of K.
inline SlopeReport slope_stats(const ModePair& pair, const Vec& x0, double r,
                               int K = kAnalysisSamples) {
  if (K < 16) throw InvalidArgument("need at least 16 sphere samples");
  detail::require_ball(pair, x0, r);
  const auto& dirs = probe_directions(pair.n, K);

  SlopeReport rep;
  rep.center = x0;
  rep.r = r;
  rep.samples = static_cast<int>(dirs.size());
  for (int i = 1; i <= 2; ++i) {
    double mx = -std::numeric_limits<double>::infinity();
    double mn = std::numeric_limits<double>::infinity();
    for (const Vec& d : dirs) {
      double v = pair.eval(i, x0 + r * d);
      mx = std::max(mx, v);
      mn = std::min(mn, v);
    }
    rep.M[i - 1] = mx;
    rep.m[i - 1] = mn;
    rep.u0[i - 1] = pair.eval(i, x0);
    rep.s_plus[i - 1] = (mx - rep.u0[i - 1]) / r;
    rep.s_minus[i - 1] = (mn - rep.u0[i - 1]) / r;
  }
  for (int i = 0; i < 2; ++i) {
    double couple = 0.5 * (rep.u0[i] - rep.u0[1 - i]) * (1 - std::exp(-kSqrt2 * r)) / r;
    rep.sc_plus[i] = rep.s_plus[i] + couple;
    rep.sc_minus[i] = rep.s_minus[i] + couple;
  }
  return rep;
}

// Slack of the two-radius coupled slope inequality: nonnegative values mean
// the inequality holds at (x0, s, r).
inline LemmaSlack check_lemma_Ll(const ModePair& pair, const Vec& x0, double s, double r,
                                 int K = kAnalysisSamples) {
  if (!(s > 0) || !(r > 0)) throw NonpositiveRadius("radii must be positive");
  if (s > r) throw RadiusOrder("inner radius exceeds outer radius");
  SlopeReport at_r = slope_stats(pair, x0, r, K);
  SlopeReport at_s = slope_stats(pair, x0, s, K);
  double q = xi(s) / xi(r);

  LemmaSlack slack;
  for (int i = 0; i < 2; ++i) {
    int j = 1 - i;
    double combo_p = 0.5 * (1 + q) * at_r.sc_plus[i] + 0.5 * (1 - q) * at_r.sc_plus[j];
    double combo_m = 0.5 * (1 + q) * at_r.sc_minus[i] + 0.5 * (1 - q) * at_r.sc_minus[j];
    slack.plus[i] = combo_p - at_s.sc_plus[i];
    slack.minus[i] = at_s.sc_minus[i] - combo_m;
  }
  return slack;
}

// a(x0, r) ladder; nondecreasing within tolerance certifies the coupled-mean
// monotonicity. Default tolerance is 5h for lattice-backed pairs, 1e-9 else.
inline MonotoneAReport check_a_monotone(const ModePair& pair, const Vec& x0,
                                        const std::vector<double>& radii,
                                        int K = kAnalysisSamples, double tolerance = -1) {
  if (radii.size() < 2) throw InvalidArgument("need at least two radii");
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] > radii[k - 1])) throw RadiusOrder("radii must be strictly increasing");

  MonotoneAReport rep;
  rep.radii = radii;
  rep.tolerance = tolerance >= 0 ? tolerance : (pair.h > 0 ? 5 * pair.h : 1e-9);
  for (double r : radii) {
    SlopeReport sr = slope_stats(pair, x0, r, K);
    rep.a.push_back((sr.M[0] + sr.M[1] - sr.u0[0] - sr.u0[1]) / (2 * r));
  }
  for (std::size_t k = 1; k < rep.a.size(); ++k)
    if (rep.a[k] < rep.a[k - 1] - rep.tolerance) rep.nondecreasing = false;
  return rep;
}

// Fits the comparison cone pair at (x0, r) and returns the largest excess of
// the field over the cone on a ring grid of the ball; <= tol certifies
// comparison from above.
inline double cone_comparison_check(const ModePair& pair, const Vec& x0, double r,
                                    int K = kAnalysisSamples) {
  SlopeReport sr = slope_stats(pair, x0, r, K);
  ConePair cone = fit_cone(sr.u0[0], sr.u0[1], sr.M[0], sr.M[1], r, x0);

  const auto& dirs = probe_directions(pair.n, K);
  double violation = std::max(pair.eval(1, x0) - cone_eval(cone, x0).first,
                              pair.eval(2, x0) - cone_eval(cone, x0).second);
  constexpr int kRings = 8;
  for (int j = 1; j <= kRings; ++j) {
    double t = r * static_cast<double>(j) / kRings;
    for (const Vec& d : dirs) {
      Vec x = x0 + t * d;
      auto [psi1, psi2] = cone_eval(cone, x);
      violation = std::max(violation, pair.eval(1, x) - psi1);
      violation = std::max(violation, pair.eval(2, x) - psi2);
    }
  }
  return violation;
}

// Central-difference |Du_1(x0)| against the slope + coupling bound.
inline LipschitzReport lipschitz_bound_check(const ModePair& pair, const Vec& x0, double r,
                                             double h_fd, int K = kAnalysisSamples) {
  if (!(h_fd > 0)) throw InvalidArgument("finite-difference step must be positive");
  detail::require_ball(pair, x0, std::max(r, h_fd));
  SlopeReport sr = slope_stats(pair, x0, r, K);

  Vec grad = Vec::zero(pair.n);
  for (int k = 0; k < pair.n; ++k) {
    Vec e = Vec::zero(pair.n);
    e[k] = h_fd;
    grad[k] = (pair.eval(1, x0 + e) - pair.eval(1, x0 - e)) / (2 * h_fd);
  }

  LipschitzReport rep;
  rep.gradient_norm = norm(grad);
  double s_extreme = 0;
  for (int i = 0; i < 2; ++i)
    s_extreme = std::max({s_extreme, std::abs(sr.s_plus[i]), std::abs(sr.s_minus[i])});
  rep.bound = s_extreme + kSqrt2 * std::abs(sr.u0[0] - sr.u0[1]);
  rep.slack = rep.bound - rep.gradient_norm;
  return rep;
}

namespace detail {

inline void check_ladder(const ModePair& pair, const Vec& x0, const std::vector<double>& radii) {
  if (radii.size() < 2) throw InvalidArgument("need at least two radii");
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] < radii[k - 1])) throw RadiusOrder("radii must be strictly decreasing");
  if (pair.h > 0 && radii.back() < 4 * pair.h - 1e-12)
    throw InvalidArgument("smallest radius is below 4h; rescaled samples would alias the lattice");
  require_ball(pair, x0, radii.front());
}

}  // namespace detail

// Rescaled-field affine deviation along a decreasing radius ladder, plus the
// S^+ ladder, its running sup, and the r -> 0 extrapolation.
inline BlowupReport blowup_deviation(const ModePair& pair, const Vec& x0,
                                     const std::vector<double>& radii,
                                     int K = kAnalysisSamples) {
  detail::check_ladder(pair, x0, radii);

  BlowupReport rep;
  rep.center = x0;
  rep.radii = radii;
  for (double r : radii) {
    SlopeReport sr = slope_stats(pair, x0, r, K);
    for (int i = 0; i < 2; ++i) {
      Vec p = Vec::zero(pair.n);
      rep.residual[i].push_back(detail::affine_fit(pair, i + 1, x0, r, K, p));
      rep.slope[i].push_back(p);
      rep.s_plus[i].push_back(sr.s_plus[i]);
    }
  }
  std::size_t q = radii.size() - 1;
  for (int i = 0; i < 2; ++i) {
    rep.extrapolated_s_plus[i] = detail::richardson(radii[q], rep.s_plus[i][q], radii[q - 1],
                                                    rep.s_plus[i][q - 1]);
    for (std::size_t k = 1; k < radii.size(); ++k)
      if (rep.residual[i][k] > rep.residual[i][k - 1]) rep.residuals_decreasing[i] = false;
    // L_i(x0, R): sup of S^+ over radii below R, accumulated from the small end.
    rep.running_sup[i].assign(radii.size(), 0);
    double sup = -std::numeric_limits<double>::infinity();
    for (std::size_t k = radii.size(); k-- > 0;) {
      sup = std::max(sup, rep.s_plus[i][k]);
      rep.running_sup[i][k] = sup;
    }
  }
  return rep;
}

// Extrapolated S^+/S^- at x0 and the antisymmetry defect |S^+ + S^-|.
inline SymmetricSlopeReport symmetric_slope_check(const ModePair& pair, const Vec& x0,
                                                  const std::vector<double>& radii,
                                                  int K = kAnalysisSamples) {
  detail::check_ladder(pair, x0, radii);
  std::size_t q = radii.size() - 1;
  SlopeReport small = slope_stats(pair, x0, radii[q], K);
  SlopeReport big = slope_stats(pair, x0, radii[q - 1], K);

  SymmetricSlopeReport rep;
  for (int i = 0; i < 2; ++i) {
    rep.s_plus[i] = detail::richardson(radii[q], small.s_plus[i], radii[q - 1], big.s_plus[i]);
    rep.s_minus[i] = detail::richardson(radii[q], small.s_minus[i], radii[q - 1], big.s_minus[i]);
    rep.defect[i] = std::abs(rep.s_plus[i] + rep.s_minus[i]);
  }
  return rep;
}

}  // namespace tow
