#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "tow/errors.hpp"

namespace tow {

// Rate matrix (c_ij) of the mode-switching chain: strictly positive
// off-diagonal entries, rows summing to zero.
struct GeneratorMatrix {
  int m = 0;
  std::vector<double> c;  // row-major m*m

  double at(int i, int j) const { return c[static_cast<std::size_t>(i) * m + j]; }
};

// Distribution of the mode at a given elapsed time.
struct ModeDistribution {
  std::vector<double> probabilities;
  double time = 0;
};

inline GeneratorMatrix validate_generator(int m, const std::vector<double>& raw) {
  if (m < 2 || raw.size() != static_cast<std::size_t>(m) * m)
    throw NotSquare("generator must be m x m with m >= 2, got " + std::to_string(raw.size()) +
                    " entries for m=" + std::to_string(m));
  for (int i = 0; i < m; ++i) {
    double row = 0;
    for (int j = 0; j < m; ++j) {
      double cij = raw[static_cast<std::size_t>(i) * m + j];
      if (!std::isfinite(cij)) throw NotSquare("generator entries must be finite");
      if (i != j && !(cij > 0))
        throw NonpositiveOffDiagonal("c[" + std::to_string(i + 1) + "][" +
                                     std::to_string(j + 1) + "] = " + std::to_string(cij));
      row += cij;
    }
    if (std::abs(row) > 1e-12)
      throw RowSumViolation("row " + std::to_string(i + 1) + " sums to " + std::to_string(row));
  }
  return GeneratorMatrix{m, raw};
}

inline GeneratorMatrix validate_generator(const std::vector<std::vector<double>>& raw) {
  int m = static_cast<int>(raw.size());
  std::vector<double> flat;
  for (const auto& row : raw) {
    if (static_cast<int>(row.size()) != m)
      throw NotSquare("row length " + std::to_string(row.size()) + " != " + std::to_string(m));
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return validate_generator(m, flat);
}

namespace detail {

// Dense row-major helpers for the matrix exponential; m stays small (<= 64).
inline std::vector<double> mat_mul(const std::vector<double>& a, const std::vector<double>& b,
                                   int m) {
  std::vector<double> r(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) {
      double aik = a[static_cast<std::size_t>(i) * m + k];
      if (aik == 0) continue;
      for (int j = 0; j < m; ++j)
        r[static_cast<std::size_t>(i) * m + j] += aik * b[static_cast<std::size_t>(k) * m + j];
    }
  return r;
}

inline std::vector<double> identity(int m) {
  std::vector<double> r(static_cast<std::size_t>(m) * m, 0.0);
  for (int i = 0; i < m; ++i) r[static_cast<std::size_t>(i) * m + i] = 1.0;
  return r;
}

// Solves A X = B in place by Gaussian elimination with partial pivoting.
inline std::vector<double> mat_solve(std::vector<double> a, std::vector<double> b, int m) {
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::abs(a[static_cast<std::size_t>(r) * m + col]) >
          std::abs(a[static_cast<std::size_t>(piv) * m + col]))
        piv = r;
    if (piv != col)
      for (int j = 0; j < m; ++j) {
        std::swap(a[static_cast<std::size_t>(col) * m + j], a[static_cast<std::size_t>(piv) * m + j]);
        std::swap(b[static_cast<std::size_t>(col) * m + j], b[static_cast<std::size_t>(piv) * m + j]);
      }
    double d = a[static_cast<std::size_t>(col) * m + col];
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      double f = a[static_cast<std::size_t>(r) * m + col] / d;
      if (f == 0) continue;
      for (int j = 0; j < m; ++j) {
        a[static_cast<std::size_t>(r) * m + j] -= f * a[static_cast<std::size_t>(col) * m + j];
        b[static_cast<std::size_t>(r) * m + j] -= f * b[static_cast<std::size_t>(col) * m + j];
      }
    }
  }
  for (int r = 0; r < m; ++r) {
    double d = a[static_cast<std::size_t>(r) * m + r];
    for (int j = 0; j < m; ++j) b[static_cast<std::size_t>(r) * m + j] /= d;
  }
  return b;
}

// Scaling-and-squaring with the order-13 Pade approximant.
inline std::vector<double> expm(std::vector<double> a, int m) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const double theta13 = 5.371920351148152;

  double norm1 = 0;
  for (int j = 0; j < m; ++j) {
    double cs = 0;
    for (int i = 0; i < m; ++i) cs += std::abs(a[static_cast<std::size_t>(i) * m + j]);
    norm1 = std::max(norm1, cs);
  }
  int squarings = 0;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    double scale = std::ldexp(1.0, -squarings);
    for (double& x : a) x *= scale;
  }

  auto a2 = mat_mul(a, a, m);
  auto a4 = mat_mul(a2, a2, m);
  auto a6 = mat_mul(a2, a4, m);
  auto id = identity(m);
  const std::size_t sz = a.size();

  std::vector<double> w1(sz), w2(sz), u(sz), v(sz);
  for (std::size_t k = 0; k < sz; ++k) w1[k] = b[13] * a6[k] + b[11] * a4[k] + b[9] * a2[k];
  w1 = mat_mul(a6, w1, m);
  for (std::size_t k = 0; k < sz; ++k)
    w1[k] += b[7] * a6[k] + b[5] * a4[k] + b[3] * a2[k] + b[1] * id[k];
  u = mat_mul(a, w1, m);
  for (std::size_t k = 0; k < sz; ++k) w2[k] = b[12] * a6[k] + b[10] * a4[k] + b[8] * a2[k];
  w2 = mat_mul(a6, w2, m);
  for (std::size_t k = 0; k < sz; ++k)
    v[k] = w2[k] + b[6] * a6[k] + b[4] * a4[k] + b[2] * a2[k] + b[0] * id[k];

  std::vector<double> p(sz), q(sz);
  for (std::size_t k = 0; k < sz; ++k) {
    p[k] = v[k] + u[k];
    q[k] = v[k] - u[k];
  }
  auto r = mat_solve(std::move(q), std::move(p), m);
  for (int s = 0; s < squarings; ++s) r = mat_mul(r, r, m);
  return r;
}

inline void check_mode(const GeneratorMatrix& g, int i) {
  if (i < 1 || i > g.m)
    throw ModeOutOfRange("mode " + std::to_string(i) + " not in 1.." + std::to_string(g.m));
}

}  // namespace detail

// Distribution of the mode at time s given start mode i (1-based): row i of
// exp(s*c/2). Forward Kolmogorov convention, so the result is a probability
// vector converging to uniform.
inline ModeDistribution mode_distribution(const GeneratorMatrix& g, int i, double s) {
  detail::check_mode(g, i);
  if (!(s >= 0) || !std::isfinite(s)) throw InvalidArgument("time must be finite and >= 0");
  std::vector<double> a(g.c.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = 0.5 * s * g.c[k];
  auto e = detail::expm(std::move(a), g.m);
  ModeDistribution d;
  d.time = s;
  d.probabilities.resize(g.m);
  for (int k = 0; k < g.m; ++k) {
    double p = e[static_cast<std::size_t>(i - 1) * g.m + k];
    d.probabilities[k] = std::clamp(p, 0.0, 1.0);  // shave roundoff dust
  }
  return d;
}

// Inverse-CDF draw over a probability vector; first index whose cumulative
// mass exceeds u. Mode indices are 1-based.
inline int pick_mode(const std::vector<double>& probabilities, double u) {
  double cum = 0;
  int m = static_cast<int>(probabilities.size());
  for (int k = 0; k < m; ++k) {
    cum += probabilities[k];
    if (u < cum) return k + 1;
  }
  return m;
}

inline int switch_sample(const GeneratorMatrix& g, int i, double s, double u) {
  return pick_mode(mode_distribution(g, i, s).probabilities, u);
}

}  // namespace tow
