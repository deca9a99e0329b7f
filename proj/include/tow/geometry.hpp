#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <vector>

#include "tow/errors.hpp"

namespace tow {

// Small fixed-capacity point/vector. Dimension is runtime (1..4), storage inline
// so geometry stays allocation-free in hot loops.
class Vec {
 public:
  Vec() = default;
  Vec(std::initializer_list<double> xs) {
    n_ = static_cast<int>(xs.size());
    int i = 0;
    for (double x : xs) v_[i++] = x;
  }
  static Vec zero(int n) {
    Vec p;
    p.n_ = n;
    return p;
  }
  int dim() const { return n_; }
  double operator[](int i) const { return v_[i]; }
  double& operator[](int i) { return v_[i]; }

  Vec& operator+=(const Vec& o) {
    for (int i = 0; i < n_; ++i) v_[i] += o.v_[i];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    for (int i = 0; i < n_; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  Vec& operator*=(double s) {
    for (int i = 0; i < n_; ++i) v_[i] *= s;
    return *this;
  }
  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }

 private:
  std::array<double, 4> v_{};
  int n_ = 0;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0;
  for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
  return s;
}
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline double dist(const Vec& a, const Vec& b) { return norm(a - b); }

enum class DomainKind { interval, ball, box, polygon2d };

// Spatial domain U. interval is the 1-D box; polygon2d is a simple
// counterclockwise polygon.
struct DomainSpec {
  DomainKind kind = DomainKind::interval;
  Vec center;                  // ball
  double radius = 0;           // ball
  Vec lo, hi;                  // box / interval
  std::vector<Vec> vertices;   // polygon2d

  int dim() const {
    switch (kind) {
      case DomainKind::interval: return 1;
      case DomainKind::ball: return center.dim();
      case DomainKind::box: return lo.dim();
      case DomainKind::polygon2d: return 2;
    }
    return 0;
  }

  static DomainSpec make_interval(double a, double b) {
    DomainSpec d;
    d.kind = DomainKind::interval;
    d.lo = {a};
    d.hi = {b};
    return d;
  }
  static DomainSpec make_ball(Vec c, double r) {
    DomainSpec d;
    d.kind = DomainKind::ball;
    d.center = c;
    d.radius = r;
    return d;
  }
  static DomainSpec make_box(Vec lo, Vec hi) {
    DomainSpec d;
    d.kind = DomainKind::box;
    d.lo = lo;
    d.hi = hi;
    return d;
  }
  static DomainSpec make_polygon(std::vector<Vec> vs) {
    DomainSpec d;
    d.kind = DomainKind::polygon2d;
    d.vertices = std::move(vs);
    return d;
  }
};

inline double polygon_area2(const std::vector<Vec>& vs) {
  double a = 0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const Vec& p = vs[i];
    const Vec& q = vs[(i + 1) % vs.size()];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return a;
}

inline void validate_domain(const DomainSpec& d) {
  switch (d.kind) {
    case DomainKind::interval:
      if (!(d.lo[0] < d.hi[0])) throw DegenerateDomain("interval requires a < b");
      return;
    case DomainKind::ball:
      if (!(d.radius > 0)) throw DegenerateDomain("ball radius must be positive");
      if (d.center.dim() < 1 || d.center.dim() > 4)
        throw DegenerateDomain("ball center dimension unsupported");
      return;
    case DomainKind::box:
      if (d.lo.dim() != d.hi.dim() || d.lo.dim() < 1)
        throw DegenerateDomain("box corners must share a dimension");
      for (int i = 0; i < d.lo.dim(); ++i)
        if (!(d.lo[i] < d.hi[i])) throw DegenerateDomain("box requires min < max per axis");
      return;
    case DomainKind::polygon2d:
      if (d.vertices.size() < 3) throw DegenerateDomain("polygon needs at least 3 vertices");
      if (polygon_area2(d.vertices) <= 0)
        throw DegenerateDomain("polygon must be counterclockwise with positive area");
      return;
  }
  throw DegenerateDomain("unknown domain kind");
}

namespace detail {

inline double point_segment_distance(const Vec& x, const Vec& p, const Vec& q) {
  Vec d = q - p;
  double len2 = dot(d, d);
  double t = len2 > 0 ? std::clamp(dot(x - p, d) / len2, 0.0, 1.0) : 0.0;
  return dist(x, p + t * d);
}

inline Vec closest_on_segment(const Vec& x, const Vec& p, const Vec& q) {
  Vec d = q - p;
  double len2 = dot(d, d);
  double t = len2 > 0 ? std::clamp(dot(x - p, d) / len2, 0.0, 1.0) : 0.0;
  return p + t * d;
}

inline bool polygon_contains(const std::vector<Vec>& vs, const Vec& x) {
  // Crossing-number test.
  bool inside = false;
  for (std::size_t i = 0, j = vs.size() - 1; i < vs.size(); j = i++) {
    const Vec& a = vs[i];
    const Vec& b = vs[j];
    if ((a[1] > x[1]) != (b[1] > x[1])) {
      double t = (x[1] - a[1]) / (b[1] - a[1]);
      if (x[0] < a[0] + t * (b[0] - a[0])) inside = !inside;
    }
  }
  return inside;
}

}  // namespace detail

// Signed distance to the boundary: positive strictly inside U, negative
// outside. For boxes the value is the slab distance (exact inside).
inline double boundary_distance(const DomainSpec& d, const Vec& x) {
  switch (d.kind) {
    case DomainKind::ball:
      return d.radius - dist(x, d.center);
    case DomainKind::interval:
    case DomainKind::box: {
      double m = std::numeric_limits<double>::infinity();
      for (int i = 0; i < d.lo.dim(); ++i)
        m = std::min(m, std::min(x[i] - d.lo[i], d.hi[i] - x[i]));
      return m;
    }
    case DomainKind::polygon2d: {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < d.vertices.size(); ++i)
        m = std::min(m, detail::point_segment_distance(
                            x, d.vertices[i], d.vertices[(i + 1) % d.vertices.size()]));
      return detail::polygon_contains(d.vertices, x) ? m : -m;
    }
  }
  return -std::numeric_limits<double>::infinity();
}

// Nearest boundary point; used to anchor ghost lattice corners to g.
inline Vec clip_to_boundary(const DomainSpec& d, const Vec& x) {
  switch (d.kind) {
    case DomainKind::ball: {
      Vec u = x - d.center;
      double r = norm(u);
      if (r == 0) {
        Vec e = Vec::zero(d.center.dim());
        e[0] = d.radius;
        return d.center + e;
      }
      return d.center + (d.radius / r) * u;
    }
    case DomainKind::interval:
    case DomainKind::box: {
      Vec y = x;
      int n = d.lo.dim();
      bool outside = false;
      for (int i = 0; i < n; ++i) {
        if (y[i] < d.lo[i]) { y[i] = d.lo[i]; outside = true; }
        if (y[i] > d.hi[i]) { y[i] = d.hi[i]; outside = true; }
      }
      if (outside) return y;
      // Interior point: push along the tightest slab.
      int ax = 0;
      double best = std::numeric_limits<double>::infinity();
      bool to_hi = false;
      for (int i = 0; i < n; ++i) {
        if (y[i] - d.lo[i] < best) { best = y[i] - d.lo[i]; ax = i; to_hi = false; }
        if (d.hi[i] - y[i] < best) { best = d.hi[i] - y[i]; ax = i; to_hi = true; }
      }
      y[ax] = to_hi ? d.hi[ax] : d.lo[ax];
      return y;
    }
    case DomainKind::polygon2d: {
      double best = std::numeric_limits<double>::infinity();
      Vec bestp = d.vertices[0];
      for (std::size_t i = 0; i < d.vertices.size(); ++i) {
        Vec p = detail::closest_on_segment(x, d.vertices[i],
                                           d.vertices[(i + 1) % d.vertices.size()]);
        double dd = dist(x, p);
        if (dd < best) { best = dd; bestp = p; }
      }
      return bestp;
    }
  }
  return x;
}

inline void bounding_box(const DomainSpec& d, Vec& lo, Vec& hi) {
  switch (d.kind) {
    case DomainKind::ball: {
      lo = hi = d.center;
      for (int i = 0; i < d.center.dim(); ++i) {
        lo[i] -= d.radius;
        hi[i] += d.radius;
      }
      return;
    }
    case DomainKind::interval:
    case DomainKind::box:
      lo = d.lo;
      hi = d.hi;
      return;
    case DomainKind::polygon2d: {
      lo = hi = d.vertices[0];
      for (const Vec& v : d.vertices)
        for (int i = 0; i < 2; ++i) {
          lo[i] = std::min(lo[i], v[i]);
          hi[i] = std::max(hi[i], v[i]);
        }
      return;
    }
  }
}

inline double diameter(const DomainSpec& d) {
  switch (d.kind) {
    case DomainKind::ball:
      return 2 * d.radius;
    case DomainKind::interval:
    case DomainKind::box:
      return dist(d.lo, d.hi);
    case DomainKind::polygon2d: {
      double m = 0;
      for (std::size_t i = 0; i < d.vertices.size(); ++i)
        for (std::size_t j = i + 1; j < d.vertices.size(); ++j)
          m = std::max(m, dist(d.vertices[i], d.vertices[j]));
      return m;
    }
  }
  return 0;
}

// First exit of the segment x -> x+eps*v through the boundary. Returns
// (x+eps*v, false) when the whole segment stays inside. Closed form for
// ball/box/interval, edge tests for polygons.
inline std::pair<Vec, bool> boundary_hit(const DomainSpec& d, const Vec& x, const Vec& v,
                                         double eps) {
  if (std::abs(norm(v) - 1.0) > 1e-12) throw NotUnit("direction must have unit length");
  if (!(eps > 0)) throw InvalidArgument("step must be positive");
  if (boundary_distance(d, x) < -1e-12) throw NotInterior("probe origin lies outside the domain");

  double t = std::numeric_limits<double>::infinity();
  switch (d.kind) {
    case DomainKind::ball: {
      Vec u = x - d.center;
      double b = dot(u, v);
      double c = dot(u, u) - d.radius * d.radius;
      double disc = std::max(0.0, b * b - c);
      t = -b + std::sqrt(disc);
      break;
    }
    case DomainKind::interval:
    case DomainKind::box: {
      for (int i = 0; i < d.lo.dim(); ++i) {
        if (v[i] > 0) t = std::min(t, (d.hi[i] - x[i]) / v[i]);
        if (v[i] < 0) t = std::min(t, (d.lo[i] - x[i]) / v[i]);
      }
      break;
    }
    case DomainKind::polygon2d: {
      for (std::size_t i = 0; i < d.vertices.size(); ++i) {
        const Vec& p = d.vertices[i];
        const Vec& q = d.vertices[(i + 1) % d.vertices.size()];
        Vec e = q - p;
        double det = v[0] * (-e[1]) - v[1] * (-e[0]);
        if (std::abs(det) < 1e-300) continue;  // parallel
        double rx = p[0] - x[0], ry = p[1] - x[1];
        double ti = (rx * (-e[1]) - ry * (-e[0])) / det;
        double si = (v[0] * ry - v[1] * rx) / det;
        if (ti > 1e-15 && si >= -1e-12 && si <= 1 + 1e-12) t = std::min(t, ti);
      }
      break;
    }
  }
  if (t <= eps) {
    Vec hit = x + t * v;
    if (d.kind == DomainKind::ball) hit = clip_to_boundary(d, hit);  // kill radial drift
    return {hit, true};
  }
  return {x + eps * v, false};
}

// Deterministic boundary point set, used for per-mode boundary averages and
// anything that needs a quick trace of g along the boundary.
inline std::vector<Vec> boundary_samples(const DomainSpec& d, int count) {
  std::vector<Vec> out;
  switch (d.kind) {
    case DomainKind::interval:
      out.push_back(d.lo);
      out.push_back(d.hi);
      return out;
    case DomainKind::ball: {
      if (d.center.dim() == 1) {
        Vec a = d.center, b = d.center;
        a[0] -= d.radius;
        b[0] += d.radius;
        return {a, b};
      }
      const double tau = 2 * 3.14159265358979323846;
      for (int j = 0; j < count; ++j) {
        double th = tau * (j + 0.5) / count;
        Vec p = d.center;
        p[0] += d.radius * std::cos(th);
        p[1] += d.radius * std::sin(th);
        out.push_back(p);
      }
      return out;
    }
    case DomainKind::box: {
      if (d.lo.dim() == 1) return {d.lo, d.hi};
      std::vector<Vec> corners = {
          {d.lo[0], d.lo[1]}, {d.hi[0], d.lo[1]}, {d.hi[0], d.hi[1]}, {d.lo[0], d.hi[1]}};
      double per = 0;
      for (int e = 0; e < 4; ++e) per += dist(corners[e], corners[(e + 1) % 4]);
      for (int j = 0; j < count; ++j) {
        double s = per * (j + 0.5) / count;
        for (int e = 0; e < 4; ++e) {
          double el = dist(corners[e], corners[(e + 1) % 4]);
          if (s <= el) {
            out.push_back(corners[e] + (s / el) * (corners[(e + 1) % 4] - corners[e]));
            break;
          }
          s -= el;
        }
      }
      return out;
    }
    case DomainKind::polygon2d: {
      double per = 0;
      std::size_t nv = d.vertices.size();
      for (std::size_t e = 0; e < nv; ++e)
        per += dist(d.vertices[e], d.vertices[(e + 1) % nv]);
      for (int j = 0; j < count; ++j) {
        double s = per * (j + 0.5) / count;
        for (std::size_t e = 0; e < nv; ++e) {
          const Vec& p = d.vertices[e];
          const Vec& q = d.vertices[(e + 1) % nv];
          double el = dist(p, q);
          if (s <= el) {
            out.push_back(p + (s / el) * (q - p));
            break;
          }
          s -= el;
        }
      }
      return out;
    }
  }
  return out;
}

}  // namespace tow
