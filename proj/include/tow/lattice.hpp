#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "tow/geometry.hpp"
#include "tow/markov.hpp"

namespace tow {

inline constexpr double kTau = 2 * 3.14159265358979323846;

// Regular grid over the bounding box of U. Node coordinates are exact
// multiples of h from the lower corner; interior nodes lie strictly inside U,
// everything else is ghost. When h does not divide the box extent the grid
// keeps one covering ghost rim so every interior point has an enclosing cell.
struct Lattice {
  DomainSpec domain;
  double h = 0;
  int n = 0;
  Vec origin;
  std::array<int, 2> dims{1, 1};      // node counts per axis (dims[1]=1 in 1-D)
  std::vector<std::uint8_t> interior; // per node
  std::vector<double> bdist;          // signed boundary distance per node
  std::vector<int> interior_ids;

  int node_count() const { return dims[0] * dims[1]; }
  int id(int ix, int iy) const { return iy * dims[0] + ix; }
  Vec coord(int node) const {
    int ix = node % dims[0];
    int iy = node / dims[0];
    Vec p = origin;
    p[0] += ix * h;
    if (n > 1) p[1] += iy * h;
    return p;
  }
};

inline Lattice build_lattice(const DomainSpec& spec, double h) {
  validate_domain(spec);
  if (!(h > 0)) throw SpacingTooCoarse("spacing must be positive");
  double diam = diameter(spec);
  if (h > diam / 4 * (1 + 1e-12))
    throw SpacingTooCoarse("need h <= diameter/4, got h=" + std::to_string(h));
  int n = spec.dim();
  if (n > 2) throw DegenerateDomain("lattices support n in {1,2}");

  Lattice lat;
  lat.domain = spec;
  lat.h = h;
  lat.n = n;
  Vec lo, hi;
  bounding_box(spec, lo, hi);
  lat.origin = lo;
  for (int a = 0; a < n; ++a) {
    double extent = hi[a] - lo[a];
    int cells = static_cast<int>(std::floor(extent / h + 1e-9));
    bool covered = cells * h >= extent - 1e-9 * std::max(1.0, extent);
    lat.dims[a] = cells + 1 + (covered ? 0 : 1);
  }

  int total = lat.node_count();
  lat.interior.resize(total);
  lat.bdist.resize(total);
  const double tol = 1e-9 * h;
  for (int node = 0; node < total; ++node) {
    double d = boundary_distance(spec, lat.coord(node));
    lat.bdist[node] = d;
    lat.interior[node] = d > tol ? 1 : 0;
    if (lat.interior[node]) lat.interior_ids.push_back(node);
  }
  return lat;
}

// m value arrays over a lattice plus the boundary data they extend.
// Values are meaningful on interior nodes only; ghost slots stay zero.
struct CoupledField {
  std::shared_ptr<const Lattice> lattice;
  int m = 0;
  std::vector<std::vector<double>> values;                  // [mode][node]
  std::vector<std::function<double(const Vec&)>> g;         // boundary data per mode

  static CoupledField zeros(std::shared_ptr<const Lattice> lat, int m,
                            std::vector<std::function<double(const Vec&)>> g) {
    CoupledField f;
    f.lattice = std::move(lat);
    f.m = m;
    f.g = std::move(g);
    f.values.assign(m, std::vector<double>(f.lattice->node_count(), 0.0));
    return f;
  }
};

namespace detail {

struct Cell {
  int ix = 0, iy = 0;
  double fx = 0, fy = 0;
};

inline Cell locate_cell(const Lattice& lat, const Vec& x) {
  Cell c;
  double tx = (x[0] - lat.origin[0]) / lat.h;
  c.ix = std::clamp(static_cast<int>(std::floor(tx)), 0, lat.dims[0] - 2);
  c.fx = tx - c.ix;
  if (lat.n > 1) {
    double ty = (x[1] - lat.origin[1]) / lat.h;
    c.iy = std::clamp(static_cast<int>(std::floor(ty)), 0, lat.dims[1] - 2);
    c.fy = ty - c.iy;
  }
  return c;
}

}  // namespace detail

// Multilinear interpolation of mode i (1-based) at x in closure(U). Ghost cell
// corners take the boundary value g_i at their nearest boundary point, so
// cells straddling the boundary blend lattice values with boundary data.
inline double interpolate(const CoupledField& field, int i, const Vec& x) {
  const Lattice& lat = *field.lattice;
  if (i < 1 || i > field.m) throw ModeOutOfRange("mode " + std::to_string(i));
  if (boundary_distance(lat.domain, x) < -1e-9 * lat.h)
    throw OutOfDomain("point lies outside the domain closure");

  auto cell = detail::locate_cell(lat, x);
  const auto& u = field.values[i - 1];
  auto corner = [&](int dx, int dy) -> double {
    int node = lat.id(cell.ix + dx, cell.iy + dy);
    if (lat.interior[node]) return u[node];
    return field.g[i - 1](clip_to_boundary(lat.domain, lat.coord(node)));
  };
  if (lat.n == 1)
    return (1 - cell.fx) * corner(0, 0) + cell.fx * corner(1, 0);
  return (1 - cell.fx) * (1 - cell.fy) * corner(0, 0) + cell.fx * (1 - cell.fy) * corner(1, 0) +
         (1 - cell.fx) * cell.fy * corner(0, 1) + cell.fx * cell.fy * corner(1, 1);
}

// Unit probe directions: the two signs in 1-D, uniformly spaced angles with a
// half-step offset in 2-D (no direction lies on a coordinate axis).
inline const std::vector<Vec>& probe_directions(int n, int D) {
  thread_local std::vector<std::pair<int, std::vector<Vec>>> cache;
  int key = n * 1000000 + D;
  for (auto& e : cache)
    if (e.first == key) return e.second;
  std::vector<Vec> dirs;
  if (n == 1) {
    dirs = {Vec{1.0}, Vec{-1.0}};
  } else {
    dirs.reserve(D);
    for (int d = 0; d < D; ++d) {
      double th = kTau * (d + 0.5) / D;
      dirs.push_back(Vec{std::cos(th), std::sin(th)});
    }
  }
  cache.emplace_back(key, std::move(dirs));
  return cache.back().second;
}

struct ProbeResult {
  double max_val = 0, min_val = 0;
  Vec argmax_dir, argmin_dir;
  int argmax_index = 0, argmin_index = 0;
};

// Extremes of the weighted combined field v(y) = sum_k w_k u_k(y) over the
// clipped epsilon-sphere probe set. Boundary hits read g directly. Ties keep
// the lowest direction index for both extremes.
inline ProbeResult sphere_probe(const CoupledField& field, const ModeDistribution& weights,
                                const Vec& x, double eps, int D) {
  const Lattice& lat = *field.lattice;
  if (D < 2) throw InvalidArgument("need at least 2 probe directions");
  if (static_cast<int>(weights.probabilities.size()) != field.m)
    throw ModeOutOfRange("weight vector does not match mode count");
  const auto& dirs = probe_directions(lat.n, D);

  ProbeResult r;
  bool first = true;
  for (int d = 0; d < static_cast<int>(dirs.size()); ++d) {
    auto [y, hit] = boundary_hit(lat.domain, x, dirs[d], eps);
    double v = 0;
    for (int k = 0; k < field.m; ++k) {
      double w = weights.probabilities[k];
      if (w == 0) continue;
      v += w * (hit ? field.g[k](y) : interpolate(field, k + 1, y));
    }
    if (first || v > r.max_val) {
      r.max_val = v;
      r.argmax_dir = dirs[d];
      r.argmax_index = d;
    }
    if (first || v < r.min_val) {
      r.min_val = v;
      r.argmin_dir = dirs[d];
      r.argmin_index = d;
    }
    first = false;
  }
  return r;
}

// Two scalar functions indexed by mode, with optional domain knowledge.
// Wraps either closed forms or an interpolated lattice field, so residual and
// slope diagnostics run identically on both.
struct ModePair {
  int n = 0;                          // spatial dimension
  double h = 0;                       // lattice spacing when field-backed, else 0
  std::optional<DomainSpec> domain;   // present when containment is checkable
  std::array<std::function<double(const Vec&)>, 2> u;

  double eval(int i, const Vec& x) const { return u[i - 1](x); }

  static ModePair from_field(const CoupledField& field) {
    if (field.m != 2) throw InvalidArgument("mode pair needs exactly 2 modes");
    ModePair p;
    p.n = field.lattice->n;
    p.h = field.lattice->h;
    p.domain = field.lattice->domain;
    p.u[0] = [&field](const Vec& x) { return interpolate(field, 1, x); };
    p.u[1] = [&field](const Vec& x) { return interpolate(field, 2, x); };
    return p;
  }

  static ModePair from_functions(int n, std::function<double(const Vec&)> u1,
                                 std::function<double(const Vec&)> u2) {
    ModePair p;
    p.n = n;
    p.u[0] = std::move(u1);
    p.u[1] = std::move(u2);
    return p;
  }
};

}  // namespace tow
