#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "tow/exact.hpp"
#include "tow/lattice.hpp"

namespace tow {

// Full problem description for the coupled dynamic-programming fixed point.
// epsilon >= h is required (epsilon >= 2h recommended in 2-D); the 1-D probe
// set lands on exact nodes when epsilon == h.
struct ProblemSpec {
  DomainSpec domain;
  GeneratorMatrix generator;
  std::vector<std::function<double(const Vec&)>> g;
  double eps = 0.05;
  double h = 0.0125;
  int D = 64;
  double tol = 1e-8;
  long max_iters = 0;  // 0 = 10*(diam/eps)^2
  double theta = 1.0;
};

inline void validate_problem(const ProblemSpec& spec) {
  validate_domain(spec.domain);
  if (static_cast<int>(spec.g.size()) != spec.generator.m)
    throw InvalidArgument("boundary data count must match mode count");
  if (!(spec.eps > 0) || !(spec.h > 0)) throw InvalidArgument("eps and h must be positive");
  if (spec.eps < spec.h - 1e-12) throw InvalidArgument("need eps >= h");
  if (!(spec.tol > 0)) throw InvalidArgument("tol must be positive");
  if (!(spec.theta > 0) || spec.theta > 1) throw InvalidArgument("theta must lie in (0,1]");
  if (spec.D < 2) throw InvalidArgument("need at least 2 probe directions");
}

inline long default_max_iters(const ProblemSpec& spec) {
  double q = diameter(spec.domain) / spec.eps;
  return static_cast<long>(std::ceil(10.0 * q * q));
}

struct SolveReport {
  CoupledField field;
  long iterations = 0;
  double delta = 0;
  double residual = 0;
  bool converged = false;
};

namespace detail {

// Per (interior node, direction) probe stencil, precomputed once: the
// interpolation corners that are interior nodes plus the per-mode constant
// contributed by ghost corners or a boundary hit. A sweep then reduces to
// weighted reads of the mode-combined field.
struct ProbePlan {
  int D = 0;
  int m = 0;
  std::vector<std::array<int, 4>> corner;    // node ids, -1 padded
  std::vector<std::array<double, 4>> weight;
  std::vector<std::uint8_t> has_const;
  std::vector<double> gconst;                // [probe * m + k]
};

inline ProbePlan build_probe_plan(const Lattice& lat,
                                  const std::vector<std::function<double(const Vec&)>>& g,
                                  double eps, int D) {
  ProbePlan plan;
  plan.m = static_cast<int>(g.size());
  const auto& dirs = probe_directions(lat.n, D);
  plan.D = static_cast<int>(dirs.size());
  std::size_t probes = lat.interior_ids.size() * static_cast<std::size_t>(plan.D);
  plan.corner.assign(probes, {-1, -1, -1, -1});
  plan.weight.assign(probes, {0, 0, 0, 0});
  plan.has_const.assign(probes, 0);
  plan.gconst.assign(probes * plan.m, 0.0);

  std::size_t p = 0;
  for (int node : lat.interior_ids) {
    Vec x = lat.coord(node);
    for (int d = 0; d < plan.D; ++d, ++p) {
      auto [y, hit] = boundary_hit(lat.domain, x, dirs[d], eps);
      if (hit) {
        plan.has_const[p] = 1;
        for (int k = 0; k < plan.m; ++k) plan.gconst[p * plan.m + k] = g[k](y);
        continue;
      }
      auto cell = locate_cell(lat, y);
      double wx[2] = {1 - cell.fx, cell.fx};
      double wy[2] = {1 - cell.fy, cell.fy};
      int nc = 0;
      int cy = lat.n > 1 ? 2 : 1;
      for (int dy = 0; dy < cy; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
          double w = wx[dx] * (lat.n > 1 ? wy[dy] : 1.0);
          int cn = lat.id(cell.ix + dx, cell.iy + dy);
          if (lat.interior[cn]) {
            plan.corner[p][nc] = cn;
            plan.weight[p][nc] = w;
            ++nc;
          } else if (w != 0) {
            plan.has_const[p] = 1;
            Vec bp = clip_to_boundary(lat.domain, lat.coord(cn));
            for (int k = 0; k < plan.m; ++k) plan.gconst[p * plan.m + k] += w * g[k](bp);
          }
        }
    }
  }
  return plan;
}

}  // namespace detail

// Owns the lattice, probe plan and mode kernels for one problem; sweeps are
// Jacobi so the probe reads see only the previous iterate.
class DppEngine {
 public:
  explicit DppEngine(const ProblemSpec& spec) : spec_(spec) {
    validate_problem(spec_);
    lattice_ = std::make_shared<Lattice>(build_lattice(spec_.domain, spec_.h));
    plan_ = detail::build_probe_plan(*lattice_, spec_.g, spec_.eps, spec_.D);
    int m = spec_.generator.m;
    rho_.resize(static_cast<std::size_t>(m) * m);
    double step_time = spec_.eps * spec_.eps;
    for (int i = 1; i <= m; ++i) {
      auto d = mode_distribution(spec_.generator, i, step_time);
      for (int k = 0; k < m; ++k) rho_[static_cast<std::size_t>(i - 1) * m + k] = d.probabilities[k];
    }
  }

  const ProblemSpec& spec() const { return spec_; }
  std::shared_ptr<const Lattice> lattice() const { return lattice_; }

  CoupledField make_field(std::optional<double> per_mode_constant = std::nullopt) const {
    CoupledField f = CoupledField::zeros(lattice_, spec_.generator.m, spec_.g);
    if (per_mode_constant)
      for (auto& arr : f.values) std::fill(arr.begin(), arr.end(), *per_mode_constant);
    return f;
  }

  // Per-mode average of g over a fixed boundary trace; the default initial
  // iterate (always inside the invariant value range).
  CoupledField boundary_average_field() const {
    CoupledField f = CoupledField::zeros(lattice_, spec_.generator.m, spec_.g);
    auto samples = boundary_samples(spec_.domain, 256);
    for (int k = 0; k < f.m; ++k) {
      double avg = 0;
      for (const Vec& s : samples) avg += spec_.g[k](s);
      avg /= static_cast<double>(samples.size());
      std::fill(f.values[k].begin(), f.values[k].end(), avg);
    }
    return f;
  }

  // One Jacobi sweep: new u_i(x) = (1-theta) u_i(x) + theta/2 (max + min) of
  // the mode-combined probes. Returns the sup-norm change.
  double sweep(const CoupledField& old_field, CoupledField& out) const {
    return sweep_with_theta(old_field, out, spec_.theta);
  }

  // Sup-norm defect |u - (max+min)/2| without updating.
  double residual(const CoupledField& field) const {
    CoupledField scratch = field;
    return sweep_with_theta(field, scratch, 1.0);
  }

  double sweep_with_theta(const CoupledField& old_field, CoupledField& out, double theta) const {
    const Lattice& lat = *lattice_;
    int m = plan_.m;
    combined_.assign(static_cast<std::size_t>(m) * lat.node_count(), 0.0);
    for (int i = 0; i < m; ++i) {
      double* w = combined_.data() + static_cast<std::size_t>(i) * lat.node_count();
      const double* r = rho_.data() + static_cast<std::size_t>(i) * m;
      for (int node : lat.interior_ids) {
        double s = 0;
        for (int k = 0; k < m; ++k) s += r[k] * old_field.values[k][node];
        w[node] = s;
      }
    }

    double delta = 0;
    std::size_t p0 = 0;
    for (std::size_t slot = 0; slot < lat.interior_ids.size(); ++slot, p0 += plan_.D) {
      int node = lat.interior_ids[slot];
      for (int i = 0; i < m; ++i) {
        const double* w = combined_.data() + static_cast<std::size_t>(i) * lat.node_count();
        const double* r = rho_.data() + static_cast<std::size_t>(i) * m;
        double vmax = 0, vmin = 0;
        for (int d = 0; d < plan_.D; ++d) {
          std::size_t p = p0 + d;
          const auto& cs = plan_.corner[p];
          const auto& ws = plan_.weight[p];
          double v = 0;
          for (int c = 0; c < 4 && cs[c] >= 0; ++c) v += ws[c] * w[cs[c]];
          if (plan_.has_const[p]) {
            const double* gc = plan_.gconst.data() + p * m;
            for (int k = 0; k < m; ++k) v += r[k] * gc[k];
          }
          if (d == 0 || v > vmax) vmax = v;
          if (d == 0 || v < vmin) vmin = v;
        }
        double prev = old_field.values[i][node];
        double next = (1 - theta) * prev + theta * 0.5 * (vmax + vmin);
        out.values[i][node] = next;
        delta = std::max(delta, std::abs(next - prev));
      }
    }
    return delta;
  }

  // Binds a caller-built field (possibly from an identical lattice built
  // elsewhere) to this engine's lattice; shapes must match.
  CoupledField align(const CoupledField& field) const {
    if (field.m != spec_.generator.m) throw InvalidArgument("field mode count mismatch");
    for (const auto& arr : field.values)
      if (static_cast<int>(arr.size()) != lattice_->node_count())
        throw InvalidArgument("field does not match the problem lattice");
    CoupledField out = field;
    out.lattice = lattice_;
    if (out.g.empty()) out.g = spec_.g;
    return out;
  }

 private:
  ProblemSpec spec_;
  std::shared_ptr<Lattice> lattice_;
  detail::ProbePlan plan_;
  std::vector<double> rho_;
  mutable std::vector<double> combined_;
};

inline std::pair<CoupledField, double> dpp_sweep(const CoupledField& field,
                                                 const ProblemSpec& spec) {
  DppEngine engine(spec);
  CoupledField in = engine.align(field);
  CoupledField out = in;
  double delta = engine.sweep(in, out);
  return {std::move(out), delta};
}

inline double dpp_residual(const CoupledField& field, const ProblemSpec& spec) {
  DppEngine engine(spec);
  return engine.residual(engine.align(field));
}

inline SolveReport solve(const DppEngine& engine,
                         std::optional<CoupledField> initial = std::nullopt) {
  const ProblemSpec& spec = engine.spec();
  long max_iters = spec.max_iters > 0 ? spec.max_iters : default_max_iters(spec);

  CoupledField cur = initial ? engine.align(*initial) : engine.boundary_average_field();
  CoupledField next = cur;

  SolveReport rep;
  rep.delta = std::numeric_limits<double>::infinity();
  for (long it = 0; it < max_iters; ++it) {
    rep.delta = engine.sweep(cur, next);
    std::swap(cur, next);
    rep.iterations = it + 1;
    if (rep.delta <= spec.tol) {
      rep.converged = true;
      break;
    }
  }
  rep.residual = engine.residual(cur);
  rep.field = std::move(cur);
  return rep;
}

inline SolveReport solve(const ProblemSpec& spec,
                         std::optional<CoupledField> initial = std::nullopt) {
  DppEngine engine(spec);
  return solve(engine, std::move(initial));
}

// Residual of the multiplied-form system
//   r_i = -sum_{j,k} d_j u_i d_k u_i d2_{jk} u_i + |Du_i|^2 (u_i - u_{3-i})
// with all derivatives central differences of step h_fd. The multiplied form
// needs no division by |Du|^2 and degenerates to 0 at critical points.
inline std::pair<double, double> pde_residual(const ModePair& pair, const Vec& x, double h_fd) {
  if (!(h_fd > 0)) throw InvalidArgument("FD step must be positive");
  if (pair.domain) {
    double d = boundary_distance(*pair.domain, x);
    if (d <= h_fd * std::sqrt(static_cast<double>(pair.n)))
      throw TooCloseToBoundary("FD stencil would leave the domain");
  }
  int n = pair.n;
  double res[2];
  for (int mode = 1; mode <= 2; ++mode) {
    auto f = [&](const Vec& p) { return pair.eval(mode, p); };
    double f0 = f(x);
    double grad[2] = {0, 0};
    double hess[2][2] = {{0, 0}, {0, 0}};
    for (int j = 0; j < n; ++j) {
      Vec xp = x, xm = x;
      xp[j] += h_fd;
      xm[j] -= h_fd;
      double fp = f(xp), fm = f(xm);
      grad[j] = (fp - fm) / (2 * h_fd);
      hess[j][j] = (fp - 2 * f0 + fm) / (h_fd * h_fd);
    }
    if (n == 2) {
      Vec xpp = x, xpm = x, xmp = x, xmm = x;
      xpp[0] += h_fd; xpp[1] += h_fd;
      xpm[0] += h_fd; xpm[1] -= h_fd;
      xmp[0] -= h_fd; xmp[1] += h_fd;
      xmm[0] -= h_fd; xmm[1] -= h_fd;
      hess[0][1] = hess[1][0] = (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4 * h_fd * h_fd);
    }
    double dinf = 0, grad2 = 0;
    for (int j = 0; j < n; ++j) {
      grad2 += grad[j] * grad[j];
      for (int k = 0; k < n; ++k) dinf += grad[j] * grad[k] * hess[j][k];
    }
    double other = pair.eval(3 - mode, x);
    res[mode - 1] = -dinf + grad2 * (f0 - other);
  }
  return {res[0], res[1]};
}

}  // namespace tow
