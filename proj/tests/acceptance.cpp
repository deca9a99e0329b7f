#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tow/cli.hpp"

using tow::CoupledField;
using tow::DomainSpec;
using tow::ModePair;
using tow::ProblemSpec;
using tow::Vec;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double closed_v1(double s) {
  return -(std::exp(tow::kSqrt2 * s) + std::exp(-tow::kSqrt2 * s)) /
         (std::exp(tow::kSqrt2) + std::exp(-tow::kSqrt2));
}

double closed_s1_plus(double s) { return (closed_v1(s) - closed_v1(0.0)) / s; }

ModePair example_pair() {
  return ModePair::from_functions(
      2, [](const Vec& x) { return tow::example1(x, 2).first; },
      [](const Vec& x) { return tow::example1(x, 2).second; });
}

ModePair cone_pair(const tow::ConePair& cone) {
  return ModePair::from_functions(
      2, [cone](const Vec& x) { return tow::cone_eval(cone, x).first; },
      [cone](const Vec& x) { return tow::cone_eval(cone, x).second; });
}

Vec random_center(std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  for (;;) {
    Vec p{u(rng), u(rng)};
    if (tow::norm(p) <= radius) return p;
  }
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string without_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.find("\"timestamp\"") == std::string::npos) out << line << '\n';
  return out.str();
}

std::string write_file(const std::string& dir, const std::string& name,
                       const std::string& text) {
  std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  out << text;
  return path;
}

int run_cli(const std::string& subcommand, const std::string& config_path,
            const std::string& out_dir) {
  tow::CliOptions opt;
  opt.subcommand = subcommand;
  opt.config_path = config_path;
  opt.out_dir = out_dir;
  std::ostringstream diag;
  return tow::run_subcommand(opt, diag);
}

}  // namespace

int main() {
  std::printf("acceptance: 12 criteria, fixed seeds, single thread\n");

  // --- 1: quantitative reproduction of the coupled disk problem ---
  ProblemSpec spec1;
  spec1.domain = DomainSpec::make_ball({0.0, 0.0}, 1.0);
  spec1.generator = oracle::symmetric_2state();
  spec1.g = {[](const Vec&) { return -1.0; }, [](const Vec&) { return 1.0; }};
  spec1.eps = 0.05;
  spec1.h = 0.0125;
  spec1.D = 64;
  spec1.tol = 1e-8;

  auto t0 = std::chrono::steady_clock::now();
  tow::DppEngine engine1(spec1);
  tow::SolveReport rep1 = tow::solve(engine1);
  double solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const tow::Lattice& lat1 = *rep1.field.lattice;
  double worst1 = 0, bulk1 = 0;
  for (int node : lat1.interior_ids) {
    double v1 = tow::example1(lat1.coord(node), 2).first;
    double e = std::abs(rep1.field.values[0][node] - v1);
    worst1 = std::max(worst1, e);
    if (1.0 - tow::norm(lat1.coord(node)) > 2 * spec1.eps) bulk1 = std::max(bulk1, e);
  }
  double center1 = rep1.field.values[0][lat1.id(80, 80)];
  report(1, "coupled disk reproduction",
         rep1.converged && worst1 <= 0.02 && std::abs(center1 + 0.459) <= 0.02 &&
             solve_seconds <= 300.0,
         "worst " + fmt(worst1) + " (tol 0.02, off-layer " + fmt(bulk1) + "), center " +
             fmt(center1) + " vs -0.459 +- 0.02, " + std::to_string(rep1.iterations) +
             " sweeps in " + fmt(solve_seconds) + " s");

  // --- 2: one-dimensional linear fixed point ---
  {
    ProblemSpec spec;
    spec.domain = DomainSpec::make_interval(-1.0, 1.0);
    spec.generator = oracle::symmetric_2state();
    auto lin = [](const Vec& x) { return 0.5 * (x[0] + 1.0); };
    spec.g = {lin, lin};
    spec.eps = 0.05;
    spec.h = 0.05;
    spec.D = 2;
    spec.tol = 1e-10;
    tow::SolveReport rep = tow::solve(spec);
    const tow::Lattice& lat = *rep.field.lattice;
    double worst = 0;
    for (int node : lat.interior_ids) {
      double expect = lin(lat.coord(node));
      worst = std::max(worst, std::abs(rep.field.values[0][node] - expect));
      worst = std::max(worst, std::abs(rep.field.values[1][node] - expect));
    }
    double center = rep.field.values[0][lat.id(20, 0)];
    report(2, "one-dimensional linear fixed point",
           rep.converged && worst <= 1e-6 && std::abs(center - 0.5) <= 1e-6,
           "worst " + fmt(worst) + " (tol 1e-6), u(0) = " + fmt(center));
  }

  // --- 3: mode switch law closed forms ---
  {
    tow::GeneratorMatrix sym = oracle::symmetric_2state();
    tow::GeneratorMatrix uni = oracle::uniform_3state();
    double worst2 = 0, worst3 = 0, worst_sum = 0;
    for (int k = 0; k < 50; ++k) {
      double s = 1e-4 * std::pow(10.0, 5.0 * k / 49.0);
      tow::ModeDistribution d2 = tow::mode_distribution(sym, 1, s);
      worst2 = std::max(worst2, std::abs(d2.probabilities[0] - (1 + std::exp(-s)) / 2));
      worst_sum = std::max(worst_sum,
                           std::abs(d2.probabilities[0] + d2.probabilities[1] - 1.0));
      tow::ModeDistribution d3 = tow::mode_distribution(uni, 2, s);
      worst3 = std::max(worst3,
                        std::abs(d3.probabilities[1] - (1.0 / 3.0 + (2.0 / 3.0) * std::exp(-1.5 * s))));
      double sum3 = d3.probabilities[0] + d3.probabilities[1] + d3.probabilities[2];
      worst_sum = std::max(worst_sum, std::abs(sum3 - 1.0));
    }
    report(3, "mode switch law closed forms",
           worst2 <= 1e-10 && worst3 <= 1e-10 && worst_sum <= 1e-12,
           "two-state off by " + fmt(worst2) + ", three-state by " + fmt(worst3) +
               ", row sums by " + fmt(worst_sum) + " (tols 1e-10, 1e-12)");
  }

  // --- 4: cone fit round trips ---
  {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> radius(0.3, 1.5);
    double worst_coeff = 0, worst_res = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      tow::ConePair p = oracle::random_cone(rng);
      double r = radius(rng);
      auto [u10, u20] = tow::cone_profiles(p, 0.0);
      auto [M1, M2] = tow::cone_profiles(p, r);
      tow::ConePair q = tow::fit_cone(u10, u20, M1, M2, r, p.vertex);
      worst_coeff = std::max({worst_coeff, std::abs(q.C1 - p.C1), std::abs(q.C2 - p.C2),
                              std::abs(q.a - p.a), std::abs(q.b - p.b)});
      auto eta1 = [&p](double s) { return tow::cone_profiles(p, s).first; };
      auto eta2 = [&p](double s) { return tow::cone_profiles(p, s).second; };
      for (int j = 1; j <= 100; ++j) {
        double s = 0.02 * j;
        double delta = std::min(tow::default_fd_step(s), s / 2);
        auto [e1, e2] = tow::radial_residual(eta1, eta2, s, delta);
        worst_res = std::max({worst_res, std::abs(e1), std::abs(e2)});
      }
    }
    report(4, "cone fit round trips", worst_coeff <= 1e-9 && worst_res <= 1e-6,
           "1000 cones, coefficients off by " + fmt(worst_coeff) +
               " (tol 1e-9), radial residual " + fmt(worst_res) + " (tol 1e-6)");
  }

  // --- 5: two-radius slope inequality ---
  {
    ModePair ex = example_pair();
    tow::LemmaSlack s0 = tow::check_lemma_Ll(ex, {0.0, 0.0}, 0.5, 1.0);
    double worst_closed = 0;
    for (int i = 0; i < 2; ++i)
      worst_closed = std::max({worst_closed, std::abs(s0.plus[i]), std::abs(s0.minus[i])});

    double sc_half = tow::slope_stats(ex, {0.0, 0.0}, 0.5).sc_plus[0];
    bool reference_ok = std::abs(sc_half - (-0.704728)) <= 1e-4;

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> radius(0.3, 1.2);
    std::uniform_real_distribution<double> frac(0.1, 1.0);
    double worst_cone = 0;
    for (int trial = 0; trial < 100; ++trial) {
      tow::ConePair cone = oracle::random_cone(rng);
      double r = radius(rng);
      tow::LemmaSlack sl = tow::check_lemma_Ll(cone_pair(cone), cone.vertex, r * frac(rng), r, 64);
      for (int i = 0; i < 2; ++i)
        worst_cone = std::max({worst_cone, std::abs(sl.plus[i]), std::abs(sl.minus[i])});
    }

    ModePair lattice_pair = ModePair::from_field(rep1.field);
    std::mt19937_64 rng2(55);
    std::uniform_real_distribution<double> rr(0.1, 0.45);
    std::uniform_real_distribution<double> ss(0.3, 1.0);
    double min_slack = 0;
    for (int trial = 0; trial < 50; ++trial) {
      Vec x0 = random_center(rng2, 0.5);
      double r = rr(rng2);
      tow::LemmaSlack sl = tow::check_lemma_Ll(lattice_pair, x0, r * ss(rng2), r);
      for (int i = 0; i < 2; ++i)
        min_slack = std::min({min_slack, sl.plus[i], sl.minus[i]});
    }
    report(5, "two-radius slope inequality",
           worst_closed <= 1e-6 && reference_ok && worst_cone <= 1e-6 &&
               min_slack >= -5 * spec1.h,
           "closed-form slack " + fmt(worst_closed) + ", SC+ at 0.5 = " + fmt(sc_half) +
               " vs -0.704728 +- 1e-4, cone slack " + fmt(worst_cone) +
               " (tol 1e-6), lattice min slack " + fmt(min_slack) + " (floor " +
               fmt(-5 * spec1.h) + ")");
  }

  // --- 6: slope ladder reference values ---
  {
    ModePair ex = example_pair();
    std::vector<double> radii = {0.25, 0.5, 0.75, 1.0};
    std::vector<double> ladder;
    for (double r : radii) ladder.push_back(tow::slope_stats(ex, {0.0, 0.0}, r).s_plus[0]);
    bool decreasing = true;
    for (std::size_t k = 1; k < ladder.size(); ++k)
      if (!(ladder[k] < ladder[k - 1])) decreasing = false;
    double err_half = std::abs(ladder[1] - closed_s1_plus(0.5));
    double err_one = std::abs(ladder[3] - closed_s1_plus(1.0));
    report(6, "slope ladder reference values",
           err_half <= 1e-6 && err_one <= 1e-6 && decreasing,
           "S+(0.5) = " + fmt(ladder[1]) + ", S+(1) = " + fmt(ladder[3]) +
               ", closed-form gaps " + fmt(err_half) + ", " + fmt(err_one) +
               " (tol 1e-6), strictly decreasing: " + (decreasing ? "yes" : "no"));
  }

  // --- 7: coupled mean slope monotone ---
  {
    ModePair ex = example_pair();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rho(0.05, 0.6);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    int closed_ok = 0, lattice_ok = 0;
    for (int trial = 0; trial < 20; ++trial) {
      double p = rho(rng), phi = angle(rng);
      Vec x0{p * std::cos(phi), p * std::sin(phi)};
      if (tow::check_a_monotone(ex, x0, {0.1, 0.2, 0.3}).nondecreasing) ++closed_ok;
    }
    ModePair lattice_pair = ModePair::from_field(rep1.field);
    for (int trial = 0; trial < 20; ++trial) {
      Vec x0 = random_center(rng, 0.35);
      if (tow::check_a_monotone(lattice_pair, x0, {0.15, 0.3, 0.45}).nondecreasing)
        ++lattice_ok;
    }
    report(7, "coupled mean slope monotone", closed_ok == 20 && lattice_ok == 20,
           std::to_string(closed_ok) + "/20 closed-form centers (tol 1e-9), " +
               std::to_string(lattice_ok) + "/20 lattice centers (tol 5h)");
  }

  // --- 8: game estimate cross-check ---
  {
    tow::GreedyMax sI(rep1.field);
    tow::GreedyMin sII(rep1.field);
    tow::ValueEstimate est = tow::estimate_value(spec1, sI, sII, {0.0, 0.0}, 1, 20000, 1);
    double gap = std::abs(est.mean - center1);
    report(8, "game estimate cross-check",
           gap <= 3 * est.stderr_ && est.stderr_ <= 0.01,
           "mean " + fmt(est.mean) + " vs solver " + fmt(center1) + ", gap " + fmt(gap) +
               " <= " + fmt(3 * est.stderr_) + " (3 x stderr " + fmt(est.stderr_) +
               "), stderr cap 0.01, N = 20000, seed 1");
  }

  // --- 9: blowup residual decay ---
  {
    ModePair ex = example_pair();
    std::vector<double> radii = {0.4, 0.2, 0.1, 0.05};
    tow::BlowupReport smooth = tow::blowup_deviation(ex, {0.5, 0.0}, radii);
    bool ratios_ok = true;
    for (int i = 0; i < 2; ++i)
      for (std::size_t k = 1; k < radii.size(); ++k)
        if (!(smooth.residual[i][k] <= 0.7 * smooth.residual[i][k - 1])) ratios_ok = false;
    double slope = tow::norm(smooth.slope[0].back());
    tow::BlowupReport vertex = tow::blowup_deviation(ex, {0.0, 0.0}, radii);
    double vslope = tow::norm(vertex.slope[0].back());
    report(9, "blowup residual decay",
           ratios_ok && std::abs(slope - 0.498327) <= 1e-3 &&
               vertex.residuals_decreasing[0] && vslope <= 1e-3,
           "ratios <= 0.7: " + std::string(ratios_ok ? "yes" : "no") + ", slope at 0.5 = " +
               fmt(slope) + " vs 0.498327 +- 1e-3, vertex slope " + fmt(vslope) +
               " (tol 1e-3), vertex residuals decreasing: " +
               (vertex.residuals_decreasing[0] ? "yes" : "no"));
  }

  // --- 10: annulus barrier residual ---
  {
    tow::BarrierValue v = tow::barrier(3.0, 1.0, {0.5, 0.5});
    double expected = -12.0 * std::exp(-1.5);
    double gap = std::abs(v.residual - expected);

    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> Rdist(0.5, 2.0);
    std::uniform_real_distribution<double> mult(1.001, 3.0);
    std::uniform_real_distribution<double> inner(0.01, 0.99);
    std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
    int negative = 0;
    for (int trial = 0; trial < 100; ++trial) {
      double R = Rdist(rng);
      double alpha = 2.0 / (R * R) * mult(rng);
      double r = R / 2 + (R / 2) * inner(rng);
      double phi = angle(rng);
      if (tow::barrier(alpha, R, {r * std::cos(phi), r * std::sin(phi)}).residual < 0)
        ++negative;
    }
    report(10, "annulus barrier residual", gap <= 1e-9 && negative == 100,
           "residual " + fmt(v.residual) + " vs " + fmt(expected) + ", gap " + fmt(gap) +
               " (tol 1e-9); " + std::to_string(negative) + "/100 random residuals negative");
  }

  // --- 11: discrete comparison ordering ---
  {
    DomainSpec disk = DomainSpec::make_ball({0.0, 0.0}, 0.5);
    auto lattice = std::make_shared<const tow::Lattice>(tow::build_lattice(disk, 0.1));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_real_distribution<double> lift(0.0, 1.0);
    int ordered = 0;
    for (int inst = 0; inst < 100; ++inst) {
      double a0 = coeff(rng), a1 = coeff(rng), a2 = coeff(rng);
      double b0 = coeff(rng), b1 = coeff(rng);
      double l0 = lift(rng), l1 = lift(rng);
      ProblemSpec lo;
      lo.domain = disk;
      lo.generator = oracle::symmetric_2state();
      lo.g = {[a0, a1, a2](const Vec& p) { return a0 + a1 * p[0] + std::sin(3 * p[1] + a2); },
              [b0, b1](const Vec& p) { return b0 + b1 * p[1]; }};
      ProblemSpec hi = lo;
      hi.g = {[&lo, l0](const Vec& p) { return lo.g[0](p) + l0; },
              [&lo, l0, l1](const Vec& p) {
                return lo.g[1](p) + l0 + l1 * (1 + std::sin(5 * p[0])) / 2;
              }};
      lo.eps = hi.eps = 0.2;
      lo.h = hi.h = 0.1;
      lo.D = hi.D = 8;

      CoupledField A = CoupledField::zeros(lattice, 2, lo.g);
      CoupledField B = CoupledField::zeros(lattice, 2, hi.g);
      for (int k = 0; k < 2; ++k)
        for (std::size_t node = 0; node < A.values[k].size(); ++node) {
          A.values[k][node] = coeff(rng);
          B.values[k][node] = A.values[k][node] + lift(rng);
        }
      auto [An, da] = tow::dpp_sweep(A, lo);
      auto [Bn, db] = tow::dpp_sweep(B, hi);
      bool ok = true;
      for (int k = 0; k < 2; ++k)
        for (std::size_t node = 0; node < An.values[k].size(); ++node)
          if (!(An.values[k][node] <= Bn.values[k][node])) ok = false;
      if (ok) ++ordered;
    }

    ProblemSpec lo;
    lo.domain = disk;
    lo.generator = oracle::symmetric_2state();
    lo.g = {[](const Vec& p) { return std::sin(3 * p[0]) - 0.2; },
            [](const Vec& p) { return p[0] * p[1]; }};
    ProblemSpec hi = lo;
    hi.g = {[&lo](const Vec& p) { return lo.g[0](p) + 0.3; },
            [&lo](const Vec& p) { return lo.g[1](p) + 0.3 + 0.2 * (1 + std::sin(2 * p[0])) / 2; }};
    lo.eps = hi.eps = 0.1;
    lo.h = hi.h = 0.05;
    lo.D = hi.D = 16;
    lo.tol = hi.tol = 1e-9;
    tow::SolveReport rlo = tow::solve(lo);
    tow::SolveReport rhi = tow::solve(hi);
    double worst_excess = 0;
    for (int k = 0; k < 2; ++k)
      for (int node : rlo.field.lattice->interior_ids)
        worst_excess = std::max(worst_excess,
                                rlo.field.values[k][node] - rhi.field.values[k][node]);
    bool solved_ok = rlo.converged && rhi.converged && worst_excess <= 1e-6;
    report(11, "discrete comparison ordering", ordered == 100 && solved_ok,
           std::to_string(ordered) + "/100 sweeps order-preserving exactly; solved excess " +
               fmt(worst_excess) + " (tol 1e-6)");
  }

  // --- 12: artifact determinism ---
  {
    namespace fs = std::filesystem;
    std::string base = (fs::temp_directory_path() / "towlab_acceptance").string();
    fs::remove_all(base);
    fs::create_directories(base);

    const std::string solve_cfg = R"([domain]
kind = ball
center = 0 0
radius = 0.5

[generator]
m = 2
rows = -1 1 1 -1

[boundary]
g1 = -1
g2 = 1

[solver]
eps = 0.15
h = 0.1
directions = 8
tol = 1e-6
)";
    const std::string sim_cfg = R"([domain]
kind = interval
a = -1
b = 1

[generator]
m = 2
rows = -1 1 1 -1

[boundary]
g1 = (x + 1) / 2
g2 = (x + 1) / 2

[solver]
eps = 0.1
h = 0.1
directions = 2
tol = 1e-9

[game]
start = 0
mode = 1
episodes = 400
trace = 1
seed = 17
)";
    const std::string markov_cfg = R"([generator]
m = 2
rows = -1 1 1 -1

[markov]
times = 0 0.01 1
)";
    std::string solve_path = write_file(base, "solve.cfg", solve_cfg);
    std::string sim_path = write_file(base, "simulate.cfg", sim_cfg);
    std::string markov_path = write_file(base, "markov.cfg", markov_cfg);

    bool ok = true;
    std::string why = "byte-identical: ";
    auto twice = [&](const std::string& sub, const std::string& cfg,
                     const std::vector<std::string>& exact,
                     const std::vector<std::string>& sans_timestamp) {
      std::string a = base + "/" + sub + "_a";
      std::string b = base + "/" + sub + "_b";
      if (run_cli(sub, cfg, a) != 0 || run_cli(sub, cfg, b) != 0) {
        ok = false;
        why += sub + " exit nonzero; ";
        return;
      }
      for (const std::string& name : exact)
        if (file_bytes(a + "/" + name) != file_bytes(b + "/" + name)) {
          ok = false;
          why += name + " differs; ";
        }
      for (const std::string& name : sans_timestamp)
        if (without_timestamp(file_bytes(a + "/" + name)) !=
            without_timestamp(file_bytes(b + "/" + name))) {
          ok = false;
          why += name + " differs; ";
        }
    };
    twice("solve", solve_path, {"field.csv", "lattice.csv", "mode_1.pgm", "mode_2.pgm"},
          {"summary.json"});
    twice("simulate", sim_path, {"trace.csv"}, {"estimate.json"});
    twice("markov", markov_path, {"rho.csv"}, {});
    if (ok) why += "solve CSV/PGM, simulate trace/estimate, markov table";
    report(12, "artifact determinism", ok, why);
  }

  std::printf("%d/12 criteria passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
