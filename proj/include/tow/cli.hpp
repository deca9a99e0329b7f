#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tow/analysis.hpp"
#include "tow/config.hpp"
#include "tow/game.hpp"
#include "tow/io.hpp"

namespace tow {

struct CliOptions {
  std::string subcommand;
  std::string config_path;
  std::string out_dir;  // empty: take the config's [output] dir
  std::optional<std::uint64_t> seed;
};

namespace detail {

inline std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

inline Json vec_json(const Vec& v) {
  Json j = Json::array();
  for (int i = 0; i < v.dim(); ++i) j.push_back(v[i]);
  return j;
}

inline void write_field_csv(const std::string& path, const CoupledField& field) {
  const Lattice& lat = *field.lattice;
  CsvTable t;
  t.header.push_back("x");
  if (lat.n == 2) t.header.push_back("y");
  for (int k = 1; k <= field.m; ++k) t.header.push_back("u_" + std::to_string(k));
  for (long node : lat.interior_ids) {
    Vec p = lat.coord(node);
    std::vector<double> row;
    for (int i = 0; i < lat.n; ++i) row.push_back(p[i]);
    for (int k = 0; k < field.m; ++k)
      row.push_back(field.values[static_cast<std::size_t>(k)][static_cast<std::size_t>(node)]);
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

inline void write_lattice_csv(const std::string& path, const Lattice& lat) {
  CsvTable t;
  t.header = {"node", "ix", "iy", "x", "y", "interior", "boundary_distance"};
  for (long node = 0; node < lat.node_count(); ++node) {
    Vec p = lat.coord(node);
    long ix = node % lat.dims[0];
    long iy = lat.n == 2 ? node / lat.dims[0] : 0;
    t.rows.push_back({static_cast<double>(node), static_cast<double>(ix), static_cast<double>(iy),
                      p[0], lat.n == 2 ? p[1] : 0.0,
                      lat.interior[static_cast<std::size_t>(node)] ? 1.0 : 0.0,
                      lat.bdist[static_cast<std::size_t>(node)]});
  }
  write_csv(path, t);
}

inline void write_mode_pgms(const std::string& dir, const CoupledField& field) {
  const Lattice& lat = *field.lattice;
  if (lat.n != 2) return;
  int w = static_cast<int>(lat.dims[0]);
  int hgt = static_cast<int>(lat.dims[1]);
  for (int k = 0; k < field.m; ++k) {
    const auto& vals = field.values[static_cast<std::size_t>(k)];
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (long node : lat.interior_ids) {
      lo = std::min(lo, vals[static_cast<std::size_t>(node)]);
      hi = std::max(hi, vals[static_cast<std::size_t>(node)]);
    }
    double range = hi - lo;
    std::vector<unsigned char> px(static_cast<std::size_t>(w) * hgt, 128);
    for (long node : lat.interior_ids) {
      long ix = node % lat.dims[0];
      long iy = node / lat.dims[0];
      long row = lat.dims[1] - 1 - iy;  // image row 0 on top
      double g = range > 0 ? 255.0 * (vals[static_cast<std::size_t>(node)] - lo) / range : 0.0;
      px[static_cast<std::size_t>(row * lat.dims[0] + ix)] =
          static_cast<unsigned char>(std::clamp(g + 0.5, 0.0, 255.0));
    }
    write_pgm(join_path(dir, "mode_" + std::to_string(k + 1) + ".pgm"), w, hgt, px);
  }
}

inline Json solve_summary(const DppEngine& engine, const SolveReport& rep) {
  const ProblemSpec& spec = engine.spec();
  Json j;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["delta"] = rep.delta;
  j["residual"] = rep.residual;
  j["eps"] = spec.eps;
  j["h"] = spec.h;
  j["directions"] = spec.D;
  j["tol"] = spec.tol;
  j["theta"] = spec.theta;
  j["modes"] = spec.generator.m;
  j["interior_nodes"] = static_cast<long>(engine.lattice()->interior_ids.size());
  return j;
}

}  // namespace detail

inline int cmd_solve(const RunConfig& cfg, const std::string& out_dir, std::ostream& diag) {
  std::optional<DppEngine> engine;
  try {
    engine.emplace(cfg.problem());
  } catch (const Error& e) {
    diag << e.what() << '\n';
    return 1;
  }
  try {
    std::filesystem::create_directories(out_dir);
    SolveReport rep = solve(*engine);
    detail::write_field_csv(detail::join_path(out_dir, "field.csv"), rep.field);
    detail::write_lattice_csv(detail::join_path(out_dir, "lattice.csv"), *engine->lattice());
    write_json_file(detail::join_path(out_dir, "summary.json"), detail::solve_summary(*engine, rep));
    if (cfg.write_pgm_images()) detail::write_mode_pgms(out_dir, rep.field);
    if (!rep.converged) {
      diag << "NotConverged: delta " << rep.delta << " after " << rep.iterations
           << " iterations (tol " << engine->spec().tol << ")\n";
      return 2;
    }
  } catch (const std::exception& e) {
    diag << e.what() << '\n';
    return 3;
  }
  return 0;
}

inline int cmd_simulate(const RunConfig& cfg, const std::string& out_dir, std::uint64_t seed,
                        std::ostream& diag) {
  std::optional<DppEngine> engine;
  Vec start;
  int mode = 1;
  long episodes = 0;
  bool keep_trace = false;
  try {
    engine.emplace(cfg.problem());
    start = cfg.vec("game", "start");
    mode = static_cast<int>(cfg.number_or("game", "mode", 1));
    episodes = static_cast<long>(cfg.number_or("game", "episodes", 1000));
    keep_trace = cfg.number_or("game", "trace", 0) != 0;
    if (start.dim() != engine->spec().domain.dim())
      throw ConfigError("game start point dimension does not match the domain");
  } catch (const Error& e) {
    diag << e.what() << '\n';
    return 1;
  }
  try {
    std::filesystem::create_directories(out_dir);
    const ProblemSpec& spec = engine->spec();
    SolveReport rep = solve(*engine);
    if (!rep.converged) {
      diag << "NotConverged: delta " << rep.delta << " after " << rep.iterations
           << " iterations (tol " << spec.tol << ")\n";
      return 2;
    }
    GreedyMax sI(rep.field);
    GreedyMin sII(rep.field);
    ValueEstimate est = estimate_value(spec, sI, sII, start, mode, episodes, seed);

    Json j;
    j["mean"] = est.mean;
    j["stderr"] = est.stderr_;
    j["episodes"] = est.episodes;
    j["eps"] = est.eps;
    j["seed"] = seed;
    j["start"] = detail::vec_json(est.start);
    j["mode"] = est.start_mode;
    j["solver_value"] = interpolate(rep.field, mode, start);
    write_json_file(detail::join_path(out_dir, "estimate.json"), j);

    if (keep_trace) {
      GameTrace trace = play_episode(spec, sI, sII, start, mode, seed, 0);
      CsvTable t;
      t.header = {"step", "x", "y", "mode", "coin"};
      for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const TraceStep& ts = trace.steps[s];
        t.rows.push_back({static_cast<double>(s + 1), ts.point[0],
                          ts.point.dim() == 2 ? ts.point[1] : 0.0,
                          static_cast<double>(ts.mode), ts.coin_won_by_max ? 1.0 : 0.0});
      }
      write_csv(detail::join_path(out_dir, "trace.csv"), t);
    }
  } catch (const std::exception& e) {
    diag << e.what() << '\n';
    return 3;
  }
  return 0;
}

inline int cmd_analyze(const RunConfig& cfg, const std::string& out_dir, std::ostream& diag) {
  std::optional<DppEngine> engine;
  Vec center;
  std::vector<double> radii;
  int K = kAnalysisSamples;
  try {
    engine.emplace(cfg.problem());
    if (engine->spec().generator.m != 2)
      throw ConfigError("analyze needs a 2-mode generator");
    center = cfg.vec("analysis", "center");
    radii = cfg.numbers("analysis", "radii");
    K = static_cast<int>(cfg.number_or("analysis", "samples", kAnalysisSamples));
    std::vector<double> sorted = radii;
    std::sort(sorted.rbegin(), sorted.rend());
    if (sorted != radii)
      throw ConfigError("analysis radii must be listed in decreasing order");
    if (center.dim() != engine->spec().domain.dim())
      throw ConfigError("analysis center dimension does not match the domain");
  } catch (const Error& e) {
    diag << e.what() << '\n';
    return 1;
  }
  try {
    std::filesystem::create_directories(out_dir);
    const ProblemSpec& spec = engine->spec();
    SolveReport rep = solve(*engine);
    if (!rep.converged) {
      diag << "NotConverged: delta " << rep.delta << " after " << rep.iterations
           << " iterations (tol " << spec.tol << ")\n";
      return 2;
    }
    ModePair pair = ModePair::from_field(rep.field);

    std::vector<double> ascending(radii.rbegin(), radii.rend());
    MonotoneAReport mono = check_a_monotone(pair, center, ascending, K);
    BlowupReport blow = blowup_deviation(pair, center, radii, K);
    SymmetricSlopeReport sym = symmetric_slope_check(pair, center, radii, K);
    double s_small = cfg.number_or("analysis", "lemma_inner", radii.back());
    double r_big = cfg.number_or("analysis", "lemma_outer", radii.front());
    LemmaSlack lemma = check_lemma_Ll(pair, center, s_small, r_big, K);
    double h_fd = cfg.number_or("analysis", "fd_step", std::max(1e-4, pair.h));
    LipschitzReport lip = lipschitz_bound_check(pair, center, radii.front(), h_fd, K);
    double cone_violation = cone_comparison_check(pair, center, radii.front(), K);

    CsvTable slope_csv;
    slope_csv.header = {"r", "S1_plus", "S1_minus", "S2_plus", "S2_minus",
                        "SC1_plus", "SC1_minus", "SC2_plus", "SC2_minus", "a"};
    for (std::size_t k = 0; k < ascending.size(); ++k) {
      SlopeReport sr = slope_stats(pair, center, ascending[k], K);
      slope_csv.rows.push_back({ascending[k], sr.s_plus[0], sr.s_minus[0], sr.s_plus[1],
                                sr.s_minus[1], sr.sc_plus[0], sr.sc_minus[0], sr.sc_plus[1],
                                sr.sc_minus[1], mono.a[k]});
    }
    write_csv(detail::join_path(out_dir, "slope_ladder.csv"), slope_csv);

    CsvTable blow_csv;
    blow_csv.header = {"r", "residual_1", "residual_2", "s_plus_1", "s_plus_2",
                       "running_sup_1", "running_sup_2"};
    for (std::size_t k = 0; k < radii.size(); ++k)
      blow_csv.rows.push_back({radii[k], blow.residual[0][k], blow.residual[1][k],
                               blow.s_plus[0][k], blow.s_plus[1][k], blow.running_sup[0][k],
                               blow.running_sup[1][k]});
    write_csv(detail::join_path(out_dir, "blowup_ladder.csv"), blow_csv);

    Json j;
    j["center"] = detail::vec_json(center);
    j["radii"] = radii;
    j["samples"] = K;
    j["a_values"] = mono.a;
    j["a_nondecreasing"] = mono.nondecreasing;
    j["a_tolerance"] = mono.tolerance;
    j["lemma_slack_plus"] = {lemma.plus[0], lemma.plus[1]};
    j["lemma_slack_minus"] = {lemma.minus[0], lemma.minus[1]};
    j["lemma_radii"] = {s_small, r_big};
    j["extrapolated_s_plus"] = {blow.extrapolated_s_plus[0], blow.extrapolated_s_plus[1]};
    j["residuals_decreasing"] = {blow.residuals_decreasing[0], blow.residuals_decreasing[1]};
    j["symmetric_defect"] = {sym.defect[0], sym.defect[1]};
    j["gradient_norm"] = lip.gradient_norm;
    j["lipschitz_bound"] = lip.bound;
    j["lipschitz_slack"] = lip.slack;
    j["cone_violation"] = cone_violation;
    j["solver_iterations"] = rep.iterations;
    j["solver_residual"] = rep.residual;
    write_json_file(detail::join_path(out_dir, "analysis.json"), j);
  } catch (const std::exception& e) {
    diag << e.what() << '\n';
    return 3;
  }
  return 0;
}

inline int cmd_cones(const RunConfig& cfg, const std::string& out_dir, std::ostream& diag) {
  ConePair cone;
  std::vector<double> radii;
  try {
    cone = cfg.cone();
    radii = cfg.numbers("cones", "radii");
    for (double r : radii)
      if (!(r > 0)) throw ConfigError("cone radii must be positive");
  } catch (const Error& e) {
    diag << e.what() << '\n';
    return 1;
  }
  try {
    std::filesystem::create_directories(out_dir);
    auto eta1 = [&cone](double s) { return cone_profiles(cone, s).first; };
    auto eta2 = [&cone](double s) { return cone_profiles(cone, s).second; };
    CsvTable t;
    t.header = {"r", "psi_1", "psi_2", "residual_1", "residual_2"};
    for (double r : radii) {
      auto [p1, p2] = cone_profiles(cone, r);
      double delta = std::min(default_fd_step(r), r / 2);
      auto [e1, e2] = radial_residual(eta1, eta2, r, delta);
      t.rows.push_back({r, p1, p2, e1, e2});
    }
    write_csv(detail::join_path(out_dir, "cones.csv"), t);
  } catch (const std::exception& e) {
    diag << e.what() << '\n';
    return 3;
  }
  return 0;
}

inline int cmd_markov(const RunConfig& cfg, const std::string& out_dir, std::ostream& diag) {
  GeneratorMatrix gen;
  std::vector<double> times;
  int start_mode = 1;
  try {
    gen = cfg.generator();
    times = cfg.numbers("markov", "times");
    start_mode = static_cast<int>(cfg.number_or("markov", "start_mode", 1));
    for (double s : times)
      if (s < 0) throw ConfigError("markov times must be nonnegative");
    if (start_mode < 1 || start_mode > gen.m) throw ConfigError("start_mode out of range");
  } catch (const Error& e) {
    diag << e.what() << '\n';
    return 1;
  }
  try {
    std::filesystem::create_directories(out_dir);
    CsvTable t;
    t.header.push_back("s");
    for (int k = 1; k <= gen.m; ++k) t.header.push_back("rho_" + std::to_string(k));
    for (double s : times) {
      ModeDistribution d = mode_distribution(gen, start_mode, s);
      std::vector<double> row{s};
      row.insert(row.end(), d.probabilities.begin(), d.probabilities.end());
      t.rows.push_back(std::move(row));
    }
    write_csv(detail::join_path(out_dir, "rho.csv"), t);
  } catch (const std::exception& e) {
    diag << e.what() << '\n';
    return 3;
  }
  return 0;
}

// Dispatch; exit codes: 0 ok, 1 validation failure, 2 solver did not
// converge, 3 runtime failure.
inline int run_subcommand(const CliOptions& opt, std::ostream& diag) {
  RunConfig cfg;
  try {
    cfg = RunConfig::load(opt.config_path);
  } catch (const Error& e) {
    diag << e.what() << '\n';
    return 1;
  }
  std::string out_dir = opt.out_dir.empty() ? cfg.out_dir() : opt.out_dir;
  std::uint64_t seed = opt.seed ? *opt.seed : cfg.seed();

  if (opt.subcommand == "solve") return cmd_solve(cfg, out_dir, diag);
  if (opt.subcommand == "simulate") return cmd_simulate(cfg, out_dir, seed, diag);
  if (opt.subcommand == "analyze") return cmd_analyze(cfg, out_dir, diag);
  if (opt.subcommand == "cones") return cmd_cones(cfg, out_dir, diag);
  if (opt.subcommand == "markov") return cmd_markov(cfg, out_dir, diag);
  diag << "unknown subcommand '" << opt.subcommand << "'\n";
  return 1;
}

}  // namespace tow
