#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tow/solver.hpp"

namespace tow {

// Counter-based RNG: output k of stream (seed, stream) is a pure function of
// (seed, stream, k), so episodes own disjoint substreams and replay exactly.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) {
    key_ = mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0xbf58476d1ce4e5b9ull));
  }

  double next_unit() {
    std::uint64_t z = mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

struct GameContext {
  const GeneratorMatrix& generator;
  double eps;
  int D;
  const std::vector<ModeDistribution>& rho;  // [mode-1]: switch kernel rows at eps^2

  const ModeDistribution& rho_row(int mode) const { return rho[static_cast<std::size_t>(mode - 1)]; }
};

// A move rule. Returned directions are unit vectors; greedy rules share
// sphere_probe's tie-breaking (lowest direction index), which makes play on a
// negated field mirror exactly.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual Vec direction(const GameContext& ctx, const Vec& x, int mode) const = 0;
};

class GreedyMax : public Strategy {
 public:
  explicit GreedyMax(const CoupledField& field) : field_(field) {}
  Vec direction(const GameContext& ctx, const Vec& x, int mode) const override {
    return sphere_probe(field_, ctx.rho_row(mode), x, ctx.eps, ctx.D).argmax_dir;
  }

 private:
  const CoupledField& field_;
};

class GreedyMin : public Strategy {
 public:
  explicit GreedyMin(const CoupledField& field) : field_(field) {}
  Vec direction(const GameContext& ctx, const Vec& x, int mode) const override {
    return sphere_probe(field_, ctx.rho_row(mode), x, ctx.eps, ctx.D).argmin_dir;
  }

 private:
  const CoupledField& field_;
};

class PullToPoint : public Strategy {
 public:
  explicit PullToPoint(Vec target) : target_(target) {}
  Vec direction(const GameContext&, const Vec& x, int) const override {
    Vec d = target_ - x;
    double r = norm(d);
    if (r < 1e-300) {
      Vec e = Vec::zero(x.dim());
      e[0] = 1;
      return e;
    }
    return (1.0 / r) * d;
  }

 private:
  Vec target_;
};

struct TraceStep {
  Vec point;
  int mode;
  bool coin_won_by_max;  // true: player I (the maximizer) moved
};

struct GameTrace {
  Vec start;
  int start_mode = 1;
  std::vector<TraceStep> steps;
  Vec terminal;
  int terminal_mode = 1;
  double payoff = 0;
  std::uint64_t step_count = 0;
};

struct ValueEstimate {
  double mean = 0;
  double stderr_ = 0;
  long episodes = 0;
  double eps = 0;
  Vec start;
  int start_mode = 1;
};

inline constexpr std::uint64_t kStepCap = 10'000'000;

namespace detail {

struct GameSetup {
  std::vector<ModeDistribution> rho;

  explicit GameSetup(const ProblemSpec& spec) {
    double t = spec.eps * spec.eps;
    for (int i = 1; i <= spec.generator.m; ++i)
      rho.push_back(mode_distribution(spec.generator, i, t));
  }
};

inline GameTrace run_episode(const ProblemSpec& spec, const GameSetup& setup, const Strategy& sI,
                             const Strategy& sII, const Vec& x0, int i0, std::uint64_t seed,
                             std::uint64_t episode, bool keep_steps) {
  detail::check_mode(spec.generator, i0);
  if (boundary_distance(spec.domain, x0) <= 0) throw NotInterior("start point must be interior");
  GameContext ctx{spec.generator, spec.eps, spec.D, setup.rho};
  CounterRng rng(seed, episode);

  GameTrace trace;
  trace.start = x0;
  trace.start_mode = i0;
  Vec x = x0;
  int mode = i0;
  for (std::uint64_t k = 0; k < kStepCap; ++k) {
    bool max_moves = rng.next_unit() < 0.5;
    Vec v = (max_moves ? sI : sII).direction(ctx, x, mode);
    auto [y, hit] = boundary_hit(spec.domain, x, v, spec.eps);
    mode = pick_mode(ctx.rho_row(mode).probabilities, rng.next_unit());
    x = y;
    trace.step_count = k + 1;
    if (keep_steps) trace.steps.push_back({x, mode, max_moves});
    if (hit) {
      trace.terminal = x;
      trace.terminal_mode = mode;
      trace.payoff = spec.g[static_cast<std::size_t>(mode - 1)](x);
      return trace;
    }
  }
  throw StalledGame(episode, kStepCap);
}

}  // namespace detail

// One episode: fair coin, the winner's strategy moves the token by eps with
// boundary clipping, then the mode is resampled with elapsed time eps^2. The
// payoff is g at the exit point under the mode at exit time.
inline GameTrace play_episode(const ProblemSpec& spec, const Strategy& sI, const Strategy& sII,
                              const Vec& x0, int i0, std::uint64_t seed,
                              std::uint64_t episode = 0) {
  validate_problem(spec);
  detail::GameSetup setup(spec);
  return detail::run_episode(spec, setup, sI, sII, x0, i0, seed, episode, true);
}

// Mean and standard error over N seeded episodes; the episode index selects
// the RNG substream, so the estimate is reproducible and order-insensitive.
inline ValueEstimate estimate_value(const ProblemSpec& spec, const Strategy& sI,
                                    const Strategy& sII, const Vec& x0, int i0, long N,
                                    std::uint64_t seed) {
  if (N < 2) throw InvalidArgument("need at least 2 episodes");
  validate_problem(spec);
  detail::GameSetup setup(spec);
  double sum = 0, sumsq = 0;
  for (long e = 0; e < N; ++e) {
    GameTrace t = detail::run_episode(spec, setup, sI, sII, x0, i0, seed,
                                      static_cast<std::uint64_t>(e), false);
    sum += t.payoff;
    sumsq += t.payoff * t.payoff;
  }
  ValueEstimate est;
  est.mean = sum / static_cast<double>(N);
  double var = (sumsq - sum * est.mean) / static_cast<double>(N - 1);
  est.stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(N));
  est.episodes = N;
  est.eps = spec.eps;
  est.start = x0;
  est.start_mode = i0;
  return est;
}

}  // namespace tow
