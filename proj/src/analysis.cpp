#include "histlearn/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "histlearn/rng.hpp"

namespace histlearn {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct Realization {
  RewardSequence rewards;
  std::optional<MeanTrace> means;
};

std::vector<Realization> realize_runs(const InstanceSpec& instance,
                                      std::size_t n_runs,
                                      std::uint64_t master_seed) {
  std::optional<MeanTrace> means;
  if (has_mean_trace(instance)) means = mean_trace(instance);
  std::vector<Realization> runs;
  runs.reserve(n_runs);
  for (std::size_t r = 0; r < n_runs; ++r) {
    const std::uint64_t seed = run_seed(master_seed, instance, r);
    runs.push_back(Realization{
        means ? realize(*means, seed) : generate(instance, seed), means});
  }
  return runs;
}

std::optional<std::uint64_t> sampling_seed(const RunOptions& options,
                                           const InstanceSpec& instance,
                                           std::uint64_t master_seed,
                                           std::size_t run, std::size_t learner,
                                           std::size_t window) {
  if (!options.sample_actions) return std::nullopt;
  return derive_seed(run_seed(master_seed, instance, run), {learner, window});
}

RegretTrace score(const Realization& realization,
                  std::span<const ActionDistribution> plays) {
  if (realization.means) return expected_regret_trace(*realization.means, plays);
  return per_round_regret(realization.rewards, plays);
}

}  // namespace

LearnerSpec bind_learner(LearnerSpec spec, const InstanceSpec& instance,
                         std::optional<std::size_t> window) {
  spec.horizon = instance.horizon;
  spec.actions = instance.actions;
  spec.range = instance_range(instance);
  if (window && is_windowed_kind(spec.kind)) spec.window = *window;
  return spec;
}

RegretTrace expected_regret_trace(const MeanTrace& trace,
                                  std::span<const ActionDistribution> plays) {
  if (plays.size() != trace.rounds()) {
    throw Error(ErrorCode::LengthMismatch,
                "expected " + std::to_string(trace.rounds()) + " plays, got " +
                    std::to_string(plays.size()));
  }
  return per_round_regret(trace.expected_rewards(), plays);
}

std::uint64_t run_seed(std::uint64_t master_seed, const InstanceSpec& instance,
                       std::size_t run) {
  return derive_seed(master_seed, {fnv1a(instance_id(instance)), run});
}

RunResult run_once(const InstanceSpec& instance, const LearnerSpec& learner,
                   std::uint64_t seed, std::optional<std::uint64_t> sample_seed) {
  RunResult out{instance, learner, seed, {}, {}, std::nullopt};
  std::optional<MeanTrace> means;
  RewardSequence rewards = [&] {
    if (has_mean_trace(instance)) {
      means = mean_trace(instance);
      return realize(*means, seed);
    }
    return generate(instance, seed);
  }();
  out.plays = play(learner, rewards, sample_seed);
  out.realized = per_round_regret(rewards, out.plays);
  if (means) out.expected = expected_regret_trace(*means, out.plays);
  return out;
}

std::vector<MeanBasedViolation> check_mean_based(
    std::span<const ActionDistribution> plays, const RewardSequence& seq,
    std::size_t window, double gamma, double horizon_scale,
    WindowConvention convention) {
  if (plays.size() != seq.rounds()) {
    throw Error(ErrorCode::LengthMismatch, "one play per round required");
  }
  const std::size_t d = seq.actions();
  const long T = static_cast<long>(seq.rounds());
  const long m = static_cast<long>(window);
  const double threshold = gamma * horizon_scale;

  // prefix[t][i] = sum_{s <= t} r_{s,i}, prefix[0] = 0
  std::vector<double> prefix(static_cast<std::size_t>(T + 1) * d, 0.0);
  for (long t = 1; t <= T; ++t) {
    for (std::size_t i = 0; i < d; ++i) {
      prefix[static_cast<std::size_t>(t) * d + i] =
          prefix[static_cast<std::size_t>(t - 1) * d + i] + seq.at(t, i);
    }
  }
  auto pre = [&](long t, std::size_t i) {
    t = std::clamp(t, 0L, T);
    return prefix[static_cast<std::size_t>(t) * d + i];
  };

  std::vector<MeanBasedViolation> out;
  std::vector<double> sums(d);
  for (long t = 1; t <= T; ++t) {
    const long hi = convention == WindowConvention::Exclusive ? t - 1 : t;
    const long lo = hi - m;  // window is (lo, hi]
    for (std::size_t i = 0; i < d; ++i) sums[i] = pre(hi, i) - pre(lo, i);
    const auto leader = static_cast<std::size_t>(
        std::max_element(sums.begin(), sums.end()) - sums.begin());
    const auto& x = plays[static_cast<std::size_t>(t - 1)];
    for (std::size_t j = 0; j < d; ++j) {
      const double gap = sums[leader] - sums[j];
      if (gap > threshold && x[j] >= gamma) {
        out.push_back({t, j, leader, gap, x[j]});
      }
    }
  }
  return out;
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();  // joins
  if (error) std::rethrow_exception(error);
}

AblationResult ablate_history(const InstanceSpec& instance,
                              const std::vector<NamedLearner>& learners,
                              std::span<const std::size_t> windows,
                              std::size_t n_runs, std::uint64_t master_seed,
                              const RunOptions& options) {
  validate(instance);
  if (n_runs == 0) throw Error(ErrorCode::ConstraintError, "n_runs must be >= 1");
  for (std::size_t m : windows) {
    if (m < 1 || m > instance.horizon) {
      throw Error(ErrorCode::ConstraintError,
                  "window " + std::to_string(m) + " outside [1, T]");
    }
  }
  const auto runs = realize_runs(instance, n_runs, master_seed);
  const std::size_t L = learners.size(), W = windows.size();

  // finals[(l * W + w) * n_runs + r]
  std::vector<double> finals(L * W * n_runs, 0.0);
  parallel_for(L * W * n_runs, options.threads, [&](std::size_t cell) {
    const std::size_t r = cell % n_runs;
    const std::size_t w = (cell / n_runs) % W;
    const std::size_t l = cell / (n_runs * W);
    const LearnerSpec spec = bind_learner(learners[l].spec, instance, windows[w]);
    const auto plays =
        play(spec, runs[r].rewards,
             sampling_seed(options, instance, master_seed, r, l, windows[w]));
    finals[cell] = score(runs[r], plays).final_per_round;
  });

  AblationResult out;
  out.windows.assign(windows.begin(), windows.end());
  out.runs_per_cell = n_runs;
  for (std::size_t l = 0; l < L; ++l) {
    out.learner_ids.push_back(learners[l].id);
    std::vector<double> row(W, 0.0);
    for (std::size_t w = 0; w < W; ++w) {
      double sum = 0.0;
      for (std::size_t r = 0; r < n_runs; ++r) sum += finals[(l * W + w) * n_runs + r];
      row[w] = sum / static_cast<double>(n_runs);
    }
    out.avg_final_regret.push_back(std::move(row));
  }
  return out;
}

HeatmapResult heatmap_matrix(const InstanceSpec& instance,
                             const NamedLearner& learner,
                             std::span<const std::size_t> windows,
                             std::span<const std::size_t> times,
                             std::size_t n_runs, std::uint64_t master_seed,
                             const RunOptions& options) {
  validate(instance);
  if (n_runs == 0) throw Error(ErrorCode::ConstraintError, "n_runs must be >= 1");
  for (std::size_t t : times) {
    if (t > instance.horizon) {
      throw Error(ErrorCode::ConstraintError,
                  "time " + std::to_string(t) + " beyond T");
    }
  }
  for (std::size_t m : windows) {
    if (m < 1 || m > instance.horizon) {
      throw Error(ErrorCode::ConstraintError,
                  "window " + std::to_string(m) + " outside [1, T]");
    }
  }
  const auto runs = realize_runs(instance, n_runs, master_seed);
  const std::size_t W = windows.size(), K = times.size();

  // cumulative[(w * n_runs + r)] holds the run's cumulative trace
  std::vector<std::vector<double>> cumulative(W * n_runs);
  parallel_for(W * n_runs, options.threads, [&](std::size_t cell) {
    const std::size_t r = cell % n_runs;
    const std::size_t w = cell / n_runs;
    const LearnerSpec spec = bind_learner(learner.spec, instance, windows[w]);
    const auto plays = play(spec, runs[r].rewards,
                            sampling_seed(options, instance, master_seed, r, 0, windows[w]));
    cumulative[cell] = score(runs[r], plays).cumulative;
  });

  HeatmapResult out;
  out.learner_id = learner.id;
  out.windows.assign(windows.begin(), windows.end());
  out.times.assign(times.begin(), times.end());
  out.values.assign(W, std::vector<double>(K, 0.0));
  for (std::size_t w = 0; w < W; ++w) {
    for (std::size_t k = 0; k < K; ++k) {
      if (times[k] == 0) continue;
      double sum = 0.0;
      for (std::size_t r = 0; r < n_runs; ++r) {
        sum += cumulative[w * n_runs + r][times[k] - 1];
      }
      out.values[w][k] = sum / static_cast<double>(n_runs);
    }
  }
  return out;
}

std::vector<std::size_t> default_window_grid(std::size_t horizon) {
  const double T = static_cast<double>(horizon);
  const double fractions[] = {1.0 / 100, 1.0 / 50, 1.0 / 20, 1.0 / 10, 1.0 / 5,
                              1.0 / 4,   1.0 / 3,  1.0 / 2,  3.0 / 4,  1.0};
  std::vector<std::size_t> grid;
  for (double f : fractions) {
    const auto m = static_cast<std::size_t>(std::llround(f * T));
    grid.push_back(std::clamp<std::size_t>(m, 1, horizon));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<std::size_t> default_time_grid(std::size_t horizon,
                                           std::size_t points) {
  points = std::max<std::size_t>(1, std::min(points, horizon));
  std::vector<std::size_t> grid;
  for (std::size_t k = 1; k <= points; ++k) {
    grid.push_back(static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * static_cast<double>(horizon) /
                     static_cast<double>(points))));
  }
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace histlearn
