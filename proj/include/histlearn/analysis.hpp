#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "histlearn/core.hpp"
#include "histlearn/instances.hpp"
#include "histlearn/learners.hpp"

namespace histlearn {

/// A learner template plus the label it is reported under.
struct NamedLearner {
  std::string id;
  LearnerSpec spec;
};

/// Copy of `spec` with horizon, width and range taken from the instance, and
/// the window replaced by `window` when given (windowed kinds only).
LearnerSpec bind_learner(LearnerSpec spec, const InstanceSpec& instance,
                         std::optional<std::size_t> window = std::nullopt);

struct RunOptions {
  std::size_t threads = 1;
  bool sample_actions = false;  // score sampled actions instead of x_t
};

struct RunResult {
  InstanceSpec instance;
  LearnerSpec learner;
  std::uint64_t seed = 0;
  std::vector<ActionDistribution> plays;
  RegretTrace realized;
  std::optional<RegretTrace> expected;  // coin settings only

  /// Expected trace when present; for fixed sequences the realized rewards
  /// are their own expectation.
  const RegretTrace& pseudo() const { return expected ? *expected : realized; }
};

/// Pseudo-regret: the per-round regret computed on the expected rewards 2p - 1,
/// with the comparator chosen by total expected reward.
RegretTrace expected_regret_trace(const MeanTrace& trace,
                                  std::span<const ActionDistribution> plays);

/// Seed for run `run` of an instance: derived from the master seed, a stable
/// hash of the instance id and the run index.
std::uint64_t run_seed(std::uint64_t master_seed, const InstanceSpec& instance,
                       std::size_t run);

/// Realizes the instance from `seed`, runs the (already bound) learner, and
/// scores both regret variants.
RunResult run_once(const InstanceSpec& instance, const LearnerSpec& learner,
                   std::uint64_t seed,
                   std::optional<std::uint64_t> sample_seed = std::nullopt);

struct MeanBasedViolation {
  long t;                // round
  std::size_t trailing;  // arm j holding too much mass
  std::size_t leading;   // arm i ahead by more than gamma * scale
  double gap;            // R_{t,i} - R_{t,j}
  double mass;           // x_{t,j}
};

/// Every (t, j) where some arm leads j by more than gamma * horizon_scale
/// over the length-`window` prefix window of round t while x_{t,j} >= gamma.
/// An empty result certifies the run is gamma-mean-based.
std::vector<MeanBasedViolation> check_mean_based(
    std::span<const ActionDistribution> plays, const RewardSequence& seq,
    std::size_t window, double gamma, double horizon_scale,
    WindowConvention convention = WindowConvention::Exclusive);

struct AblationResult {
  std::vector<std::size_t> windows;
  std::vector<std::string> learner_ids;
  // avg_final_regret[learner][window]: mean final per-round pseudo-regret.
  std::vector<std::vector<double>> avg_final_regret;
  std::size_t runs_per_cell = 0;
};

AblationResult ablate_history(const InstanceSpec& instance,
                              const std::vector<NamedLearner>& learners,
                              std::span<const std::size_t> windows,
                              std::size_t n_runs, std::uint64_t master_seed,
                              const RunOptions& options = {});

struct HeatmapResult {
  std::string learner_id;
  std::vector<std::size_t> windows;
  std::vector<std::size_t> times;
  // values[window][time]: mean cumulative pseudo-regret after `time` rounds.
  std::vector<std::vector<double>> values;
};

HeatmapResult heatmap_matrix(const InstanceSpec& instance,
                             const NamedLearner& learner,
                             std::span<const std::size_t> windows,
                             std::span<const std::size_t> times,
                             std::size_t n_runs, std::uint64_t master_seed,
                             const RunOptions& options = {});

/// {T/100, T/50, T/20, T/10, T/5, T/4, T/3, T/2, 3T/4, T}, rounded, clamped
/// to >= 1, duplicates removed.
std::vector<std::size_t> default_window_grid(std::size_t horizon);

/// `points` evenly spaced rounds ending at T.
std::vector<std::size_t> default_time_grid(std::size_t horizon,
                                           std::size_t points = 50);

/// Calls fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace histlearn
