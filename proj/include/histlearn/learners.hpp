#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "histlearn/core.hpp"
#include "histlearn/reward_window.hpp"

namespace histlearn {

enum class LearnerKind {
  Hedge,
  MWFixed,
  FTL,
  HistMW,
  PeriodicRestart,
  AverageRestart,
  AverageRestartFullHorizon,
};

/// Canonical CSV ids: mw, ftl, hedge, hist_mw, periodic_restart,
/// average_restart, full_horizon.
const char* canonical_id(LearnerKind kind);
std::optional<LearnerKind> parse_learner_kind(std::string_view id);

bool is_base_kind(LearnerKind kind);      // Hedge, MWFixed, FTL
bool is_wrapper_kind(LearnerKind kind);   // the three restart wrappers
bool is_windowed_kind(LearnerKind kind);  // uses the window length M
bool uses_mw_update(LearnerKind kind);    // MWFixed, HistMW

// Learning rate used by the simulation study for every MW-style learner.
inline constexpr double kDefaultMwEta = 0.5;

/// Horizon-tuned Hedge rate sqrt(8 ln d / L).
double hedge_tuned_eta(std::size_t actions, std::size_t horizon);

/// Learner run by a restart wrapper. An unset eta means the kind's default:
/// tuned to the sub-run horizon for Hedge, 0.5 for MW.
struct BaseSpec {
  LearnerKind kind = LearnerKind::MWFixed;
  std::optional<double> eta;
};

struct LearnerSpec {
  LearnerKind kind = LearnerKind::MWFixed;
  std::optional<double> eta;
  std::size_t window = 0;   // M, windowed kinds only
  std::size_t horizon = 0;  // T
  std::size_t actions = 2;  // d
  RewardRange range = RewardRange::ZeroOne;
  std::optional<BaseSpec> base;  // wrapper kinds; unset means MW(0.5)
};

/// Throws ConstraintError on a spec that cannot be run.
void validate(const LearnerSpec& spec);

/// A base learner with its rate resolved.
struct BaseLearner {
  LearnerKind kind;
  double eta;
};

/// The base learner a spec runs, with eta resolved. For base kinds this is the
/// spec itself (horizon T); for HistMW it is MW; for wrappers the sub-run
/// horizon is M (T for the full-horizon variant).
BaseLearner resolve_base(const LearnerSpec& spec);

// ---------------------------------------------------------------------------
// Stateless building blocks

/// probs[i] proportional to exp(eta * cum_rewards[i]), max-subtracted.
ActionDistribution hedge_act(std::span<const double> cum_rewards, double eta);

/// probs[i] proportional to exp(log_weights[i]), max-subtracted.
ActionDistribution normalize_log_weights(std::span<const double> log_weights);

/// Point mass on the argmax (lowest index on ties); uniform when every entry
/// is zero (no evidence yet).
ActionDistribution ftl_act(std::span<const double> cum_rewards);

/// w * (1 + eta r). Throws NonPositiveMultiplier if any 1 + eta r_i <= 0.
std::vector<double> mw_update(std::span<const double> weights,
                              std::span<const double> reward, double eta);

/// w * (1 + eta r_new) / (1 + eta r_old), the sliding-window MW step.
std::vector<double> mw_windowed_update(std::span<const double> weights,
                                       std::span<const double> reward_new,
                                       std::span<const double> reward_old,
                                       double eta);

/// log(1 + eta r) elementwise. Throws NonPositiveMultiplier.
std::vector<double> mw_log_multiplier(std::span<const double> reward, double eta);

/// Base learner state. All base learners keep an additive score: cumulative
/// reward for Hedge/FTL and cumulative log-multiplier for MW. Feeding a zero
/// reward leaves the score unchanged, so zero-padded history equals a fresh
/// state.
struct BaseState {
  std::vector<double> score;
};

BaseState fresh_base(std::size_t actions);
void base_observe(const BaseLearner& base, BaseState& state,
                  std::span<const double> reward);
ActionDistribution base_act(const BaseLearner& base, const BaseState& state);

/// Round-t play of PeriodicRestart from the raw sequence: the base learner
/// replayed on r_{s+1}, ..., r_{t-1} with s = floor((t-1)/M) * M.
ActionDistribution periodic_restart_act(long t, const RewardSequence& seq,
                                        std::size_t window,
                                        const BaseLearner& base);

/// Round-t play of AverageRestart from the raw sequence: mean over
/// m = 1..M of the base learner run on r_{t-m}, ..., r_{t-1}, zero-padded.
ActionDistribution average_restart_act(long t, const RewardSequence& seq,
                                       std::size_t window,
                                       const BaseLearner& base);

/// Round-t play of AverageRestartFullHorizon: mean over tau = 1..T of the
/// base learner run on r_{t-tau}, ..., r_{t-1}, zero-padded.
ActionDistribution average_restart_full_act(long t, const RewardSequence& seq,
                                            std::size_t horizon,
                                            const BaseLearner& base);

// ---------------------------------------------------------------------------
// Stateful learners

/// Explicit state of one learner run. A state at round t has observed
/// r_1..r_{t-1}; act() gives x_t and observe(r_t) moves it to round t+1.
class LearnerState {
 public:
  explicit LearnerState(LearnerSpec spec);

  const LearnerSpec& spec() const { return spec_; }
  const BaseLearner& base() const { return base_; }
  double eta() const { return base_.eta; }
  /// Next round to be played (starts at 1).
  std::size_t round() const { return round_; }

  ActionDistribution act() const;

  /// Full-information update with round t's reward vector. Throws
  /// LengthMismatch on width and RangeMismatch outside the declared range.
  void observe(std::span<const double> reward);

  /// Hedge/FTL cumulative reward; MW log-weights. WrongVariant otherwise.
  std::span<const double> score() const;
  /// MWFixed/HistMW weights exp(log w). WrongVariant otherwise.
  std::vector<double> weights() const;
  /// HistMW ring buffer fill.
  std::size_t window_fill() const;
  /// Live (non-fresh) sub-states held by the AverageRestart kinds; the
  /// remaining slots up to M (or T) are fresh and play the base prior.
  std::size_t bank_size() const;
  /// Rounds since the last PeriodicRestart reset.
  std::size_t block_position() const;

 private:
  struct Accumulator {
    BaseState state;
  };
  struct Windowed {
    std::vector<double> log_weights;
    RewardWindow window;
  };
  struct Periodic {
    BaseState state;
    std::size_t in_block = 0;
  };
  struct Bank {
    std::deque<BaseState> live;  // front = oldest start
  };
  struct FullBank {
    std::vector<BaseState> started;  // one per start round, oldest first
  };

  LearnerSpec spec_;
  BaseLearner base_;
  std::size_t round_ = 1;
  std::variant<Accumulator, Windowed, Periodic, Bank, FullBank> data_;
};

/// Functional form of observe(): consumes the state, returns the next one.
LearnerState step(LearnerState state, std::span<const double> reward);

/// Runs a learner over the whole sequence and returns x_1..x_T. With a
/// sample seed, each round's play is replaced by a point mass on an action
/// drawn from x_t; the state still sees the full reward vector.
std::vector<ActionDistribution> play(
    const LearnerSpec& spec, const RewardSequence& seq,
    std::optional<std::uint64_t> sample_seed = std::nullopt);

/// Index drawn from `x` using a uniform variate in [0, 1).
std::size_t sample_action(const ActionDistribution& x, double uniform);

}  // namespace histlearn
