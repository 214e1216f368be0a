#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "histlearn/core.hpp"

namespace histlearn {

// Coin settings: arm i pays +1 with probability p[t,i], else -1.
struct Stochastic {};
struct Periodic {
  double phi;
};
struct PairedPeriodic {
  double phi1;
  double phi2;
};
struct RandomWalk {
  double sigma;
  std::uint64_t seed;
};
// Deterministic settings on [0, 1].
struct AdversarialBlock {
  std::size_t window;  // M
};
struct ConcatAdversarial {
  std::size_t window;  // M; the horizon comes from InstanceSpec
};
struct LowerBound {
  std::size_t window;  // M
  std::uint64_t seed;
};

using InstanceVariant =
    std::variant<Stochastic, Periodic, PairedPeriodic, RandomWalk,
                 AdversarialBlock, ConcatAdversarial, LowerBound>;

struct InstanceSpec {
  InstanceVariant variant;
  std::size_t horizon = 1000;  // T
  std::size_t actions = 2;     // d
};

/// Throws ConstraintError (BadModulus for AdversarialBlock with 3 not
/// dividing M) when the parameters are out of bounds.
void validate(const InstanceSpec& spec);

/// Coin settings have a mean trace; the adversarial ones do not.
bool has_mean_trace(const InstanceSpec& spec);
RewardRange instance_range(const InstanceSpec& spec);
std::string instance_id(const InstanceSpec& spec);

/// Heads probabilities, T x d, row-major, rounds 1-indexed in accessors.
class MeanTrace {
 public:
  MeanTrace(std::size_t rounds, std::size_t actions);

  std::size_t rounds() const { return rounds_; }
  std::size_t actions() const { return actions_; }
  double p(long t, std::size_t arm) const;
  void set(long t, std::size_t arm, double p);
  /// Expected reward 2p - 1 of a +/-1 coin.
  double mean_reward(long t, std::size_t arm) const { return 2.0 * p(t, arm) - 1.0; }
  /// T x d sequence of expected rewards (range PlusMinusOne).
  RewardSequence expected_rewards() const;

 private:
  std::size_t rounds_;
  std::size_t actions_;
  std::vector<double> probs_;
};

/// Periodic heads probability |sin(pi/6 + t pi / phi)| at 0-based time t.
/// The phase is reduced modulo phi first, so integer periods are exact.
double periodic_probability(double t0, double phi);

/// One capped random-walk step: clamp(p + z, 0, 1).
double random_walk_step(double p, double z);

/// Throws WrongVariant for the adversarial settings.
MeanTrace mean_trace(const InstanceSpec& spec);

/// One independent +/-1 coin per (t, i), keyed by (seed, t, i).
RewardSequence realize(const MeanTrace& trace, std::uint64_t seed);

/// Rows (1,0) for t in [1,M], (0,1) for (M, 5M/3], (1,0) for (5M/3, 2M],
/// (0,0) for (2M, 3M]. T = 3M. Throws BadModulus unless 3 divides M.
RewardSequence adversarial_block(std::size_t window);

/// floor(T/3M) copies of adversarial_block(M) then zero rows up to T.
/// Throws HorizonTooShort when T < 3M.
RewardSequence concat_adversarial(std::size_t window, std::size_t horizon);

/// Alternating length-M segments: one hard segment of i.i.d. uniform {0,1}
/// rewards drawn from `seed`, then M zero rows; the same hard segment is
/// repeated in every period, truncated at T.
RewardSequence lower_bound_instance(std::size_t window, std::size_t actions,
                                    std::size_t horizon, std::uint64_t seed);

/// Realized reward sequence for any instance. `seed` drives the coin flips
/// of the stochastic settings and is ignored by the deterministic ones.
RewardSequence generate(const InstanceSpec& spec, std::uint64_t seed);

enum class WindowConvention {
  Exclusive,  // s in [t-M, t-1]: what the learner has seen before playing t
  Inclusive,  // s in [t-M+1, t]: one round later
};

struct DeltaTrace {
  std::size_t window = 0;
  std::vector<double> delta;  // delta[t-1] for round t

  double at(long t) const { return delta.at(static_cast<std::size_t>(t - 1)); }
};

/// Windowed gap sum_{s in window(t)} (r_{s,1} - r_{s,2}), zero-padded.
/// Throws WrongDimension unless d = 2.
DeltaTrace delta_trace(const RewardSequence& seq, std::size_t window,
                       WindowConvention convention = WindowConvention::Exclusive);

struct Partition {
  std::vector<long> positive;  // delta >= threshold
  std::vector<long> negative;  // delta <= -threshold
  std::vector<long> zero;      // the rest
};

/// With threshold 0 a round with delta exactly 0 lands in `zero`.
Partition pnz_partition(const DeltaTrace& trace, double threshold);

// CSV exchange: "# range=<zero_one|plus_minus_one>", then "t,arm1,...,armd",
// then one row per round.
void write_reward_csv(std::ostream& out, const RewardSequence& seq);
RewardSequence read_reward_csv(std::istream& in);

}  // namespace histlearn
