#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace histlearn {

// Absolute tolerance for probability and regret identities.
inline constexpr double kProbTolerance = 1e-9;
// Slack allowed below zero before an entry counts as negative mass.
inline constexpr double kNonNegativeSlack = 1e-12;

enum class ErrorCode {
  NegativeMass,
  NotNormalized,
  EmptySequence,
  LengthMismatch,
  NonPositiveMultiplier,
  RangeMismatch,
  WrongVariant,
  BadModulus,
  HorizonTooShort,
  WrongDimension,
  SchemaError,
  ConstraintError,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class RewardRange { ZeroOne, PlusMinusOne };

double range_min(RewardRange range);
double range_max(RewardRange range);
inline double range_width(RewardRange range) {
  return range_max(range) - range_min(range);
}
const char* to_string(RewardRange range);
RewardRange parse_range(const std::string& text);

using RewardVector = std::vector<double>;

/// Throws NegativeMass or NotNormalized when `probs` is not a point on the
/// simplex. An empty vector is reported as NotNormalized.
void validate_distribution(std::span<const double> probs);

/// A point on the d-simplex: the learner's play for one round.
class ActionDistribution {
 public:
  /// Validates. Entries in [-1e-12, 0) are clamped to zero.
  explicit ActionDistribution(std::vector<double> probs);

  static ActionDistribution uniform(std::size_t d);
  static ActionDistribution point_mass(std::size_t d, std::size_t arm);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }

  /// <x, r>
  double dot(std::span<const double> rewards) const;

 private:
  std::vector<double> probs_;
};

/// T x d matrix of realized rewards. Rounds are 1-indexed in the public
/// accessors; storage is row-major and 0-indexed (round t lives at row t-1).
class RewardSequence {
 public:
  RewardSequence(std::size_t rounds, std::size_t actions, RewardRange range);
  /// `data` is row-major, rounds x actions. Throws RangeMismatch on entries
  /// outside the declared range and LengthMismatch on a bad size.
  RewardSequence(std::size_t rounds, std::size_t actions, RewardRange range,
                 std::vector<double> data);
  static RewardSequence from_rows(const std::vector<RewardVector>& rows,
                                  RewardRange range);

  std::size_t rounds() const { return rounds_; }
  std::size_t actions() const { return actions_; }
  RewardRange range() const { return range_; }

  /// Round t's reward vector; the zero vector when t < 1 or t > T.
  std::span<const double> row(long t) const;
  double at(long t, std::size_t arm) const;
  void set(long t, std::size_t arm, double value);

  std::vector<double> column_totals() const;
  std::span<const double> data() const { return data_; }

  bool operator==(const RewardSequence& other) const = default;

 private:
  std::size_t rounds_;
  std::size_t actions_;
  RewardRange range_;
  std::vector<double> data_;
  std::vector<double> zeros_;
};

struct BestAction {
  std::size_t arm;  // 0-based
  double total;
};

/// Arm with the largest column sum; ties go to the lowest index.
BestAction best_action_in_hindsight(const RewardSequence& seq);

struct RegretTrace {
  std::vector<double> per_round;   // r_{t,i*} - <x_t, r_t>
  std::vector<double> cumulative;  // prefix sums of per_round
  double final_per_round = 0.0;    // cumulative[T-1] / T

  double total() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

/// Regret against the hindsight-best fixed arm over the whole horizon. The
/// comparator is fixed for every prefix, so cumulative regret can go negative.
RegretTrace per_round_regret(const RewardSequence& seq,
                             std::span<const ActionDistribution> plays);

}  // namespace histlearn
