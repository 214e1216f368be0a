#include "histlearn/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace histlearn {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeMass: return "NegativeMass";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonPositiveMultiplier: return "NonPositiveMultiplier";
    case ErrorCode::RangeMismatch: return "RangeMismatch";
    case ErrorCode::WrongVariant: return "WrongVariant";
    case ErrorCode::BadModulus: return "BadModulus";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::WrongDimension: return "WrongDimension";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ConstraintError: return "ConstraintError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code) {}

double range_min(RewardRange range) {
  return range == RewardRange::ZeroOne ? 0.0 : -1.0;
}

double range_max(RewardRange) { return 1.0; }

const char* to_string(RewardRange range) {
  return range == RewardRange::ZeroOne ? "zero_one" : "plus_minus_one";
}

RewardRange parse_range(const std::string& text) {
  if (text == "zero_one") return RewardRange::ZeroOne;
  if (text == "plus_minus_one") return RewardRange::PlusMinusOne;
  throw Error(ErrorCode::SchemaError, "unknown reward range '" + text + "'");
}

void validate_distribution(std::span<const double> probs) {
  if (probs.empty()) {
    throw Error(ErrorCode::NotNormalized, "distribution over zero actions");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= -kNonNegativeSlack)) {
      std::ostringstream os;
      os << "entry " << i << " = " << probs[i];
      throw Error(ErrorCode::NegativeMass, os.str());
    }
    sum += probs[i];
  }
  if (!(std::abs(sum - 1.0) <= kProbTolerance)) {
    std::ostringstream os;
    os << "entries sum to " << sum;
    throw Error(ErrorCode::NotNormalized, os.str());
  }
}

ActionDistribution::ActionDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  validate_distribution(probs_);
  for (double& p : probs_) p = std::max(p, 0.0);
}

ActionDistribution ActionDistribution::uniform(std::size_t d) {
  return ActionDistribution(std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

ActionDistribution ActionDistribution::point_mass(std::size_t d,
                                                  std::size_t arm) {
  std::vector<double> p(d, 0.0);
  p.at(arm) = 1.0;
  return ActionDistribution(std::move(p));
}

double ActionDistribution::dot(std::span<const double> rewards) const {
  if (rewards.size() != probs_.size()) {
    throw Error(ErrorCode::LengthMismatch, "reward width differs from play");
  }
  return std::inner_product(probs_.begin(), probs_.end(), rewards.begin(), 0.0);
}

RewardSequence::RewardSequence(std::size_t rounds, std::size_t actions,
                               RewardRange range)
    : RewardSequence(rounds, actions, range,
                     std::vector<double>(rounds * actions, 0.0)) {}

RewardSequence::RewardSequence(std::size_t rounds, std::size_t actions,
                               RewardRange range, std::vector<double> data)
    : rounds_(rounds),
      actions_(actions),
      range_(range),
      data_(std::move(data)),
      zeros_(actions, 0.0) {
  if (actions_ == 0) {
    throw Error(ErrorCode::WrongDimension, "reward sequence needs d >= 1");
  }
  if (data_.size() != rounds_ * actions_) {
    throw Error(ErrorCode::LengthMismatch, "data size is not T*d");
  }
  const double lo = range_min(range_), hi = range_max(range_);
  for (double v : data_) {
    if (!(v >= lo && v <= hi)) {
      std::ostringstream os;
      os << "reward " << v << " outside " << to_string(range_);
      throw Error(ErrorCode::RangeMismatch, os.str());
    }
  }
}

RewardSequence RewardSequence::from_rows(const std::vector<RewardVector>& rows,
                                         RewardRange range) {
  if (rows.empty()) {
    throw Error(ErrorCode::EmptySequence, "no rows");
  }
  const std::size_t d = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) {
      throw Error(ErrorCode::LengthMismatch, "ragged reward rows");
    }
    data.insert(data.end(), r.begin(), r.end());
  }
  return RewardSequence(rows.size(), d, range, std::move(data));
}

std::span<const double> RewardSequence::row(long t) const {
  if (t < 1 || t > static_cast<long>(rounds_)) return zeros_;
  return std::span<const double>(data_).subspan(
      static_cast<std::size_t>(t - 1) * actions_, actions_);
}

double RewardSequence::at(long t, std::size_t arm) const {
  return row(t)[arm];
}

void RewardSequence::set(long t, std::size_t arm, double value) {
  if (t < 1 || t > static_cast<long>(rounds_) || arm >= actions_) {
    throw Error(ErrorCode::LengthMismatch, "set() outside the sequence");
  }
  if (!(value >= range_min(range_) && value <= range_max(range_))) {
    throw Error(ErrorCode::RangeMismatch, "value outside declared range");
  }
  data_[static_cast<std::size_t>(t - 1) * actions_ + arm] = value;
}

std::vector<double> RewardSequence::column_totals() const {
  std::vector<double> totals(actions_, 0.0);
  for (std::size_t t = 0; t < rounds_; ++t) {
    for (std::size_t i = 0; i < actions_; ++i) {
      totals[i] += data_[t * actions_ + i];
    }
  }
  return totals;
}

BestAction best_action_in_hindsight(const RewardSequence& seq) {
  if (seq.rounds() == 0) {
    throw Error(ErrorCode::EmptySequence, "no rounds to compare");
  }
  const auto totals = seq.column_totals();
  // max_element returns the first maximum, i.e. the lowest index on ties.
  const auto it = std::max_element(totals.begin(), totals.end());
  return {static_cast<std::size_t>(it - totals.begin()), *it};
}

RegretTrace per_round_regret(const RewardSequence& seq,
                             std::span<const ActionDistribution> plays) {
  if (plays.size() != seq.rounds()) {
    throw Error(ErrorCode::LengthMismatch,
                "expected " + std::to_string(seq.rounds()) + " plays, got " +
                    std::to_string(plays.size()));
  }
  const auto best = best_action_in_hindsight(seq);
  RegretTrace trace;
  const std::size_t T = seq.rounds();
  trace.per_round.resize(T);
  trace.cumulative.resize(T);
  double running = 0.0;
  for (std::size_t s = 0; s < T; ++s) {
    const long t = static_cast<long>(s) + 1;
    if (plays[s].size() != seq.actions()) {
      throw Error(ErrorCode::LengthMismatch, "play width differs from d");
    }
    const double inst = seq.at(t, best.arm) - plays[s].dot(seq.row(t));
    trace.per_round[s] = inst;
    running += inst;
    trace.cumulative[s] = running;
  }
  trace.final_per_round = running / static_cast<double>(T);
  return trace;
}

}  // namespace histlearn
