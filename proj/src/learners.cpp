#include "histlearn/learners.hpp"

#include "histlearn/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace histlearn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

ActionDistribution softmax(std::span<const double> logits) {
  if (logits.empty()) {
    throw Error(ErrorCode::WrongDimension, "softmax over zero actions");
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return ActionDistribution(std::move(p));
}

void add_scaled(std::vector<double>& acc, std::span<const double> v,
                double scale) {
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += scale * v[i];
}

double default_rate(LearnerKind kind, std::size_t actions,
                    std::size_t horizon) {
  switch (kind) {
    case LearnerKind::Hedge: return hedge_tuned_eta(actions, horizon);
    case LearnerKind::FTL: return 1.0;  // unused
    default: return kDefaultMwEta;
  }
}

std::size_t sub_horizon(const LearnerSpec& spec) {
  switch (spec.kind) {
    case LearnerKind::PeriodicRestart:
    case LearnerKind::AverageRestart: return spec.window;
    default: return spec.horizon;
  }
}

}  // namespace

const char* canonical_id(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Hedge: return "hedge";
    case LearnerKind::MWFixed: return "mw";
    case LearnerKind::FTL: return "ftl";
    case LearnerKind::HistMW: return "hist_mw";
    case LearnerKind::PeriodicRestart: return "periodic_restart";
    case LearnerKind::AverageRestart: return "average_restart";
    case LearnerKind::AverageRestartFullHorizon: return "full_horizon";
  }
  return "unknown";
}

std::optional<LearnerKind> parse_learner_kind(std::string_view id) {
  for (auto kind : {LearnerKind::Hedge, LearnerKind::MWFixed, LearnerKind::FTL,
                    LearnerKind::HistMW, LearnerKind::PeriodicRestart,
                    LearnerKind::AverageRestart,
                    LearnerKind::AverageRestartFullHorizon}) {
    if (id == canonical_id(kind)) return kind;
  }
  return std::nullopt;
}

bool is_base_kind(LearnerKind kind) {
  return kind == LearnerKind::Hedge || kind == LearnerKind::MWFixed ||
         kind == LearnerKind::FTL;
}

bool is_wrapper_kind(LearnerKind kind) {
  return kind == LearnerKind::PeriodicRestart ||
         kind == LearnerKind::AverageRestart ||
         kind == LearnerKind::AverageRestartFullHorizon;
}

bool is_windowed_kind(LearnerKind kind) {
  return kind == LearnerKind::HistMW || kind == LearnerKind::PeriodicRestart ||
         kind == LearnerKind::AverageRestart;
}

bool uses_mw_update(LearnerKind kind) {
  return kind == LearnerKind::MWFixed || kind == LearnerKind::HistMW;
}

double hedge_tuned_eta(std::size_t actions, std::size_t horizon) {
  if (actions < 2 || horizon == 0) return 1.0;  // any rate plays the same
  return std::sqrt(8.0 * std::log(static_cast<double>(actions)) /
                   static_cast<double>(horizon));
}

BaseLearner resolve_base(const LearnerSpec& spec) {
  if (is_base_kind(spec.kind)) {
    return {spec.kind, spec.eta.value_or(
                           default_rate(spec.kind, spec.actions, spec.horizon))};
  }
  if (spec.kind == LearnerKind::HistMW) {
    return {LearnerKind::MWFixed, spec.eta.value_or(kDefaultMwEta)};
  }
  const BaseSpec base = spec.base.value_or(BaseSpec{});
  const auto eta = base.eta ? base.eta : spec.eta;
  return {base.kind, eta.value_or(default_rate(base.kind, spec.actions,
                                               sub_horizon(spec)))};
}

void validate(const LearnerSpec& spec) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::ConstraintError,
                std::string(canonical_id(spec.kind)) + ": " + why);
  };
  if (spec.actions == 0) fail("need at least one action");
  if (spec.horizon == 0) fail("horizon T must be >= 1");
  if (is_windowed_kind(spec.kind) &&
      (spec.window < 1 || spec.window > spec.horizon)) {
    fail("window M must satisfy 1 <= M <= T (got M=" +
         std::to_string(spec.window) + ", T=" + std::to_string(spec.horizon) +
         ")");
  }
  if (spec.base && !is_base_kind(spec.base->kind)) {
    fail("base learner must be hedge, mw or ftl");
  }
  if (spec.base && !is_wrapper_kind(spec.kind)) {
    fail("only restart wrappers take a base learner");
  }
  const BaseLearner base = resolve_base(spec);
  if (!(base.eta > 0.0) || !std::isfinite(base.eta)) fail("eta must be > 0");
  if (base.kind == LearnerKind::MWFixed &&
      !(1.0 + base.eta * range_min(spec.range) > 0.0)) {
    std::ostringstream os;
    os << "eta=" << base.eta << " makes 1 + eta*r non-positive on "
       << to_string(spec.range);
    fail(os.str());
  }
}

ActionDistribution hedge_act(std::span<const double> cum_rewards, double eta) {
  std::vector<double> logits(cum_rewards.begin(), cum_rewards.end());
  for (double& v : logits) v *= eta;
  return softmax(logits);
}

ActionDistribution normalize_log_weights(std::span<const double> log_weights) {
  return softmax(log_weights);
}

ActionDistribution ftl_act(std::span<const double> cum_rewards) {
  const std::size_t d = cum_rewards.size();
  if (std::all_of(cum_rewards.begin(), cum_rewards.end(),
                  [](double v) { return v == 0.0; })) {
    return ActionDistribution::uniform(d);
  }
  const auto it = std::max_element(cum_rewards.begin(), cum_rewards.end());
  return ActionDistribution::point_mass(
      d, static_cast<std::size_t>(it - cum_rewards.begin()));
}

std::vector<double> mw_log_multiplier(std::span<const double> reward,
                                      double eta) {
  std::vector<double> out(reward.size());
  for (std::size_t i = 0; i < reward.size(); ++i) {
    const double m = 1.0 + eta * reward[i];
    if (!(m > 0.0)) {
      std::ostringstream os;
      os << "1 + " << eta << " * " << reward[i] << " = " << m;
      throw Error(ErrorCode::NonPositiveMultiplier, os.str());
    }
    out[i] = std::log1p(eta * reward[i]);
  }
  return out;
}

std::vector<double> mw_update(std::span<const double> weights,
                              std::span<const double> reward, double eta) {
  if (weights.size() != reward.size()) {
    throw Error(ErrorCode::LengthMismatch, "weights vs reward width");
  }
  std::vector<double> out(weights.begin(), weights.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double m = 1.0 + eta * reward[i];
    if (!(m > 0.0)) {
      throw Error(ErrorCode::NonPositiveMultiplier,
                  "multiplier for arm " + std::to_string(i) + " is <= 0");
    }
    out[i] *= m;
  }
  return out;
}

std::vector<double> mw_windowed_update(std::span<const double> weights,
                                       std::span<const double> reward_new,
                                       std::span<const double> reward_old,
                                       double eta) {
  if (weights.size() != reward_new.size() ||
      weights.size() != reward_old.size()) {
    throw Error(ErrorCode::LengthMismatch, "weights vs reward width");
  }
  std::vector<double> out(weights.begin(), weights.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double up = 1.0 + eta * reward_new[i];
    const double down = 1.0 + eta * reward_old[i];
    if (!(up > 0.0) || !(down > 0.0)) {
      throw Error(ErrorCode::NonPositiveMultiplier,
                  "multiplier for arm " + std::to_string(i) + " is <= 0");
    }
    out[i] *= up / down;
  }
  return out;
}

BaseState fresh_base(std::size_t actions) {
  return BaseState{std::vector<double>(actions, 0.0)};
}

void base_observe(const BaseLearner& base, BaseState& state,
                  std::span<const double> reward) {
  if (reward.size() != state.score.size()) {
    throw Error(ErrorCode::LengthMismatch, "reward width differs from d");
  }
  if (base.kind == LearnerKind::MWFixed) {
    const auto lm = mw_log_multiplier(reward, base.eta);
    add_scaled(state.score, lm, 1.0);
  } else {
    add_scaled(state.score, reward, 1.0);
  }
}

ActionDistribution base_act(const BaseLearner& base, const BaseState& state) {
  switch (base.kind) {
    case LearnerKind::Hedge: return hedge_act(state.score, base.eta);
    case LearnerKind::MWFixed: return normalize_log_weights(state.score);
    case LearnerKind::FTL: return ftl_act(state.score);
    default:
      throw Error(ErrorCode::WrongVariant,
                  std::string(canonical_id(base.kind)) + " is not a base learner");
  }
}

ActionDistribution periodic_restart_act(long t, const RewardSequence& seq,
                                        std::size_t window,
                                        const BaseLearner& base) {
  if (t < 1 || window == 0) {
    throw Error(ErrorCode::ConstraintError, "need t >= 1 and M >= 1");
  }
  const long m = static_cast<long>(window);
  const long block_start = ((t - 1) / m) * m;
  BaseState state = fresh_base(seq.actions());
  for (long s = block_start + 1; s <= t - 1; ++s) {
    base_observe(base, state, seq.row(s));
  }
  return base_act(base, state);
}

namespace {

// Mean over k = 1..count of the base learner on r_{t-k}, ..., r_{t-1}.
// Base scores are additive, so the windows are built newest-first.
ActionDistribution suffix_mixture(long t, const RewardSequence& seq,
                                  std::size_t count, const BaseLearner& base) {
  const std::size_t d = seq.actions();
  BaseState state = fresh_base(d);
  std::vector<double> sum(d, 0.0);
  for (std::size_t k = 1; k <= count; ++k) {
    base_observe(base, state, seq.row(t - static_cast<long>(k)));
    add_scaled(sum, base_act(base, state).probs(), 1.0);
  }
  for (double& v : sum) v /= static_cast<double>(count);
  return ActionDistribution(std::move(sum));
}

}  // namespace

ActionDistribution average_restart_act(long t, const RewardSequence& seq,
                                       std::size_t window,
                                       const BaseLearner& base) {
  if (t < 1 || window == 0) {
    throw Error(ErrorCode::ConstraintError, "need t >= 1 and M >= 1");
  }
  return suffix_mixture(t, seq, window, base);
}

ActionDistribution average_restart_full_act(long t, const RewardSequence& seq,
                                            std::size_t horizon,
                                            const BaseLearner& base) {
  if (t < 1 || t > static_cast<long>(horizon)) {
    throw Error(ErrorCode::ConstraintError, "need 1 <= t <= T");
  }
  // Windows reaching back past round 1 all see r_1..r_{t-1} behind zero
  // padding, so they collapse onto the t-1 window with multiplicity T-t+1.
  const std::size_t d = seq.actions();
  const std::size_t real = static_cast<std::size_t>(t - 1);
  BaseState state = fresh_base(d);
  std::vector<double> sum(d, 0.0);
  for (std::size_t k = 1; k <= real; ++k) {
    base_observe(base, state, seq.row(t - static_cast<long>(k)));
    add_scaled(sum, base_act(base, state).probs(), 1.0);
  }
  add_scaled(sum, base_act(base, state).probs(),
             static_cast<double>(horizon - real));
  for (double& v : sum) v /= static_cast<double>(horizon);
  return ActionDistribution(std::move(sum));
}

LearnerState::LearnerState(LearnerSpec spec)
    : spec_(std::move(spec)),
      base_{LearnerKind::MWFixed, kDefaultMwEta},
      data_(Accumulator{}) {
  validate(spec_);
  base_ = resolve_base(spec_);
  const std::size_t d = spec_.actions;
  switch (spec_.kind) {
    case LearnerKind::Hedge:
    case LearnerKind::MWFixed:
    case LearnerKind::FTL: data_ = Accumulator{fresh_base(d)}; break;
    case LearnerKind::HistMW:
      data_ = Windowed{std::vector<double>(d, 0.0), RewardWindow(spec_.window, d)};
      break;
    case LearnerKind::PeriodicRestart: data_ = Periodic{fresh_base(d), 0}; break;
    case LearnerKind::AverageRestart: data_ = Bank{}; break;
    case LearnerKind::AverageRestartFullHorizon: data_ = FullBank{}; break;
  }
}

ActionDistribution LearnerState::act() const {
  const std::size_t d = spec_.actions;
  return std::visit(
      Overloaded{
          [&](const Accumulator& a) { return base_act(base_, a.state); },
          [&](const Windowed& w) { return normalize_log_weights(w.log_weights); },
          [&](const Periodic& p) { return base_act(base_, p.state); },
          [&](const Bank& b) {
            // Starts before round 1 see zero padding and then r_1..r_{t-1}.
            // Zero rewards leave a base score untouched, so every one of them
            // plays like the round-1 start, which is live.front() whenever
            // the bank is not yet full.
            const std::size_t m = spec_.window;
            std::vector<double> sum(d, 0.0);
            for (const auto& s : b.live) add_scaled(sum, base_act(base_, s).probs(), 1.0);
            const std::size_t padded = m - b.live.size();
            if (padded > 0) {
              const BaseState prehistory =
                  b.live.empty() ? fresh_base(d) : b.live.front();
              add_scaled(sum, base_act(base_, prehistory).probs(),
                         static_cast<double>(padded));
            }
            for (double& v : sum) v /= static_cast<double>(m);
            return ActionDistribution(std::move(sum));
          },
          [&](const FullBank& f) {
            const std::size_t horizon = spec_.horizon;
            std::vector<double> sum(d, 0.0);
            const BaseState root =
                f.started.empty() ? fresh_base(d) : f.started.front();
            add_scaled(sum, base_act(base_, root).probs(),
                       static_cast<double>(horizon - f.started.size()));
            for (const auto& s : f.started) {
              add_scaled(sum, base_act(base_, s).probs(), 1.0);
            }
            for (double& v : sum) v /= static_cast<double>(horizon);
            return ActionDistribution(std::move(sum));
          },
      },
      data_);
}

void LearnerState::observe(std::span<const double> reward) {
  const std::size_t d = spec_.actions;
  if (reward.size() != d) {
    throw Error(ErrorCode::LengthMismatch,
                "reward has " + std::to_string(reward.size()) +
                    " entries, learner has d=" + std::to_string(d));
  }
  const double lo = range_min(spec_.range), hi = range_max(spec_.range);
  for (double v : reward) {
    if (!(v >= lo && v <= hi)) {
      std::ostringstream os;
      os << "reward " << v << " outside " << to_string(spec_.range);
      throw Error(ErrorCode::RangeMismatch, os.str());
    }
  }
  std::visit(
      Overloaded{
          [&](Accumulator& a) { base_observe(base_, a.state, reward); },
          [&](Windowed& w) {
            const auto up = mw_log_multiplier(reward, base_.eta);
            const auto evicted = w.window.push(reward);
            add_scaled(w.log_weights, up, 1.0);
            if (!evicted.empty()) {
              add_scaled(w.log_weights, mw_log_multiplier(evicted, base_.eta), -1.0);
            }
          },
          [&](Periodic& p) {
            base_observe(base_, p.state, reward);
            if (++p.in_block == spec_.window) {
              p.state = fresh_base(d);
              p.in_block = 0;
            }
          },
          [&](Bank& b) {
            b.live.push_back(fresh_base(d));
            for (auto& s : b.live) base_observe(base_, s, reward);
            if (b.live.size() > spec_.window) b.live.pop_front();
          },
          [&](FullBank& f) {
            if (f.started.size() >= spec_.horizon) {
              throw Error(ErrorCode::HorizonTooShort,
                          "full-horizon learner observed more than T rewards");
            }
            f.started.push_back(fresh_base(d));
            for (auto& s : f.started) base_observe(base_, s, reward);
          },
      },
      data_);
  ++round_;
}

std::span<const double> LearnerState::score() const {
  if (const auto* a = std::get_if<Accumulator>(&data_)) return a->state.score;
  if (const auto* w = std::get_if<Windowed>(&data_)) return w->log_weights;
  throw Error(ErrorCode::WrongVariant, "score() on a wrapper learner");
}

std::vector<double> LearnerState::weights() const {
  if (!uses_mw_update(spec_.kind)) {
    throw Error(ErrorCode::WrongVariant, "weights() on a non-MW learner");
  }
  const auto s = score();
  std::vector<double> w(s.begin(), s.end());
  for (double& v : w) v = std::exp(v);
  return w;
}

std::size_t LearnerState::window_fill() const {
  if (const auto* w = std::get_if<Windowed>(&data_)) return w->window.size();
  throw Error(ErrorCode::WrongVariant, "window_fill() on a non-windowed MW");
}

std::size_t LearnerState::bank_size() const {
  if (const auto* b = std::get_if<Bank>(&data_)) return b->live.size();
  if (const auto* f = std::get_if<FullBank>(&data_)) return f->started.size();
  throw Error(ErrorCode::WrongVariant, "bank_size() on a non-averaging learner");
}

std::size_t LearnerState::block_position() const {
  if (const auto* p = std::get_if<Periodic>(&data_)) return p->in_block;
  throw Error(ErrorCode::WrongVariant, "block_position() on a non-periodic learner");
}

LearnerState step(LearnerState state, std::span<const double> reward) {
  state.observe(reward);
  return state;
}

std::size_t sample_action(const ActionDistribution& x, double uniform) {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0) continue;
    last_positive = i;
    acc += x[i];
    if (uniform < acc) return i;
  }
  return last_positive;
}

std::vector<ActionDistribution> play(const LearnerSpec& spec,
                                     const RewardSequence& seq,
                                     std::optional<std::uint64_t> sample_seed) {
  LearnerState state(spec);
  std::vector<ActionDistribution> plays;
  plays.reserve(seq.rounds());
  for (std::size_t s = 1; s <= seq.rounds(); ++s) {
    const long t = static_cast<long>(s);
    auto x = state.act();
    if (sample_seed) {
      const CounterRng rng(*sample_seed);
      const double u = to_unit(rng.at(s));
      plays.push_back(ActionDistribution::point_mass(x.size(), sample_action(x, u)));
    } else {
      plays.push_back(std::move(x));
    }
    state.observe(seq.row(t));
  }
  return plays;
}

}  // namespace histlearn
