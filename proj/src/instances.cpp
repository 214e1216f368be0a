#include "histlearn/instances.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

#include "histlearn/csv.hpp"
#include "histlearn/rng.hpp"

namespace histlearn {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Stream tags for derive_seed.
constexpr std::uint64_t kCoinStream = 0x636f696e;   // "coin"
constexpr std::uint64_t kWalkStream = 0x77616c6b;   // "walk"
constexpr std::uint64_t kHardStream = 0x68617264;   // "hard"

void constraint(bool ok, const std::string& why) {
  if (!ok) throw Error(ErrorCode::ConstraintError, why);
}

}  // namespace

void validate(const InstanceSpec& spec) {
  constraint(spec.horizon >= 1, "horizon T must be >= 1");
  constraint(spec.actions >= 1, "need at least one action");
  std::visit(
      Overloaded{
          [](const Stochastic&) {},
          [](const Periodic& p) { constraint(p.phi > 0.0, "phi must be > 0"); },
          [](const PairedPeriodic& p) {
            constraint(p.phi1 > 0.0 && p.phi2 > 0.0, "phi1, phi2 must be > 0");
          },
          [](const RandomWalk& w) {
            constraint(w.sigma >= 0.0 && std::isfinite(w.sigma), "sigma must be >= 0");
          },
          [&](const AdversarialBlock& a) {
            if (a.window == 0 || a.window % 3 != 0) {
              throw Error(ErrorCode::BadModulus, "adversarial block needs M > 0 with 3 | M");
            }
            constraint(spec.actions == 2, "adversarial block has d = 2");
            constraint(spec.horizon == 3 * a.window, "adversarial block has T = 3M");
          },
          [&](const ConcatAdversarial& c) {
            if (c.window == 0 || c.window % 3 != 0) {
              throw Error(ErrorCode::BadModulus, "adversarial block needs M > 0 with 3 | M");
            }
            constraint(spec.actions == 2, "adversarial block has d = 2");
            if (spec.horizon < 3 * c.window) {
              throw Error(ErrorCode::HorizonTooShort, "concatenation needs T >= 3M");
            }
          },
          [&](const LowerBound& l) {
            constraint(l.window >= 1, "lower-bound window M must be >= 1");
            constraint(spec.actions >= 2, "lower-bound instance needs d >= 2");
          },
      },
      spec.variant);
}

bool has_mean_trace(const InstanceSpec& spec) {
  return std::holds_alternative<Stochastic>(spec.variant) ||
         std::holds_alternative<Periodic>(spec.variant) ||
         std::holds_alternative<PairedPeriodic>(spec.variant) ||
         std::holds_alternative<RandomWalk>(spec.variant);
}

RewardRange instance_range(const InstanceSpec& spec) {
  return has_mean_trace(spec) ? RewardRange::PlusMinusOne : RewardRange::ZeroOne;
}

std::string instance_id(const InstanceSpec& spec) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const Stochastic&) { os << "stochastic"; },
                 [&](const Periodic& p) { os << "periodic(phi=" << p.phi << ")"; },
                 [&](const PairedPeriodic& p) {
                   os << "paired_periodic(phi1=" << p.phi1 << ",phi2=" << p.phi2 << ")";
                 },
                 [&](const RandomWalk& w) {
                   os << "random_walk(sigma=" << w.sigma << ",seed=" << w.seed << ")";
                 },
                 [&](const AdversarialBlock& a) { os << "adversarial_block(M=" << a.window << ")"; },
                 [&](const ConcatAdversarial& c) { os << "concat_adversarial(M=" << c.window << ")"; },
                 [&](const LowerBound& l) {
                   os << "lower_bound(M=" << l.window << ",seed=" << l.seed << ")";
                 },
             },
             spec.variant);
  os << ",T=" << spec.horizon << ",d=" << spec.actions;
  return os.str();
}

MeanTrace::MeanTrace(std::size_t rounds, std::size_t actions)
    : rounds_(rounds), actions_(actions), probs_(rounds * actions, 0.5) {}

double MeanTrace::p(long t, std::size_t arm) const {
  return probs_.at(static_cast<std::size_t>(t - 1) * actions_ + arm);
}

void MeanTrace::set(long t, std::size_t arm, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::ConstraintError, "heads probability outside [0,1]");
  }
  probs_.at(static_cast<std::size_t>(t - 1) * actions_ + arm) = p;
}

RewardSequence MeanTrace::expected_rewards() const {
  std::vector<double> mu(probs_.size());
  std::transform(probs_.begin(), probs_.end(), mu.begin(),
                 [](double p) { return 2.0 * p - 1.0; });
  return RewardSequence(rounds_, actions_, RewardRange::PlusMinusOne, std::move(mu));
}

double periodic_probability(double t0, double phi) {
  const double phase = std::fmod(t0, phi);
  return std::abs(std::sin(std::numbers::pi / 6.0 + phase * std::numbers::pi / phi));
}

double random_walk_step(double p, double z) { return std::clamp(p + z, 0.0, 1.0); }

MeanTrace mean_trace(const InstanceSpec& spec) {
  validate(spec);
  const std::size_t T = spec.horizon, d = spec.actions;
  MeanTrace trace(T, d);  // every arm defaults to a fair coin
  auto fill_arm = [&](std::size_t arm, auto&& prob_at) {
    for (std::size_t s = 0; s < T; ++s) trace.set(static_cast<long>(s) + 1, arm, prob_at(s));
  };
  std::visit(
      Overloaded{
          [&](const Stochastic&) {
            const double p = 0.5 + 1.0 / std::sqrt(static_cast<double>(T));
            fill_arm(0, [&](std::size_t) { return std::min(p, 1.0); });
          },
          [&](const Periodic& p) {
            fill_arm(0, [&](std::size_t s) {
              return periodic_probability(static_cast<double>(s), p.phi);
            });
          },
          [&](const PairedPeriodic& p) {
            fill_arm(0, [&](std::size_t s) {
              return periodic_probability(static_cast<double>(s), p.phi1);
            });
            if (d >= 2) {
              fill_arm(1, [&](std::size_t s) {
                return periodic_probability(static_cast<double>(s), p.phi2);
              });
            }
          },
          [&](const RandomWalk& w) {
            CounterRng rng(derive_seed(w.seed, {kWalkStream}));
            std::normal_distribution<double> z(0.0, w.sigma);
            double p = 0.5;
            for (std::size_t s = 0; s < T; ++s) {
              trace.set(static_cast<long>(s) + 1, 0, p);
              p = random_walk_step(p, w.sigma > 0.0 ? z(rng) : 0.0);
            }
          },
          [&](const auto&) {
            throw Error(ErrorCode::WrongVariant,
                        instance_id(spec) + " is a fixed reward sequence, not a coin trace");
          },
      },
      spec.variant);
  return trace;
}

RewardSequence realize(const MeanTrace& trace, std::uint64_t seed) {
  const std::size_t T = trace.rounds(), d = trace.actions();
  const CounterRng rng(derive_seed(seed, {kCoinStream}));
  std::vector<double> data(T * d);
  for (std::size_t s = 0; s < T; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      const double u = to_unit(rng.at(s * d + i));
      data[s * d + i] = u < trace.p(static_cast<long>(s) + 1, i) ? 1.0 : -1.0;
    }
  }
  return RewardSequence(T, d, RewardRange::PlusMinusOne, std::move(data));
}

RewardSequence adversarial_block(std::size_t window) {
  if (window == 0 || window % 3 != 0) {
    throw Error(ErrorCode::BadModulus,
                "adversarial block needs M > 0 with 3 | M, got M=" + std::to_string(window));
  }
  const std::size_t m = window;
  RewardSequence seq(3 * m, 2, RewardRange::ZeroOne);
  for (std::size_t t = 1; t <= 3 * m; ++t) {
    const long round = static_cast<long>(t);
    if (t <= m) {
      seq.set(round, 0, 1.0);
    } else if (t <= 5 * m / 3) {
      seq.set(round, 1, 1.0);
    } else if (t <= 2 * m) {
      seq.set(round, 0, 1.0);
    }
  }
  return seq;
}

RewardSequence concat_adversarial(std::size_t window, std::size_t horizon) {
  const RewardSequence block = adversarial_block(window);
  const std::size_t len = block.rounds();
  if (horizon < len) {
    throw Error(ErrorCode::HorizonTooShort,
                "T=" + std::to_string(horizon) + " < 3M=" + std::to_string(len));
  }
  const std::size_t copies = horizon / len;
  std::vector<double> data(horizon * 2, 0.0);
  const auto src = block.data();
  for (std::size_t n = 0; n < copies; ++n) {
    std::copy(src.begin(), src.end(), data.begin() + static_cast<long>(n * src.size()));
  }
  return RewardSequence(horizon, 2, RewardRange::ZeroOne, std::move(data));
}

RewardSequence lower_bound_instance(std::size_t window, std::size_t actions,
                                    std::size_t horizon, std::uint64_t seed) {
  if (window == 0) throw Error(ErrorCode::ConstraintError, "M must be > 0");
  if (actions < 2) throw Error(ErrorCode::WrongDimension, "lower bound needs d >= 2");
  const CounterRng rng(derive_seed(seed, {kHardStream}));
  std::vector<double> data(horizon * actions, 0.0);
  for (std::size_t s = 0; s < horizon; ++s) {
    const std::size_t period_pos = s % (2 * window);
    if (period_pos >= window) continue;  // zero segment
    for (std::size_t i = 0; i < actions; ++i) {
      data[s * actions + i] = static_cast<double>(rng.at(period_pos * actions + i) >> 63);
    }
  }
  return RewardSequence(horizon, actions, RewardRange::ZeroOne, std::move(data));
}

RewardSequence generate(const InstanceSpec& spec, std::uint64_t seed) {
  validate(spec);
  if (has_mean_trace(spec)) return realize(mean_trace(spec), seed);
  return std::visit(
      Overloaded{
          [&](const AdversarialBlock& a) { return adversarial_block(a.window); },
          [&](const ConcatAdversarial& c) { return concat_adversarial(c.window, spec.horizon); },
          [&](const LowerBound& l) {
            return lower_bound_instance(l.window, spec.actions, spec.horizon, l.seed);
          },
          [&](const auto&) -> RewardSequence {
            throw Error(ErrorCode::WrongVariant, "unhandled instance");
          },
      },
      spec.variant);
}

DeltaTrace delta_trace(const RewardSequence& seq, std::size_t window,
                       WindowConvention convention) {
  if (seq.actions() != 2) {
    throw Error(ErrorCode::WrongDimension,
                "delta trace needs d = 2, got d=" + std::to_string(seq.actions()));
  }
  if (window == 0) throw Error(ErrorCode::ConstraintError, "M must be > 0");
  const long m = static_cast<long>(window);
  const long T = static_cast<long>(seq.rounds());
  // Inclusive windows are the exclusive ones one round later.
  const long shift = convention == WindowConvention::Inclusive ? 1 : 0;
  auto gap = [&](long s) { return seq.at(s, 0) - seq.at(s, 1); };

  DeltaTrace out{window, std::vector<double>(static_cast<std::size_t>(T), 0.0)};
  double running = 0.0;  // exclusive window of round u
  long u = 1;
  for (long t = 1; t <= T; ++t) {
    const long target = t + shift;
    for (; u < target; ++u) {
      // window(u+1) = window(u) + r_u - r_{u-M}
      running += gap(u) - gap(u - m);
    }
    out.delta[static_cast<std::size_t>(t - 1)] = running;
  }
  return out;
}

Partition pnz_partition(const DeltaTrace& trace, double threshold) {
  if (threshold < 0.0) throw Error(ErrorCode::ConstraintError, "threshold must be >= 0");
  Partition out;
  for (std::size_t k = 0; k < trace.delta.size(); ++k) {
    const double v = trace.delta[k];
    const long t = static_cast<long>(k) + 1;
    if (v >= threshold && v > 0.0) {
      out.positive.push_back(t);
    } else if (v <= -threshold && v < 0.0) {
      out.negative.push_back(t);
    } else {
      out.zero.push_back(t);
    }
  }
  return out;
}

void write_reward_csv(std::ostream& out, const RewardSequence& seq) {
  out << "# range=" << to_string(seq.range()) << "\n";
  out << "t";
  for (std::size_t i = 1; i <= seq.actions(); ++i) out << ",arm" << i;
  out << "\n";
  for (std::size_t t = 1; t <= seq.rounds(); ++t) {
    out << t;
    for (double v : seq.row(static_cast<long>(t))) out << ',' << format_number(v);
    out << "\n";
  }
}

RewardSequence read_reward_csv(std::istream& in) {
  std::string line;
  std::optional<RewardRange> range;
  std::size_t width = 0;
  bool header = false;
  std::vector<double> data;
  std::size_t rounds = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string key = "# range=";
      if (line.rfind(key, 0) == 0) range = parse_range(line.substr(key.size()));
      continue;
    }
    const auto cells = split_csv_line(line);
    if (!header) {
      if (cells.size() < 2 || cells[0] != "t") {
        throw Error(ErrorCode::SchemaError, "reward CSV header must be t,arm1,...");
      }
      for (std::size_t i = 1; i < cells.size(); ++i) {
        if (cells[i] != "arm" + std::to_string(i)) {
          throw Error(ErrorCode::SchemaError, "unexpected column '" + cells[i] + "'");
        }
      }
      width = cells.size() - 1;
      header = true;
      continue;
    }
    if (cells.size() != width + 1) {
      throw Error(ErrorCode::SchemaError, "ragged row at round " + std::to_string(rounds + 1));
    }
    if (parse_number(cells[0]) != static_cast<double>(rounds + 1)) {
      throw Error(ErrorCode::SchemaError, "rounds must be listed 1..T in order");
    }
    for (std::size_t i = 1; i <= width; ++i) data.push_back(parse_number(cells[i]));
    ++rounds;
  }
  if (!header) throw Error(ErrorCode::SchemaError, "missing header");
  if (!range) throw Error(ErrorCode::SchemaError, "missing '# range=' line");
  return RewardSequence(rounds, width, *range, std::move(data));
}

}  // namespace histlearn
