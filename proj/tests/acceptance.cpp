// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "histlearn/analysis.hpp"
#include "oracles.hpp"

using namespace histlearn;

namespace {

// Tolerances and budgets.
constexpr double kBlockFloorDivisor = 18.0;  // total regret >= M / 18
constexpr double kConcatHistFloor = 0.05;
constexpr double kConcatSlack = 2.0;          // bound 2 sqrt(ln d / M)
constexpr double kEquivalenceTol = 1e-12;
constexpr double kRelativeWeightTol = 1e-9;
constexpr double kRatioLow = 1.4;
constexpr double kRatioHigh = 2.9;
constexpr double kStochasticGapFraction = 0.1;

constexpr double kBudgetAc1 = 1.0;
constexpr double kBudgetAc2 = 30.0;
constexpr double kBudgetAc4 = 60.0;
constexpr double kBudgetAc5 = 120.0;

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LearnerSpec bound(LearnerKind kind, const InstanceSpec& inst, std::size_t window = 0,
                  std::optional<BaseSpec> base = std::nullopt) {
  LearnerSpec s;
  s.kind = kind;
  s.window = window;
  s.base = base;
  return bind_learner(s, inst);
}

const BaseSpec kHedgeBase{LearnerKind::Hedge, std::nullopt};

Outcome ac1() {
  const std::size_t M = 300;
  const InstanceSpec inst{AdversarialBlock{M}, 3 * M, 2};
  const auto seq = generate(inst, 0);
  const auto trace = per_round_regret(seq, play(bound(LearnerKind::HistMW, inst, M), seq));
  const double total = trace.total();
  const double floor = static_cast<double>(M) / kBlockFloorDivisor;
  return {total >= floor,
          fmt("hist_mw total regret %.4f >= M/18 = %.4f (M/6 = %.1f, measured regret/M = %.4f)",
              total, floor, M / 6.0, total / M)};
}

Outcome ac2() {
  const std::size_t M = 300, T = 9000;
  const InstanceSpec inst{ConcatAdversarial{M}, T, 2};
  const auto seq = generate(inst, 0);
  const double hist =
      per_round_regret(seq, play(bound(LearnerKind::HistMW, inst, M), seq)).final_per_round;
  const double cap = kConcatSlack * std::sqrt(std::log(2.0) / static_cast<double>(M));
  const double pr =
      per_round_regret(seq, play(bound(LearnerKind::PeriodicRestart, inst, M, kHedgeBase), seq))
          .final_per_round;
  const double ar =
      per_round_regret(seq, play(bound(LearnerKind::AverageRestart, inst, M, kHedgeBase), seq))
          .final_per_round;
  return {hist >= kConcatHistFloor && pr <= cap && ar <= cap,
          fmt("hist_mw %.4f >= %.2f; periodic_restart(hedge) %.4f, average_restart(hedge) %.4f <= %.4f",
              hist, kConcatHistFloor, pr, ar, cap)};
}

Outcome ac3() {
  oracle::Gen g(20240501);
  // (a) AverageRestart with M = T against the full-horizon variant
  const std::size_t T = 500, d = 3;
  const InstanceSpec inst{Stochastic{}, T, d};
  const auto seq = RewardSequence::from_rows(oracle::random_rows(g, T, d, true), RewardRange::PlusMinusOne);
  double gap = 0.0;
  for (LearnerKind base : {LearnerKind::MWFixed, LearnerKind::Hedge, LearnerKind::FTL}) {
    const BaseSpec b{base, std::nullopt};
    const auto a = play(bound(LearnerKind::AverageRestart, inst, T, b), seq);
    const auto f = play(bound(LearnerKind::AverageRestartFullHorizon, inst, 0, b), seq);
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t i = 0; i < d; ++i) gap = std::max(gap, std::abs(a[t][i] - f[t][i]));
  }
  // (b) HistMW incremental weights against the naive window product
  const std::size_t T2 = 1000, M = 100;
  const auto rows = oracle::random_rows(g, T2, d, true);
  const auto seq2 = RewardSequence::from_rows(rows, RewardRange::PlusMinusOne);
  LearnerState state(bound(LearnerKind::HistMW, InstanceSpec{Stochastic{}, T2, d}, M));
  double rel = 0.0;
  for (long t = 1; t <= static_cast<long>(T2); ++t) {
    const auto naive = oracle::window_product(rows, d, t, M, 0.5);
    const auto w = state.weights();
    for (std::size_t i = 0; i < d; ++i) {
      const double n = static_cast<double>(naive[i]);
      rel = std::max(rel, std::abs(w[i] - n) / n);
    }
    state.observe(seq2.row(t));
  }
  return {gap <= kEquivalenceTol && rel <= kRelativeWeightTol,
          fmt("(a) max |AR(M=T) - full_horizon| %.3g <= %.0e over T=%zu; (b) max relative weight error %.3g <= %.0e over T=%zu",
              gap, kEquivalenceTol, T, rel, kRelativeWeightTol, T2)};
}

Outcome ac4() {
  const std::size_t seeds = 20, small = 64, large = 256;
  struct Entry {
    const char* id;
    LearnerKind kind;
    std::optional<BaseSpec> base;
  };
  const Entry learners[] = {{"hist_mw", LearnerKind::HistMW, std::nullopt},
                            {"periodic_restart", LearnerKind::PeriodicRestart, kHedgeBase},
                            {"average_restart", LearnerKind::AverageRestart, kHedgeBase}};
  auto mean_regret = [&](const Entry& e, std::size_t M) {
    double sum = 0.0;
    for (std::size_t s = 1; s <= seeds; ++s) {
      const InstanceSpec inst{LowerBound{M, s}, 4 * M, 2};
      const auto seq = generate(inst, 0);
      sum += per_round_regret(seq, play(bound(e.kind, inst, M, e.base), seq)).final_per_round;
    }
    return sum / static_cast<double>(seeds);
  };
  bool ok = true;
  std::string detail;
  for (const auto& e : learners) {
    const double a = mean_regret(e, small), b = mean_regret(e, large);
    const double ratio = a / b;
    ok = ok && b > 0.0 && ratio >= kRatioLow && ratio <= kRatioHigh;
    detail += fmt("%s %.4f/%.4f = %.3f; ", e.id, a, b, ratio);
  }
  detail += fmt("band [%.1f, %.1f], %zu seeds, T = 4M", kRatioLow, kRatioHigh, seeds);
  return {ok, detail};
}

// Mean final total pseudo-regret over `runs` seeds.
double mean_total(const InstanceSpec& inst, const LearnerSpec& spec, std::size_t runs) {
  double sum = 0.0;
  for (std::size_t r = 0; r < runs; ++r) sum += run_once(inst, spec, run_seed(0, inst, r)).pseudo().total();
  return sum / static_cast<double>(runs);
}

Outcome ac5() {
  const std::size_t T = 1000, M = T / 10, runs = 3;
  double mw = 0.0, pr = 0.0, ar = 0.0;
  const double periods[] = {T / 20.0, T / 10.0, T / 5.0, T / 2.0};
  for (double phi : periods) {
    const InstanceSpec inst{Periodic{phi}, T, 2};
    mw += mean_total(inst, bound(LearnerKind::MWFixed, inst), runs) / 4.0;
    pr += mean_total(inst, bound(LearnerKind::PeriodicRestart, inst, M), runs) / 4.0;
    ar += mean_total(inst, bound(LearnerKind::AverageRestart, inst, M), runs) / 4.0;
  }
  return {ar < mw && pr < mw,
          fmt("mean final expected regret over phi in {50,100,200,500}: mw %.3f, periodic_restart %.3f, average_restart %.3f",
              mw, pr, ar)};
}

Outcome ac6() {
  const std::size_t T = 1000, M = T / 10, runs = 3;
  const InstanceSpec inst{Stochastic{}, T, 2};
  const double mw = mean_total(inst, bound(LearnerKind::MWFixed, inst), runs);
  const double cap = kStochasticGapFraction * static_cast<double>(T);
  bool ok = true;
  std::string detail = fmt("mw %.3f", mw);
  for (LearnerKind k : {LearnerKind::HistMW, LearnerKind::PeriodicRestart, LearnerKind::AverageRestart}) {
    const double v = mean_total(inst, bound(k, inst, M), runs);
    ok = ok && mw <= v && v - mw < cap;
    detail += fmt(", %s %.3f", canonical_id(k), v);
  }
  detail += fmt("; gap must be < %.0f", cap);
  return {ok, detail};
}

Outcome ac7() {
  bool ok = true;
  std::string detail;
  for (long M : {6L, 30L, 300L}) {
    const auto seq = adversarial_block(static_cast<std::size_t>(M));
    oracle::Rows rows;
    for (long t = 1; t <= 3 * M; ++t) {
      const auto r = seq.row(t);
      rows.emplace_back(r.begin(), r.end());
    }
    const auto dt = delta_trace(seq, static_cast<std::size_t>(M));
    long mismatches = 0, profile_mismatches = 0;
    for (long t = 1; t <= 3 * M; ++t) {
      if (dt.at(t) != oracle::delta(rows, t, static_cast<std::size_t>(M))) ++mismatches;
      // exclusive window at t equals the piecewise profile at t - 1
      if (t > 1 && dt.at(t) != oracle::block_gap_profile(t - 1, M)) ++profile_mismatches;
    }
    std::vector<double> slopes;
    for (long t = 1; t < 3 * M; ++t) {
      const double s = dt.at(t + 1) - dt.at(t);
      if (slopes.empty() || slopes.back() != s) slopes.push_back(s);
    }
    const bool slopes_ok = slopes == std::vector<double>{1, -2, 0, 1, -1};
    ok = ok && mismatches == 0 && profile_mismatches == 0 && slopes_ok;
    detail += fmt("M=%ld: %ld brute-force / %ld profile mismatches, slopes %s; ", M, mismatches,
                  profile_mismatches, slopes_ok ? "(+1,-2,0,+1,-1)" : "WRONG");
  }
  detail += "offset 1 round (window [t-M, t-1])";
  return {ok, detail};
}

Outcome ac8() {
  oracle::Gen g(8);
  std::size_t ftl_violations = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t T = 100 + g.below(900), d = 2 + g.below(4);
    const auto seq = RewardSequence::from_rows(oracle::random_rows(g, T, d, trial % 2 == 1),
                                               trial % 2 == 1 ? RewardRange::PlusMinusOne
                                                              : RewardRange::ZeroOne);
    LearnerSpec s;
    s.kind = LearnerKind::FTL;
    s.horizon = T;
    s.actions = d;
    s.range = seq.range();
    const auto plays = play(s, seq);
    for (double gamma : {0.01, 0.05, 0.2}) {
      ftl_violations += check_mean_based(plays, seq, T, gamma, static_cast<double>(T)).size();
    }
  }
  const std::size_t M = 300;
  const InstanceSpec inst{AdversarialBlock{M}, 3 * M, 2};
  const auto seq = generate(inst, 0);
  const auto hist = check_mean_based(play(bound(LearnerKind::HistMW, inst, M), seq), seq, M, 0.05,
                                     static_cast<double>(M));
  return {ftl_violations == 0 && hist.empty(),
          fmt("ftl: %zu violations over 50 instances x gamma {0.01,0.05,0.2}; hist_mw on block(300), gamma 0.05: %zu",
              ftl_violations, hist.size())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget_seconds;  // 0 means unbudgeted
  };
  const Criterion criteria[] = {
      {1, "block counterexample", ac1, kBudgetAc1},
      {2, "concatenated blocks separate hist_mw from restarts", ac2, kBudgetAc2},
      {3, "exact equivalences", ac3, 0},
      {4, "lower-bound 1/sqrt(M) scaling", ac4, kBudgetAc4},
      {5, "drifting rewards favour history-restricted learners", ac5, kBudgetAc5},
      {6, "stochastic sanity", ac6, 0},
      {7, "delta-trace oracle", ac7, 0},
      {8, "mean-based certification", ac8, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds <= 0 || secs < c.budget_seconds;
    const bool passed = out.passed && in_time;
    std::string timing = fmt("%.3fs", secs);
    if (c.budget_seconds > 0) timing += fmt(" (budget %.0fs%s)", c.budget_seconds, in_time ? "" : ", EXCEEDED");
    std::printf("%s AC%d %s: %s [%s]\n", passed ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str(),
                timing.c_str());
    if (!passed) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
