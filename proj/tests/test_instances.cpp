#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "histlearn/instances.hpp"
#include "oracles.hpp"

using namespace histlearn;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected histlearn::Error");
  return ErrorCode::IoError;
}

oracle::Rows rows_of(const RewardSequence& seq) {
  oracle::Rows rows;
  for (long t = 1; t <= static_cast<long>(seq.rounds()); ++t) {
    const auto r = seq.row(t);
    rows.emplace_back(r.begin(), r.end());
  }
  return rows;
}

InstanceSpec spec_of(InstanceVariant v, std::size_t T = 1000, std::size_t d = 2) {
  return InstanceSpec{v, T, d};
}

}  // namespace

TEST_CASE("mean_trace examples") {
  const auto st = mean_trace(spec_of(Stochastic{}));
  CHECK(std::abs(st.p(1, 0) - 0.531622776601683793) <= 1e-12);
  CHECK(std::abs(st.p(1000, 0) - 0.531622776601683793) <= 1e-12);
  CHECK(st.p(500, 1) == 0.5);

  const auto pe = mean_trace(spec_of(Periodic{1000}));
  CHECK(std::abs(pe.p(1, 0) - 0.5) <= 1e-12);
  CHECK(pe.p(1, 1) == 0.5);

  CHECK(random_walk_step(0.99, 0.05) == 1.0);
  CHECK(random_walk_step(0.01, -0.05) == 0.0);
  CHECK(random_walk_step(0.5, 0.1) == doctest::Approx(0.6));

  CHECK(code_of([] { mean_trace(spec_of(AdversarialBlock{6}, 18)); }) == ErrorCode::WrongVariant);
}

TEST_CASE("periodic probabilities repeat with period phi") {
  for (double phi : {50.0, 100.0, 200.0, 500.0}) {
    const auto tr = mean_trace(spec_of(Periodic{phi}));
    for (long t = 1; t + static_cast<long>(phi) <= 1000; t += 7) {
      CHECK(std::abs(tr.p(t, 0) - tr.p(t + static_cast<long>(phi), 0)) <= 1e-12);
      const double want = std::abs(std::sin(std::numbers::pi / 6 +
                                            static_cast<double>(t - 1) * std::numbers::pi / phi));
      CHECK(std::abs(tr.p(t, 0) - want) <= 1e-9);
    }
  }
  const auto paired = mean_trace(spec_of(PairedPeriodic{100, 250}));
  CHECK(std::abs(paired.p(1, 0) - paired.p(101, 0)) <= 1e-12);
  CHECK(std::abs(paired.p(1, 1) - paired.p(251, 1)) <= 1e-12);
}

TEST_CASE("random walk stays in [0, 1] and is seeded") {
  const auto a = mean_trace(spec_of(RandomWalk{0.05, 3}));
  const auto b = mean_trace(spec_of(RandomWalk{0.05, 3}));
  const auto c = mean_trace(spec_of(RandomWalk{0.05, 4}));
  CHECK(a.p(1, 0) == 0.5);
  bool differs = false;
  for (long t = 1; t <= 1000; ++t) {
    CHECK(a.p(t, 0) >= 0.0);
    CHECK(a.p(t, 0) <= 1.0);
    CHECK(a.p(t, 0) == b.p(t, 0));
    differs = differs || a.p(t, 0) != c.p(t, 0);
  }
  CHECK(differs);
}

TEST_CASE("realize") {
  MeanTrace ones(50, 3), zeros(50, 3);
  for (long t = 1; t <= 50; ++t) {
    for (std::size_t i = 0; i < 3; ++i) {
      ones.set(t, i, 1.0);
      zeros.set(t, i, 0.0);
    }
  }
  const auto up = realize(ones, 1), down = realize(zeros, 1);
  for (long t = 1; t <= 50; ++t) {
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(up.at(t, i) == 1.0);
      CHECK(down.at(t, i) == -1.0);
    }
  }
  const auto tr = mean_trace(spec_of(Stochastic{}));
  CHECK(realize(tr, 9) == realize(tr, 9));
  CHECK(!(realize(tr, 9) == realize(tr, 10)));
  CHECK(realize(tr, 9).range() == RewardRange::PlusMinusOne);

  // empirical heads frequency of the biased arm
  const auto seq = realize(tr, 77);
  double heads = 0.0;
  for (long t = 1; t <= 1000; ++t) heads += seq.at(t, 0) > 0 ? 1.0 : 0.0;
  const double p = tr.p(1, 0);
  CHECK(std::abs(heads / 1000.0 - p) <= 4.0 * std::sqrt(p * (1 - p) / 1000.0));
}

TEST_CASE("adversarial_block") {
  const auto seq = adversarial_block(6);
  CHECK(seq.rounds() == 18);
  CHECK(seq.range() == RewardRange::ZeroOne);
  const std::vector<std::vector<double>> want = {
      {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {1, 0}, {0, 1}, {0, 1}, {0, 1},
      {0, 1}, {1, 0}, {1, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}};
  CHECK(rows_of(seq) == want);
  const auto totals = seq.column_totals();
  CHECK(totals[0] == 8.0);
  CHECK(totals[1] == 4.0);
  CHECK(code_of([] { adversarial_block(4); }) == ErrorCode::BadModulus);
  CHECK(code_of([] { adversarial_block(0); }) == ErrorCode::BadModulus);
  for (std::size_t m : {3u, 30u, 300u}) {
    const auto tot = adversarial_block(m).column_totals();
    CHECK(tot[0] == 4.0 * static_cast<double>(m) / 3.0);
    CHECK(tot[1] == 2.0 * static_cast<double>(m) / 3.0);
  }
}

TEST_CASE("concat_adversarial") {
  const std::size_t M = 6;
  const auto block = rows_of(adversarial_block(M));
  const auto two = rows_of(concat_adversarial(M, 6 * M));
  CHECK(two.size() == 36);
  for (std::size_t s = 0; s < 36; ++s) CHECK(two[s] == block[s % 18]);
  const auto padded = rows_of(concat_adversarial(M, 7 * M));
  CHECK(padded.size() == 42);
  for (std::size_t s = 36; s < 42; ++s) CHECK(padded[s] == std::vector<double>{0, 0});
  CHECK(concat_adversarial(M, 3 * M) == adversarial_block(M));
  CHECK(code_of([] { concat_adversarial(6, 17); }) == ErrorCode::HorizonTooShort);
  CHECK(code_of([] { concat_adversarial(4, 100); }) == ErrorCode::BadModulus);
}

TEST_CASE("lower_bound_instance") {
  const std::size_t M = 400, T = 2000;
  const auto seq = lower_bound_instance(M, 3, T, 5);
  for (long t = 1; t <= static_cast<long>(T); ++t) {
    const bool zero_segment = ((t - 1) / static_cast<long>(M)) % 2 == 1;
    const auto r = seq.row(t);
    if (zero_segment) {
      for (double v : r) CHECK(v == 0.0);
    } else {
      for (double v : r) CHECK((v == 0.0 || v == 1.0));
    }
  }
  for (std::size_t i = 0; i < 3; ++i) {
    double sum = 0.0;
    for (long t = 1; t <= static_cast<long>(M); ++t) sum += seq.at(t, i);
    CHECK(std::abs(sum / M - 0.5) <= 3.0 / std::sqrt(static_cast<double>(M)));
  }
  // every hard segment is the same draw
  for (long t = 1; t <= static_cast<long>(M); ++t) {
    CHECK(seq.at(t, 0) == seq.at(t + 2 * static_cast<long>(M), 0));
  }
  CHECK(lower_bound_instance(M, 3, T, 5) == seq);
  CHECK(!(lower_bound_instance(M, 3, T, 6) == seq));
  // truncated at T mid-segment
  CHECK(lower_bound_instance(7, 2, 10, 1).rounds() == 10);
}

TEST_CASE("instance validation") {
  CHECK(code_of([] { validate(spec_of(AdversarialBlock{300}, 901)); }) == ErrorCode::ConstraintError);
  CHECK_NOTHROW(validate(spec_of(AdversarialBlock{300}, 900)));
  CHECK(code_of([] { validate(spec_of(AdversarialBlock{301}, 903)); }) == ErrorCode::BadModulus);
  CHECK(code_of([] { validate(spec_of(ConcatAdversarial{300}, 800)); }) == ErrorCode::HorizonTooShort);
  CHECK(code_of([] { validate(spec_of(AdversarialBlock{6}, 18, 3)); }) == ErrorCode::ConstraintError);
  CHECK(code_of([] { validate(spec_of(Periodic{0})); }) == ErrorCode::ConstraintError);
  CHECK(instance_range(spec_of(Stochastic{})) == RewardRange::PlusMinusOne);
  CHECK(instance_range(spec_of(LowerBound{10, 1})) == RewardRange::ZeroOne);
  CHECK(instance_id(spec_of(AdversarialBlock{300}, 900)) == "adversarial_block(M=300),T=900,d=2");
}

TEST_CASE("delta_trace") {
  const auto one = RewardSequence::from_rows({{1, 0}}, RewardRange::ZeroOne);
  CHECK(delta_trace(one, 1).at(1) == 0.0);
  CHECK(code_of([] { delta_trace(RewardSequence(5, 3, RewardRange::ZeroOne), 2); }) ==
        ErrorCode::WrongDimension);

  for (long M : {6L, 30L, 300L}) {
    const auto seq = adversarial_block(static_cast<std::size_t>(M));
    const auto rows = rows_of(seq);
    const auto ex = delta_trace(seq, static_cast<std::size_t>(M));
    const auto in = delta_trace(seq, static_cast<std::size_t>(M), WindowConvention::Inclusive);
    CHECK(ex.at(1) == 0.0);
    CHECK(ex.at(M + 1) == static_cast<double>(M));
    for (long t = 5 * M / 3 + 2; t <= 2 * M + 1; ++t) CHECK(ex.at(t) == -static_cast<double>(M) / 3.0);
    for (long t = 1; t <= 3 * M; ++t) {
      CHECK(ex.at(t) == oracle::delta(rows, t, static_cast<std::size_t>(M)));
      CHECK(in.at(t) == oracle::block_gap_profile(t, M));
      if (t > 1) CHECK(ex.at(t) == in.at(t - 1));
    }
  }
}

TEST_CASE("delta_trace repeats across concatenated copies") {
  const std::size_t M = 30;
  const auto seq = concat_adversarial(M, 9 * M);
  const auto dt = delta_trace(seq, M);
  for (long t = 1; t <= static_cast<long>(3 * M); ++t) {
    CHECK(dt.at(t + static_cast<long>(3 * M)) == dt.at(t + static_cast<long>(6 * M)));
  }
  // the first copy differs only where its window would reach before round 1
  for (long t = static_cast<long>(M) + 1; t <= static_cast<long>(3 * M); ++t) {
    CHECK(dt.at(t) == dt.at(t + static_cast<long>(3 * M)));
  }
}

TEST_CASE("delta_trace matches the brute-force sum on random sequences") {
  oracle::Gen g(31);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t T = 1 + g.below(200), M = 1 + g.below(T);
    const auto rows = oracle::random_rows(g, T, 2, trial % 2 == 0);
    const auto seq = RewardSequence::from_rows(
        rows, trial % 2 == 0 ? RewardRange::PlusMinusOne : RewardRange::ZeroOne);
    const auto dt = delta_trace(seq, M);
    for (long t = 1; t <= static_cast<long>(T); ++t) CHECK(dt.at(t) == oracle::delta(rows, t, M));
  }
}

TEST_CASE("pnz_partition") {
  DeltaTrace dt{2, {0.0, 1.0, -1.0, 0.0, 3.0, -0.5}};
  const auto p0 = pnz_partition(dt, 0.0);
  CHECK(p0.zero == std::vector<long>{1, 4});
  CHECK(p0.positive == std::vector<long>{2, 5});
  CHECK(p0.negative == std::vector<long>{3, 6});
  const auto p1 = pnz_partition(dt, 1.0);
  CHECK(p1.positive == std::vector<long>{2, 5});
  CHECK(p1.negative == std::vector<long>{3});
  CHECK(p1.zero == std::vector<long>{1, 4, 6});

  // block(M): the negative set is the interval (3M/2, 7M/3), one round later
  // under the exclusive window
  const long M = 30;
  const auto part = pnz_partition(delta_trace(adversarial_block(M), M), 1e-9);
  std::vector<long> want;
  for (long t = 3 * M / 2 + 2; t <= 7 * M / 3; ++t) want.push_back(t);
  CHECK(part.negative == want);
  CHECK(part.positive.size() + part.negative.size() + part.zero.size() == 3 * M);
}

TEST_CASE("reward CSV round trip") {
  oracle::Gen g(8);
  for (int trial = 0; trial < 10; ++trial) {
    const bool pm = trial % 2 == 1;
    const auto rows = oracle::random_rows(g, 1 + g.below(50), 1 + g.below(4), pm);
    const auto seq = RewardSequence::from_rows(rows, pm ? RewardRange::PlusMinusOne : RewardRange::ZeroOne);
    std::stringstream buf;
    write_reward_csv(buf, seq);
    CHECK(read_reward_csv(buf) == seq);
  }
  MeanTrace tr(3, 2);
  tr.set(1, 0, 0.123456789012345);
  const auto frac = tr.expected_rewards();
  std::stringstream buf;
  write_reward_csv(buf, frac);
  CHECK(read_reward_csv(buf) == frac);

  std::stringstream bad("# range=zero_one\nt,arm1\n1,2\n");
  CHECK(code_of([&] { read_reward_csv(bad); }) == ErrorCode::RangeMismatch);
  std::stringstream junk("t,arm1\n1,x\n");
  CHECK(code_of([&] { read_reward_csv(junk); }) == ErrorCode::SchemaError);
}
