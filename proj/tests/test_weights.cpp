#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bmikit/errors.hpp"
#include "bmikit/format.hpp"
#include "bmikit/weights.hpp"
#include "support/corpus_fixtures.hpp"

using namespace bmikit;
using bmikit::testing::to_corpus;

TEST(WeightBmi, ZhEnSetting) {
  EXPECT_NEAR(weight_bmi(2.0, BmiSchedule{0.1, 1.0, 0.4}), 1.2, 1e-12);
}

TEST(WeightBmi, BelowThresholdIsZero) {
  EXPECT_EQ(weight_bmi(0.39, BmiSchedule{0.15, 0.8, 0.4}), 0.0);
  EXPECT_EQ(weight_bmi(0.39, BmiSchedule{0.1, 1.0, 0.4}), 0.0);
  EXPECT_EQ(weight_bmi(-3.0, BmiSchedule{5.0, 7.0, 0.4}), 0.0);
}

TEST(WeightBmi, EnDeSettingAtThreshold) {
  EXPECT_NEAR(weight_bmi(0.4, BmiSchedule{0.15, 0.8, 0.4}), 0.86, 1e-12);
}

TEST(WeightBmi, StrictlyIncreasingAboveThreshold) {
  const BmiSchedule s{0.15, 0.8, 0.4};
  double previous = weight_bmi(0.4, s);
  for (double b = 0.45; b < 20; b += 0.05) {
    const double w = weight_bmi(b, s);
    ASSERT_GT(w, previous);
    ASSERT_GE(w, s.base + s.scale * s.threshold);
    previous = w;
  }
}

TEST(WeightExponential, Values) {
  EXPECT_EQ(weight_exponential(0, ExponentialSchedule{1.0, 0.1}), 2.0);
  EXPECT_LT(weight_exponential(1'000'000'000, ExponentialSchedule{1.0, 0.1}) - 1.0, 1e-9);
  EXPECT_NEAR(weight_exponential(10, ExponentialSchedule{1.0, 0.1}), 1.367879, 1e-6);
}

TEST(WeightExponential, DecreasingAndBounded) {
  const ExponentialSchedule s{2.5, 0.3};
  double previous = weight_exponential(0, s);
  EXPECT_EQ(previous, s.amplitude + 1);
  for (std::uint64_t c = 1; c < 100; ++c) {
    const double w = weight_exponential(c, s);
    ASSERT_LT(w, previous);
    ASSERT_GT(w, 1.0);
    previous = w;
  }
}

TEST(WeightChiSquare, Values) {
  EXPECT_EQ(weight_chisquare(0, ChiSquareSchedule{1.0, 1.0}), 1.0);
  EXPECT_NEAR(weight_chisquare(2, ChiSquareSchedule{1.0, 1.0}), 1.541341, 1e-6);
  for (std::uint64_t c = 0; c < 500; ++c) ASSERT_GE(weight_chisquare(c, ChiSquareSchedule{3.0, 0.05}), 1.0);
}

TEST(WeightChiSquare, PeaksAtTwoOverDecay) {
  const ChiSquareSchedule s{1.0, 0.01};
  std::uint64_t best = 0;
  for (std::uint64_t c = 1; c < 2000; ++c) {
    if (weight_chisquare(c, s) > weight_chisquare(best, s)) best = c;
  }
  EXPECT_EQ(best, 200u);
}

TEST(Validate, RejectsBadSchedules) {
  EXPECT_NO_THROW(validate(BmiSchedule{}));
  EXPECT_THROW(validate(BmiSchedule{-1.0, 0.8, 0.4}), ValidationError);
  EXPECT_THROW(validate(BmiSchedule{0.0, 0.8, 0.4}), ValidationError);
  EXPECT_THROW(validate(BmiSchedule{0.1, 0.8, -0.1}), ValidationError);
  EXPECT_THROW(validate(BmiSchedule{0.1, -1.0, 0.4}), ValidationError);
  EXPECT_NO_THROW(validate(BmiSchedule{0.5, -0.2, 0.4}));
  EXPECT_THROW(validate(ExponentialSchedule{0.0, 1.0}), ValidationError);
  EXPECT_THROW(validate(ExponentialSchedule{1.0, 0.0}), ValidationError);
  EXPECT_THROW(validate(ChiSquareSchedule{1.0, -1.0}), ValidationError);
  EXPECT_THROW(validate(ChiSquareSchedule{std::nan(""), 1.0}), ValidationError);
}

TEST(Describe, ShortestDecimals) {
  EXPECT_EQ(describe(BmiSchedule{0.1, 1.0, 0.4}), "bmi(S=0.1,B=1,threshold=0.4)");
  EXPECT_EQ(describe(ExponentialSchedule{1.0, 1e-5}), "exp(A=1,T=1e-05)");
}

TEST(FormatFixed, SixDecimals) {
  EXPECT_EQ(format_fixed(1.0), "1.000000");
  EXPECT_EQ(format_fixed(0.1234564), "0.123456");
  EXPECT_EQ(format_fixed(0.1234566), "0.123457");
  EXPECT_EQ(format_fixed(-0.0000001), "0.000000");
  EXPECT_EQ(format_fixed(-0.287682), "-0.287682");
  EXPECT_EQ(format_fixed(2.5, 0), "2");  // exact tie rounds to even
}

TEST(EmitWeights, UnitWeightsFormat) {
  const auto corpus = to_corpus({{{"a"}, {"U", "V", "W"}}});
  const auto stats = build_stats(corpus);
  std::ostringstream out;
  // Single-pair BMI is 0; with threshold 0 every token gets w = B = 1.
  const auto summary = emit_weights(stats, corpus, BmiSchedule{0.1, 1.0, 0.0}, out);
  EXPECT_EQ(out.str(), "1.000000\t1.000000\t1.000000\n");
  EXPECT_EQ(summary.zeroed, 0u);
  EXPECT_EQ(summary.mean, 1.0);
}

TEST(EmitWeights, SinglePairIsZeroedByThreshold) {
  const auto corpus = to_corpus({{{"a", "b"}, {"U", "V", "W", "X"}}});
  const auto stats = build_stats(corpus);
  std::ostringstream out;
  const auto summary = emit_weights(stats, corpus, BmiSchedule{}, out);
  EXPECT_EQ(out.str(), "0.000000\t0.000000\t0.000000\t0.000000\n");
  EXPECT_EQ(summary.pairs, 1u);
  EXPECT_EQ(summary.tokens, 4u);
  EXPECT_EQ(summary.zeroed, 4u);
}

TEST(EmitWeights, FrequencySchedulesUseTargetDocumentFrequency) {
  const auto corpus = to_corpus({{{"a"}, {"U", "U"}}, {{"b"}, {"U", "V"}}});
  const auto stats = build_stats(corpus);
  std::ostringstream out;
  emit_weights(stats, corpus, ExponentialSchedule{1.0, 1.0}, out);
  const std::string two = format_fixed(1 + std::exp(-2.0));
  const std::string one = format_fixed(1 + std::exp(-1.0));
  EXPECT_EQ(out.str(), two + "\t" + two + "\n" + two + "\t" + one + "\n");
}

TEST(EmitWeights, DeterministicAcrossRunsAndThreads) {
  std::mt19937_64 rng(31);
  bmikit::testing::RandomCorpusSpec spec;
  spec.max_pairs = 3000;
  auto text = bmikit::testing::random_text_corpus(rng, spec);
  while (text.size() < 2500) {
    auto more = bmikit::testing::random_text_corpus(rng, spec);
    text.insert(text.end(), more.begin(), more.end());
  }
  const auto corpus = to_corpus(text);
  const auto stats = build_stats(corpus);
  std::ostringstream first, second, threaded;
  emit_weights(stats, corpus, BmiSchedule{}, first, EmitOptions{1, {}});
  emit_weights(stats, corpus, BmiSchedule{}, second, EmitOptions{1, {}});
  emit_weights(stats, corpus, BmiSchedule{}, threaded, EmitOptions{4, {}});
  EXPECT_EQ(first.str(), second.str());
  EXPECT_EQ(first.str(), threaded.str());
}

TEST(EmitWeights, RejectsInvalidScheduleAndForeignCorpus) {
  const auto corpus = to_corpus({{{"a"}, {"U"}}});
  const auto stats = build_stats(corpus);
  std::ostringstream out;
  EXPECT_THROW(emit_weights(stats, corpus, BmiSchedule{-1.0, 0.8, 0.4}, out), ValidationError);
  EXPECT_TRUE(out.str().empty());
  EXPECT_THROW(emit_weights(stats, to_corpus({{{"z"}, {"U"}}}), BmiSchedule{}, out), VocabMismatchError);
}

TEST(ReadWeights, RoundTripAndShapeChecks) {
  const auto corpus = to_corpus({{{"a"}, {"U", "V"}}, {{"b"}, {"V"}}});
  std::istringstream good("1.000000\t0.500000\n2.000000\n");
  const auto rows = read_weights(good, corpus);
  EXPECT_EQ(rows, (std::vector<std::vector<double>>{{1.0, 0.5}, {2.0}}));

  const std::vector<std::pair<std::string, std::size_t>> bad = {
      {"1.0\n2.0\n", 1},          // too few fields
      {"1.0\t1.0\n2.0\t1.0\n", 2}, // too many
      {"1.0\t1.0\n", 2},          // missing line
      {"1.0\tx\n2.0\n", 1},
      {"1.0\t-1.0\n2.0\n", 1},
      {"1.0\t1.0\n2.0\n3.0\n", 3},
  };
  for (const auto& [text, line] : bad) {
    std::istringstream in(text);
    try {
      read_weights(in, corpus);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text;
    }
  }
}
