#include "dovetail/quantum.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "dovetail/corpus.hpp"
#include "dovetail/rng.hpp"
#include "dovetail/sources.hpp"

using namespace dovetail;

namespace {

std::unique_ptr<SequenceSource> chooser(const std::string& name) {
  return std::make_unique<ProgramSource>(corpus_program(name));
}

double ones_fraction(const BitString& s) {
  std::size_t ones = 0;
  for (std::size_t i = 0; i < s.size(); ++i) ones += static_cast<std::size_t>(s.bit(i));
  return static_cast<double>(ones) / static_cast<double>(s.size());
}

// OUT0 OUT1 OUT1 OUT0 JMP 0 emits (0110)*, balanced on both the odd and
// the even subsequence.
Program balanced_period4() { return Program::from_string("000001001000101000000"); }

}  // namespace

TEST(Measure, MatchedBasisIsExact) {
  SplitMix64 rng(1);
  for (int i = 0; i < 10'000; ++i) {
    EXPECT_EQ(measure(PureState::Z0, Basis::Z, rng), 0);
    EXPECT_EQ(measure(PureState::Z1, Basis::Z, rng), 1);
    EXPECT_EQ(measure(PureState::Xplus, Basis::X, rng), 0);
    EXPECT_EQ(measure(PureState::Xminus, Basis::X, rng), 1);
  }
}

TEST(Measure, MismatchedBasisIsFairCoin) {
  SplitMix64 rng(42);
  int ones = 0;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) ones += measure(PureState::Xplus, Basis::Z, rng);
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.5, 0.02);
}

TEST(Measure, FlipNoiseShiftsFrequency) {
  SplitMix64 rng(43);
  int ones = 0;
  const int n = 10'000;
  for (int i = 0; i < n; ++i) ones += apply_flip(measure(PureState::Z1, Basis::Z, rng), 0.1, rng);
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.9, 0.02);
}

TEST(MixingBox, RejectsBadFlipRate) {
  EXPECT_THROW(MixingBox(Basis::Z, chooser("zeros"), 0.5), std::invalid_argument);
  EXPECT_THROW(MixingBox(Basis::Z, chooser("zeros"), -0.1), std::invalid_argument);
}

TEST(AlternatingMeasure, EmptyRun) {
  MixingBox box(Basis::Z, chooser("zeros"));
  SplitMix64 rng(7);
  AlternatingRecords rec = alternating_measure(box, 0, rng);
  EXPECT_TRUE(rec.x_seq.empty());
  EXPECT_TRUE(rec.z_seq.empty());
}

TEST(AlternatingMeasure, MatchedRecordCopiesChooserSubsequence) {
  // Qubit j carries chooser bit j; the Z record collects the odd positions.
  // With an all-zeros chooser the Z record is exactly 0^(n/2) and the X
  // record is coin-like.
  MixingBox box(Basis::Z, chooser("zeros"));
  SplitMix64 rng(11);
  const std::size_t n = 20'000;
  AlternatingRecords rec = alternating_measure(box, n, rng);
  ASSERT_EQ(rec.z_seq.size(), n / 2);
  for (std::size_t i = 0; i < rec.z_seq.size(); ++i) ASSERT_EQ(rec.z_seq.bit(i), 0) << i;
  EXPECT_NEAR(ones_fraction(rec.x_seq), 0.5, 0.03);
}

TEST(AlternatingMeasure, MatchedRecordIsTheEvenOrOddChooserBits) {
  // An X-basis box with the alternating chooser 0101...: the X record sees
  // chooser bits 0, 2, 4, ... = all zeros; the Z record is coin-like. The
  // matched record is a subsequence of the chooser stream, not the stream
  // itself, and stays computable either way.
  MixingBox box(Basis::X, chooser("alt01"));
  SplitMix64 rng(12);
  AlternatingRecords rec = alternating_measure(box, 2'000, rng);
  for (std::size_t i = 0; i < rec.x_seq.size(); ++i) ASSERT_EQ(rec.x_seq.bit(i), 0) << i;
  EXPECT_NEAR(ones_fraction(rec.z_seq), 0.5, 0.04);

  // Z-basis box with the same chooser: the Z record sees bits 1, 3, 5, ...
  // = all ones.
  MixingBox box2(Basis::Z, chooser("alt01"));
  SplitMix64 rng2(13);
  AlternatingRecords rec2 = alternating_measure(box2, 2'000, rng2);
  for (std::size_t i = 0; i < rec2.z_seq.size(); ++i) ASSERT_EQ(rec2.z_seq.bit(i), 1) << i;
}

TEST(AlternatingMeasure, ExactCopyForAnyChooser) {
  MixingBox box(Basis::Z, chooser("period3_011"));
  SplitMix64 rng(14);
  AlternatingRecords rec = alternating_measure(box, 1'000, rng);
  ProgramSource reference(corpus_program("period3_011"));
  for (std::size_t i = 0; i < rec.z_seq.size(); ++i)
    ASSERT_EQ(rec.z_seq.bit(i), reference.bit(2 * i + 1)) << i;
}

TEST(AlternatingMeasure, MismatchedFrequencyWithinNormalTolerance) {
  // |#1s/n - 0.5| < 3/(2*sqrt(n)) for the coin-like record at n = 10^4.
  const std::size_t n_qubits = 20'000;
  MixingBox box(Basis::Z, chooser("zeros"));
  SplitMix64 rng(15);
  AlternatingRecords rec = alternating_measure(box, n_qubits, rng);
  const double n = static_cast<double>(rec.x_seq.size());
  EXPECT_LT(std::abs(ones_fraction(rec.x_seq) - 0.5), 3.0 / (2.0 * std::sqrt(n)));
}

TEST(AlternatingMeasure, BoxConfigurationsHaveIndistinguishableMarginals) {
  // Same balanced chooser prepared in either basis: all four records pass
  // the same frequency test. Only the distinguisher separates the boxes.
  const std::size_t n = 20'000;
  for (Basis basis : {Basis::Z, Basis::X}) {
    MixingBox box(basis, std::make_unique<ProgramSource>(balanced_period4()));
    SplitMix64 rng(16);
    AlternatingRecords rec = alternating_measure(box, n, rng);
    const double tol_x = 3.0 / (2.0 * std::sqrt(static_cast<double>(rec.x_seq.size())));
    const double tol_z = 3.0 / (2.0 * std::sqrt(static_cast<double>(rec.z_seq.size())));
    EXPECT_LT(std::abs(ones_fraction(rec.x_seq) - 0.5), tol_x) << basis_name(basis);
    EXPECT_LT(std::abs(ones_fraction(rec.z_seq) - 0.5), tol_z) << basis_name(basis);
  }
}

TEST(AlternatingMeasure, FlippedCoinIsStillACoin) {
  MixingBox box(Basis::Z, chooser("zeros"), 0.1);
  SplitMix64 rng(17);
  AlternatingRecords rec = alternating_measure(box, 20'000, rng);
  // Matched record: Bernoulli(r) ones; mismatched record: still fair.
  EXPECT_NEAR(ones_fraction(rec.z_seq), 0.1, 0.02);
  EXPECT_NEAR(ones_fraction(rec.x_seq), 0.5, 0.03);
}

TEST(MixtureExperiment, IdentifiesPreparationBasis) {
  DistinguishConfig cfg;
  cfg.k = 4;
  {
    MixingBox box(Basis::Z, chooser("zeros"));
    MixtureResult res = run_mixture_experiment(std::move(box), cfg, SplitMix64(100));
    EXPECT_TRUE(res.correct);
    EXPECT_EQ(res.verdict.answer, Answer::Z);
    // Two qubits per consumed record bit, 48 bits needed on each side.
    EXPECT_GE(res.qubits_consumed, 96u);
    EXPECT_LE(res.qubits_consumed, 200u);
  }
  {
    MixingBox box(Basis::X, chooser("zeros"));
    MixtureResult res = run_mixture_experiment(std::move(box), cfg, SplitMix64(101));
    EXPECT_TRUE(res.correct);
    EXPECT_EQ(res.verdict.answer, Answer::X);
  }
}

TEST(MixtureExperiment, NoisyBoxStillIdentified) {
  DistinguishConfig cfg;
  cfg.k = 8;
  cfg.q = 0.15;
  cfg.stage_cap = 10'000'000;
  MixingBox box(Basis::Z, chooser("zeros"), 0.10);
  MixtureResult res = run_mixture_experiment(std::move(box), cfg, SplitMix64(102));
  EXPECT_NE(res.verdict.answer, Answer::CapExhausted);
  EXPECT_TRUE(res.correct);
}

TEST(MixtureExperiment, SmallMonteCarloSuccessRate) {
  DistinguishConfig cfg;
  cfg.k = 4;
  const auto& corpus = builtin_corpus();
  int correct = 0;
  const int trials = 30;
  for (int i = 0; i < trials; ++i) {
    SplitMix64 rng(derive_seed(777, static_cast<uint64_t>(i)));
    const Basis basis = rng.next_bit() ? Basis::X : Basis::Z;
    const auto& named = corpus[static_cast<std::size_t>(i) % corpus.size()];
    MixingBox box(basis, chooser(named.name));
    MixtureResult res = run_mixture_experiment(std::move(box), cfg, rng.split());
    correct += res.correct;
  }
  const double bound = error_bound(4);
  const double sigma = std::sqrt(bound * (1 - bound) / trials);
  EXPECT_GE(static_cast<double>(correct) / trials, 1.0 - bound - 3 * sigma);
}

TEST(ImproperVsProper, ProperSideIdentified) {
  DistinguishConfig cfg;
  cfg.k = 4;
  MixingBox proper(Basis::Z, chooser("zeros"));
  auto res = improper_vs_proper_experiment(std::move(proper), std::make_unique<CoinSource>(300),
                                           cfg, SplitMix64(301));
  EXPECT_TRUE(res.promise_held);
  EXPECT_TRUE(res.correct);
  EXPECT_EQ(res.verdict.answer, Answer::X);
  EXPECT_EQ(res.verdict.stage, 4415u);
}

TEST(ImproperVsProper, RicherChooserFiresLater) {
  DistinguishConfig cfg;
  cfg.k = 4;
  MixingBox proper(Basis::Z, chooser("period3_011"));
  auto res = improper_vs_proper_experiment(std::move(proper), std::make_unique<CoinSource>(302),
                                           cfg, SplitMix64(303));
  EXPECT_TRUE(res.correct);
  EXPECT_GT(res.verdict.stage, 4415u);
}

TEST(ImproperVsProper, PromiseViolationIsFlagged) {
  // An X-basis box measured wholly in Z yields a coin, so both sides are
  // random: with a small stage cap the search reports cap-exhausted.
  DistinguishConfig cfg;
  cfg.k = 4;
  cfg.stage_cap = 4'000;
  MixingBox not_proper(Basis::X, chooser("zeros"));
  auto res = improper_vs_proper_experiment(std::move(not_proper),
                                           std::make_unique<CoinSource>(304), cfg, SplitMix64(305));
  EXPECT_FALSE(res.promise_held);
  EXPECT_FALSE(res.correct);
  EXPECT_EQ(res.verdict.answer, Answer::CapExhausted);
}
