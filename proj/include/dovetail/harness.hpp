#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dovetail/corpus.hpp"
#include "dovetail/distinguisher.hpp"
#include "dovetail/quantum.hpp"
#include "dovetail/rng.hpp"
#include "dovetail/sources.hpp"

namespace dovetail {

// Seeded Monte Carlo trial loops shared by the CLI and the acceptance
// suite. One trial: pick a chooser program (round-robin over the corpus),
// coin-flip which side carries the computable stream, run the search.

struct DistinguishTrial {
  uint64_t seed = 0;
  std::string program;  // chooser raw bits
  Answer answer = Answer::CapExhausted;
  bool correct = false;
  uint64_t stage = 0;
  std::size_t program_length = 0;   // matched program, 0 if cap-exhausted
  std::size_t bits_consumed = 0;    // both sequences combined
};

inline DistinguishTrial run_distinguish_trial(DovetailSearch& search, const Program& chooser,
                                              double q, double r, uint64_t seed) {
  SplitMix64 rng(seed);
  const bool computable_is_x = rng.next_bit() == 0;
  const uint64_t coin_seed = rng.next_u64();
  const uint64_t noise_seed = rng.next_u64();

  std::unique_ptr<SequenceSource> program_side = std::make_unique<ProgramSource>(chooser);
  if (r > 0.0)
    program_side = std::make_unique<NoisySource>(std::move(program_side), r, noise_seed);
  CoinSource coin_side(coin_seed);

  DistinguishTrial trial;
  trial.seed = seed;
  trial.program = chooser.raw().to_string();
  Verdict v = computable_is_x ? search.run(*program_side, coin_side, q)
                              : search.run(coin_side, *program_side, q);
  trial.answer = v.answer;
  trial.stage = v.stage;
  trial.bits_consumed = v.bits_consumed_x + v.bits_consumed_z;
  if (v.matching_program) trial.program_length = v.matching_program->length();
  const Answer want = computable_is_x ? Answer::X : Answer::Z;
  trial.correct = v.answer == want;
  return trial;
}

struct TrialSummary {
  uint64_t trials = 0;
  uint64_t errors = 0;         // answered trials naming the wrong side
  uint64_t cap_exhausted = 0;
  double error_rate = 0.0;     // errors / trials
};

inline TrialSummary summarize(const std::vector<DistinguishTrial>& trials) {
  TrialSummary s;
  s.trials = trials.size();
  for (const auto& t : trials) {
    if (t.answer == Answer::CapExhausted)
      ++s.cap_exhausted;
    else if (!t.correct)
      ++s.errors;
  }
  if (s.trials) s.error_rate = static_cast<double>(s.errors) / static_cast<double>(s.trials);
  return s;
}

inline std::vector<DistinguishTrial> run_distinguish_trials(DovetailSearch& search,
                                                            const std::vector<Program>& corpus,
                                                            uint64_t n_trials, uint64_t master_seed,
                                                            double q, double r) {
  std::vector<DistinguishTrial> out;
  out.reserve(n_trials);
  for (uint64_t i = 0; i < n_trials; ++i) {
    const Program& chooser = corpus[i % corpus.size()];
    out.push_back(run_distinguish_trial(search, chooser, q, r, derive_seed(master_seed, i)));
  }
  return out;
}

inline std::vector<Program> corpus_programs(const std::vector<std::string>& names) {
  std::vector<Program> out;
  if (names.size() == 1 && names[0] == "builtin") {
    for (const auto& named : builtin_corpus()) out.push_back(Program::from_string(named.raw_bits));
    return out;
  }
  for (const auto& name : names) out.push_back(corpus_program(name));
  return out;
}

struct MixtureTrial {
  uint64_t seed = 0;
  Basis basis_truth = Basis::Z;
  std::string chooser;
  Answer answer = Answer::CapExhausted;
  bool correct = false;
  uint64_t stage = 0;
  std::size_t qubits_consumed = 0;
};

inline MixtureTrial run_mixture_trial(const Program& chooser, Basis basis, double r,
                                      const DistinguishConfig& cfg, uint64_t seed) {
  MixtureTrial trial;
  trial.seed = seed;
  trial.basis_truth = basis;
  trial.chooser = chooser.raw().to_string();
  MixingBox box(basis, std::make_unique<ProgramSource>(chooser), r);
  MixtureResult res = run_mixture_experiment(std::move(box), cfg, SplitMix64(seed));
  trial.answer = res.verdict.answer;
  trial.correct = res.correct;
  trial.stage = res.verdict.stage;
  trial.qubits_consumed = res.qubits_consumed;
  return trial;
}

}  // namespace dovetail
