#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dovetail/learner.hpp"
#include "dovetail/rng.hpp"
#include "dovetail/sources.hpp"

namespace dovetail {

// A conditional distribution P(a,b|x,y) over binary inputs and outputs.
class Behavior {
 public:
  double& prob(int x, int y, int a, int b) { return p_[idx(x, y, a, b)]; }
  double prob(int x, int y, int a, int b) const { return p_[idx(x, y, a, b)]; }

  bool normalized(double tol = 1e-12) const {
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        double sum = 0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b) {
            if (prob(x, y, a, b) < 0) return false;
            sum += prob(x, y, a, b);
          }
        if (std::abs(sum - 1.0) > tol) return false;
      }
    return true;
  }

 private:
  static std::size_t idx(int x, int y, int a, int b) {
    return static_cast<std::size_t>(x * 8 + y * 4 + a * 2 + b);
  }
  std::array<double, 16> p_{};
};

// CHSH expression: sum over a,b,x,y of (-1)^(a+b+xy) P(a,b|x,y).
inline double chsh(const Behavior& b) {
  if (!b.normalized()) throw std::domain_error("chsh: behavior not normalized");
  double s = 0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb)
          s += (((a + bb + x * y) % 2) ? -1.0 : 1.0) * b.prob(x, y, a, bb);
  return s;
}

// One deterministic local pair: a = f(x), b = g(y), encoded as output bits
// per input. chsh of such a strategy is an integer.
inline int chsh_deterministic(int a0, int a1, int b0, int b1) {
  int s = 0;
  const int as[2] = {a0, a1};
  const int bs[2] = {b0, b1};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) s += ((as[x] + bs[y] + x * y) % 2) ? -1 : 1;
  return s;
}

// Brute-force maximum of chsh over all 16 deterministic strategies. Exactly
// 2, in integer arithmetic.
inline int local_deterministic_max() {
  int best = -4;
  for (int a0 = 0; a0 < 2; ++a0)
    for (int a1 = 0; a1 < 2; ++a1)
      for (int b0 = 0; b0 < 2; ++b0)
        for (int b1 = 0; b1 < 2; ++b1) best = std::max(best, chsh_deterministic(a0, a1, b0, b1));
  return best;
}

struct NoSignalingCheck {
  bool no_signaling = false;
  double max_residual = 0.0;
};

// Marginal independence: Alice's marginal must not depend on y, Bob's must
// not depend on x.
inline NoSignalingCheck is_no_signaling(const Behavior& b, double tol = 1e-9) {
  if (!b.normalized()) throw std::domain_error("is_no_signaling: behavior not normalized");
  NoSignalingCheck res;
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) {
      const double m0 = b.prob(x, 0, a, 0) + b.prob(x, 0, a, 1);
      const double m1 = b.prob(x, 1, a, 0) + b.prob(x, 1, a, 1);
      res.max_residual = std::max(res.max_residual, std::abs(m0 - m1));
    }
  for (int y = 0; y < 2; ++y)
    for (int bb = 0; bb < 2; ++bb) {
      const double m0 = b.prob(0, y, 0, bb) + b.prob(0, y, 1, bb);
      const double m1 = b.prob(1, y, 0, bb) + b.prob(1, y, 1, bb);
      res.max_residual = std::max(res.max_residual, std::abs(m0 - m1));
    }
  res.no_signaling = res.max_residual <= tol;
  return res;
}

// Built-in targets.
inline Behavior behavior_local_deterministic() {
  Behavior b;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) b.prob(x, y, 0, 0) = 1.0;
  return b;
}

inline Behavior behavior_uniform() {
  Behavior b;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) b.prob(x, y, a, bb) = 0.25;
  return b;
}

inline Behavior behavior_pr_box() {
  Behavior b;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb)
          if ((a ^ bb) == (x & y)) b.prob(x, y, a, bb) = 0.5;
  return b;
}

// Correlators E(x,y) = (-1)^(xy)/sqrt(2) with uniform marginals: S = 2*sqrt(2).
inline Behavior behavior_quantum_optimal() {
  Behavior b;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const double corr = ((x & y) ? -1.0 : 1.0) / std::sqrt(2.0);
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb)
          b.prob(x, y, a, bb) = (1.0 + (((a + bb) % 2) ? -corr : corr)) / 4.0;
    }
  return b;
}

inline Behavior named_behavior(const std::string& name) {
  if (name == "local") return behavior_local_deterministic();
  if (name == "uniform") return behavior_uniform();
  if (name == "pr") return behavior_pr_box();
  if (name == "quantum") return behavior_quantum_optimal();
  throw std::invalid_argument("unknown target behavior: " + name);
}

// Per-round hidden state: two uniform draws fixed at preparation time.
struct Lambda {
  double u = 0.0;
  double v = 0.0;
};

// Deterministic boxes realizing a no-signaling behavior when Bob's side
// knows Alice's input: a is drawn from P(a|x) via a threshold on u, b from
// the conditional P(b|y;a,x) via a threshold on v, with a reconstructed on
// Bob's side from (x_hat, u). When x_hat = x the induced behavior equals
// the target exactly (up to lambda sampling).
struct DeterministicStrategy {
  std::array<double, 2> alice_threshold{};             // P(a=1|x)
  double bob_threshold[2][2][2] = {};                  // [x_hat][a][y] -> P(b=1|y;a,x_hat)

  int alice_output(int x, const Lambda& l) const {
    return l.u < alice_threshold[static_cast<std::size_t>(x)] ? 1 : 0;
  }
  int bob_output(int y, const Lambda& l, int x_hat) const {
    const int a = l.u < alice_threshold[static_cast<std::size_t>(x_hat)] ? 1 : 0;
    return l.v < bob_threshold[x_hat][a][y] ? 1 : 0;
  }
};

// P(a,b|x,y) = P(a|x) * P(b|y;a,x). Cells with P(a|x) = 0 are unreachable;
// their conditional is filled with a fixed constant response.
inline DeterministicStrategy decompose_known_x(const Behavior& b) {
  if (!b.normalized()) throw std::domain_error("decompose_known_x: behavior not normalized");
  if (!is_no_signaling(b).no_signaling)
    throw std::domain_error("decompose_known_x: behavior is signaling");
  DeterministicStrategy s;
  for (int x = 0; x < 2; ++x)
    s.alice_threshold[static_cast<std::size_t>(x)] = b.prob(x, 0, 1, 0) + b.prob(x, 0, 1, 1);
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) {
      const double pa = b.prob(x, 0, a, 0) + b.prob(x, 0, a, 1);
      for (int y = 0; y < 2; ++y)
        s.bob_threshold[x][a][y] = pa > 0 ? b.prob(x, y, a, 1) / pa : 0.0;
    }
  return s;
}

enum class PredictTarget { AliceInput, BobInput };

struct RoundRecord {
  uint64_t i = 0;
  int x = 0, y = 0, a = 0, b = 0;
  int x_hat = 0;  // Eve's pre-round guess of the predicted party's input
  bool guess_correct = false;
  bool mind_change = false;
};

struct BellOptions {
  PredictTarget predict = PredictTarget::AliceInput;
  uint64_t learner_code_cap = 1'000'000'000;
  uint64_t learner_trace_step_cap = 10'000'000;
  std::size_t window = 500;  // disjoint windows for the S-vs-time trace
};

struct BellReport {
  uint64_t n_rounds = 0;
  uint64_t lock_round = 0;  // first round of the maximal all-correct suffix
  bool locked_all_suffix = false;  // some suffix of correct guesses exists
  std::optional<double> s_overall;
  std::vector<std::optional<double>> s_windows;
  std::size_t window = 500;
  std::optional<double> s_post_lock;
  uint64_t post_lock_rounds = 0;
  uint64_t mind_changes = 0;
  uint64_t abstained_rounds = 0;
  std::optional<Candidate> final_candidate;
};

struct EmpiricalBehavior {
  bool defined = false;  // every (x,y) cell observed at least once
  Behavior behavior;
  std::array<std::array<uint64_t, 2>, 2> cell_counts{};
};

inline EmpiricalBehavior empirical_behavior(const std::vector<RoundRecord>& records,
                                            std::size_t from, std::size_t to) {
  EmpiricalBehavior res;
  uint64_t counts[2][2][2][2] = {};
  for (std::size_t i = from; i < to && i < records.size(); ++i) {
    const RoundRecord& r = records[i];
    counts[r.x][r.y][r.a][r.b] += 1;
    res.cell_counts[static_cast<std::size_t>(r.x)][static_cast<std::size_t>(r.y)] += 1;
  }
  res.defined = true;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      const uint64_t n = res.cell_counts[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
      if (n == 0) {
        res.defined = false;
        continue;
      }
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          res.behavior.prob(x, y, a, b) =
              static_cast<double>(counts[x][y][a][b]) / static_cast<double>(n);
    }
  return res;
}

inline std::optional<double> empirical_chsh(const std::vector<RoundRecord>& records,
                                            std::size_t from, std::size_t to) {
  EmpiricalBehavior eb = empirical_behavior(records, from, to);
  if (!eb.defined) return std::nullopt;
  return chsh(eb.behavior);
}

struct BellRun {
  BellReport report;
  std::vector<RoundRecord> records;
};

namespace detail {

inline Behavior transpose_roles(const Behavior& b) {
  Behavior t;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb) t.prob(y, x, bb, a) = b.prob(x, y, a, bb);
  return t;
}

inline uint64_t bell_lambda_seed(uint64_t seed) { return SplitMix64(seed).next_u64(); }

}  // namespace detail

// The computability attack. Eve prepares deterministic boxes realizing
// `target` given a correct input guess. Between rounds, the box on the
// predicted party's side runs the next-value learner on that party's input
// history and pre-shares the guess; during the space-like separated round,
// a_i depends only on (x_i, lambda_i) and b_i only on (y_i, lambda_i,
// x_hat_i). The other party's input is fed back to the learner's box after
// each round. An abstaining learner plays 0.
inline BellRun run_bell_attack(SequenceSource& f_alice, SequenceSource& f_bob,
                               const Behavior& target, const TimeBound& bound, uint64_t n_rounds,
                               uint64_t seed, const BellOptions& opts = {}) {
  const bool predict_alice = opts.predict == PredictTarget::AliceInput;
  const DeterministicStrategy strategy =
      decompose_known_x(predict_alice ? target : detail::transpose_roles(target));

  LearnerConfig lcfg;
  lcfg.bound = bound;
  lcfg.code_cap = opts.learner_code_cap;
  lcfg.trace_step_cap = opts.learner_trace_step_cap;
  NextValueLearner learner(lcfg);

  SplitMix64 lambda_rng(detail::bell_lambda_seed(seed));
  BellRun run;
  run.records.reserve(n_rounds);

  for (uint64_t i = 0; i < n_rounds; ++i) {
    const std::size_t changes_before = learner.mind_changes().size();
    const auto guess = learner.predict();
    RoundRecord rec;
    rec.i = i;
    rec.x_hat = guess.bit.value_or(0);
    run.report.abstained_rounds += !guess.bit.has_value();

    const Lambda lambda{lambda_rng.next_double(), lambda_rng.next_double()};
    rec.x = f_alice.bit(i);
    rec.y = f_bob.bit(i);
    if (predict_alice) {
      rec.a = strategy.alice_output(rec.x, lambda);
      rec.b = strategy.bob_output(rec.y, lambda, rec.x_hat);
      rec.guess_correct = rec.x_hat == rec.x;
      learner.observe(rec.x);
    } else {
      rec.b = strategy.alice_output(rec.y, lambda);
      rec.a = strategy.bob_output(rec.x, lambda, rec.x_hat);
      rec.guess_correct = rec.x_hat == rec.y;
      learner.observe(rec.y);
    }
    rec.mind_change = learner.mind_changes().size() > changes_before;
    run.records.push_back(rec);
  }

  BellReport& rep = run.report;
  rep.n_rounds = n_rounds;
  rep.window = opts.window;
  uint64_t lock = 0;
  for (const RoundRecord& r : run.records)
    if (!r.guess_correct) lock = r.i + 1;
  rep.lock_round = lock;
  rep.locked_all_suffix = lock < n_rounds;
  rep.s_overall = empirical_chsh(run.records, 0, run.records.size());
  for (std::size_t from = 0; from + opts.window <= run.records.size(); from += opts.window)
    rep.s_windows.push_back(empirical_chsh(run.records, from, from + opts.window));
  rep.post_lock_rounds = n_rounds - lock;
  if (rep.post_lock_rounds > 0)
    rep.s_post_lock = empirical_chsh(run.records, static_cast<std::size_t>(lock), run.records.size());
  rep.mind_changes = learner.mind_changes().size();
  rep.final_candidate = learner.candidate();
  return run;
}

// Replay checker for the timing discipline: recomputes every a_i from
// (x_i, lambda_i) alone and every b_i from (y_i, lambda_i, x_hat_i) alone,
// with the lambda schedule re-derived from the seed.
inline bool verify_round_records(const std::vector<RoundRecord>& records, const Behavior& target,
                                 uint64_t seed, PredictTarget predict = PredictTarget::AliceInput) {
  const bool predict_alice = predict == PredictTarget::AliceInput;
  const DeterministicStrategy strategy =
      decompose_known_x(predict_alice ? target : detail::transpose_roles(target));
  SplitMix64 lambda_rng(detail::bell_lambda_seed(seed));
  for (const RoundRecord& rec : records) {
    const Lambda lambda{lambda_rng.next_double(), lambda_rng.next_double()};
    int a = 0, b = 0;
    if (predict_alice) {
      a = strategy.alice_output(rec.x, lambda);
      b = strategy.bob_output(rec.y, lambda, rec.x_hat);
    } else {
      b = strategy.alice_output(rec.y, lambda);
      a = strategy.bob_output(rec.x, lambda, rec.x_hat);
    }
    if (a != rec.a || b != rec.b) return false;
    if (rec.guess_correct != (rec.x_hat == (predict_alice ? rec.x : rec.y))) return false;
  }
  return true;
}

}  // namespace dovetail
