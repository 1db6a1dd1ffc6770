#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dovetail/bitstring.hpp"
#include "dovetail/machine.hpp"
#include "dovetail/sources.hpp"

namespace dovetail {

// Step budgets saturate here instead of overflowing; a budget this large is
// never reachable at desk scale anyway.
inline constexpr uint64_t kStepSaturation = 1ull << 62;

inline uint64_t sat_mul(uint64_t a, uint64_t b) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  return p > kStepSaturation ? kStepSaturation : static_cast<uint64_t>(p);
}

// A computable, non-decreasing time bound t(m) defining a time class.
class TimeBound {
 public:
  static TimeBound polynomial(unsigned degree) {
    TimeBound b;
    b.kind_ = Kind::Poly;
    b.degree_ = degree;
    return b;
  }
  static TimeBound exponential() {
    TimeBound b;
    b.kind_ = Kind::Exp;
    return b;
  }
  static TimeBound table(std::vector<uint64_t> values) {
    if (values.empty()) throw std::invalid_argument("TimeBound: empty table");
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] < values[i - 1]) throw std::invalid_argument("TimeBound: table must be non-decreasing");
    TimeBound b;
    b.kind_ = Kind::Table;
    b.values_ = std::move(values);
    return b;
  }

  uint64_t eval(uint64_t m) const {
    switch (kind_) {
      case Kind::Poly: {
        uint64_t v = 1;
        for (unsigned i = 0; i < degree_; ++i) v = sat_mul(v, m);
        return v;
      }
      case Kind::Exp:
        return m >= 62 ? kStepSaturation : (1ull << m);
      case Kind::Table:
        return values_[m < values_.size() ? m : values_.size() - 1];
    }
    return 0;
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::Poly: return "poly:" + std::to_string(degree_);
      case Kind::Exp: return "exp";
      case Kind::Table: return "table[" + std::to_string(values_.size()) + "]";
    }
    return "";
  }

 private:
  enum class Kind { Poly, Exp, Table };
  TimeBound() = default;
  Kind kind_ = Kind::Exp;
  unsigned degree_ = 1;
  std::vector<uint64_t> values_;
};

struct LearnerConfig {
  TimeBound bound = TimeBound::exponential();
  uint64_t code_cap = 100'000;           // largest candidate code examined
  uint64_t trace_step_cap = 10'000'000;  // hard per-program simulation cap
};

struct Candidate {
  uint64_t e = 0;  // program index
  uint64_t c = 0;  // budget multiplier
  uint64_t code = 0;
  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct MindChange {
  uint64_t round;  // history length when the new candidate was installed
  std::optional<Candidate> from;
  std::optional<Candidate> to;
};

// Identification by next value over a time class: maintain the least code
// <e, c> such that program e emits every bit i of the history within
// cumulative budget c * bound(i+1), plus the next bit; predict that next
// bit; on contradiction advance to the next consistent code. Codes, once
// ruled out, stay ruled out (consistency only shrinks as history grows), so
// the cursor never moves backwards.
class NextValueLearner {
 public:
  explicit NextValueLearner(LearnerConfig cfg) : cfg_(std::move(cfg)) {}

  struct Prediction {
    std::optional<int> bit;  // empty = abstain (code cap exhausted)
    std::optional<Candidate> candidate;
  };

  // Prediction for bit n given the n bits observed so far.
  Prediction predict() {
    ensure_candidate();
    if (!candidate_) return {};
    const ProgEval& pe = *evals_[candidate_->e];
    return Prediction{pe.runner.bits().bit(history_.size()), candidate_};
  }

  // Append an observed bit; if it contradicts the candidate, re-search.
  void observe(int actual) {
    const std::size_t n = history_.size();
    history_.push_back(actual);
    if (candidate_) {
      const ProgEval& pe = *evals_[candidate_->e];
      if (pe.runner.bits().size() <= n || pe.runner.bits().bit(n) != actual) {
        ensure_candidate();  // current candidate dies during refresh
      }
    }
  }

  const BitString& history() const { return history_; }
  std::optional<Candidate> candidate() const { return candidate_; }
  const std::vector<MindChange>& mind_changes() const { return mind_changes_; }
  uint64_t cursor_code() const { return cursor_code_; }
  bool exhausted() const { return exhausted_; }
  const LearnerConfig& config() const { return cfg_; }

 private:
  struct ProgEval {
    IncrementalRunner runner;
    uint64_t c_hi;               // largest c with code(e,c) within the cap
    std::size_t match_len = 0;   // history prefix verified against the trace
    std::size_t cmin_upto = 0;   // bits folded into c_min so far
    uint64_t c_min = 1;
    std::size_t checked_len = static_cast<std::size_t>(-1);
    bool dead = false;
    ProgEval(Program p, uint64_t c_hi_in) : runner(std::move(p)), c_hi(c_hi_in) {}
  };

  static uint64_t code_of(uint64_t e, uint64_t c) {
    const unsigned __int128 s = static_cast<unsigned __int128>(e) + c;
    const unsigned __int128 code = s * (s + 1) / 2 + c;
    return code > ~0ull ? ~0ull : static_cast<uint64_t>(code);
  }

  static constexpr int64_t kUnknown = -2;
  static constexpr int64_t kDead = -1;

  ProgEval& eval_for(uint64_t e) {
    if (e >= evals_.size()) {
      evals_.resize(e + 1);
      status_.resize(e + 1, kUnknown);
    }
    if (!evals_[e]) {
      uint64_t lo = 1, hi = 1;
      while (code_of(e, hi) <= cfg_.code_cap) hi *= 2;
      while (lo + 1 < hi) {
        const uint64_t mid = lo + (hi - lo) / 2;
        (code_of(e, mid) <= cfg_.code_cap ? lo : hi) = mid;
      }
      const uint64_t c_hi = code_of(e, lo) <= cfg_.code_cap ? lo : 0;
      evals_[e] = std::make_unique<ProgEval>(Program(index_to_program_bits(e)), c_hi);
      if (c_hi == 0) evals_[e]->dead = true;
    }
    return *evals_[e];
  }

  // Bring pe up to date with the current history: the trace must hold bits
  // 0..n (n = history length), match the history on 0..n-1, and c_min must
  // cover the budget constraint for every bit up to n. All rejections here
  // are permanent: a mismatch never un-happens, a halted or proven-silent
  // program never grows its output, and a bit that failed to appear within
  // the largest in-cap budget can never meet a smaller one.
  void refresh(ProgEval& pe) {
    const std::size_t n = history_.size();
    if (pe.dead || pe.checked_len == n) return;
    const std::size_t target = n + 1;
    const uint64_t budget =
        std::min(cfg_.trace_step_cap, sat_mul(pe.c_hi, cfg_.bound.eval(static_cast<uint64_t>(n) + 1)));
    pe.runner.extend(target, budget);
    const BitString& bits = pe.runner.bits();
    while (pe.match_len < n && pe.match_len < bits.size()) {
      if (bits.bit(pe.match_len) != history_.bit(pe.match_len)) {
        pe.dead = true;
        return;
      }
      ++pe.match_len;
    }
    if (bits.size() < target) {
      pe.dead = true;
      return;
    }
    while (pe.cmin_upto < target) {
      const uint64_t ev = cfg_.bound.eval(static_cast<uint64_t>(pe.cmin_upto) + 1);
      const uint64_t ts = pe.runner.emit_steps()[pe.cmin_upto];
      pe.c_min = std::max(pe.c_min, (ts + ev - 1) / ev);
      ++pe.cmin_upto;
    }
    pe.checked_len = n;
  }

  // Re-validate the current candidate and, if it died, resume the code scan
  // from just past it. Logs one mind change per replacement.
  void ensure_candidate() {
    if (candidate_) {
      ProgEval& pe = eval_for(candidate_->e);
      refresh(pe);
      if (!pe.dead && candidate_->c >= pe.c_min) return;
    } else if (exhausted_) {
      return;  // ruled-out permanence: nothing below the cap can revive
    }
    const std::optional<Candidate> old = candidate_;
    candidate_.reset();
    while (cursor_code_ <= cfg_.code_cap) {
      const uint64_t code = cursor_code_++;
      const uint64_t e = diag_s_ - diag_b_;
      const uint64_t c = diag_b_;
      if (diag_b_ == diag_s_) {
        ++diag_s_;
        diag_b_ = 0;
      } else {
        ++diag_b_;
      }
      if (e == 0 || c == 0) continue;
      // Fast path: a cached c_min is a lower bound even when stale (it only
      // ever grows with history), so most codes are rejected with one load.
      if (e < status_.size()) {
        const int64_t st = status_[e];
        if (st == kDead) continue;
        if (st >= 1 && c < static_cast<uint64_t>(st)) continue;
      }
      ProgEval& pe = eval_for(e);
      if (!pe.dead) refresh(pe);
      status_[e] = pe.dead ? kDead : static_cast<int64_t>(pe.c_min);
      if (pe.dead) continue;
      if (c >= pe.c_min) {
        candidate_ = Candidate{e, c, code};
        break;
      }
    }
    if (!candidate_) exhausted_ = true;
    // The very first acquisition is not a mind change; replacing or losing
    // a held candidate is.
    if (old && old != candidate_)
      mind_changes_.push_back(MindChange{static_cast<uint64_t>(history_.size()), old, candidate_});
  }

  LearnerConfig cfg_;
  BitString history_;
  std::optional<Candidate> candidate_;
  std::vector<MindChange> mind_changes_;
  std::vector<std::unique_ptr<ProgEval>> evals_;
  std::vector<int64_t> status_;  // kUnknown, kDead, or a stale-safe c_min
  uint64_t cursor_code_ = 0;
  uint64_t diag_s_ = 0;  // cursor as diagonal coordinates: code = s(s+1)/2 + b
  uint64_t diag_b_ = 0;
  bool exhausted_ = false;
};

// One-shot form: the least consistent code for a given history and the
// predicted next bit. Equivalent to feeding the history bit by bit.
inline NextValueLearner::Prediction next_value(const BitString& history, const LearnerConfig& cfg) {
  NextValueLearner learner(cfg);
  for (std::size_t i = 0; i < history.size(); ++i) learner.observe(history.bit(i));
  return learner.predict();
}

struct PredictRow {
  uint64_t round = 0;
  int played = 0;  // predicted bit, 0 when abstaining
  bool abstained = false;
  int actual = 0;
  bool correct = false;
  bool mind_change = false;
  std::optional<Candidate> candidate;
};

struct PredictTrace {
  std::vector<PredictRow> rows;
  std::optional<uint64_t> last_incorrect;  // empirical stabilization marker
  std::optional<uint64_t> stabilized_at;   // round of the last mind change
  uint64_t mind_change_count = 0;
  uint64_t abstain_count = 0;
  uint64_t correct_count = 0;
};

// Runs the predict/observe loop against a source. An abstaining round plays
// bit 0; the trace records the abstention separately.
inline PredictTrace predict_stream(SequenceSource& source, const LearnerConfig& cfg,
                                   uint64_t n_rounds) {
  NextValueLearner learner(cfg);
  PredictTrace trace;
  for (uint64_t round = 0; round < n_rounds; ++round) {
    const std::size_t changes_before = learner.mind_changes().size();
    const auto pred = learner.predict();
    PredictRow row;
    row.round = round;
    row.abstained = !pred.bit.has_value();
    row.played = pred.bit.value_or(0);
    row.candidate = pred.candidate;
    row.actual = source.bit(round);
    row.correct = (row.played == row.actual);
    learner.observe(row.actual);
    row.mind_change = learner.mind_changes().size() > changes_before;
    trace.rows.push_back(row);
    if (!row.correct) trace.last_incorrect = round;
    trace.abstain_count += row.abstained;
    trace.correct_count += row.correct;
  }
  trace.mind_change_count = learner.mind_changes().size();
  if (!learner.mind_changes().empty()) trace.stabilized_at = learner.mind_changes().back().round;
  return trace;
}

}  // namespace dovetail
