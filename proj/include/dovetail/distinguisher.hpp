#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dovetail/bitstring.hpp"
#include "dovetail/machine.hpp"
#include "dovetail/sources.hpp"

namespace dovetail {

struct DistinguishConfig {
  unsigned k = 4;                    // prefix multiplier; every program of length l is
                                     // tested against the first k*l bits
  double q = 0.0;                    // tolerated flip fraction, 0 = exact matching
  uint64_t stage_cap = 1'000'000;    // desk-scale cap on the dovetail stage
  std::size_t min_program_length = 1;

  void validate() const {
    if (k < 2) throw std::domain_error("DistinguishConfig: k must be >= 2");
    if (q < 0.0 || q >= 0.5) throw std::domain_error("DistinguishConfig: q must be in [0, 1/2)");
  }
};

enum class Answer { X, Z, CapExhausted };

inline std::string answer_name(Answer a) {
  switch (a) {
    case Answer::X: return "X";
    case Answer::Z: return "Z";
    default: return "cap-exhausted";
  }
}

struct Verdict {
  Answer answer = Answer::CapExhausted;
  std::optional<Program> matching_program;
  uint64_t stage = 0;            // dovetail stage t at which the match fired
  std::size_t prefix_len = 0;    // k * |p| of the matching program
  std::size_t bits_consumed_x = 0;
  std::size_t bits_consumed_z = 0;

  friend bool operator==(const Verdict& a, const Verdict& b) {
    return a.answer == b.answer && a.matching_program == b.matching_program &&
           a.stage == b.stage && a.prefix_len == b.prefix_len &&
           a.bits_consumed_x == b.bits_consumed_x && a.bits_consumed_z == b.bits_consumed_z;
  }
};

// P_error <= 2^-(k-1) / (1 - 2^-(k-1)), the geometric sum over program
// lengths of 2^l / 2^(kl).
inline double error_bound(unsigned k) {
  if (k < 2) throw std::domain_error("error_bound: k must be >= 2");
  const double r = std::exp2(-(static_cast<double>(k) - 1.0));
  return r / (1.0 - r);
}

// Noise-tolerant bound: geometric sum with per-length ratio
//   ratio = 2^(1+qk-k) * (e/q)^(qk).
// When the ratio reaches 1 the sum diverges and the bound is meaningless.
struct NoisyBound {
  bool divergent = false;
  double value = 0.0;  // +inf when divergent
  double ratio = 0.0;  // the per-length geometric ratio
};

inline double noisy_bound_log2_ratio(unsigned k, double q) {
  const double kk = static_cast<double>(k);
  return 1.0 + q * kk - kk + q * kk * std::log2(M_E / q);
}

inline NoisyBound noisy_error_bound(unsigned k, double q) {
  if (q <= 0.0 || q >= 0.5) throw std::domain_error("noisy_error_bound: q must be in (0, 1/2)");
  const double log2r = noisy_bound_log2_ratio(k, q);
  const double ratio = std::exp2(log2r);
  if (log2r >= 0.0) return NoisyBound{true, std::numeric_limits<double>::infinity(), ratio};
  return NoisyBound{false, ratio / (1.0 - ratio), ratio};
}

// Diagnostic: the pre-summation term for programs of length l.
inline double noisy_per_length_term(unsigned k, double q, unsigned l) {
  return std::exp2(noisy_bound_log2_ratio(k, q) * static_cast<double>(l));
}

// The bound decays to zero in k iff the k-asymptotic ratio base
// 2^(q-1) * (e/q)^q is below 1.
inline bool noisy_bound_decays(double q) {
  return (q - 1.0) + q * std::log2(M_E / q) < 0.0;
}

// Largest q on a grid for which the noisy bound still tends to zero in k.
inline double noisy_decay_threshold(double grid_step = 0.005) {
  double best = 0.0;
  for (double q = grid_step; q < 0.5; q += grid_step)
    if (noisy_bound_decays(q)) best = q;
  return best;
}

namespace detail {

// Match rule: with q = 0 the sealed prefix must equal the sequence prefix
// exactly; otherwise its Hamming distance must be strictly below q*k*|p|.
inline bool prefix_matches(const BitString& sealed, SequenceSource& seq, double q) {
  const std::size_t need = sealed.size();
  if (q == 0.0) {
    for (std::size_t i = 0; i < need; ++i)
      if (sealed.bit(i) != seq.bit(i)) return false;
    return true;
  }
  const double threshold = q * static_cast<double>(need);
  double d = 0.0;
  for (std::size_t i = 0; i < need; ++i) {
    d += static_cast<double>(sealed.bit(i) != seq.bit(i));
    if (d >= threshold) return false;
  }
  return d < threshold;
}

inline std::size_t program_length_of_index(uint64_t n) {
  return static_cast<std::size_t>(std::bit_width(n + 1) - 1);
}

}  // namespace detail

// Dovetail search over (program, stage) pairs. The literal algorithm runs
// every program index p <= t for t steps at stage t and fires on the first
// (t, p, X-before-Z) match. This engine computes the same verdict from each
// program's sealed prefix: once a program has emitted its first k*|p| bits
// (or halted, or provably never will), nothing about its match can change,
// so the first match fires at stage max(p, steps-to-seal). Seals are
// independent of the sequences and are cached across runs.
class DovetailSearch {
 public:
  DovetailSearch(unsigned k, uint64_t stage_cap, std::size_t min_program_length = 1)
      : k_(k), stage_cap_(stage_cap), min_len_(min_program_length) {
    if (k < 2) throw std::domain_error("DovetailSearch: k must be >= 2");
  }

  Verdict run(SequenceSource& x, SequenceSource& z, double q) {
    struct Event {
      uint64_t fire;
      uint64_t index;
      std::size_t need;
      bool match_x;
      bool match_z;
    };
    std::vector<Event> events;
    std::optional<Event> best;

    for (uint64_t n = 1; n <= stage_cap_; ++n) {
      if (best && n > best->fire) break;
      if (detail::program_length_of_index(n) < min_len_) continue;
      const Seal& seal = seal_for(n);
      if (!seal.ready) continue;
      const uint64_t fire = std::max(n, seal.ready_at);
      if (fire > stage_cap_) continue;

      Event ev{fire, n, seal.prefix.size(), false, false};
      ev.match_x = detail::prefix_matches(seal.prefix, x, q);
      if (!ev.match_x) ev.match_z = detail::prefix_matches(seal.prefix, z, q);
      events.push_back(ev);
      if ((ev.match_x || ev.match_z) &&
          (!best || fire < best->fire || (fire == best->fire && n < best->index))) {
        best = ev;
      }
    }

    Verdict v;
    if (best) {
      v.answer = best->match_x ? Answer::X : Answer::Z;
      v.matching_program = Program(index_to_program_bits(best->index));
      v.stage = best->fire;
      v.prefix_len = best->need;
    } else {
      v.answer = Answer::CapExhausted;
      v.stage = stage_cap_;
    }
    // Replays the literal algorithm's consumption: a program's prefix is
    // compared iff its first possible stage precedes the winning match.
    for (const Event& ev : events) {
      const bool before_winner =
          !best || ev.fire < best->fire || (ev.fire == best->fire && ev.index < best->index);
      if (before_winner) {
        v.bits_consumed_x = std::max(v.bits_consumed_x, ev.need);
        v.bits_consumed_z = std::max(v.bits_consumed_z, ev.need);
      }
    }
    if (best) {
      v.bits_consumed_x = std::max(v.bits_consumed_x, best->need);
      if (!best->match_x) v.bits_consumed_z = std::max(v.bits_consumed_z, best->need);
    }
    return v;
  }

  unsigned k() const { return k_; }
  uint64_t stage_cap() const { return stage_cap_; }

 private:
  struct Seal {
    bool computed = false;
    bool ready = false;     // emitted k*|p| bits within the stage cap
    uint64_t ready_at = 0;  // step at which the last needed bit appeared
    BitString prefix;       // the first k*|p| bits
  };

  const Seal& seal_for(uint64_t n) {
    if (n >= seals_.size()) seals_.resize(n + 1);
    Seal& s = seals_[n];
    if (s.computed) return s;
    const Program prog(index_to_program_bits(n));
    const std::size_t need = k_ * prog.length();
    TraceResult tr = run_traced(prog, need, stage_cap_);
    if (tr.fate == TraceFate::EmittedNeeded) {
      s.ready = true;
      s.ready_at = tr.emit_step[need - 1];
      s.prefix = tr.bits.prefix(need);
    }
    s.computed = true;
    return s;
  }

  unsigned k_;
  uint64_t stage_cap_;
  std::size_t min_len_;
  std::vector<Seal> seals_;
};

// Noiseless protocol: requires the exact-match configuration.
inline Verdict distinguish(SequenceSource& x, SequenceSource& z, const DistinguishConfig& cfg) {
  cfg.validate();
  if (cfg.q != 0.0) throw std::invalid_argument("distinguish: q must be 0 (use distinguish_noisy)");
  DovetailSearch search(cfg.k, cfg.stage_cap, cfg.min_program_length);
  return search.run(x, z, 0.0);
}

// Noise-tolerant protocol; with q = 0 it is bit-identical to distinguish.
inline Verdict distinguish_noisy(SequenceSource& x, SequenceSource& z, const DistinguishConfig& cfg) {
  cfg.validate();
  DovetailSearch search(cfg.k, cfg.stage_cap, cfg.min_program_length);
  return search.run(x, z, cfg.q);
}

// Literal stage-by-stage dovetail, kept as the reference the engine is
// checked against. Quadratic in the firing stage; test-scale inputs only.
inline Verdict distinguish_reference(SequenceSource& x, SequenceSource& z,
                                     const DistinguishConfig& cfg) {
  cfg.validate();
  std::vector<MachineState> states;
  std::vector<Program> programs;
  Verdict v;

  for (uint64_t t = 0; t <= cfg.stage_cap; ++t) {
    for (uint64_t p = 0; p <= t; ++p) {
      if (detail::program_length_of_index(p) < cfg.min_program_length) continue;
      if (p >= programs.size()) {
        programs.resize(p + 1);
        states.resize(p + 1);
        programs[p] = Program(index_to_program_bits(p));
      }
      MachineState& st = states[p];
      while (!st.halted && st.steps < t) step(st, programs[p]);
      const std::size_t need = cfg.k * programs[p].length();
      if (st.output.size() < need) continue;
      const BitString sealed = st.output.prefix(need);
      v.bits_consumed_x = std::max(v.bits_consumed_x, need);
      if (detail::prefix_matches(sealed, x, cfg.q)) {
        v.answer = Answer::X;
        v.matching_program = programs[p];
        v.stage = t;
        v.prefix_len = need;
        return v;
      }
      v.bits_consumed_z = std::max(v.bits_consumed_z, need);
      if (detail::prefix_matches(sealed, z, cfg.q)) {
        v.answer = Answer::Z;
        v.matching_program = programs[p];
        v.stage = t;
        v.prefix_len = need;
        return v;
      }
    }
  }
  v.answer = Answer::CapExhausted;
  v.stage = cfg.stage_cap;
  return v;
}

}  // namespace dovetail
