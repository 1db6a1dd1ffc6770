#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "dovetail/bitstring.hpp"
#include "dovetail/machine.hpp"
#include "dovetail/rng.hpp"

namespace dovetail {

// A lazily evaluated infinite bit sequence. Bits are cached once emitted, so
// a source never rewrites history and two sources built from the same
// initial state replay identically.
class SequenceSource {
 public:
  virtual ~SequenceSource() = default;

  int bit(std::size_t i) {
    ensure(i + 1);
    return history_.bit(i);
  }

  BitString prefix(std::size_t n) {
    ensure(n);
    return history_.prefix(n);
  }

  std::size_t bits_emitted() const { return history_.size(); }

  virtual std::string describe() const = 0;

 protected:
  // Append exactly one bit to sink.
  virtual int generate_next() = 0;

 private:
  void ensure(std::size_t n) {
    while (history_.size() < n) history_.push_back(generate_next());
  }

  BitString history_;
};

// Fair-coin stand-in: one SplitMix64 draw per bit.
class CoinSource final : public SequenceSource {
 public:
  explicit CoinSource(uint64_t seed) : seed_(seed), rng_(seed) {}
  std::string describe() const override { return "coin:" + std::to_string(seed_); }

 protected:
  int generate_next() override { return rng_.next_bit(); }

 private:
  uint64_t seed_;
  SplitMix64 rng_;
};

// The output stream of a program run on the machine. The program must emit
// forever; requesting a bit past a halt or a proven-silent loop throws.
class ProgramSource final : public SequenceSource {
 public:
  explicit ProgramSource(Program program) : program_(std::move(program)) {}
  std::string describe() const override { return "program:" + program_.raw().to_string(); }
  const Program& program() const { return program_; }

 protected:
  int generate_next() override {
    const std::size_t want = state_.output.size() + 1;
    while (state_.output.size() < want) {
      if (state_.halted)
        throw std::runtime_error("ProgramSource: program halted after " +
                                 std::to_string(state_.output.size()) + " bits");
      step(state_, program_);
    }
    return state_.output.bit(want - 1);
  }

 private:
  Program program_;
  MachineState state_;
};

// Applies independent bit flips at rate r on top of another source.
class NoisySource final : public SequenceSource {
 public:
  NoisySource(std::unique_ptr<SequenceSource> inner, double flip_rate, uint64_t seed)
      : inner_(std::move(inner)), flip_rate_(flip_rate), seed_(seed), rng_(seed) {
    if (flip_rate < 0.0 || flip_rate >= 0.5)
      throw std::invalid_argument("NoisySource: flip rate must be in [0, 1/2)");
  }

  std::string describe() const override {
    return "noisy(r=" + std::to_string(flip_rate_) + ",seed=" + std::to_string(seed_) + "):" +
           inner_->describe();
  }

 protected:
  int generate_next() override {
    const int b = inner_->bit(bits_emitted());
    return rng_.bernoulli(flip_rate_) ? (1 - b) : b;
  }

 private:
  std::unique_ptr<SequenceSource> inner_;
  double flip_rate_;
  uint64_t seed_;
  SplitMix64 rng_;
};

}  // namespace dovetail
