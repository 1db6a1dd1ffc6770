#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "dovetail/bitstring.hpp"
#include "dovetail/distinguisher.hpp"
#include "dovetail/rng.hpp"
#include "dovetail/sources.hpp"

namespace dovetail {

// The four pure states in play. Bit 0 encodes as Z0 or Xplus, bit 1 as Z1
// or Xminus, depending on the preparation basis.
enum class PureState { Z0, Z1, Xplus, Xminus };
enum class Basis { Z, X };

inline std::string basis_name(Basis b) { return b == Basis::Z ? "Z" : "X"; }

inline PureState encode(int bit, Basis basis) {
  if (basis == Basis::Z) return bit ? PureState::Z1 : PureState::Z0;
  return bit ? PureState::Xminus : PureState::Xplus;
}

// Projective measurement. The four states and two bases admit an exact
// lookup Born rule: matched basis returns the encoded bit, mismatched basis
// is a fair coin.
inline int measure(PureState state, Basis basis, SplitMix64& rng) {
  switch (state) {
    case PureState::Z0: return basis == Basis::Z ? 0 : rng.next_bit();
    case PureState::Z1: return basis == Basis::Z ? 1 : rng.next_bit();
    case PureState::Xplus: return basis == Basis::X ? 0 : rng.next_bit();
    case PureState::Xminus: return basis == Basis::X ? 1 : rng.next_bit();
  }
  return 0;
}

inline int apply_flip(int bit, double rate, SplitMix64& rng) {
  return rng.bernoulli(rate) ? 1 - bit : bit;
}

// Alice's preparation black box: qubit i carries the chooser's bit i in the
// hidden basis. Classical flip noise at rate r is applied to every recorded
// measurement downstream (a flipped coin is still a coin, so flipping the
// wrong-basis records too changes nothing).
class MixingBox {
 public:
  MixingBox(Basis basis, std::unique_ptr<SequenceSource> chooser, double flip_rate = 0.0)
      : basis_(basis), chooser_(std::move(chooser)), flip_rate_(flip_rate) {
    if (flip_rate < 0.0 || flip_rate >= 0.5)
      throw std::invalid_argument("MixingBox: flip rate must be in [0, 1/2)");
  }

  PureState emit_qubit() {
    const int bit = chooser_->bit(emitted_);
    ++emitted_;
    return encode(bit, basis_);
  }

  Basis basis() const { return basis_; }
  double flip_rate() const { return flip_rate_; }
  std::size_t emitted() const { return emitted_; }
  const SequenceSource& chooser() const { return *chooser_; }

 private:
  Basis basis_;
  std::unique_ptr<SequenceSource> chooser_;
  double flip_rate_;
  std::size_t emitted_ = 0;
};

struct AlternatingRecords {
  BitString x_seq;  // odd positions (1st, 3rd, ...), measured in the X basis
  BitString z_seq;  // even positions, measured in the Z basis
};

// Measures n qubits from the box, alternating bases by position. Per qubit
// the rng is drawn once for a mismatched-basis outcome and once for the
// noise flip, in that order.
inline AlternatingRecords alternating_measure(MixingBox& box, std::size_t n, SplitMix64& rng) {
  AlternatingRecords rec;
  for (std::size_t j = 0; j < n; ++j) {
    const Basis basis = (j % 2 == 0) ? Basis::X : Basis::Z;
    int bit = measure(box.emit_qubit(), basis, rng);
    bit = apply_flip(bit, box.flip_rate(), rng);
    (basis == Basis::X ? rec.x_seq : rec.z_seq).push_back(bit);
  }
  return rec;
}

// Lazily extendable version of the alternating measurement, shared by the
// two record views the distinguisher consumes.
class MeasurementFeed {
 public:
  MeasurementFeed(MixingBox box, SplitMix64 rng) : box_(std::move(box)), rng_(rng) {}

  int record_bit(Basis which, std::size_t i) {
    BitString& rec = which == Basis::X ? xs_ : zs_;
    while (rec.size() <= i) advance();
    return rec.bit(i);
  }

  std::size_t qubits_consumed() const { return box_.emitted(); }
  Basis box_basis() const { return box_.basis(); }

 private:
  void advance() {
    const std::size_t j = box_.emitted();
    const Basis basis = (j % 2 == 0) ? Basis::X : Basis::Z;
    int bit = measure(box_.emit_qubit(), basis, rng_);
    bit = apply_flip(bit, box_.flip_rate(), rng_);
    (basis == Basis::X ? xs_ : zs_).push_back(bit);
  }

  MixingBox box_;
  SplitMix64 rng_;
  BitString xs_, zs_;
};

class MeasurementRecordSource final : public SequenceSource {
 public:
  MeasurementRecordSource(std::shared_ptr<MeasurementFeed> feed, Basis which)
      : feed_(std::move(feed)), which_(which) {}
  std::string describe() const override { return "measurement:" + basis_name(which_); }

 protected:
  int generate_next() override { return feed_->record_bit(which_, bits_emitted()); }

 private:
  std::shared_ptr<MeasurementFeed> feed_;
  Basis which_;
};

struct MixtureResult {
  Verdict verdict;
  Basis basis_truth;
  bool correct = false;  // verdict named the record measured in the box basis
  std::size_t qubits_consumed = 0;
};

// Full preparation-measurement-distinguish pipeline: qubits are measured in
// alternating bases only as the search consumes record bits.
inline MixtureResult run_mixture_experiment(MixingBox box, const DistinguishConfig& cfg,
                                            SplitMix64 rng) {
  cfg.validate();
  auto feed = std::make_shared<MeasurementFeed>(std::move(box), rng);
  MeasurementRecordSource x(feed, Basis::X);
  MeasurementRecordSource z(feed, Basis::Z);
  MixtureResult res;
  res.basis_truth = feed->box_basis();
  res.verdict = distinguish_noisy(x, z, cfg);
  const Answer want = res.basis_truth == Basis::X ? Answer::X : Answer::Z;
  res.correct = res.verdict.answer == want;
  res.qubits_consumed = feed->qubits_consumed();
  return res;
}

namespace detail {

// Every qubit of the box measured in the Z basis.
class ZOnlySource final : public SequenceSource {
 public:
  ZOnlySource(MixingBox box, SplitMix64 rng) : box_(std::move(box)), rng_(rng) {}
  std::string describe() const override { return "measurement:Z-only"; }
  std::size_t qubits_consumed() const { return box_.emitted(); }

 protected:
  int generate_next() override {
    int bit = measure(box_.emit_qubit(), Basis::Z, rng_);
    return apply_flip(bit, box_.flip_rate(), rng_);
  }

 private:
  MixingBox box_;
  SplitMix64 rng_;
};

}  // namespace detail

struct ImproperProperResult {
  Verdict verdict;
  bool promise_held = false;  // proper box really was a Z-basis computable mixture
  bool correct = false;       // promise held and the proper side was named
};

// Proper computable mixture vs an improper mixture (modelled by its
// measurement statistics: a fair coin). Both sides are measured entirely in
// the Z basis; the proper record goes in as X, the improper as Z, so the
// expected answer is X.
inline ImproperProperResult improper_vs_proper_experiment(MixingBox proper,
                                                          std::unique_ptr<SequenceSource> improper,
                                                          const DistinguishConfig& cfg,
                                                          SplitMix64 rng) {
  cfg.validate();
  ImproperProperResult res;
  res.promise_held = proper.basis() == Basis::Z;
  detail::ZOnlySource proper_record(std::move(proper), rng);
  res.verdict = distinguish_noisy(proper_record, *improper, cfg);
  res.correct = res.promise_held && res.verdict.answer == Answer::X;
  return res;
}

}  // namespace dovetail
