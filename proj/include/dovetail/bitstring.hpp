#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dovetail {

// A finite string over {0,1}. Text form everywhere (CSV, JSON, logs) is
// ASCII '0'/'1' with the first-emitted bit leftmost.
class BitString {
 public:
  BitString() = default;

  static BitString from_string(const std::string& s) {
    BitString out;
    out.bits_.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw std::invalid_argument("BitString: expected '0' or '1'");
      out.bits_.push_back(static_cast<uint8_t>(c - '0'));
    }
    return out;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (uint8_t b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }

  int bit(std::size_t i) const {
    if (i >= bits_.size()) throw std::out_of_range("BitString: index past end");
    return bits_[i];
  }

  void push_back(int b) { bits_.push_back(static_cast<uint8_t>(b & 1)); }

  BitString prefix(std::size_t n) const {
    if (n > bits_.size()) throw std::out_of_range("BitString: prefix longer than string");
    BitString out;
    out.bits_.assign(bits_.begin(), bits_.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }

  bool is_prefix_of(const BitString& other) const {
    if (bits_.size() > other.bits_.size()) return false;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i] != other.bits_[i]) return false;
    return true;
  }

  friend bool operator==(const BitString& a, const BitString& b) = default;

 private:
  std::vector<uint8_t> bits_;
};

// Number of positions where equal-length strings differ.
inline std::size_t hamming_distance(const BitString& x, const BitString& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < x.size(); ++i) d += static_cast<std::size_t>(x.bit(i) != y.bit(i));
  return d;
}

// Cantor pairing, right argument in the linear term:
//   code = (a+b)(a+b+1)/2 + b
struct PairCode {
  uint64_t left = 0;
  uint64_t right = 0;
  uint64_t code = 0;
};

inline uint64_t cantor_pair(uint64_t a, uint64_t b) {
  unsigned __int128 s = static_cast<unsigned __int128>(a) + b;
  unsigned __int128 code = s * (s + 1) / 2 + b;
  if (code > ~0ull) throw std::overflow_error("cantor_pair: code exceeds 64 bits");
  return static_cast<uint64_t>(code);
}

inline std::pair<uint64_t, uint64_t> cantor_unpair(uint64_t code) {
  // Largest s with s(s+1)/2 <= code.
  uint64_t s = static_cast<uint64_t>((std::sqrt(8.0 * static_cast<double>(code) + 1.0) - 1.0) / 2.0);
  auto tri = [](unsigned __int128 v) { return v * (v + 1) / 2; };
  while (tri(s + 1) <= code) ++s;
  while (tri(s) > code) --s;
  uint64_t b = code - static_cast<uint64_t>(tri(s));
  uint64_t a = s - b;
  return {a, b};
}

inline PairCode make_pair_code(uint64_t a, uint64_t b) {
  return PairCode{a, b, cantor_pair(a, b)};
}

// Length-then-lexicographic bijection between naturals and finite bit
// strings: 0 -> eps, 1 -> "0", 2 -> "1", 3 -> "00", ... Strings of length L
// occupy indexes [2^L - 1, 2^(L+1) - 2].
inline BitString index_to_program_bits(uint64_t n) {
  const int len = std::bit_width(n + 1) - 1;
  const uint64_t offset = (n + 1) - (1ull << len);
  BitString out;
  for (int i = len - 1; i >= 0; --i) out.push_back(static_cast<int>((offset >> i) & 1ull));
  return out;
}

inline uint64_t program_bits_to_index(const BitString& s) {
  if (s.size() >= 64) throw std::overflow_error("program_bits_to_index: string too long");
  uint64_t value = 0;
  for (std::size_t i = 0; i < s.size(); ++i) value = (value << 1) | static_cast<uint64_t>(s.bit(i));
  return ((1ull << s.size()) - 1) + value;
}

}  // namespace dovetail
