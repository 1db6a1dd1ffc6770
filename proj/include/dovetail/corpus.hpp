#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dovetail/machine.hpp"

namespace dovetail {

// Built-in chooser programs. All of them loop forever and emit an infinite
// stream; raw bits are part of the public interface so experiment configs
// can cite them exactly.
struct NamedProgram {
  std::string name;
  std::string raw_bits;
  std::string stream;  // the emitted stream, as a repeating pattern
};

inline const std::vector<NamedProgram>& builtin_corpus() {
  static const std::vector<NamedProgram> corpus = {
      // OUT0; JMP 0
      {"zeros", "000101000000", "(0)*"},
      // OUT1; JMP 0
      {"ones", "001101000000", "(1)*"},
      // OUT0; OUT1; JMP 0
      {"alt01", "000001101000000", "(01)*"},
      // OUT1; OUT0; JMP 0
      {"alt10", "001000101000000", "(10)*"},
      // OUT1; INC r1; JMP 0
      {"ones_inc", "00101001101000000", "(1)*"},
      // OUT0; DEC r3; JMP 0
      {"zeros_dec", "00001111101000000", "(0)*"},
      // OUT0; OUT1; OUT1; JMP 0
      {"period3_011", "000001001101000000", "(011)*"},
      // OUT1; OUT1; OUT0; JMP 0
      {"period3_110", "001001000101000000", "(110)*"},
      // OUT0; OUT0; OUT1; JMP 0
      {"period3_001", "000000001101000000", "(001)*"},
      // OUT1; OUT0; OUT0; JMP 0
      {"period3_100", "001000000101000000", "(100)*"},
      // NOP; OUT0; OUT1; JMP 1
      {"alt01_nop", "111000001101000001", "(01)*"},
      // OUT0; JMP 0 with a dead 4-bit tail
      {"zeros_wide", "0001010000001111", "(0)*"},
  };
  return corpus;
}

inline const NamedProgram& find_corpus_program(const std::string& name) {
  for (const auto& p : builtin_corpus())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown corpus program: " + name);
}

inline Program corpus_program(const std::string& name) {
  return Program::from_string(find_corpus_program(name).raw_bits);
}

}  // namespace dovetail
