#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dovetail/bitstring.hpp"

namespace dovetail {

// Virtual machine version tag, embedded in every artifact. Bump on any
// change to the instruction encoding or step semantics.
inline constexpr const char* kVmVersion = "cm4-v1";

// Instruction encoding, read MSB-first from the raw bit string:
//
//   000            OUT0   append 0 to the output
//   001            OUT1   append 1 to the output
//   010 rr         INC    register rr += 1
//   011 rr         DEC    register rr -= 1, saturating at 0
//   100 rr aaaaaa  JZ     if register rr == 0, pc <- a mod n_instr
//   101 aaaaaa     JMP    pc <- a mod n_instr
//   110            HALT
//   111            NOP
//
// Incomplete trailing bits are discarded. One instruction = one step.
// Falling past the last instruction halts the machine.
enum class Opcode : uint8_t { Out0, Out1, Inc, Dec, Jz, Jmp, Halt, Nop };

struct Instruction {
  Opcode op = Opcode::Nop;
  uint8_t reg = 0;     // Inc/Dec/Jz
  uint8_t target = 0;  // Jz/Jmp, raw 6-bit field before the mod
  friend bool operator==(const Instruction&, const Instruction&) = default;
};

inline std::vector<Instruction> decode(const BitString& raw) {
  std::vector<Instruction> prog;
  std::size_t i = 0;
  const std::size_t n = raw.size();
  auto take = [&](std::size_t count, uint64_t& out) {
    if (i + count > n) return false;
    out = 0;
    for (std::size_t j = 0; j < count; ++j) out = (out << 1) | static_cast<uint64_t>(raw.bit(i + j));
    i += count;
    return true;
  };
  while (true) {
    uint64_t op = 0;
    if (!take(3, op)) break;
    Instruction ins;
    uint64_t field = 0;
    switch (op) {
      case 0: ins.op = Opcode::Out0; break;
      case 1: ins.op = Opcode::Out1; break;
      case 2:
      case 3:
        if (!take(2, field)) return prog;
        ins.op = (op == 2) ? Opcode::Inc : Opcode::Dec;
        ins.reg = static_cast<uint8_t>(field);
        break;
      case 4:
        if (!take(2, field)) return prog;
        ins.reg = static_cast<uint8_t>(field);
        if (!take(6, field)) return prog;
        ins.op = Opcode::Jz;
        ins.target = static_cast<uint8_t>(field);
        break;
      case 5:
        if (!take(6, field)) return prog;
        ins.op = Opcode::Jmp;
        ins.target = static_cast<uint8_t>(field);
        break;
      case 6: ins.op = Opcode::Halt; break;
      case 7: ins.op = Opcode::Nop; break;
    }
    prog.push_back(ins);
  }
  return prog;
}

inline void encode_instruction(const Instruction& ins, BitString& out) {
  auto emit = [&](uint64_t value, int width) {
    for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<int>((value >> i) & 1ull));
  };
  switch (ins.op) {
    case Opcode::Out0: emit(0, 3); break;
    case Opcode::Out1: emit(1, 3); break;
    case Opcode::Inc: emit(2, 3); emit(ins.reg, 2); break;
    case Opcode::Dec: emit(3, 3); emit(ins.reg, 2); break;
    case Opcode::Jz: emit(4, 3); emit(ins.reg, 2); emit(ins.target, 6); break;
    case Opcode::Jmp: emit(5, 3); emit(ins.target, 6); break;
    case Opcode::Halt: emit(6, 3); break;
    case Opcode::Nop: emit(7, 3); break;
  }
}

// A program is its raw bit string; |p| always means raw bit length. The
// decoded instruction list is cached. Every raw string decodes (total).
class Program {
 public:
  Program() = default;
  explicit Program(BitString raw) : raw_(std::move(raw)), instructions_(decode(raw_)) {}
  static Program from_string(const std::string& s) { return Program(BitString::from_string(s)); }

  const BitString& raw() const { return raw_; }
  std::size_t length() const { return raw_.size(); }
  const std::vector<Instruction>& instructions() const { return instructions_; }

  friend bool operator==(const Program& a, const Program& b) { return a.raw_ == b.raw_; }

 private:
  BitString raw_;
  std::vector<Instruction> instructions_;
};

struct MachineState {
  std::size_t pc = 0;
  std::array<uint64_t, 4> registers{0, 0, 0, 0};
  BitString output;
  uint64_t steps = 0;
  bool halted = false;
};

// Executes exactly one instruction. A pc past the last instruction halts
// the machine; that detection consumes a step of its own.
inline void step(MachineState& state, const Program& program) {
  if (state.halted) throw std::logic_error("step: machine already halted");
  const auto& prog = program.instructions();
  const std::size_t n = prog.size();
  state.steps += 1;
  if (state.pc >= n) {
    state.halted = true;
    return;
  }
  const Instruction& ins = prog[state.pc];
  switch (ins.op) {
    case Opcode::Out0:
      state.output.push_back(0);
      state.pc += 1;
      break;
    case Opcode::Out1:
      state.output.push_back(1);
      state.pc += 1;
      break;
    case Opcode::Inc:
      state.registers[ins.reg] += 1;
      state.pc += 1;
      break;
    case Opcode::Dec:
      if (state.registers[ins.reg] > 0) state.registers[ins.reg] -= 1;
      state.pc += 1;
      break;
    case Opcode::Jz:
      if (state.registers[ins.reg] == 0)
        state.pc = ins.target % n;
      else
        state.pc += 1;
      break;
    case Opcode::Jmp:
      state.pc = ins.target % n;
      break;
    case Opcode::Halt:
      state.halted = true;
      break;
    case Opcode::Nop:
      state.pc += 1;
      break;
  }
}

struct RunResult {
  BitString output;
  bool halted = false;
  uint64_t steps_used = 0;
};

// U_t(p): the output after running program p for at most t steps from the
// initial state. Pure function of (p, t).
inline RunResult run_bounded(const Program& program, uint64_t t) {
  MachineState state;
  while (!state.halted && state.steps < t) step(state, program);
  return RunResult{state.output, state.halted, state.steps};
}

// ---------------------------------------------------------------------------
// Traced execution with a provable silent-loop cutoff. Used by the search
// engines; behavior-equivalence with plain stepping is covered by tests.

enum class TraceFate : uint8_t {
  EmittedNeeded,   // produced the requested number of bits
  Halted,          // halted before producing them
  ProvenSilent,    // entered a cycle that can never emit again
  BudgetExhausted  // ran max_steps without any of the above
};

struct TraceResult {
  BitString bits;                   // emitted bits, up to needed_bits
  std::vector<uint64_t> emit_step;  // step count at which each bit appeared
  TraceFate fate = TraceFate::BudgetExhausted;
  uint64_t steps = 0;
};

namespace detail {

// Only JZ reads registers, so machine behavior (pc trajectory and output)
// is a deterministic function of pc plus the registers some JZ mentions.
// If that projected state repeats with no output in between, the machine
// can never emit again.
inline uint8_t jz_register_mask(const Program& program) {
  uint8_t mask = 0;
  for (const auto& ins : program.instructions())
    if (ins.op == Opcode::Jz) mask |= static_cast<uint8_t>(1u << ins.reg);
  return mask;
}

struct ProjectedState {
  std::size_t pc = 0;
  std::array<uint64_t, 4> regs{0, 0, 0, 0};
  std::size_t out_len = 0;
  friend bool operator==(const ProjectedState&, const ProjectedState&) = default;
};

inline ProjectedState project(const MachineState& s, uint8_t mask) {
  ProjectedState p;
  p.pc = s.pc;
  for (int r = 0; r < 4; ++r)
    if (mask & (1u << r)) p.regs[static_cast<std::size_t>(r)] = s.registers[static_cast<std::size_t>(r)];
  p.out_len = s.output.size();
  return p;
}

}  // namespace detail

// Resumable execution that records the step stamp of every emitted bit and
// runs Brent-style cycle detection on the projected state. Behavior matches
// plain stepping exactly; the silent-loop proof only ever cuts runs short
// when no further output is possible.
class IncrementalRunner {
 public:
  explicit IncrementalRunner(Program program)
      : program_(std::move(program)), mask_(detail::jz_register_mask(program_)) {
    saved_ = detail::project(state_, mask_);
  }

  // Advance until bits() has target_bits, the machine halts or is proven
  // silent, or total steps reach max_total_steps.
  void extend(std::size_t target_bits, uint64_t max_total_steps) {
    while (!silent_ && !state_.halted && state_.output.size() < target_bits &&
           state_.steps < max_total_steps) {
      const std::size_t before = state_.output.size();
      step(state_, program_);
      if (state_.output.size() > before) emit_steps_.push_back(state_.steps);

      detail::ProjectedState cur = detail::project(state_, mask_);
      if (cur == saved_ && !state_.halted) {
        silent_ = true;
        break;
      }
      if (++since_save_ == limit_) {
        saved_ = cur;
        since_save_ = 0;
        limit_ *= 2;
      }
    }
  }

  const Program& program() const { return program_; }
  const BitString& bits() const { return state_.output; }
  const std::vector<uint64_t>& emit_steps() const { return emit_steps_; }
  bool halted() const { return state_.halted; }
  bool proven_silent() const { return silent_; }
  uint64_t steps() const { return state_.steps; }

 private:
  Program program_;
  MachineState state_;
  uint8_t mask_;
  std::vector<uint64_t> emit_steps_;
  detail::ProjectedState saved_;
  uint64_t since_save_ = 0;
  uint64_t limit_ = 1;
  bool silent_ = false;
};

// One-shot convenience over IncrementalRunner.
inline TraceResult run_traced(const Program& program, std::size_t needed_bits, uint64_t max_steps) {
  IncrementalRunner runner(program);
  runner.extend(needed_bits, max_steps);
  TraceResult res;
  res.bits = runner.bits();
  res.emit_step = runner.emit_steps();
  res.steps = runner.steps();
  if (res.bits.size() >= needed_bits)
    res.fate = TraceFate::EmittedNeeded;
  else if (runner.halted())
    res.fate = TraceFate::Halted;
  else if (runner.proven_silent())
    res.fate = TraceFate::ProvenSilent;
  else
    res.fate = TraceFate::BudgetExhausted;
  return res;
}

// ---------------------------------------------------------------------------

// Returns a program longer by `extra` bits whose output stream is identical
// to `program` at every step budget. Dead trailing bits (an incomplete final
// instruction) are dropped and their length folded into the padding; jump
// fields are renormalized to their effective targets so the larger
// instruction count cannot re-route them; the first padding instruction is
// HALT, which reproduces the fall-off-the-end halt if execution ever reaches
// it and is unreachable otherwise.
inline Program pad_preserving(const Program& program, std::size_t extra) {
  const std::size_t n = program.instructions().size();
  BitString out;
  for (Instruction ins : program.instructions()) {
    if ((ins.op == Opcode::Jz || ins.op == Opcode::Jmp) && n > 0)
      ins.target = static_cast<uint8_t>(ins.target % n);
    encode_instruction(ins, out);
  }
  const std::size_t total = program.length() + extra;
  if (out.size() + 3 <= total) encode_instruction(Instruction{Opcode::Halt, 0, 0}, out);
  while (out.size() + 3 <= total) encode_instruction(Instruction{Opcode::Nop, 0, 0}, out);
  while (out.size() < total) out.push_back(1);  // dead tail, never decoded
  return Program(out);
}

}  // namespace dovetail
