#ifndef GUARD_HW_SYMEXEC_HPP
#define GUARD_HW_SYMEXEC_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "guard/hw/isa.hpp"
#include "guard/smt/term.hpp"

namespace guard::hw {

inline constexpr unsigned xlen = 32;
inline constexpr const char *memory_name = "mem";

struct MemoryRegion {
  uint32_t base;
  uint32_t size; // bytes, a positive multiple of 4

  uint32_t last_word() const { return base + size - 4; }
};

struct MemObligation {
  std::string label;
  smt::Term condition;
  int line;
};

struct MachineState {
  std::array<smt::Term, 32> regs;
  smt::Term mem;
  std::vector<MemObligation> obligations;
  bool trap = false;
  std::optional<int> trap_line;
  std::string trap_mnemonic;
};

inline smt::Term word(uint32_t v) { return smt::bv_lit(v, xlen); }

inline smt::Term initial_reg(unsigned r)
{
  return r == 0 ? word(0) : smt::var(reg_name(r), smt::Sort::bitvec(xlen));
}

inline smt::Term initial_memory() { return smt::var(memory_name, smt::Sort::array(xlen, xlen)); }

inline MachineState initial_state()
{
  MachineState s;
  for (unsigned r = 0; r < 32; ++r)
    s.regs[r] = initial_reg(r);
  s.mem = initial_memory();
  return s;
}

inline std::string hex32(uint32_t v)
{
  static const char *digits = "0123456789abcdef";
  std::string out = "0x";
  for (int i = 7; i >= 0; --i)
    out += digits[(v >> (4 * i)) & 0xf];
  return out;
}

namespace detail {

inline smt::Term slt01(smt::Term cond) { return smt::ite(std::move(cond), word(1), word(0)); }

inline smt::Term imm_word(int64_t imm) { return word(static_cast<uint32_t>(imm)); }

// Memory obligations for an access at `addr`.
inline void access_checks(MachineState &s, const Instruction &in, const smt::Term &addr,
                          const std::optional<MemoryRegion> &region)
{
  std::string where = std::string(mnemonic(in.op)) + "@line " + std::to_string(in.line);
  s.obligations.push_back(
    {where + ": aligned", smt::eq(smt::bv_and(addr, word(3)), word(0)), in.line});
  if (region) {
    // base <= addr <= base + size - 4, so addr + 4 cannot wrap.
    s.obligations.push_back(
      {where + ": within [" + hex32(region->base) + ", "
         + hex32(region->base + region->size) + ")",
       smt::and_(smt::bv_ule(word(region->base), addr), smt::bv_ule(addr, word(region->last_word()))),
       in.line});
  }
}

} // namespace detail

inline void step(MachineState &s, const Instruction &in, const std::optional<MemoryRegion> &region)
{
  using namespace smt;
  const Term &a = s.regs[in.rs1];
  const Term &b = s.regs[in.rs2];
  Term imm = detail::imm_word(in.imm);
  Term shamt = bv_and(b, word(31));
  Term result;
  switch (in.op) {
  case Op::Add: result = bv_add(a, b); break;
  case Op::Sub: result = bv_sub(a, b); break;
  case Op::And: result = bv_and(a, b); break;
  case Op::Or: result = bv_or(a, b); break;
  case Op::Xor: result = bv_xor(a, b); break;
  case Op::Sll: result = bv_shl(a, shamt); break;
  case Op::Srl: result = bv_lshr(a, shamt); break;
  case Op::Sra: result = bv_ashr(a, shamt); break;
  case Op::Slt: result = detail::slt01(bv_slt(a, b)); break;
  case Op::Sltu: result = detail::slt01(bv_ult(a, b)); break;
  case Op::Addi: result = in.imm == 0 ? a : bv_add(a, imm); break;
  case Op::Andi: result = bv_and(a, imm); break;
  case Op::Ori: result = bv_or(a, imm); break;
  case Op::Xori: result = bv_xor(a, imm); break;
  case Op::Slli: result = bv_shl(a, imm); break;
  case Op::Srli: result = bv_lshr(a, imm); break;
  case Op::Srai: result = bv_ashr(a, imm); break;
  case Op::Slti: result = detail::slt01(bv_slt(a, imm)); break;
  case Op::Sltiu: result = detail::slt01(bv_ult(a, imm)); break;
  case Op::Lui: result = word(static_cast<uint32_t>(in.imm) << 12); break;
  case Op::Lw: {
    Term addr = bv_add(a, imm);
    detail::access_checks(s, in, addr, region);
    result = select(s.mem, addr);
    break;
  }
  case Op::Sw: {
    Term addr = bv_add(a, imm);
    detail::access_checks(s, in, addr, region);
    s.mem = store(s.mem, addr, b);
    return;
  }
  case Op::Ecall:
  case Op::Ebreak:
    s.trap = true;
    s.trap_line = in.line;
    s.trap_mnemonic = mnemonic(in.op);
    return;
  }
  if (in.rd != 0)
    s.regs[in.rd] = result;
}

// Runs the program from `start` until the end or the first ecall/ebreak.
inline MachineState symexec(const Program &program,
                            const std::optional<MemoryRegion> &region = std::nullopt,
                            MachineState start = initial_state())
{
  MachineState s = std::move(start);
  for (auto &in : program) {
    if (s.trap)
      break;
    step(s, in, region);
  }
  return s;
}

} // namespace guard::hw

#endif // GUARD_HW_SYMEXEC_HPP
