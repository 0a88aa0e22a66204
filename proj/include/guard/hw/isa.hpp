#ifndef GUARD_HW_ISA_HPP
#define GUARD_HW_ISA_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "guard/error.hpp"

namespace guard::hw {

enum class Op {
  Add, Sub, And, Or, Xor, Sll, Srl, Sra, Slt, Sltu,
  Addi, Andi, Ori, Xori, Slli, Srli, Srai, Slti, Sltiu,
  Lui, Lw, Sw, Ecall, Ebreak,
};

enum class Format { R, I, Shift, U, Load, Store, System };

struct OpInfo {
  Op op;
  const char *name;
  Format format;
};

inline constexpr std::array<OpInfo, 24> op_table = {{
  {Op::Add, "add", Format::R},       {Op::Sub, "sub", Format::R},
  {Op::And, "and", Format::R},       {Op::Or, "or", Format::R},
  {Op::Xor, "xor", Format::R},       {Op::Sll, "sll", Format::R},
  {Op::Srl, "srl", Format::R},       {Op::Sra, "sra", Format::R},
  {Op::Slt, "slt", Format::R},       {Op::Sltu, "sltu", Format::R},
  {Op::Addi, "addi", Format::I},     {Op::Andi, "andi", Format::I},
  {Op::Ori, "ori", Format::I},       {Op::Xori, "xori", Format::I},
  {Op::Slli, "slli", Format::Shift}, {Op::Srli, "srli", Format::Shift},
  {Op::Srai, "srai", Format::Shift}, {Op::Slti, "slti", Format::I},
  {Op::Sltiu, "sltiu", Format::I},   {Op::Lui, "lui", Format::U},
  {Op::Lw, "lw", Format::Load},      {Op::Sw, "sw", Format::Store},
  {Op::Ecall, "ecall", Format::System}, {Op::Ebreak, "ebreak", Format::System},
}};

inline const OpInfo &info(Op op)
{
  for (auto &i : op_table)
    if (i.op == op)
      return i;
  throw Error("unknown opcode");
}

inline const char *mnemonic(Op op) { return info(op).name; }

inline constexpr std::array<const char *, 32> abi_names = {
  "zero", "ra", "sp", "gp", "tp", "t0", "t1", "t2", "s0", "s1", "a0",
  "a1", "a2", "a3", "a4", "a5", "a6", "a7", "s2", "s3", "s4", "s5",
  "s6", "s7", "s8", "s9", "s10", "s11", "t3", "t4", "t5", "t6",
};

inline std::string reg_name(unsigned r) { return abi_names.at(r); }

inline std::optional<unsigned> parse_register(std::string s)
{
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "fp")
    return 8;
  for (unsigned i = 0; i < abi_names.size(); ++i)
    if (s == abi_names[i])
      return i;
  if (s.size() >= 2 && s.size() <= 3 && s[0] == 'x'
      && std::all_of(s.begin() + 1, s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    if (s.size() == 3 && s[1] == '0')
      return std::nullopt;
    unsigned n = std::stoul(s.substr(1));
    if (n < 32)
      return n;
  }
  return std::nullopt;
}

struct Instruction {
  Op op = Op::Addi;
  unsigned rd = 0, rs1 = 0, rs2 = 0;
  int64_t imm = 0; // sign-extended I/S immediates, shamt, or the raw 20-bit lui value
  int line = 0;
  std::string source; // the written line, shared by all parts of an expanded pseudo

  bool operator==(const Instruction &) const = default;

  std::string to_string() const
  {
    const OpInfo &i = info(op);
    std::string n = i.name;
    switch (i.format) {
    case Format::R:
      return n + " " + reg_name(rd) + ", " + reg_name(rs1) + ", " + reg_name(rs2);
    case Format::I:
    case Format::Shift:
      return n + " " + reg_name(rd) + ", " + reg_name(rs1) + ", " + std::to_string(imm);
    case Format::U: return n + " " + reg_name(rd) + ", " + std::to_string(imm);
    case Format::Load:
      return n + " " + reg_name(rd) + ", " + std::to_string(imm) + "(" + reg_name(rs1) + ")";
    case Format::Store:
      return n + " " + reg_name(rs2) + ", " + std::to_string(imm) + "(" + reg_name(rs1) + ")";
    case Format::System: return n;
    }
    return n;
  }
};

using Program = std::vector<Instruction>;

inline bool has_privileged(const Program &p)
{
  return std::any_of(p.begin(), p.end(),
                     [](const Instruction &i) { return i.op == Op::Ecall || i.op == Op::Ebreak; });
}

inline bool writes_memory(const Program &p)
{
  return std::any_of(p.begin(), p.end(), [](const Instruction &i) { return i.op == Op::Sw; });
}

namespace detail {

inline std::string trim(const std::string &s)
{
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos)
    return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// Decimal, 0x hex or 0b binary, optionally negative.
inline std::optional<int64_t> parse_number(std::string s)
{
  s = trim(s);
  bool neg = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s = s.substr(2);
  } else if (s.size() > 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B')) {
    base = 2;
    s = s.substr(2);
  }
  if (s.empty() || s.size() > 20)
    return std::nullopt;
  int64_t v = 0;
  for (char c : s) {
    int d = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
          : std::isxdigit(static_cast<unsigned char>(c))
            ? std::tolower(static_cast<unsigned char>(c)) - 'a' + 10
            : 99;
    if (d >= base)
      return std::nullopt;
    v = v * base + d;
    if (v > (int64_t{1} << 40))
      return std::nullopt;
  }
  return neg ? -v : v;
}

class LineParser {
public:
  LineParser(std::string mnemonic, std::vector<std::string> operands, int line, std::string source)
    : mn_(std::move(mnemonic)), ops_(std::move(operands)), line_(line), src_(std::move(source))
  {}

  [[noreturn]] void fail(const std::string &msg) const { throw ParseError(mn_ + ": " + msg, line_); }

  void arity(size_t n) const
  {
    if (ops_.size() != n)
      fail("expected " + std::to_string(n) + " operand" + (n == 1 ? "" : "s") + ", got "
           + std::to_string(ops_.size()));
  }

  unsigned reg(size_t i) const
  {
    auto r = parse_register(ops_.at(i));
    if (!r)
      fail("'" + ops_.at(i) + "' is not a register");
    return *r;
  }

  int64_t imm(size_t i, int64_t lo, int64_t hi, const char *what) const
  {
    auto v = parse_number(ops_.at(i));
    if (!v)
      fail("'" + ops_.at(i) + "' is not an immediate");
    if (*v < lo || *v > hi)
      fail(std::string(what) + " " + ops_.at(i) + " out of range [" + std::to_string(lo) + ", "
           + std::to_string(hi) + "]");
    return *v;
  }

  // "off(reg)" or "(reg)"
  std::pair<int64_t, unsigned> mem(size_t i) const
  {
    const std::string &s = ops_.at(i);
    auto open = s.find('('), close = s.rfind(')');
    if (open == std::string::npos || close == std::string::npos || close < open
        || !trim(s.substr(close + 1)).empty())
      fail("'" + s + "' is not a memory operand off(reg)");
    std::string off = trim(s.substr(0, open));
    std::string base = trim(s.substr(open + 1, close - open - 1));
    auto r = parse_register(base);
    if (!r)
      fail("'" + base + "' is not a register");
    int64_t o = 0;
    if (!off.empty()) {
      auto v = parse_number(off);
      if (!v)
        fail("'" + off + "' is not an offset");
      if (*v < -2048 || *v > 2047)
        fail("offset " + off + " out of range [-2048, 2047]");
      o = *v;
    }
    return {o, *r};
  }

  Instruction make(Op op) const
  {
    Instruction in;
    in.op = op;
    in.line = line_;
    in.source = src_;
    return in;
  }

  void parse(Program &out) const
  {
    if (mn_ == "nop") {
      arity(0);
      out.push_back(make(Op::Addi));
      return;
    }
    if (mn_ == "mv") {
      arity(2);
      Instruction in = make(Op::Addi);
      in.rd = reg(0);
      in.rs1 = reg(1);
      out.push_back(in);
      return;
    }
    if (mn_ == "neg") {
      arity(2);
      Instruction in = make(Op::Sub);
      in.rd = reg(0);
      in.rs2 = reg(1);
      out.push_back(in);
      return;
    }
    if (mn_ == "li") {
      arity(2);
      unsigned rd = reg(0);
      int64_t v = imm(1, -(int64_t{1} << 31), (int64_t{1} << 32) - 1, "immediate");
      int32_t value = static_cast<int32_t>(static_cast<uint32_t>(v));
      if (value >= -2048 && value <= 2047) {
        Instruction in = make(Op::Addi);
        in.rd = rd;
        in.imm = value;
        out.push_back(in);
        return;
      }
      // lui loads the upper 20 bits, rounded so the signed low part fits addi.
      uint32_t u = static_cast<uint32_t>(value);
      int32_t lo = static_cast<int32_t>(u << 20) >> 20;
      uint32_t hi = ((u - static_cast<uint32_t>(lo)) >> 12) & 0xfffff;
      Instruction up = make(Op::Lui);
      up.rd = rd;
      up.imm = hi;
      out.push_back(up);
      if (lo != 0) {
        Instruction add = make(Op::Addi);
        add.rd = rd;
        add.rs1 = rd;
        add.imm = lo;
        out.push_back(add);
      }
      return;
    }
    const OpInfo *found = nullptr;
    for (auto &i : op_table)
      if (mn_ == i.name)
        found = &i;
    if (!found)
      throw UnsupportedConstruct({mn_, line_});
    Instruction in = make(found->op);
    switch (found->format) {
    case Format::R:
      arity(3);
      in.rd = reg(0);
      in.rs1 = reg(1);
      in.rs2 = reg(2);
      break;
    case Format::I:
      arity(3);
      in.rd = reg(0);
      in.rs1 = reg(1);
      in.imm = imm(2, -2048, 2047, "immediate");
      break;
    case Format::Shift:
      arity(3);
      in.rd = reg(0);
      in.rs1 = reg(1);
      in.imm = imm(2, 0, 31, "shift amount");
      break;
    case Format::U:
      arity(2);
      in.rd = reg(0);
      in.imm = imm(1, 0, 0xfffff, "upper immediate");
      break;
    case Format::Load: {
      arity(2);
      in.rd = reg(0);
      auto [o, b] = mem(1);
      in.imm = o;
      in.rs1 = b;
      break;
    }
    case Format::Store: {
      arity(2);
      in.rs2 = reg(0);
      auto [o, b] = mem(1);
      in.imm = o;
      in.rs1 = b;
      break;
    }
    case Format::System: arity(0); break;
    }
    out.push_back(in);
  }

private:
  std::string mn_;
  std::vector<std::string> ops_;
  int line_;
  std::string src_;
};

} // namespace detail

// Throws ParseError for malformed lines and UnsupportedConstruct for
// anything outside the straight-line subset (branches, jumps, labels,
// directives, other extensions).
inline Program parse_program(const std::string &text)
{
  Program out;
  size_t start = 0;
  int line = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos)
      end = text.size();
    std::string raw = text.substr(start, end - start);
    start = end + 1;
    line++;
    std::string body = raw;
    if (auto hash = body.find('#'); hash != std::string::npos)
      body = body.substr(0, hash);
    body = detail::trim(body);
    if (body.empty())
      continue;
    size_t sp = 0;
    while (sp < body.size() && !std::isspace(static_cast<unsigned char>(body[sp])))
      sp++;
    std::string mn = body.substr(0, sp);
    if (mn.find(':') != std::string::npos)
      throw UnsupportedConstruct({"label", line});
    std::transform(mn.begin(), mn.end(), mn.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::vector<std::string> operands;
    std::string rest = detail::trim(body.substr(sp));
    if (!rest.empty()) {
      size_t p = 0;
      for (;;) {
        size_t comma = rest.find(',', p);
        std::string op = detail::trim(rest.substr(p, comma == std::string::npos ? std::string::npos
                                                                                   : comma - p));
        if (op.empty())
          throw ParseError(mn + ": empty operand", line);
        operands.push_back(op);
        if (comma == std::string::npos)
          break;
        p = comma + 1;
      }
    }
    detail::LineParser(mn, operands, line, detail::trim(raw)).parse(out);
  }
  return out;
}

using AsmOutcome = std::variant<Program, UnsupportedFeature>;

inline AsmOutcome parse_asm(const std::string &text)
{
  try {
    return parse_program(text);
  } catch (const UnsupportedConstruct &u) {
    return u.feature();
  }
}

} // namespace guard::hw

#endif // GUARD_HW_ISA_HPP
