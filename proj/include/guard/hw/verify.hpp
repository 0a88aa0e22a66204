#ifndef GUARD_HW_VERIFY_HPP
#define GUARD_HW_VERIFY_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "guard/hw/property.hpp"
#include "guard/smt/eval.hpp"
#include "guard/smt/solver.hpp"
#include "guard/verdict.hpp"

namespace guard::hw {

struct PropertyResult {
  HwProperty property;
  Verdict verdict;
};

struct AsmReport {
  Verdict verdict;
  std::vector<ObligationRecord> obligations;
  std::vector<PropertyResult> properties;
};

struct RegisterDiff {
  unsigned reg;
  uint32_t a, b;
};

struct EquivalenceReport {
  Verdict verdict;
  std::vector<ObligationRecord> obligations;
  std::vector<RegisterDiff> diffs; // Unsafe only
};

inline std::string property_label(const HwProperty &p)
{
  struct Visitor {
    std::string operator()(const RegisterBound &b) const
    {
      return "bound " + reg_name(b.reg) + " in [" + std::to_string(b.lo) + ", "
           + std::to_string(b.hi) + "]";
    }
    std::string operator()(const NoPrivilege &) const { return "no ecall/ebreak"; }
    std::string operator()(const MemoryWithin &m) const
    {
      return "memory within [" + hex32(m.region.base) + ", "
           + hex32(m.region.base + m.region.size) + ")";
    }
    std::string operator()(const Custom &c) const { return "ensure " + c.expr; }
  };
  return std::visit(Visitor{}, p.kind);
}

inline uint32_t word_value(const smt::Term &t, const smt::Model &m)
{
  return static_cast<uint32_t>(smt::evaluate(t, m).as_bv().bits);
}

// Initial register values named in the model, in register order.
inline std::string initial_registers(const smt::Model &m)
{
  std::string out;
  for (unsigned r = 1; r < 32; ++r)
    if (auto *v = m.find(reg_name(r)); v && v->is_bv())
      out += (out.empty() ? "" : ", ") + reg_name(r) + " = "
           + hex32(static_cast<uint32_t>(v->as_bv().bits));
  return out.empty() ? "any initial registers" : "initial " + out;
}

namespace detail {

struct Goal {
  std::string label;
  smt::Term condition;
};

// Proves each goal under the assumptions; returns the first refutation.
inline Verdict prove_goals(const std::vector<Goal> &goals, const std::vector<smt::Term> &assumptions,
                           int timeout_ms, const smt::Solver &solver,
                           std::vector<ObligationRecord> &records,
                           const std::function<std::string(const Goal &, const smt::Model &)> &explain)
{
  int per = obligation_timeout(timeout_ms, std::max<size_t>(1, goals.size()));
  std::optional<Verdict> unknown;
  for (auto &g : goals) {
    std::vector<smt::Term> all(assumptions);
    all.push_back(g.condition);
    auto decls = smt::free_vars(all);
    auto r = solver.prove(decls, assumptions, g.condition, per);
    if (r.proven()) {
      records.push_back({g.label, Status::Verified, r.elapsed_ms});
    } else if (r.refuted()) {
      records.push_back({g.label, Status::Unsafe, r.elapsed_ms});
      return Unsafe{g.label, r.model(), explain(g, r.model())};
    } else {
      records.push_back({g.label, Status::Unknown, r.elapsed_ms});
      if (!unknown)
        unknown = Unknown{g.label, r.reason()};
    }
  }
  if (unknown)
    return *unknown;
  return Verified{};
}

} // namespace detail

inline std::vector<smt::Term> assumption_terms(const PropertySet &props)
{
  std::vector<smt::Term> out;
  for (auto &a : props.assumptions)
    out.push_back(condition_term(a, nullptr));
  return out;
}

inline Verdict check_property(const Program &program, const HwProperty &property,
                              const std::vector<smt::Term> &assumptions,
                              int timeout_ms = smt::default_timeout_ms,
                              const smt::Solver &solver = smt::Solver{},
                              std::vector<ObligationRecord> *records = nullptr)
{
  std::vector<ObligationRecord> local;
  auto &recs = records ? *records : local;
  std::string label = property_label(property);

  if (std::holds_alternative<NoPrivilege>(property.kind)) {
    // Syntactic: no solver involved.
    MachineState s = symexec(program);
    recs.push_back({label, s.trap ? Status::Unsafe : Status::Verified, 0});
    if (!s.trap)
      return Verified{};
    // Every initial state reaches the trap; the all-zero one stands as the model.
    smt::Model zero;
    for (auto &in : program) {
      for (unsigned r : {in.rs1, in.rs2})
        if (r != 0)
          zero.set(reg_name(r), smt::Value::from_bv(0, xlen));
      if (in.line == *s.trap_line)
        break;
    }
    if (zero.empty())
      zero.set(reg_name(10), smt::Value::from_bv(0, xlen));
    return Unsafe{label, zero,
                  s.trap_mnemonic + " at line " + std::to_string(*s.trap_line)
                    + " raises a privileged trap"};
  }

  if (const auto *mw = std::get_if<MemoryWithin>(&property.kind)) {
    MachineState s = symexec(program, mw->region);
    std::vector<detail::Goal> goals;
    for (auto &o : s.obligations)
      goals.push_back({o.label, o.condition});
    return detail::prove_goals(goals, assumptions, timeout_ms, solver, recs,
                               [](const detail::Goal &g, const smt::Model &m) {
                                 return initial_registers(m) + " violates " + g.label;
                               });
  }

  MachineState s = symexec(program);
  if (const auto *b = std::get_if<RegisterBound>(&property.kind)) {
    smt::Term fin = s.regs[b->reg];
    smt::Term cond = smt::bv_sign_bound(fin, word(static_cast<uint32_t>(b->lo)),
                                        word(static_cast<uint32_t>(b->hi)));
    return detail::prove_goals(
      {{label, cond}}, assumptions, timeout_ms, solver, recs,
      [&](const detail::Goal &, const smt::Model &m) {
        uint32_t v = word_value(fin, m);
        return initial_registers(m) + " gives final " + reg_name(b->reg) + " = " + hex32(v) + " ("
             + std::to_string(static_cast<int32_t>(v)) + "), outside [" + std::to_string(b->lo)
             + ", " + std::to_string(b->hi) + "]";
      });
  }

  const auto &c = std::get<Custom>(property.kind);
  smt::Term cond = condition_term(c.expr, &s, property.line);
  return detail::prove_goals({{label, cond}}, assumptions, timeout_ms, solver, recs,
                             [&](const detail::Goal &, const smt::Model &m) {
                               return initial_registers(m) + " violates " + c.expr;
                             });
}

// Every property in the set; the first Unsafe wins, then Unknown.
inline AsmReport verify_program(const Program &program, const PropertySet &props,
                                int timeout_ms = smt::default_timeout_ms,
                                const smt::Solver &solver = smt::Solver{})
{
  AsmReport rep{Verified{}, {}, {}};
  auto assumptions = assumption_terms(props);
  int per = obligation_timeout(timeout_ms, props.properties.size());
  std::optional<Verdict> unsafe, unknown;
  for (auto &p : props.properties) {
    Verdict v = check_property(program, p, assumptions, per, solver, &rep.obligations);
    if (is_unsafe(v) && !unsafe)
      unsafe = v;
    if (status_of(v) == Status::Unknown && !unknown)
      unknown = v;
    rep.properties.push_back({p, v});
  }
  if (unsafe)
    rep.verdict = *unsafe;
  else if (unknown)
    rep.verdict = *unknown;
  return rep;
}

// Registers written by either program (x0 excluded).
inline std::vector<unsigned> written_registers(const Program &a, const Program &b)
{
  std::vector<bool> seen(32, false);
  for (const Program *p : {&a, &b})
    for (auto &in : *p) {
      auto f = info(in.op).format;
      if (f != Format::Store && f != Format::System && in.rd != 0)
        seen[in.rd] = true;
    }
  std::vector<unsigned> out;
  for (unsigned r = 1; r < 32; ++r)
    if (seen[r])
      out.push_back(r);
  return out;
}

inline EquivalenceReport check_equivalence(const Program &a, const Program &b,
                                           const std::vector<unsigned> &observed,
                                           int timeout_ms = smt::default_timeout_ms,
                                           const smt::Solver &solver = smt::Solver{})
{
  if (observed.empty())
    throw Error("equivalence needs at least one observed register");
  if (has_privileged(a) || has_privileged(b))
    throw Error("equivalence is defined only for programs without ecall/ebreak");
  MachineState sa = symexec(a), sb = symexec(b);
  std::vector<smt::Term> same;
  std::string label = "equivalent on";
  for (unsigned r : observed) {
    same.push_back(smt::eq(sa.regs[r], sb.regs[r]));
    label += " " + reg_name(r);
  }
  bool memory = writes_memory(a) || writes_memory(b);
  if (memory) {
    same.push_back(smt::eq(sa.mem, sb.mem));
    label += " and memory";
  }
  EquivalenceReport rep{Verified{}, {}, {}};
  smt::Term goal = smt::and_(same);
  rep.verdict = detail::prove_goals(
    {{label, goal}}, {}, timeout_ms, solver, rep.obligations,
    [&](const detail::Goal &, const smt::Model &m) {
      std::string w = initial_registers(m) + ":";
      bool first = true;
      for (unsigned r : observed) {
        uint32_t va = word_value(sa.regs[r], m), vb = word_value(sb.regs[r], m);
        if (va == vb)
          continue;
        rep.diffs.push_back({r, va, vb});
        w += std::string(first ? " " : "; ") + reg_name(r) + " = " + hex32(va) + " vs " + hex32(vb);
        first = false;
      }
      if (rep.diffs.empty() && memory)
        w += " final memory differs";
      return w;
    });
  return rep;
}

} // namespace guard::hw

#endif // GUARD_HW_VERIFY_HPP
