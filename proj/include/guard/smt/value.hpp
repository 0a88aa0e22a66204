#ifndef GUARD_SMT_VALUE_HPP
#define GUARD_SMT_VALUE_HPP

#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <variant>

#include <boost/multiprecision/cpp_int.hpp>

#include "guard/smt/sort.hpp"

namespace guard::smt {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline uint64_t width_mask(unsigned width)
{
  return width >= 64 ? ~uint64_t{0} : ((uint64_t{1} << width) - 1);
}

struct BitVecValue {
  unsigned width = 32;
  uint64_t bits = 0;

  BitVecValue() = default;
  BitVecValue(uint64_t b, unsigned w)
    : width{w}
    , bits{b & width_mask(w)}
  {}

  int64_t as_signed() const
  {
    if (width == 64)
      return static_cast<int64_t>(bits);
    uint64_t sign = uint64_t{1} << (width - 1);
    return static_cast<int64_t>((bits ^ sign)) - static_cast<int64_t>(sign);
  }

  bool operator==(const BitVecValue &) const = default;
};

struct ArrayValue {
  BitVecValue fallback;
  unsigned index_width = 32;
  std::map<uint64_t, uint64_t> entries;

  uint64_t select(uint64_t index) const
  {
    auto it = entries.find(index & width_mask(index_width));
    return it == entries.end() ? fallback.bits : it->second;
  }

  bool operator==(const ArrayValue &o) const
  {
    // Extensional equality: compare over every index mentioned by either side.
    if (fallback != o.fallback || index_width != o.index_width)
      return false;
    for (auto &[k, v] : entries)
      if (o.select(k) != v)
        return false;
    for (auto &[k, v] : o.entries)
      if (select(k) != v)
        return false;
    return true;
  }
};

// A real number the solver reported as an algebraic root; not exactly representable.
struct AlgebraicValue {
  std::string text;
  bool operator==(const AlgebraicValue &) const = default;
};

std::string hex_string(uint64_t bits, unsigned width);

class Value {
public:
  using Storage =
    std::variant<bool, Integer, Rational, BitVecValue, std::string, ArrayValue, AlgebraicValue>;

  Value()
    : v_{false}
  {}
  Value(bool b)
    : v_{b}
  {}
  Value(Integer i)
    : v_{std::move(i)}
  {}
  Value(Rational r)
    : v_{std::move(r)}
  {}
  Value(BitVecValue bv)
    : v_{bv}
  {}
  Value(std::string s)
    : v_{std::move(s)}
  {}
  Value(ArrayValue a)
    : v_{std::move(a)}
  {}
  Value(AlgebraicValue a)
    : v_{std::move(a)}
  {}
  Value(const char *s)
    : v_{std::string{s}}
  {}
  // Builtin integers would otherwise silently convert to bool.
  Value(int) = delete;
  Value(long) = delete;
  Value(long long) = delete;

  static Value from_int(long long i) { return Value{Integer{i}}; }
  static Value from_bv(uint64_t bits, unsigned width) { return Value{BitVecValue{bits, width}}; }

  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_int() const { return std::holds_alternative<Integer>(v_); }
  bool is_real() const { return std::holds_alternative<Rational>(v_); }
  bool is_bv() const { return std::holds_alternative<BitVecValue>(v_); }
  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_array() const { return std::holds_alternative<ArrayValue>(v_); }
  bool is_algebraic() const { return std::holds_alternative<AlgebraicValue>(v_); }

  bool as_bool() const { return std::get<bool>(v_); }
  const Integer &as_int() const { return std::get<Integer>(v_); }
  const Rational &as_real() const { return std::get<Rational>(v_); }
  const BitVecValue &as_bv() const { return std::get<BitVecValue>(v_); }
  const std::string &as_string() const { return std::get<std::string>(v_); }
  const ArrayValue &as_array() const { return std::get<ArrayValue>(v_); }
  const AlgebraicValue &as_algebraic() const { return std::get<AlgebraicValue>(v_); }

  // Numeric view used where Int and Real mix (evaluation, replay).
  Rational as_rational() const
  {
    if (is_int())
      return Rational{as_int()};
    return as_real();
  }

  const Storage &storage() const { return v_; }

  bool operator==(const Value &) const = default;

  // Human-readable rendering: integers in decimal, rationals as p/q,
  // bitvectors in hex.
  std::string to_string() const;

  // The sort name of the stored value ("Int", "(_ BitVec 32)", ...).
  std::string sort_name() const;

private:
  Storage v_;
};

inline std::string hex_string(uint64_t bits, unsigned width)
{
  static const char *digits = "0123456789abcdef";
  unsigned n = (width + 3) / 4;
  std::string out = "0x";
  for (unsigned i = n; i-- > 0;)
    out += digits[(bits >> (4 * i)) & 0xf];
  return out;
}

inline std::string rational_string(const Rational &r)
{
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1)
    return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

inline std::string quote_string(const std::string &s)
{
  std::string out = "\"";
  for (unsigned char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
      out += static_cast<char>(c);
    } else if (c < 0x20 || c == 0x7f) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\x%02x", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out + "\"";
}

inline std::string Value::to_string() const
{
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Integer &i) const { return i.str(); }
    std::string operator()(const Rational &r) const { return rational_string(r); }
    std::string operator()(const BitVecValue &bv) const { return hex_string(bv.bits, bv.width); }
    std::string operator()(const std::string &s) const { return quote_string(s); }
    std::string operator()(const ArrayValue &a) const
    {
      std::ostringstream os;
      os << "[";
      for (auto &[k, v] : a.entries)
        os << hex_string(k, a.index_width) << " -> " << hex_string(v, a.fallback.width) << ", ";
      os << "else -> " << hex_string(a.fallback.bits, a.fallback.width) << "]";
      return os.str();
    }
    std::string operator()(const AlgebraicValue &a) const { return a.text; }
  };
  return std::visit(Visitor{}, v_);
}

inline std::string Value::sort_name() const
{
  struct Visitor {
    std::string operator()(bool) const { return "Bool"; }
    std::string operator()(const Integer &) const { return "Int"; }
    std::string operator()(const Rational &) const { return "Real"; }
    std::string operator()(const BitVecValue &bv) const { return Sort::bitvec(bv.width).smtlib(); }
    std::string operator()(const std::string &) const { return "String"; }
    std::string operator()(const ArrayValue &a) const
    {
      return Sort::array(a.index_width, a.fallback.width).smtlib();
    }
    std::string operator()(const AlgebraicValue &) const { return "Real"; }
  };
  return std::visit(Visitor{}, v_);
}

// Variable bindings returned by the solver.
class Model {
public:
  using Map = std::map<std::string, Value>;

  void set(const std::string &name, Value v) { bindings_[name] = std::move(v); }
  bool contains(const std::string &name) const { return bindings_.count(name) != 0; }
  const Value &at(const std::string &name) const
  {
    auto it = bindings_.find(name);
    if (it == bindings_.end())
      throw Error("model has no binding for '" + name + "'");
    return it->second;
  }
  const Value *find(const std::string &name) const
  {
    auto it = bindings_.find(name);
    return it == bindings_.end() ? nullptr : &it->second;
  }
  bool empty() const { return bindings_.empty(); }
  size_t size() const { return bindings_.size(); }
  Map::const_iterator begin() const { return bindings_.begin(); }
  Map::const_iterator end() const { return bindings_.end(); }
  const Map &bindings() const { return bindings_; }

  bool operator==(const Model &) const = default;

  std::string to_string() const
  {
    std::string out;
    for (auto &[k, v] : bindings_) {
      if (!out.empty())
        out += ", ";
      out += k + " = " + v.to_string();
    }
    return out;
  }

private:
  Map bindings_;
};

} // namespace guard::smt

#endif // GUARD_SMT_VALUE_HPP
