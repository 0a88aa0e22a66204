#ifndef GUARD_SMT_SORT_HPP
#define GUARD_SMT_SORT_HPP

#include <string>

#include "guard/error.hpp"

namespace guard::smt {

enum class SortKind { Bool, Int, Real, BitVec, String, Array };

// Arrays are restricted to bitvector index and element sorts, which is all
// the machine-state model needs.
class Sort {
public:
  static Sort boolean() { return Sort{SortKind::Bool, 0, 0}; }
  static Sort integer() { return Sort{SortKind::Int, 0, 0}; }
  static Sort real() { return Sort{SortKind::Real, 0, 0}; }
  static Sort string() { return Sort{SortKind::String, 0, 0}; }
  static Sort bitvec(unsigned width)
  {
    if (width == 0 || width > 64)
      throw SortError("bitvector width must be in [1, 64], got " + std::to_string(width));
    return Sort{SortKind::BitVec, width, 0};
  }
  static Sort array(unsigned index_width, unsigned elem_width)
  {
    bitvec(index_width);
    bitvec(elem_width);
    return Sort{SortKind::Array, index_width, elem_width};
  }

  SortKind kind() const { return kind_; }
  unsigned width() const { return width_; }
  unsigned index_width() const { return width_; }
  unsigned elem_width() const { return elem_width_; }

  bool is_bool() const { return kind_ == SortKind::Bool; }
  bool is_int() const { return kind_ == SortKind::Int; }
  bool is_real() const { return kind_ == SortKind::Real; }
  bool is_arith() const { return is_int() || is_real(); }
  bool is_bv() const { return kind_ == SortKind::BitVec; }
  bool is_string() const { return kind_ == SortKind::String; }
  bool is_array() const { return kind_ == SortKind::Array; }

  bool operator==(const Sort &) const = default;

  std::string smtlib() const
  {
    switch (kind_) {
    case SortKind::Bool: return "Bool";
    case SortKind::Int: return "Int";
    case SortKind::Real: return "Real";
    case SortKind::String: return "String";
    case SortKind::BitVec: return "(_ BitVec " + std::to_string(width_) + ")";
    case SortKind::Array:
      return "(Array (_ BitVec " + std::to_string(width_) + ") (_ BitVec "
        + std::to_string(elem_width_) + "))";
    }
    return "?";
  }

  std::string name() const { return smtlib(); }

private:
  Sort(SortKind kind, unsigned width, unsigned elem_width)
    : kind_{kind}
    , width_{width}
    , elem_width_{elem_width}
  {}

  SortKind kind_;
  unsigned width_;
  unsigned elem_width_;
};

} // namespace guard::smt

#endif // GUARD_SMT_SORT_HPP
