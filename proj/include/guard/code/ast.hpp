#ifndef GUARD_CODE_AST_HPP
#define GUARD_CODE_AST_HPP

#include <optional>
#include <string>
#include <vector>

#include "guard/smt/sort.hpp"
#include "guard/smt/value.hpp"

namespace guard::code {

enum class ExprKind { Name, IntLit, RealLit, BoolLit, Unary, Binary, BoolOp, Compare, Ternary, Call };

enum class UnaryOp { Neg, Pos, Not };
enum class BinaryOp { Add, Sub, Mul, Div, FloorDiv, Mod, Pow }; // Pow: rhs is a small IntLit
enum class BoolOpKind { And, Or };
enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

// Expression tree. Children layout by kind:
//   Unary: [operand]; Binary: [lhs, rhs]; BoolOp: operands (>= 2);
//   Compare: operands, with cmp_ops.size() == operands - 1;
//   Ternary: [cond, then, else]; Call: arguments.
struct Expr {
  ExprKind kind = ExprKind::Name;
  int line = 0;
  std::string name; // Name, Call
  smt::Integer int_value;
  smt::Rational real_value;
  bool bool_value = false;
  UnaryOp unary_op = UnaryOp::Neg;
  BinaryOp binary_op = BinaryOp::Add;
  BoolOpKind bool_op = BoolOpKind::And;
  std::vector<CmpOp> cmp_ops;
  std::vector<Expr> children;
};

enum class StmtKind { Assign, If, Return, Pass };

struct Stmt {
  StmtKind kind = StmtKind::Pass;
  int line = 0;
  std::vector<std::string> targets; // Assign: a = b = expr
  Expr value;                       // Assign, Return; If: condition
  std::vector<Stmt> body;           // If: then-branch
  std::vector<Stmt> orelse;         // If: else-branch (elif becomes a nested If)
};

struct Param {
  std::string name;
  smt::Sort sort;
};

struct FunctionUnit {
  std::string name;
  std::vector<Param> params;
  std::optional<smt::Sort> return_sort; // from the `->` annotation
  std::vector<Stmt> body;
  int line = 1;
};

inline const char *binary_symbol(BinaryOp op)
{
  switch (op) {
  case BinaryOp::Add: return "+";
  case BinaryOp::Sub: return "-";
  case BinaryOp::Mul: return "*";
  case BinaryOp::Div: return "/";
  case BinaryOp::FloorDiv: return "//";
  case BinaryOp::Mod: return "%";
  case BinaryOp::Pow: return "**";
  }
  return "?";
}

inline const char *cmp_symbol(CmpOp op)
{
  switch (op) {
  case CmpOp::Lt: return "<";
  case CmpOp::Le: return "<=";
  case CmpOp::Gt: return ">";
  case CmpOp::Ge: return ">=";
  case CmpOp::Eq: return "==";
  case CmpOp::Ne: return "!=";
  }
  return "?";
}

} // namespace guard::code

#endif // GUARD_CODE_AST_HPP
