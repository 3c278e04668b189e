#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace extremal {

/// Compiled scalar expression in the variable `t`.
///
/// Grammar (usual precedence, `^` right-associative and binding tighter than
/// unary minus):
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | 't' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
///   func    := exp | log | sqrt
///
/// Parse failures throw ParseError with a 1-based line and column, offset by
/// the position the text came from.
class Expression {
 public:
  static Expression parse(std::string_view text, int line = 1, int column = 1);

  double operator()(double t) const;

  const std::string& source() const noexcept { return source_; }

 private:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sqrt };
  struct Instr {
    Op op;
    double value = 0.0;
  };
  friend class ExpressionParser;

  std::string source_;
  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
};

}  // namespace extremal
