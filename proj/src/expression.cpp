#include "extremal/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "extremal/error.hpp"

namespace extremal {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, int line, int column, Expression& out)
      : text_(text), line_(line), column_(column), out_(out) {}

  void run() {
    skip_space();
    if (pos_ == text_.size()) fail("empty expression");
    expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

 private:
  using Op = Expression::Op;

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, column_ + static_cast<int>(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void emit(Op op, double value = 0.0) {
    out_.code_.push_back({op, value});
    switch (op) {
      case Op::Const:
      case Op::Var:
        ++depth_;
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
      case Op::Pow:
        --depth_;
        break;
      default:
        break;
    }
    out_.max_stack_ = std::max(out_.max_stack_, depth_);
  }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::Add);
      } else if (accept('-')) {
        term();
        emit(Op::Sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Op::Mul);
      } else if (accept('/')) {
        unary();
        emit(Op::Div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::Neg);
      return;
    }
    if (accept('+')) {
      unary();
      return;
    }
    power();
  }

  void power() {
    primary();
    if (accept('^')) {
      unary();
      emit(Op::Pow);
    }
  }

  void primary() {
    skip_space();
    if (pos_ == text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "t") return emit(Op::Var);
      if (word == "pi") return emit(Op::Const, std::numbers::pi);
      if (word == "e") return emit(Op::Const, std::numbers::e);
      Op fn;
      if (word == "exp") {
        fn = Op::Exp;
      } else if (word == "log") {
        fn = Op::Log;
      } else if (word == "sqrt") {
        fn = Op::Sqrt;
      } else {
        pos_ = start;
        fail("unknown identifier '" + std::string(word) + "'");
      }
      if (!accept('(')) fail("expected '(' after " + std::string(word));
      expr();
      if (!accept(')')) fail("expected ')'");
      emit(fn);
      return;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  void number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      pos_ = start;
      fail("malformed number");
    }
    emit(Op::Const, value);
  }

  std::string_view text_;
  int line_;
  int column_;
  Expression& out_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;
};

Expression Expression::parse(std::string_view text, int line, int column) {
  Expression out;
  out.source_ = std::string(text);
  ExpressionParser(text, line, column, out).run();
  return out;
}

double Expression::operator()(double t) const {
  // Expressions are short; a fixed stack avoids allocation per evaluation.
  constexpr std::size_t kInline = 32;
  double inline_stack[kInline] = {};
  std::vector<double> heap;
  double* stack = inline_stack;
  if (max_stack_ > kInline) {
    heap.resize(max_stack_);
    stack = heap.data();
  }
  std::size_t sp = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::Const:
        stack[sp++] = in.value;
        break;
      case Op::Var:
        stack[sp++] = t;
        break;
      case Op::Add:
        --sp;
        stack[sp - 1] += stack[sp];
        break;
      case Op::Sub:
        --sp;
        stack[sp - 1] -= stack[sp];
        break;
      case Op::Mul:
        --sp;
        stack[sp - 1] *= stack[sp];
        break;
      case Op::Div:
        --sp;
        stack[sp - 1] /= stack[sp];
        break;
      case Op::Pow:
        --sp;
        stack[sp - 1] = std::pow(stack[sp - 1], stack[sp]);
        break;
      case Op::Neg:
        stack[sp - 1] = -stack[sp - 1];
        break;
      case Op::Exp:
        stack[sp - 1] = std::exp(stack[sp - 1]);
        break;
      case Op::Log:
        stack[sp - 1] = std::log(stack[sp - 1]);
        break;
      case Op::Sqrt:
        stack[sp - 1] = std::sqrt(stack[sp - 1]);
        break;
    }
  }
  return stack[0];
}

}  // namespace extremal
