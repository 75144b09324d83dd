#include "fhdet/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <map>

namespace fhdet {

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  Expression run() {
    Expression e;
    e.text_ = s_;
    out_ = &e;
    expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    if (e.code_.empty()) fail("empty expression");
    int depth = 0;
    for (auto& in : e.code_) {
      if (in.op == Op::push || in.op == Op::var || in.op == Op::theta) ++depth;
      else if (in.op != Op::neg && in.op != Op::fn) --depth;
      if (depth > 60) fail("expression too deeply nested");
    }
    return e;
  }

 private:
  using Op = Expression::Op;
  using Fn = Expression::Fn;

  const std::string& s_;
  std::size_t pos_ = 0;
  Expression* out_ = nullptr;

  [[noreturn]] void fail(const std::string& why) {
    throw ParseError("expression '" + s_ + "': " + why + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void emit(Op op, cplx v = 0.0, Fn fn = Fn::exp) { out_->code_.push_back({op, v, fn}); }

  // expr := term (('+'|'-') term)*
  void expr() {
    term();
    for (;;) {
      if (eat('+')) {
        term();
        emit(Op::add);
      } else if (eat('-')) {
        term();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }
  // term := unary (('*'|'/') unary)*
  void term() {
    unary();
    for (;;) {
      if (eat('*')) {
        unary();
        emit(Op::mul);
      } else if (eat('/')) {
        unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }
  // unary := ('-'|'+') unary | power
  void unary() {
    if (eat('-')) {
      unary();
      emit(Op::neg);
    } else if (eat('+')) {
      unary();
    } else {
      power();
    }
  }
  // power := primary ('^' unary)?   (right associative)
  void power() {
    primary();
    if (eat('^')) {
      unary();
      emit(Op::pow);
    }
  }
  void primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      if (!eat(')')) fail("missing ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += std::size_t(end - begin);
      // imaginary literal such as 2i
      if (pos_ < s_.size() && s_[pos_] == 'i' &&
          (pos_ + 1 >= s_.size() || !std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])))) {
        ++pos_;
        emit(Op::push, cplx(0.0, v));
      } else {
        emit(Op::push, v);
      }
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      static const std::map<std::string, Fn> fns = {
          {"exp", Fn::exp},   {"log", Fn::log},   {"sqrt", Fn::sqrt}, {"sin", Fn::sin},   {"cos", Fn::cos},
          {"tan", Fn::tan},   {"sinh", Fn::sinh}, {"cosh", Fn::cosh}, {"tanh", Fn::tanh}, {"ln", Fn::log}};
      auto f = fns.find(name);
      if (f != fns.end()) {
        if (!eat('(')) fail("expected '(' after " + name);
        expr();
        if (!eat(')')) fail("missing ')'");
        emit(Op::fn, 0.0, f->second);
        return;
      }
      if (name == "i") return emit(Op::push, cplx(0.0, 1.0));
      if (name == "pi") return emit(Op::push, kPi);
      if (name == "e") return emit(Op::push, std::exp(1.0));
      if (name == "xi" || name == "x" || name == "z") {
        out_->constant_ = false;
        return emit(Op::var);
      }
      if (name == "theta") {
        out_->constant_ = false;
        out_->uses_theta_ = true;
        return emit(Op::theta);
      }
      fail("unknown identifier '" + name + "'");
    }
    fail("unexpected character");
  }
};

Expression Expression::parse(const std::string& text) { return ExprParser(text).run(); }

Expression Expression::constant(cplx c) {
  Expression e;
  e.code_.push_back({Op::push, c, Fn::exp});
  e.text_ = "constant";
  return e;
}

cplx Expression::operator()(cplx z) const {
  cplx stack[64];
  int sp = 0;
  for (const Instr& in : code_) {
    switch (in.op) {
      case Op::push: stack[sp++] = in.value; break;
      case Op::var: stack[sp++] = z; break;
      case Op::theta: stack[sp++] = -kI * std::log(z); break;
      case Op::neg: stack[sp - 1] = -stack[sp - 1]; break;
      case Op::fn: {
        cplx& a = stack[sp - 1];
        switch (in.fn) {
          case Fn::exp: a = std::exp(a); break;
          case Fn::log: a = std::log(a); break;
          case Fn::sqrt: a = std::sqrt(a); break;
          case Fn::sin: a = std::sin(a); break;
          case Fn::cos: a = std::cos(a); break;
          case Fn::tan: a = std::tan(a); break;
          case Fn::sinh: a = std::sinh(a); break;
          case Fn::cosh: a = std::cosh(a); break;
          case Fn::tanh: a = std::tanh(a); break;
        }
        break;
      }
      default: {
        cplx b = stack[--sp];
        cplx& a = stack[sp - 1];
        switch (in.op) {
          case Op::add: a += b; break;
          case Op::sub: a -= b; break;
          case Op::mul: a *= b; break;
          case Op::div: a /= b; break;
          case Op::pow:
            // integer exponents by repeated multiplication keep rational
            // functions exact on the negative axis
            if (b.imag() == 0.0 && b.real() == std::round(b.real()) && std::abs(b.real()) <= 64) {
              int n = int(b.real());
              cplx r = 1.0, base = n < 0 ? 1.0 / a : a;
              for (int k = std::abs(n); k > 0; --k) r *= base;
              a = r;
            } else {
              a = std::pow(a, b);
            }
            break;
          default: break;
        }
      }
    }
  }
  return stack[0];
}

cplx parse_complex(const std::string& text) {
  Expression e = Expression::parse(text);
  if (!e.is_constant()) throw ParseError("'" + text + "' is not a constant");
  return e(1.0);
}

}  // namespace fhdet
