#pragma once

#include <string>
#include <vector>

#include "fhdet/core.hpp"

namespace fhdet {

// Small arithmetic grammar for regular parts of symbols:
//   numbers, i, pi, e, the free variable (xi, x or z; theta on the circle),
//   + - * / ^, parentheses and exp log sqrt sin cos tan sinh cosh tanh.
// Compiled once to a postfix program; evaluation is reentrant.
class Expression {
 public:
  Expression() = default;
  // Throws ParseError with the offending position.
  static Expression parse(const std::string& text);
  static Expression constant(cplx c);

  // Value at the point z. On the circle, theta is taken as -i log z.
  cplx operator()(cplx z) const;

  const std::string& text() const { return text_; }
  bool is_constant() const { return constant_; }
  bool uses_theta() const { return uses_theta_; }

  enum class Op { push, var, theta, add, sub, mul, div, pow, neg, fn };
  enum class Fn { exp, log, sqrt, sin, cos, tan, sinh, cosh, tanh };
  struct Instr {
    Op op;
    cplx value{};
    Fn fn{};
  };

 private:
  std::string text_;
  std::vector<Instr> code_;
  bool constant_ = true;
  bool uses_theta_ = false;
  friend class ExprParser;
};

// Parses a constant complex literal such as "0.3-0.1i", "exp(i*pi/4)" or "-1".
cplx parse_complex(const std::string& text);

}  // namespace fhdet
