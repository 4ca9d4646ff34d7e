#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "minkhoro/errors.hpp"
#include "minkhoro/types.hpp"

namespace mh {

// Compiled arithmetic expression over variables x1..xn. Supports + - * / ^,
// unary minus, parentheses and sqrt, abs, exp, log, min, max, pow.
class Formula {
 public:
  enum class Op { constant, variable, add, sub, mul, div, pow, neg, sqrt, abs, exp, log, min, max };
  struct Instr {
    Op op;
    double value = 0.0;
    int index = 0;
  };

  static Formula parse(const std::string& text, int dimension);

  const std::string& text() const { return text_; }
  int dimension() const { return dimension_; }

  template <typename Derived>
  typename Derived::Scalar evaluate(const Eigen::MatrixBase<Derived>& x) const {
    using S = typename Derived::Scalar;
    using std::abs, std::exp, std::log, std::pow, std::sqrt;
    std::vector<S> stack;
    stack.reserve(program_.size());
    auto pop = [&stack] {
      S v = stack.back();
      stack.pop_back();
      return v;
    };
    for (const Instr& ins : program_) {
      switch (ins.op) {
        case Op::constant: stack.push_back(S(ins.value)); break;
        case Op::variable: stack.push_back(x(ins.index)); break;
        case Op::neg: stack.back() = -stack.back(); break;
        case Op::sqrt: stack.back() = sqrt(stack.back()); break;
        case Op::abs: stack.back() = abs(stack.back()); break;
        case Op::exp: stack.back() = exp(stack.back()); break;
        case Op::log: stack.back() = log(stack.back()); break;
        default: {
          const S b = pop();
          S& a = stack.back();
          switch (ins.op) {
            case Op::add: a = a + b; break;
            case Op::sub: a = a - b; break;
            case Op::mul: a = a * b; break;
            case Op::div: a = a / b; break;
            case Op::pow: a = pow(a, b); break;
            case Op::min: a = a < b ? a : b; break;
            case Op::max: a = a > b ? a : b; break;
            default: break;
          }
        }
      }
    }
    return stack.back();
  }

 private:
  std::string text_;
  int dimension_ = 0;
  std::vector<Instr> program_;
};

}  // namespace mh
