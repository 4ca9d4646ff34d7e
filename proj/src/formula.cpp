#include "minkhoro/formula.hpp"

#include <cctype>
#include <cstdlib>
#include <map>

namespace mh {
namespace {

class Parser {
 public:
  Parser(const std::string& s, int dimension, std::vector<Formula::Instr>& out)
      : s_(s), n_(dimension), out_(out) {}

  void run() {
    expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
  }

 private:
  using Op = Formula::Op;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ArgumentError("formula '" + s_ + "': " + msg + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }
  void emit(Op op) { out_.push_back({op, 0.0, 0}); }

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::add);
      } else if (accept('-')) {
        term();
        emit(Op::sub);
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
        emit(Op::mul);
      } else if (accept('/')) {
        unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }
  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::neg);
    } else if (accept('+')) {
      unary();
    } else {
      power();
    }
  }
  // Right-associative; binds tighter than unary minus on its left operand.
  void power() {
    primary();
    if (accept('^')) {
      unary();
      emit(Op::pow);
    }
  }
  void primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      out_.push_back({Op::constant, v, 0});
      return;
    }
    if (accept('(')) {
      expr();
      expect(')');
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id.size() >= 2 && id[0] == 'x' && std::isdigit(static_cast<unsigned char>(id[1]))) {
        const int idx = std::atoi(id.c_str() + 1);
        if (idx < 1 || idx > n_) fail("variable " + id + " out of range");
        out_.push_back({Op::variable, 0.0, idx - 1});
        return;
      }
      static const std::map<std::string, std::pair<Op, int>> funcs = {
          {"sqrt", {Op::sqrt, 1}}, {"abs", {Op::abs, 1}}, {"exp", {Op::exp, 1}},
          {"log", {Op::log, 1}},   {"min", {Op::min, 2}}, {"max", {Op::max, 2}},
          {"pow", {Op::pow, 2}}};
      const auto it = funcs.find(id);
      if (it == funcs.end()) fail("unknown identifier " + id);
      expect('(');
      expr();
      for (int a = 1; a < it->second.second; ++a) {
        expect(',');
        expr();
      }
      expect(')');
      emit(it->second.first);
      return;
    }
    fail("unexpected character");
  }

  const std::string& s_;
  int n_;
  std::vector<Formula::Instr>& out_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula Formula::parse(const std::string& text, int dimension) {
  Formula f;
  f.text_ = text;
  f.dimension_ = dimension;
  Parser(text, dimension, f.program_).run();
  return f;
}

}  // namespace mh
