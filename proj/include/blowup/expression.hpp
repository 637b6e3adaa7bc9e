#pragma once

// A minimal arithmetic expression language in one variable t:
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/' | '·') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' unary)?          (right associative)
//   atom   := number | 't' | 'ln' '(' expr ')' | 'exp' '(' expr ')' | '(' expr ')'
// The variable name can be changed (e.g. 'u' for nonlinearities).

#include <cctype>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup {

class ParseError : public InvalidInput {
 public:
  ParseError(const std::string& msg, std::size_t pos)
      : InvalidInput(msg + " at position " + std::to_string(pos)), position(pos) {}
  std::size_t position;
};

class Expression {
 public:
  static Expression parse(const std::string& text, const std::string& variable = "t") {
    Parser p{text, variable, 0};
    auto root = p.expr();
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("unexpected trailing input", p.pos);
    Expression e;
    e.root_ = std::move(root);
    e.text_ = text;
    return e;
  }

  double operator()(double x) const { return eval(*root_, x); }
  const std::string& text() const { return text_; }

 private:
  enum class Op { num, var, add, sub, mul, div, pow, neg, ln, exp };
  struct Node {
    Op op;
    double value = 0;
    std::shared_ptr<const Node> a, b;
  };
  using Ptr = std::shared_ptr<const Node>;

  static Ptr make(Op op, Ptr a = nullptr, Ptr b = nullptr, double v = 0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    n->value = v;
    return n;
  }

  static double eval(const Node& n, double x) {
    switch (n.op) {
      case Op::num: return n.value;
      case Op::var: return x;
      case Op::add: return eval(*n.a, x) + eval(*n.b, x);
      case Op::sub: return eval(*n.a, x) - eval(*n.b, x);
      case Op::mul: return eval(*n.a, x) * eval(*n.b, x);
      case Op::div: return eval(*n.a, x) / eval(*n.b, x);
      case Op::pow: return std::pow(eval(*n.a, x), eval(*n.b, x));
      case Op::neg: return -eval(*n.a, x);
      case Op::ln: return std::log(eval(*n.a, x));
      case Op::exp: return std::exp(eval(*n.a, x));
    }
    return std::nan("");
  }

  struct Parser {
    const std::string& s;
    const std::string& var;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(const std::string& tok) {
      skip_ws();
      if (s.compare(pos, tok.size(), tok) == 0) {
        pos += tok.size();
        return true;
      }
      return false;
    }
    // Accepts ASCII operators plus the UTF-8 middle dot and minus sign.
    bool eat_minus() { return eat("-") || eat("\xE2\x88\x92"); }
    bool eat_times() { return eat("*") || eat("\xC2\xB7"); }

    Ptr expr() {
      Ptr lhs = term();
      for (;;) {
        if (eat("+")) lhs = make(Op::add, lhs, term());
        else if (eat_minus()) lhs = make(Op::sub, lhs, term());
        else return lhs;
      }
    }
    Ptr term() {
      Ptr lhs = unary();
      for (;;) {
        if (eat_times()) lhs = make(Op::mul, lhs, unary());
        else if (eat("/")) lhs = make(Op::div, lhs, unary());
        else return lhs;
      }
    }
    Ptr unary() {
      if (eat_minus()) return make(Op::neg, unary());
      if (eat("+")) return unary();
      return power();
    }
    Ptr power() {
      Ptr base = atom();
      if (eat("^")) return make(Op::pow, base, unary());
      return base;
    }
    bool word_at(const std::string& w) {
      skip_ws();
      if (s.compare(pos, w.size(), w) != 0) return false;
      const std::size_t end = pos + w.size();
      return end >= s.size() || !(std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_');
    }
    Ptr call(Op op, std::size_t name_len) {
      pos += name_len;
      if (!eat("(")) throw ParseError("expected '(' after function name", pos);
      Ptr arg = expr();
      if (!eat(")")) throw ParseError("expected ')'", pos);
      return make(op, arg);
    }
    Ptr atom() {
      skip_ws();
      if (pos >= s.size()) throw ParseError("expected operand", pos);
      if (eat("(")) {
        Ptr e = expr();
        if (!eat(")")) throw ParseError("expected ')'", pos);
        return e;
      }
      if (word_at("ln")) return call(Op::ln, 2);
      if (word_at("log")) return call(Op::ln, 3);
      if (word_at("exp")) return call(Op::exp, 3);
      if (word_at(var)) {
        pos += var.size();
        return make(Op::var);
      }
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("malformed number", pos);
        pos += static_cast<std::size_t>(end - begin);
        return make(Op::num, nullptr, nullptr, v);
      }
      throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }
  };

  Ptr root_;
  std::string text_;
};

}  // namespace blowup
