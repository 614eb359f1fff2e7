#include <cctype>
#include <cstdlib>

#include "biharm/errors.hpp"
#include "biharm/jets/expr.hpp"

namespace biharm::expr {

namespace {

struct Parser {
  std::string_view text;
  std::span<const std::string> names;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("expression error at offset " + std::to_string(pos) + ": " + what +
                      " in \"" + std::string(text) + "\"");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  Expr parse_sum() {
    Expr r = parse_term();
    for (;;) {
      if (eat('+')) {
        r = r + parse_term();
      } else if (eat('-')) {
        r = r - parse_term();
      } else {
        return r;
      }
    }
  }

  Expr parse_term() {
    Expr r = parse_factor();
    for (;;) {
      if (eat('*')) {
        r = r * parse_factor();
      } else if (eat('/')) {
        r = r / parse_factor();
      } else {
        return r;
      }
    }
  }

  Expr parse_factor() {
    if (eat('-')) return -parse_factor();
    if (eat('+')) return parse_factor();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (!eat('^')) return base;
    long long num = 0, den = 1;
    if (eat('(')) {
      num = parse_integer();
      if (eat('/')) den = parse_integer();
      if (!eat(')')) fail("expected ')' after exponent");
    } else {
      num = parse_integer();
    }
    if (den == 0) fail("exponent denominator is zero");
    return pow(base, num, den);
  }

  long long parse_integer() {
    skip_ws();
    std::size_t start = pos;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    std::size_t digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      ++pos;
      ++digits;
    }
    if (digits == 0) fail("expected an integer exponent");
    return std::strtoll(std::string(text.substr(start, pos - start)).c_str(), nullptr, 10);
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of expression");
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    if (c == '(') {
      ++pos;
      Expr r = parse_sum();
      if (!eat(')')) fail("expected ')'");
      return r;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  Expr parse_number() {
    // strtod consumes the longest valid prefix, including exponent notation.
    std::string buf(text.substr(pos));
    const char* begin = buf.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos += static_cast<std::size_t>(end - begin);
    return constant(v);
  }

  Expr parse_name() {
    std::size_t start = pos;
    while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      ++pos;
    std::string_view name = text.substr(start, pos - start);
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return var(static_cast<int>(i));
    if (name == "pi") return constant(3.14159265358979323846);
    Func f;
    if (name == "exp") f = Func::Exp;
    else if (name == "ln" || name == "log") f = Func::Log;
    else if (name == "sqrt") f = Func::Sqrt;
    else if (name == "sin") f = Func::Sin;
    else if (name == "cos") f = Func::Cos;
    else fail("unknown name \"" + std::string(name) + "\"");
    if (!eat('(')) fail("expected '(' after function name");
    Expr arg = parse_sum();
    if (!eat(')')) fail("expected ')' after function argument");
    switch (f) {
      case Func::Exp: return exp(arg);
      case Func::Log: return log(arg);
      case Func::Sqrt: return sqrt(arg);
      case Func::Sin: return sin(arg);
      case Func::Cos: return cos(arg);
    }
    fail("unreachable");
  }
};

} // namespace

Expr parse(std::string_view text, std::span<const std::string> names) {
  Parser p{text, names};
  Expr r = p.parse_sum();
  p.skip_ws();
  if (p.pos != text.size())
    p.fail("trailing input \"" + std::string(text.substr(p.pos)) + "\"");
  return r;
}

} // namespace biharm::expr
