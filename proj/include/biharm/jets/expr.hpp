#pragma once

#include <memory>
#include <span>
#include <string>

#include "biharm/jets/jet.hpp"

namespace biharm::expr {

// Closed-form scalar expressions in named coordinates.  Charts, regions and
// registered maps all store their data in this form; the same tree evaluates
// either to a plain double (fast point queries) or to a truncated jet
// (derivatives for the geometry pipeline).
enum class Kind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Exp, Log, Sqrt, Sin, Cos };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind = Kind::Const;
  double value = 0.0;          // Const
  int var = -1;                // Var
  long long num = 1, den = 1;  // Pow: exponent num/den, den > 0
  Func func = Func::Exp;       // Call
  NodePtr a, b;
};

class Expr {
 public:
  Expr() = default;
  explicit Expr(NodePtr n) : n_(std::move(n)) {}

  bool empty() const { return !n_; }
  const Node& node() const { return *n_; }
  const NodePtr& ptr() const { return n_; }

 private:
  NodePtr n_;
};

Expr constant(double v);
Expr var(int index);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& a, long long num, long long den = 1);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);

// vars[i] supplies the value of Var(i); an out-of-range index throws
// DimensionError.  The jet overload requires a non-empty vars pack (it takes
// dim/order from it).
double eval(const Expr& e, std::span<const double> vars);
jets::Jet eval(const Expr& e, std::span<const jets::Jet> vars);

// Smallest n such that every Var index is < n.
int var_count(const Expr& e);

// Infix form that parse() accepts back; names[i] prints Var(i).
std::string to_string(const Expr& e, std::span<const std::string> names);

// Recursive-descent parser for the same infix grammar: +, -, *, /, unary
// minus, ^ with integer or parenthesised rational exponents (x^2, x^(-1),
// x^(1/2)), calls exp/ln/log/sqrt/sin/cos, the constant pi, and the declared
// coordinate names.  Malformed input throws ConfigError with the offset.
Expr parse(std::string_view text, std::span<const std::string> names);

} // namespace biharm::expr
