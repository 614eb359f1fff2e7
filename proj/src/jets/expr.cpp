#include "biharm/jets/expr.hpp"

#include <cmath>
#include <cstdio>

#include "biharm/errors.hpp"

namespace biharm::expr {

namespace {

NodePtr unary(Kind k, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  return n;
}

NodePtr binary(Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

} // namespace

Expr constant(double v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->value = v;
  return Expr(std::move(n));
}

Expr var(int index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = index;
  return Expr(std::move(n));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(binary(Kind::Add, a.ptr(), b.ptr())); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(binary(Kind::Sub, a.ptr(), b.ptr())); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(binary(Kind::Mul, a.ptr(), b.ptr())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(binary(Kind::Div, a.ptr(), b.ptr())); }
Expr operator-(const Expr& a) { return Expr(unary(Kind::Neg, a.ptr())); }

Expr pow(const Expr& a, long long num, long long den) {
  if (den == 0) throw ConfigError("expression exponent has zero denominator");
  if (den < 0) { num = -num; den = -den; }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->num = num;
  n->den = den;
  n->a = a.ptr();
  return Expr(std::move(n));
}

namespace {

Expr call(Func f, const Expr& a) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = f;
  n->a = a.ptr();
  return Expr(std::move(n));
}

} // namespace

Expr exp(const Expr& a) { return call(Func::Exp, a); }
Expr log(const Expr& a) { return call(Func::Log, a); }
Expr sqrt(const Expr& a) { return call(Func::Sqrt, a); }
Expr sin(const Expr& a) { return call(Func::Sin, a); }
Expr cos(const Expr& a) { return call(Func::Cos, a); }

namespace {

// Both scalar types share the evaluator; the context supplies the pieces
// whose spelling differs.
struct DoubleCtx {
  double constant(double v) const { return v; }
  double pow_int(double x, long long n) const {
    // Binary exponentiation, same operation order as the jet kernel, so
    // order-0 jet values and double evaluation agree bit for bit.
    if (n == 0) return 1.0;
    bool inv = n < 0;
    unsigned long long e = inv ? static_cast<unsigned long long>(-(n + 1)) + 1ull
                               : static_cast<unsigned long long>(n);
    double base = x, r = 1.0;
    while (e) {
      if (e & 1ull) r *= base;
      e >>= 1;
      if (e) base *= base;
    }
    return inv ? 1.0 / r : r;
  }
  double pow_rat(double x, long long num, long long den) const {
    if (x <= 0.0) throw DomainError("fractional power of a non-positive value");
    return std::pow(x, static_cast<double>(num) / static_cast<double>(den));
  }
  double exp(double x) const { return std::exp(x); }
  double log(double x) const {
    if (x <= 0.0) throw DomainError("log of a non-positive value");
    return std::log(x);
  }
  double sqrt(double x) const {
    if (x < 0.0) throw DomainError("sqrt of a negative value");
    return std::sqrt(x);
  }
  double sin(double x) const { return std::sin(x); }
  double cos(double x) const { return std::cos(x); }
};

struct JetCtx {
  int dim, order;
  jets::Jet constant(double v) const { return jets::Jet::constant(dim, order, v); }
  jets::Jet pow_int(const jets::Jet& x, long long n) const { return jets::pow(x, n); }
  jets::Jet pow_rat(const jets::Jet& x, long long num, long long den) const {
    return jets::pow(x, num, den);
  }
  jets::Jet exp(const jets::Jet& x) const { return jets::exp(x); }
  jets::Jet log(const jets::Jet& x) const { return jets::log(x); }
  jets::Jet sqrt(const jets::Jet& x) const { return jets::sqrt(x); }
  jets::Jet sin(const jets::Jet& x) const { return jets::sin(x); }
  jets::Jet cos(const jets::Jet& x) const { return jets::cos(x); }
};

template <class T, class Ctx>
T eval_node(const Node& n, std::span<const T> vars, const Ctx& ctx) {
  switch (n.kind) {
    case Kind::Const:
      return ctx.constant(n.value);
    case Kind::Var:
      if (n.var < 0 || static_cast<std::size_t>(n.var) >= vars.size())
        throw DimensionError("expression references coordinate " + std::to_string(n.var) +
                             " but only " + std::to_string(vars.size()) + " are supplied");
      return vars[static_cast<std::size_t>(n.var)];
    case Kind::Neg:
      return -eval_node(*n.a, vars, ctx);
    case Kind::Add:
      return eval_node(*n.a, vars, ctx) + eval_node(*n.b, vars, ctx);
    case Kind::Sub:
      return eval_node(*n.a, vars, ctx) - eval_node(*n.b, vars, ctx);
    case Kind::Mul:
      return eval_node(*n.a, vars, ctx) * eval_node(*n.b, vars, ctx);
    case Kind::Div:
      return eval_node(*n.a, vars, ctx) / eval_node(*n.b, vars, ctx);
    case Kind::Pow: {
      T base = eval_node(*n.a, vars, ctx);
      if (n.den == 1) return ctx.pow_int(base, n.num);
      if (n.num % n.den == 0) return ctx.pow_int(base, n.num / n.den);
      return ctx.pow_rat(base, n.num, n.den);
    }
    case Kind::Call: {
      T arg = eval_node(*n.a, vars, ctx);
      switch (n.func) {
        case Func::Exp: return ctx.exp(arg);
        case Func::Log: return ctx.log(arg);
        case Func::Sqrt: return ctx.sqrt(arg);
        case Func::Sin: return ctx.sin(arg);
        case Func::Cos: return ctx.cos(arg);
      }
    }
  }
  throw Error("corrupt expression node");
}

} // namespace

double eval(const Expr& e, std::span<const double> vars) {
  if (e.empty()) throw Error("evaluating an empty expression");
  return eval_node<double>(e.node(), vars, DoubleCtx{});
}

jets::Jet eval(const Expr& e, std::span<const jets::Jet> vars) {
  if (e.empty()) throw Error("evaluating an empty expression");
  if (vars.empty()) throw DimensionError("jet expression evaluation needs at least one variable");
  return eval_node<jets::Jet>(e.node(), vars, JetCtx{vars[0].dim(), vars[0].order()});
}

namespace {

int var_count_node(const Node& n) {
  int r = 0;
  if (n.kind == Kind::Var) r = n.var + 1;
  if (n.a) r = std::max(r, var_count_node(*n.a));
  if (n.b) r = std::max(r, var_count_node(*n.b));
  return r;
}

} // namespace

int var_count(const Expr& e) { return e.empty() ? 0 : var_count_node(e.node()); }

namespace {

// Precedence ladder for the printer: additive 1, multiplicative 2,
// unary minus 3, power 4, atoms 5.  A child is parenthesised when its own
// precedence falls below the minimum its position demands.
int prec(const Node& n) {
  switch (n.kind) {
    case Kind::Add:
    case Kind::Sub: return 1;
    case Kind::Mul:
    case Kind::Div: return 2;
    case Kind::Neg: return 3;
    case Kind::Pow: return 4;
    default: return 5;
  }
}

void print_node(std::string& out, const Node& n, std::span<const std::string> names);

void print_child(std::string& out, const Node& n, std::span<const std::string> names,
                 int min_prec) {
  const bool parens = prec(n) < min_prec;
  if (parens) out += '(';
  print_node(out, n, names);
  if (parens) out += ')';
}

void print_node(std::string& out, const Node& n, std::span<const std::string> names) {
  switch (n.kind) {
    case Kind::Const: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      if (n.value < 0) {
        out += '(';
        out += buf;
        out += ')';
      } else {
        out += buf;
      }
      return;
    }
    case Kind::Var:
      if (n.var < 0 || static_cast<std::size_t>(n.var) >= names.size())
        throw DimensionError("expression references coordinate " + std::to_string(n.var) +
                             " with no name supplied");
      out += names[static_cast<std::size_t>(n.var)];
      return;
    case Kind::Neg:
      out += '-';
      print_child(out, *n.a, names, 4);
      return;
    case Kind::Add:
      print_child(out, *n.a, names, 1);
      out += " + ";
      print_child(out, *n.b, names, 2);
      return;
    case Kind::Sub:
      print_child(out, *n.a, names, 1);
      out += " - ";
      print_child(out, *n.b, names, 2);
      return;
    case Kind::Mul:
      print_child(out, *n.a, names, 2);
      out += "*";
      print_child(out, *n.b, names, 3);
      return;
    case Kind::Div:
      print_child(out, *n.a, names, 2);
      out += "/";
      print_child(out, *n.b, names, 3);
      return;
    case Kind::Pow: {
      print_child(out, *n.a, names, 5);
      out += '^';
      if (n.den == 1 && n.num >= 0) {
        out += std::to_string(n.num);
      } else {
        out += '(';
        out += std::to_string(n.num);
        if (n.den != 1) {
          out += '/';
          out += std::to_string(n.den);
        }
        out += ')';
      }
      return;
    }
    case Kind::Call: {
      switch (n.func) {
        case Func::Exp: out += "exp"; break;
        case Func::Log: out += "ln"; break;
        case Func::Sqrt: out += "sqrt"; break;
        case Func::Sin: out += "sin"; break;
        case Func::Cos: out += "cos"; break;
      }
      out += '(';
      print_node(out, *n.a, names);
      out += ')';
      return;
    }
  }
}

} // namespace

std::string to_string(const Expr& e, std::span<const std::string> names) {
  if (e.empty()) return "0";
  std::string out;
  print_node(out, e.node(), names);
  return out;
}

} // namespace biharm::expr
