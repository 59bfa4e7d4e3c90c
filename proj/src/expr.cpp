#include "zetasum/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

namespace zetasum {

namespace {

using P = std::shared_ptr<const Node>;

P num(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::number;
  n->value = v;
  return n;
}

P var() {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  return n;
}

bool is_num(const P& p, double v) { return p->kind == NodeKind::number && p->value == v; }
bool is_num(const P& p) { return p->kind == NodeKind::number; }

P node(NodeKind k, P a, P b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

P call(Func f, P a) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::call;
  n->func = f;
  n->a = std::move(a);
  return n;
}

// builders with light constant folding, so derivatives stay small

P neg(P a) {
  if (is_num(a)) return num(-a->value);
  if (a->kind == NodeKind::neg) return a->a;
  return node(NodeKind::neg, a);
}

P add(P a, P b) {
  if (is_num(a, 0.0)) return b;
  if (is_num(b, 0.0)) return a;
  if (is_num(a) && is_num(b)) return num(a->value + b->value);
  return node(NodeKind::add, a, b);
}

P sub(P a, P b) {
  if (is_num(b, 0.0)) return a;
  if (is_num(a, 0.0)) return neg(b);
  if (is_num(a) && is_num(b)) return num(a->value - b->value);
  return node(NodeKind::sub, a, b);
}

P mul(P a, P b) {
  if (is_num(a, 0.0) || is_num(b, 0.0)) return num(0.0);
  if (is_num(a, 1.0)) return b;
  if (is_num(b, 1.0)) return a;
  if (is_num(a) && is_num(b)) return num(a->value * b->value);
  return node(NodeKind::mul, a, b);
}

P divide(P a, P b) {
  if (is_num(a, 0.0)) return num(0.0);
  if (is_num(b, 1.0)) return a;
  return node(NodeKind::div, a, b);
}

P power(P a, P b) {
  if (is_num(b, 1.0)) return a;
  if (is_num(b, 0.0)) return num(1.0);
  return node(NodeKind::pow, a, b);
}

double eval(const Node& n, double x) {
  switch (n.kind) {
    case NodeKind::number: return n.value;
    case NodeKind::variable: return x;
    case NodeKind::neg: return -eval(*n.a, x);
    case NodeKind::add: return eval(*n.a, x) + eval(*n.b, x);
    case NodeKind::sub: return eval(*n.a, x) - eval(*n.b, x);
    case NodeKind::mul: return eval(*n.a, x) * eval(*n.b, x);
    case NodeKind::div: {
      const double d = eval(*n.b, x);
      if (d == 0.0) throw DomainError("division by zero at x = " + std::to_string(x));
      return eval(*n.a, x) / d;
    }
    case NodeKind::pow: {
      const double u = eval(*n.a, x), v = eval(*n.b, x);
      if (u < 0.0 && v != std::round(v))
        throw DomainError("negative base with non-integer exponent at x = " + std::to_string(x));
      if (u == 0.0 && v < 0.0) throw DomainError("zero to a negative power");
      return std::pow(u, v);
    }
    case NodeKind::call: {
      const double u = eval(*n.a, x);
      switch (n.func) {
        case Func::sin: return std::sin(u);
        case Func::cos: return std::cos(u);
        case Func::exp: return std::exp(u);
        case Func::log:
          if (!(u > 0.0)) throw DomainError("log of a nonpositive value at x = " + std::to_string(x));
          return std::log(u);
        case Func::sinh: return std::sinh(u);
        case Func::cosh: return std::cosh(u);
        case Func::tanh: return std::tanh(u);
        case Func::sqrt:
          if (u < 0.0) throw DomainError("sqrt of a negative value at x = " + std::to_string(x));
          return std::sqrt(u);
      }
    }
  }
  throw DomainError("malformed expression");
}

P derive(const P& p) {
  const Node& n = *p;
  switch (n.kind) {
    case NodeKind::number: return num(0.0);
    case NodeKind::variable: return num(1.0);
    case NodeKind::neg: return neg(derive(n.a));
    case NodeKind::add: return add(derive(n.a), derive(n.b));
    case NodeKind::sub: return sub(derive(n.a), derive(n.b));
    case NodeKind::mul: return add(mul(derive(n.a), n.b), mul(n.a, derive(n.b)));
    case NodeKind::div:
      return divide(sub(mul(derive(n.a), n.b), mul(n.a, derive(n.b))), power(n.b, num(2.0)));
    case NodeKind::pow: {
      if (is_num(n.b)) {
        const double c = n.b->value;
        return mul(mul(num(c), power(n.a, num(c - 1.0))), derive(n.a));
      }
      // u^v (v' log u + v u'/u)
      return mul(p, add(mul(derive(n.b), call(Func::log, n.a)),
                        divide(mul(n.b, derive(n.a)), n.a)));
    }
    case NodeKind::call: {
      const P& u = n.a;
      P du = derive(u);
      P outer;
      switch (n.func) {
        case Func::sin: outer = call(Func::cos, u); break;
        case Func::cos: outer = neg(call(Func::sin, u)); break;
        case Func::exp: outer = p; break;
        case Func::log: return divide(du, u);
        case Func::sinh: outer = call(Func::cosh, u); break;
        case Func::cosh: outer = call(Func::sinh, u); break;
        case Func::tanh: outer = sub(num(1.0), power(p, num(2.0))); break;
        case Func::sqrt: return divide(du, mul(num(2.0), p));
      }
      return mul(outer, du);
    }
  }
  throw DomainError("malformed expression");
}

const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::exp: return "exp";
    case Func::log: return "log";
    case Func::sinh: return "sinh";
    case Func::cosh: return "cosh";
    case Func::tanh: return "tanh";
    case Func::sqrt: return "sqrt";
  }
  return "?";
}

void print(const Node& n, std::ostringstream& os) {
  auto bin = [&](const char* name) {
    os << name << '(';
    print(*n.a, os);
    os << ", ";
    print(*n.b, os);
    os << ')';
  };
  switch (n.kind) {
    case NodeKind::number: os << n.value; return;
    case NodeKind::variable: os << 'x'; return;
    case NodeKind::neg:
      os << "neg(";
      print(*n.a, os);
      os << ')';
      return;
    case NodeKind::add: return bin("add");
    case NodeKind::sub: return bin("sub");
    case NodeKind::mul: return bin("mul");
    case NodeKind::div: return bin("div");
    case NodeKind::pow: return bin("pow");
    case NodeKind::call:
      os << func_name(n.func) << '(';
      print(*n.a, os);
      os << ')';
      return;
  }
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  P parse() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("empty expression", pos_);
    P e = expr();
    skip();
    if (pos_ < s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return e;
  }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;

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
    if (!accept(c)) {
      if (pos_ >= s_.size())
        throw ParseError(std::string("expected '") + c + "' before end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  P expr() {
    P e = term();
    for (;;) {
      if (accept('+'))
        e = node(NodeKind::add, e, term());
      else if (accept('-'))
        e = node(NodeKind::sub, e, term());
      else
        return e;
    }
  }

  P term() {
    P e = unary();
    for (;;) {
      if (accept('*'))
        e = node(NodeKind::mul, e, unary());
      else if (accept('/'))
        e = node(NodeKind::div, e, unary());
      else
        return e;
    }
  }

  // minus binds looser than '^': -x^2 = -(x^2)
  P unary() {
    if (accept('-')) return neg(unary());
    return pow_();
  }

  P pow_() {
    P a = atom();
    if (accept('^')) return node(NodeKind::pow, a, unary());
    return a;
  }

  P atom() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    if (accept('(')) {
      P e = expr();
      expect(')');
      return e;
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  P number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      digits();
    }
    // exponent only when a digit follows, so "2e" stays 2 * e
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t q = pos_ + 1;
      if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
      if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
        pos_ = q;
        digits();
      }
    }
    const std::string tok = s_.substr(start, pos_ - start);
    if (tok == ".") throw ParseError("malformed number", start);
    return num(std::strtod(tok.c_str(), nullptr));
  }

  P identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string id = s_.substr(start, pos_ - start);
    if (id == "x") return var();
    if (id == "pi") return num(std::numbers::pi);
    if (id == "e") return num(std::numbers::e);
    static const std::pair<const char*, Func> funcs[] = {
        {"sin", Func::sin},   {"cos", Func::cos},   {"exp", Func::exp},   {"log", Func::log},
        {"sinh", Func::sinh}, {"cosh", Func::cosh}, {"tanh", Func::tanh}, {"sqrt", Func::sqrt}};
    for (const auto& [name, f] : funcs) {
      if (id == name) {
        expect('(');
        P a = expr();
        expect(')');
        return call(f, a);
      }
    }
    throw ParseError("unknown identifier '" + id + "'", start);
  }
};

}  // namespace

double Expression::operator()(double x) const {
  if (!n_) throw DomainError("empty expression");
  return eval(*n_, x);
}

Expression Expression::derivative() const {
  if (!n_) throw DomainError("empty expression");
  return Expression(derive(n_));
}

std::string Expression::to_string() const {
  if (!n_) return "";
  std::ostringstream os;
  os.precision(17);
  print(*n_, os);
  return os.str();
}

namespace {
bool has_variable(const Node& n) {
  if (n.kind == NodeKind::variable) return true;
  return (n.a && has_variable(*n.a)) || (n.b && has_variable(*n.b));
}
}  // namespace

bool Expression::is_constant() const { return n_ && !has_variable(*n_); }

Expression parse_expression(const std::string& text) { return Expression(Parser(text).parse()); }

}  // namespace zetasum
