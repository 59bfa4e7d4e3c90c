#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "zetasum/errors.hpp"

namespace zetasum {

// Syntax error or unknown identifier at a byte offset of the input.
class ParseError : public DomainError {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : DomainError(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

enum class NodeKind { number, variable, neg, add, sub, mul, div, pow, call };

// sin cos exp log sinh cosh tanh sqrt
enum class Func { sin, cos, exp, log, sinh, cosh, tanh, sqrt };

struct Node {
  NodeKind kind = NodeKind::number;
  double value = 0.0;
  Func func = Func::sin;
  std::shared_ptr<const Node> a, b;
};

// Immutable expression in one variable x.
class Expression {
 public:
  Expression() = default;
  explicit Expression(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

  double operator()(double x) const;
  Expression derivative() const;
  // Prefix form, e.g. exp(mul(-2, x)).
  std::string to_string() const;
  const Node& root() const { return *n_; }
  bool is_constant() const;

 private:
  std::shared_ptr<const Node> n_;
};

// expr := term (('+'|'-') term)*; term := unary (('*'|'/') unary)*;
// unary := '-' unary | power; power := atom ('^' unary)?;
// atom := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'.
Expression parse_expression(const std::string& text);

}  // namespace zetasum
