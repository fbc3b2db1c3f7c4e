#pragma once

// Expressions over x1..xn for potentials and magnetic potentials.
// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | xK | name '(' args ')' | '(' sum ')'
// Functions: abs, exp, sin, cos (one argument), min, max (two), dist (n
// coordinates of the centre, Euclidean distance from x).

#include <memory>
#include <string>
#include <vector>

#include "grid.hpp"

namespace mslab {

class ExprError : public Error {
 public:
  ExprError(std::size_t offset, const std::string& what)
      : Error(ErrorCode::kParse, what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class Expr {
 public:
  enum class Kind { kNumber, kVariable, kNegate, kAdd, kSub, kMul, kDiv, kPow, kCall };

  static Expr parse(const std::string& text, int n);

  double eval(const Point& x) const;
  // Fully parenthesized binary operations; parse(print()) reproduces the tree.
  std::string print() const;
  int dim() const { return n_; }

  bool operator==(const Expr& other) const;

  struct Node;  // defined in expr.cpp

 private:
  Expr(std::shared_ptr<const Node> root, int n) : root_(std::move(root)), n_(n) {}
  friend class ExprParser;

  std::shared_ptr<const Node> root_;
  int n_ = 2;
};

}  // namespace mslab
