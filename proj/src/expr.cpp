#include "expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace mslab {

struct Expr::Node {
  Kind kind = Kind::kNumber;
  double value = 0.0;  // number
  int var = 0;         // variable index
  std::string name;    // function name
  std::vector<std::shared_ptr<const Node>> args;
};

using NodePtr = std::shared_ptr<const Expr::Node>;

class ExprParser {
 public:
  ExprParser(const std::string& text, int n) : s_(text), n_(n) {}

  Expr run() {
    require(n_ >= 1 && n_ <= 3, "expression dimension must be 1, 2 or 3");
    NodePtr root = sum();
    skip();
    if (pos_ != s_.size()) throw ExprError(pos_, "unexpected '" + std::string(1, s_[pos_]) + "'");
    return Expr(root, n_);
  }

 private:
  using Node = Expr::Node;
  using Kind = Expr::Kind;

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
  static NodePtr make(Kind kind, std::vector<NodePtr> args) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->args = std::move(args);
    return node;
  }

  // Operands are parsed before the argument list is built: GCC 11 leaks the
  // already-built elements of a braced list when a later one throws.
  NodePtr sum() {
    NodePtr left = product();
    for (;;) {
      Kind kind;
      if (accept('+')) kind = Kind::kAdd;
      else if (accept('-')) kind = Kind::kSub;
      else return left;
      NodePtr right = product();
      left = make(kind, {left, right});
    }
  }
  NodePtr product() {
    NodePtr left = unary();
    for (;;) {
      Kind kind;
      if (accept('*')) kind = Kind::kMul;
      else if (accept('/')) kind = Kind::kDiv;
      else return left;
      NodePtr right = unary();
      left = make(kind, {left, right});
    }
  }
  NodePtr unary() {
    if (accept('-')) {
      NodePtr operand = unary();
      return make(Kind::kNegate, {operand});
    }
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    NodePtr exponent = unary();
    return make(Kind::kPow, {base, exponent});
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) throw ExprError(pos_, "unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = sum();
      if (!accept(')')) throw ExprError(pos_, "expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ExprError(pos_, "unexpected '" + std::string(1, c) + "'");
  }
  NodePtr number() {
    const std::size_t start = pos_;
    double value = 0.0;
    const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), value);
    if (ec != std::errc()) throw ExprError(start, "malformed number");
    pos_ = static_cast<std::size_t>(end - s_.data());
    auto node = std::make_shared<Node>();
    node->value = value;
    return node;
  }
  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '0' + n_) {
      auto node = std::make_shared<Node>();
      node->kind = Kind::kVariable;
      node->var = name[1] - '1';
      return node;
    }
    const int arity = function_arity(name);
    if (arity < 0) throw ExprError(start, "unknown identifier '" + name + "'");
    if (!accept('(')) throw ExprError(pos_, "expected '(' after " + name);
    std::vector<NodePtr> args;
    if (!accept(')')) {
      do {
        args.push_back(sum());
      } while (accept(','));
      if (!accept(')')) throw ExprError(pos_, "expected ')'");
    }
    if (static_cast<int>(args.size()) != arity)
      throw ExprError(start, name + " takes " + std::to_string(arity) + " argument(s), got " +
                                 std::to_string(args.size()));
    auto node = std::make_shared<Node>();
    node->kind = Kind::kCall;
    node->name = name;
    node->args = std::move(args);
    return node;
  }
  int function_arity(const std::string& name) const {
    if (name == "abs" || name == "exp" || name == "sin" || name == "cos") return 1;
    if (name == "min" || name == "max") return 2;
    if (name == "dist") return n_;
    return -1;
  }

  const std::string& s_;
  int n_;
  std::size_t pos_ = 0;
};

Expr Expr::parse(const std::string& text, int n) { return ExprParser(text, n).run(); }

namespace {

double eval_node(const Expr::Node& node, const Point& x, int n) {
  using K = Expr::Kind;
  auto arg = [&](std::size_t i) { return eval_node(*node.args[i], x, n); };
  switch (node.kind) {
    case K::kNumber: return node.value;
    case K::kVariable: return x[node.var];
    case K::kNegate: return -arg(0);
    case K::kAdd: return arg(0) + arg(1);
    case K::kSub: return arg(0) - arg(1);
    case K::kMul: return arg(0) * arg(1);
    case K::kDiv: return arg(0) / arg(1);
    case K::kPow: return std::pow(arg(0), arg(1));
    case K::kCall:
      if (node.name == "abs") return std::abs(arg(0));
      if (node.name == "exp") return std::exp(arg(0));
      if (node.name == "sin") return std::sin(arg(0));
      if (node.name == "cos") return std::cos(arg(0));
      if (node.name == "min") return std::min(arg(0), arg(1));
      if (node.name == "max") return std::max(arg(0), arg(1));
      if (node.name == "dist") {
        double r2 = 0.0;
        for (int a = 0; a < n; ++a) r2 += (x[a] - arg(a)) * (x[a] - arg(a));
        return std::sqrt(r2);
      }
      break;
  }
  throw Error(ErrorCode::kInternal, "corrupt expression node");
}

std::string print_node(const Expr::Node& node) {
  using K = Expr::Kind;
  auto binary = [&](const char* op) {
    return "(" + print_node(*node.args[0]) + " " + op + " " + print_node(*node.args[1]) + ")";
  };
  switch (node.kind) {
    case K::kNumber: {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.17g", node.value);
      return buf;
    }
    case K::kVariable: return "x" + std::to_string(node.var + 1);
    case K::kNegate: return "(-" + print_node(*node.args[0]) + ")";
    case K::kAdd: return binary("+");
    case K::kSub: return binary("-");
    case K::kMul: return binary("*");
    case K::kDiv: return binary("/");
    case K::kPow: return binary("^");
    case K::kCall: {
      std::string out = node.name + "(";
      for (std::size_t i = 0; i < node.args.size(); ++i) {
        if (i) out += ", ";
        out += print_node(*node.args[i]);
      }
      return out + ")";
    }
  }
  return "?";
}

bool same(const Expr::Node& a, const Expr::Node& b) {
  if (a.kind != b.kind || a.value != b.value || a.var != b.var || a.name != b.name ||
      a.args.size() != b.args.size())
    return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same(*a.args[i], *b.args[i])) return false;
  return true;
}

}  // namespace

double Expr::eval(const Point& x) const { return eval_node(*root_, x, n_); }
std::string Expr::print() const { return print_node(*root_); }
bool Expr::operator==(const Expr& other) const { return n_ == other.n_ && same(*root_, *other.root_); }

}  // namespace mslab
