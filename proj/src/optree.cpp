#include "asymreg/optree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace asymreg {

OpTree::OpTree(std::vector<Op> prefix) : nodes_(std::move(prefix)) {
  if (nodes_.empty() || subtree_end(0) != nodes_.size()) {
    throw std::invalid_argument("malformed prefix operator tree");
  }
}

OpTree OpTree::leaf(Op op) {
  if (op_arity(op) != 0) throw std::invalid_argument("leaf needs a terminal");
  OpTree t;
  t.nodes_.push_back(op);
  return t;
}

OpTree OpTree::binary(Op op, const OpTree& lhs, const OpTree& rhs) {
  if (op_arity(op) != 2) throw std::invalid_argument("binary needs an operator");
  OpTree t;
  t.nodes_.reserve(1 + lhs.size() + rhs.size());
  t.nodes_.push_back(op);
  t.nodes_.insert(t.nodes_.end(), lhs.nodes_.begin(), lhs.nodes_.end());
  t.nodes_.insert(t.nodes_.end(), rhs.nodes_.begin(), rhs.nodes_.end());
  return t;
}

std::size_t OpTree::subtree_end(std::size_t begin) const {
  // Each node fills one open slot and opens `arity` new ones.
  int open = 1;
  std::size_t i = begin;
  while (open > 0) {
    if (i >= nodes_.size()) throw std::out_of_range("truncated prefix tree");
    open += op_arity(nodes_[i++]) - 1;
  }
  return i;
}

int OpTree::height() const {
  // Depth-tracking scan over the prefix sequence.
  int best = 0;
  std::vector<int> pending_depths{0};
  for (Op op : nodes_) {
    int depth = pending_depths.back();
    pending_depths.pop_back();
    best = std::max(best, depth);
    if (op_arity(op) == 2) {
      pending_depths.push_back(depth + 1);
      pending_depths.push_back(depth + 1);
    }
  }
  return best;
}

OpTree OpTree::subtree(std::size_t begin) const {
  OpTree t;
  t.nodes_.assign(nodes_.begin() + static_cast<std::ptrdiff_t>(begin),
                  nodes_.begin() + static_cast<std::ptrdiff_t>(subtree_end(begin)));
  return t;
}

OpTree OpTree::with_subtree(std::size_t begin, const OpTree& replacement) const {
  std::size_t end = subtree_end(begin);
  OpTree t;
  t.nodes_.reserve(nodes_.size() - (end - begin) + replacement.size());
  t.nodes_.insert(t.nodes_.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(begin));
  t.nodes_.insert(t.nodes_.end(), replacement.nodes_.begin(), replacement.nodes_.end());
  t.nodes_.insert(t.nodes_.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
  return t;
}

namespace {

Op node_op(NodeKind k) {
  switch (k) {
    case NodeKind::add: return Op::add;
    case NodeKind::sub: return Op::sub;
    case NodeKind::mul: return Op::mul;
    case NodeKind::div: return Op::div;
    case NodeKind::var_x: return Op::x;
    case NodeKind::const_one: return Op::one;
    case NodeKind::paren: break;
  }
  throw std::logic_error("parentheses have no operator");
}

bool multiplicative(Op op) { return op == Op::mul || op == Op::div; }

OpTree operand_tree(const ExprTree& t) {
  if (t.kind() == NodeKind::paren) return to_optree(t.children()[0]);
  return OpTree::leaf(node_op(t.kind()));
}

int precedence(Op op) {
  switch (op) {
    case Op::add:
    case Op::sub: return 1;
    case Op::mul:
    case Op::div: return 2;
    default: return 3;
  }
}

struct Infix {
  std::string text;
  int prec;
};

Infix infix(const OpTree& tree, std::size_t& pos) {
  Op op = tree.nodes()[pos++];
  if (op == Op::x) return {"x", 3};
  if (op == Op::one) return {"1", 3};
  Infix lhs = infix(tree, pos);
  Infix rhs = infix(tree, pos);
  int p = precedence(op);
  static constexpr const char* symbols[] = {" + ", " - ", " * ", " / "};
  std::string out = lhs.prec < p ? "( " + lhs.text + " )" : lhs.text;
  out += symbols[static_cast<int>(op)];
  out += rhs.prec <= p ? "( " + rhs.text + " )" : rhs.text;
  return {std::move(out), p};
}

void sexpr(const OpTree& tree, std::size_t& pos, std::string& out) {
  Op op = tree.nodes()[pos++];
  switch (op) {
    case Op::x: out += "x"; return;
    case Op::one: out += "1"; return;
    default: break;
  }
  static constexpr const char* names[] = {"+", "-", "*", "/"};
  out += "(";
  out += names[static_cast<int>(op)];
  out += " ";
  sexpr(tree, pos, out);
  out += " ";
  sexpr(tree, pos, out);
  out += ")";
}

double eval_at(std::span<const Op> nodes, std::size_t& pos, double x) {
  Op op = nodes[pos++];
  switch (op) {
    case Op::x: return x;
    case Op::one: return 1.0;
    default: break;
  }
  double a = eval_at(nodes, pos, x);
  double b = eval_at(nodes, pos, x);
  switch (op) {
    case Op::add: return a + b;
    case Op::sub: return a - b;
    case Op::mul: return a * b;
    case Op::div:
      if (!std::isfinite(b) || std::fabs(b) < kPoleThreshold) {
        return std::numeric_limits<double>::infinity();
      }
      return a / b;
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

OpTree to_optree(const ExprTree& expr) {
  if (!expr.is_binary()) return operand_tree(expr);

  // Unroll the left spine: ((t0 op1 t1) op2 t2) ... into operands and operators.
  std::vector<const ExprTree*> operands;
  std::vector<Op> ops;
  const ExprTree* node = &expr;
  while (node->is_binary()) {
    ops.push_back(node_op(node->kind()));
    operands.push_back(&node->children()[1]);
    node = &node->children()[0];
  }
  operands.push_back(node);
  std::reverse(operands.begin(), operands.end());
  std::reverse(ops.begin(), ops.end());

  std::optional<OpTree> sum;
  Op sum_op = Op::add;
  OpTree term = operand_tree(*operands[0]);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    OpTree rhs = operand_tree(*operands[i + 1]);
    if (multiplicative(ops[i])) {
      term = OpTree::binary(ops[i], term, rhs);
    } else {
      sum = sum ? OpTree::binary(sum_op, *sum, term) : term;
      sum_op = ops[i];
      term = std::move(rhs);
    }
  }
  return sum ? OpTree::binary(sum_op, *sum, term) : term;
}

ExprTree tree_to_expr(const OpTree& tree) {
  std::size_t pos = 0;
  return parse_text(infix(tree, pos).text);
}

std::string to_sexpr(const OpTree& tree) {
  std::string out;
  std::size_t pos = 0;
  sexpr(tree, pos, out);
  return out;
}

double evaluate(const OpTree& tree, double x) {
  std::size_t pos = 0;
  return eval_at(tree.nodes(), pos, x);
}

}  // namespace asymreg
