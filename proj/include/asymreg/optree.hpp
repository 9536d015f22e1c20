#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "asymreg/grammar.hpp"

namespace asymreg {

enum class Op : std::uint8_t { add, sub, mul, div, x, one };

inline constexpr int op_arity(Op op) { return op == Op::x || op == Op::one ? 0 : 2; }

/// Operator tree in prefix order, with conventional precedence already resolved
/// ('*' and '/' bind tighter than '+' and '-', all left associative). This is
/// the meaning of an expression's token string and the genotype of the
/// evolutionary search.
class OpTree {
 public:
  OpTree() = default;
  explicit OpTree(std::vector<Op> prefix);

  static OpTree leaf(Op op);
  static OpTree binary(Op op, const OpTree& lhs, const OpTree& rhs);

  std::span<const Op> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  /// One past the last node of the subtree rooted at `begin`.
  std::size_t subtree_end(std::size_t begin) const;
  /// Height in edges; a single leaf has height 0.
  int height() const;

  OpTree subtree(std::size_t begin) const;
  /// Copy with the subtree at `begin` replaced by `replacement`.
  OpTree with_subtree(std::size_t begin, const OpTree& replacement) const;

  bool operator==(const OpTree&) const = default;

 private:
  std::vector<Op> nodes_;
};

/// Resolves the grammar tree's flat operator chains using conventional precedence.
OpTree to_optree(const ExprTree& expr);

/// Inverse direction: inserts T -> ( S ) exactly where precedence needs it.
/// to_optree(tree_to_expr(t)) == t for every tree.
ExprTree tree_to_expr(const OpTree& tree);

/// Prefix notation such as "(* (+ x 1) x)".
std::string to_sexpr(const OpTree& tree);

/// Evaluates at `x` in double precision. Division by a value with magnitude
/// below kPoleThreshold yields +infinity; non-finite values propagate.
double evaluate(const OpTree& tree, double x);

inline constexpr double kPoleThreshold = 1e-12;

}  // namespace asymreg
