#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace asymreg {

// Grammar of rational expressions in one variable:
//
//   O -> S
//   S -> S '+' T | S '-' T | S '*' T | S '/' T | T
//   T -> '(' S ')' | 'x' | '1'
//
// Rule ids are fixed and shared with the policy wire protocol.

enum class Symbol : std::uint8_t { O, S, T };

enum class Rule : std::uint8_t {
  start = 0,  // O -> S
  add = 1,    // S -> S '+' T
  sub = 2,    // S -> S '-' T
  mul = 3,    // S -> S '*' T
  div = 4,    // S -> S '/' T
  term = 5,   // S -> T
  paren = 6,  // T -> '(' S ')'
  var_x = 7,  // T -> 'x'
  one = 8,    // T -> '1'
};

inline constexpr std::size_t kNumRules = 9;
inline constexpr std::size_t kDefaultLengthLimit = 100;

using RuleMask = std::array<bool, kNumRules>;
using RuleSeq = std::vector<Rule>;

struct RuleInfo {
  Symbol lhs;
  // Non-terminals on the right-hand side, left to right.
  std::array<Symbol, 2> rhs;
  std::uint8_t rhs_count;
  std::string_view text;
};

const RuleInfo& rule_info(Rule r);
Symbol rule_lhs(Rule r);
std::string_view symbol_name(Symbol s);

/// Converts an integer id to a rule, throwing std::out_of_range for ids outside 0..8.
Rule rule_from_int(int id);
inline int rule_to_int(Rule r) { return static_cast<int>(r); }

std::vector<int> rules_to_ints(std::span<const Rule> rules);
RuleSeq rules_from_ints(std::span<const int> ids);

class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A rule whose left-hand side does not match the pending non-terminal.
class InvalidRule : public GrammarError {
 public:
  InvalidRule(std::size_t position, Rule rule, std::optional<Symbol> pending);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class EmptySequence : public GrammarError {
 public:
  EmptySequence() : GrammarError("empty rule sequence") {}
};

class DerivationComplete : public GrammarError {
 public:
  DerivationComplete() : GrammarError("derivation is already complete") {}
};

class LengthLimitReached : public GrammarError {
 public:
  explicit LengthLimitReached(std::size_t limit);
};

class ParseError : public GrammarError {
 public:
  ParseError(std::size_t position, const std::string& what);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Leftmost derivation in progress: rules applied so far plus the stack of
/// pending non-terminals (back() is the next one to expand).
class DerivationState {
 public:
  explicit DerivationState(std::size_t length_limit = kDefaultLengthLimit);

  void apply(Rule r);
  DerivationState after(Rule r) const;

  bool complete() const { return stack_.empty(); }
  bool at_limit() const { return rules_.size() >= length_limit_; }
  std::optional<Symbol> pending() const;

  const RuleSeq& rules() const { return rules_; }
  const std::vector<Symbol>& stack() const { return stack_; }
  std::size_t length_limit() const { return length_limit_; }

  bool operator==(const DerivationState&) const = default;

 private:
  RuleSeq rules_;
  std::vector<Symbol> stack_;
  std::size_t length_limit_;
};

/// Rules whose left-hand side equals the pending non-terminal.
/// Throws DerivationComplete when nothing is pending.
RuleMask valid_next_mask(const DerivationState& state);
RuleMask mask_for_symbol(Symbol s);

enum class NodeKind : std::uint8_t { add, sub, mul, div, paren, var_x, const_one };

/// Parse tree shaped by the grammar. Binary nodes are S -> S op T, so the right
/// child of a binary node is never itself binary. S -> T is implicit.
class ExprTree {
 public:
  static ExprTree binary(NodeKind op, ExprTree lhs, ExprTree rhs);
  static ExprTree paren(ExprTree inner);
  static ExprTree x();
  static ExprTree one();

  NodeKind kind() const { return kind_; }
  std::span<const ExprTree> children() const { return children_; }
  std::span<ExprTree> children() { return children_; }
  bool is_binary() const;
  bool is_leaf() const { return kind_ == NodeKind::var_x || kind_ == NodeKind::const_one; }

  bool operator==(const ExprTree&) const = default;

 private:
  ExprTree(NodeKind kind, std::vector<ExprTree> children);

  NodeKind kind_;
  std::vector<ExprTree> children_;
};

/// Complete tree when the derivation terminates, otherwise the partial state.
using Derivation = std::variant<ExprTree, DerivationState>;

Derivation from_rules(std::span<const Rule> rules, std::size_t length_limit = kDefaultLengthLimit);
/// Like from_rules but requires a complete derivation.
ExprTree tree_from_rules(std::span<const Rule> rules);
RuleSeq to_rules(const ExprTree& expr);

/// Tokens separated by single spaces, e.g. "1 / ( x + 1 )".
std::string render(const ExprTree& expr);
ExprTree parse_text(std::string_view text);

/// A template such as "1 / ? - ?" whose holes ('?', '_' or U+25A1) stand for
/// T non-terminals. Returns the rule prefix; holes must come last in preorder.
RuleSeq parse_template(std::string_view text);

std::size_t leaf_count(const ExprTree& expr);

}  // namespace asymreg
