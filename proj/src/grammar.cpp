#include "asymreg/grammar.hpp"

#include <algorithm>
#include <sstream>

namespace asymreg {

namespace {

constexpr std::array<RuleInfo, kNumRules> kRules{{
    {Symbol::O, {Symbol::S, Symbol::S}, 1, "O -> S"},
    {Symbol::S, {Symbol::S, Symbol::T}, 2, "S -> S '+' T"},
    {Symbol::S, {Symbol::S, Symbol::T}, 2, "S -> S '-' T"},
    {Symbol::S, {Symbol::S, Symbol::T}, 2, "S -> S '*' T"},
    {Symbol::S, {Symbol::S, Symbol::T}, 2, "S -> S '/' T"},
    {Symbol::S, {Symbol::T, Symbol::T}, 1, "S -> T"},
    {Symbol::T, {Symbol::S, Symbol::S}, 1, "T -> '(' S ')'"},
    {Symbol::T, {Symbol::S, Symbol::S}, 0, "T -> 'x'"},
    {Symbol::T, {Symbol::S, Symbol::S}, 0, "T -> '1'"},
}};

std::string describe_pending(std::optional<Symbol> pending) {
  return pending ? std::string(symbol_name(*pending)) : std::string("<none>");
}

}  // namespace

const RuleInfo& rule_info(Rule r) { return kRules.at(static_cast<std::size_t>(r)); }

Symbol rule_lhs(Rule r) { return rule_info(r).lhs; }

std::string_view symbol_name(Symbol s) {
  switch (s) {
    case Symbol::O: return "O";
    case Symbol::S: return "S";
    case Symbol::T: return "T";
  }
  return "?";
}

Rule rule_from_int(int id) {
  if (id < 0 || id >= static_cast<int>(kNumRules)) {
    throw std::out_of_range("rule id out of range: " + std::to_string(id));
  }
  return static_cast<Rule>(id);
}

std::vector<int> rules_to_ints(std::span<const Rule> rules) {
  std::vector<int> out;
  out.reserve(rules.size());
  for (Rule r : rules) out.push_back(rule_to_int(r));
  return out;
}

RuleSeq rules_from_ints(std::span<const int> ids) {
  RuleSeq out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(rule_from_int(id));
  return out;
}

InvalidRule::InvalidRule(std::size_t position, Rule rule, std::optional<Symbol> pending)
    : GrammarError("rule " + std::to_string(rule_to_int(rule)) + " (" +
                   std::string(rule_info(rule).text) + ") at position " + std::to_string(position) +
                   " does not expand pending symbol " + describe_pending(pending)),
      position_(position) {}

LengthLimitReached::LengthLimitReached(std::size_t limit)
    : GrammarError("rule sequence length limit " + std::to_string(limit) + " reached") {}

ParseError::ParseError(std::size_t position, const std::string& what)
    : GrammarError("parse error at position " + std::to_string(position) + ": " + what),
      position_(position) {}

// ---------------------------------------------------------------------------

DerivationState::DerivationState(std::size_t length_limit)
    : stack_{Symbol::O}, length_limit_(length_limit) {
  if (length_limit == 0) throw std::invalid_argument("length limit must be positive");
}

std::optional<Symbol> DerivationState::pending() const {
  if (stack_.empty()) return std::nullopt;
  return stack_.back();
}

void DerivationState::apply(Rule r) {
  if (stack_.empty()) throw InvalidRule(rules_.size(), r, std::nullopt);
  if (rules_.size() >= length_limit_) throw LengthLimitReached(length_limit_);
  const RuleInfo& info = rule_info(r);
  if (info.lhs != stack_.back()) throw InvalidRule(rules_.size(), r, stack_.back());
  stack_.pop_back();
  for (int i = info.rhs_count - 1; i >= 0; --i) stack_.push_back(info.rhs[static_cast<std::size_t>(i)]);
  rules_.push_back(r);
}

DerivationState DerivationState::after(Rule r) const {
  DerivationState next = *this;
  next.apply(r);
  return next;
}

RuleMask mask_for_symbol(Symbol s) {
  RuleMask mask{};
  for (std::size_t i = 0; i < kNumRules; ++i) mask[i] = kRules[i].lhs == s;
  return mask;
}

RuleMask valid_next_mask(const DerivationState& state) {
  auto top = state.pending();
  if (!top) throw DerivationComplete();
  return mask_for_symbol(*top);
}

// ---------------------------------------------------------------------------

ExprTree::ExprTree(NodeKind kind, std::vector<ExprTree> children)
    : kind_(kind), children_(std::move(children)) {}

ExprTree ExprTree::binary(NodeKind op, ExprTree lhs, ExprTree rhs) {
  if (op != NodeKind::add && op != NodeKind::sub && op != NodeKind::mul && op != NodeKind::div) {
    throw std::invalid_argument("binary node needs an arithmetic operator");
  }
  if (rhs.is_binary()) throw std::invalid_argument("right operand of S -> S op T must be a T node");
  std::vector<ExprTree> children;
  children.reserve(2);
  children.push_back(std::move(lhs));
  children.push_back(std::move(rhs));
  return ExprTree(op, std::move(children));
}

ExprTree ExprTree::paren(ExprTree inner) {
  std::vector<ExprTree> children;
  children.push_back(std::move(inner));
  return ExprTree(NodeKind::paren, std::move(children));
}

ExprTree ExprTree::x() { return ExprTree(NodeKind::var_x, {}); }
ExprTree ExprTree::one() { return ExprTree(NodeKind::const_one, {}); }

bool ExprTree::is_binary() const {
  return kind_ == NodeKind::add || kind_ == NodeKind::sub || kind_ == NodeKind::mul ||
         kind_ == NodeKind::div;
}

namespace {

NodeKind op_kind(Rule r) {
  switch (r) {
    case Rule::add: return NodeKind::add;
    case Rule::sub: return NodeKind::sub;
    case Rule::mul: return NodeKind::mul;
    case Rule::div: return NodeKind::div;
    default: throw std::logic_error("not an operator rule");
  }
}

Rule op_rule(NodeKind k) {
  switch (k) {
    case NodeKind::add: return Rule::add;
    case NodeKind::sub: return Rule::sub;
    case NodeKind::mul: return Rule::mul;
    case NodeKind::div: return Rule::div;
    default: throw std::logic_error("not an operator node");
  }
}

// Builders over an already validated complete sequence.
class TreeBuilder {
 public:
  explicit TreeBuilder(std::span<const Rule> rules) : rules_(rules) {}

  ExprTree build() {
    next();  // O -> S
    return build_s();
  }

 private:
  Rule next() { return rules_[pos_++]; }

  ExprTree build_s() {
    Rule r = next();
    if (r == Rule::term) return build_t();
    ExprTree lhs = build_s();
    ExprTree rhs = build_t();
    return ExprTree::binary(op_kind(r), std::move(lhs), std::move(rhs));
  }

  ExprTree build_t() {
    Rule r = next();
    switch (r) {
      case Rule::paren: return ExprTree::paren(build_s());
      case Rule::var_x: return ExprTree::x();
      case Rule::one: return ExprTree::one();
      default: throw std::logic_error("unexpected rule for T");
    }
  }

  std::span<const Rule> rules_;
  std::size_t pos_ = 0;
};

void emit_t(const ExprTree& t, RuleSeq& out);

void emit_s(const ExprTree& s, RuleSeq& out) {
  if (s.is_binary()) {
    out.push_back(op_rule(s.kind()));
    emit_s(s.children()[0], out);
    emit_t(s.children()[1], out);
  } else {
    out.push_back(Rule::term);
    emit_t(s, out);
  }
}

void emit_t(const ExprTree& t, RuleSeq& out) {
  switch (t.kind()) {
    case NodeKind::paren:
      out.push_back(Rule::paren);
      emit_s(t.children()[0], out);
      break;
    case NodeKind::var_x: out.push_back(Rule::var_x); break;
    case NodeKind::const_one: out.push_back(Rule::one); break;
    default: throw std::logic_error("binary node in T position");
  }
}

void render_into(const ExprTree& e, std::string& out) {
  auto token = [&](std::string_view tok) {
    if (!out.empty()) out.push_back(' ');
    out.append(tok);
  };
  switch (e.kind()) {
    case NodeKind::add:
    case NodeKind::sub:
    case NodeKind::mul:
    case NodeKind::div: {
      static constexpr std::string_view ops[] = {"+", "-", "*", "/"};
      render_into(e.children()[0], out);
      token(ops[static_cast<int>(e.kind())]);
      render_into(e.children()[1], out);
      break;
    }
    case NodeKind::paren:
      token("(");
      render_into(e.children()[0], out);
      token(")");
      break;
    case NodeKind::var_x: token("x"); break;
    case NodeKind::const_one: token("1"); break;
  }
}

// ---------------------------------------------------------------------------
// Text parsing. The parser emits preorder rule ids directly; kHole marks a T
// left unexpanded by a template placeholder.

constexpr int kHole = -1;

struct Token {
  char kind;  // one of + - * / ( ) x 1 ? and '$' for end of input
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view text, bool allow_holes) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    switch (c) {
      case '+': case '-': case '*': case '/': case '(': case ')': case 'x': case '1':
        tokens.push_back({static_cast<char>(c), i});
        ++i;
        continue;
      default: break;
    }
    if (allow_holes && (c == '?' || c == '_')) {
      tokens.push_back({'?', i});
      ++i;
      continue;
    }
    auto starts = [&](std::string_view s) { return text.substr(i, s.size()) == s; };
    if (starts("−")) {  // minus sign
      tokens.push_back({'-', i});
      i += 3;
    } else if (starts("×")) {  // multiplication sign
      tokens.push_back({'*', i});
      i += 2;
    } else if (allow_holes && starts("□")) {  // white square
      tokens.push_back({'?', i});
      i += 3;
    } else {
      throw ParseError(i, std::string("unexpected character '") + text[i] + "'");
    }
  }
  tokens.push_back({'$', text.size()});
  return tokens;
}

class TextParser {
 public:
  explicit TextParser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  std::vector<int> parse() {
    std::vector<int> out{rule_to_int(Rule::start)};
    parse_s(out);
    if (peek().kind != '$') throw ParseError(peek().pos, std::string("unexpected '") + peek().kind + "'");
    return out;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }

  void parse_s(std::vector<int>& out) {
    std::vector<int> ops;
    std::vector<std::vector<int>> operands;
    operands.emplace_back();
    parse_t(operands.back());
    while (true) {
      char k = peek().kind;
      int rule = k == '+' ? 1 : k == '-' ? 2 : k == '*' ? 3 : k == '/' ? 4 : 0;
      if (rule == 0) break;
      ++pos_;
      ops.push_back(rule);
      operands.emplace_back();
      parse_t(operands.back());
    }
    // S -> S op T is left recursive: the last operator is the outermost rule.
    out.insert(out.end(), ops.rbegin(), ops.rend());
    out.push_back(rule_to_int(Rule::term));
    for (auto& operand : operands) out.insert(out.end(), operand.begin(), operand.end());
  }

  void parse_t(std::vector<int>& out) {
    const Token& tok = peek();
    switch (tok.kind) {
      case 'x': ++pos_; out.push_back(rule_to_int(Rule::var_x)); return;
      case '1': ++pos_; out.push_back(rule_to_int(Rule::one)); return;
      case '?': ++pos_; out.push_back(kHole); return;
      case '(':
        ++pos_;
        out.push_back(rule_to_int(Rule::paren));
        parse_s(out);
        if (peek().kind != ')') throw ParseError(peek().pos, "expected ')'");
        ++pos_;
        return;
      case '$':
        if (pos_ > 0) throw ParseError(tokens_[pos_ - 1].pos, "dangling operator, expected operand");
        throw ParseError(tok.pos, "empty expression");
      default:
        throw ParseError(tok.pos, std::string("expected operand, found '") + tok.kind + "'");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Derivation from_rules(std::span<const Rule> rules, std::size_t length_limit) {
  if (rules.empty()) throw EmptySequence();
  DerivationState state(std::max(length_limit, rules.size()));
  for (Rule r : rules) state.apply(r);
  if (!state.complete()) return state;
  return TreeBuilder(rules).build();
}

ExprTree tree_from_rules(std::span<const Rule> rules) {
  auto d = from_rules(rules);
  if (auto* tree = std::get_if<ExprTree>(&d)) return std::move(*tree);
  throw GrammarError("rule sequence is not a complete derivation");
}

RuleSeq to_rules(const ExprTree& expr) {
  RuleSeq out{Rule::start};
  emit_s(expr, out);
  return out;
}

std::string render(const ExprTree& expr) {
  std::string out;
  render_into(expr, out);
  return out;
}

ExprTree parse_text(std::string_view text) {
  auto ids = TextParser(tokenize(text, false)).parse();
  RuleSeq rules;
  rules.reserve(ids.size());
  for (int id : ids) rules.push_back(rule_from_int(id));
  return tree_from_rules(rules);
}

RuleSeq parse_template(std::string_view text) {
  auto ids = TextParser(tokenize(text, true)).parse();
  auto first_hole = std::find(ids.begin(), ids.end(), kHole);
  if (std::any_of(first_hole, ids.end(), [](int id) { return id != kHole; })) {
    throw ParseError(0, "template holes must be the trailing symbols of the preorder derivation");
  }
  RuleSeq prefix;
  for (auto it = ids.begin(); it != first_hole; ++it) prefix.push_back(rule_from_int(*it));
  return prefix;
}

std::size_t leaf_count(const ExprTree& expr) {
  if (expr.is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& c : expr.children()) n += leaf_count(c);
  return n;
}

}  // namespace asymreg
