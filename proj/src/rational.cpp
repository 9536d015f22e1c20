#include "asymreg/rational.hpp"

#include <cstdlib>
#include <stdexcept>

namespace asymreg {

namespace {

const Poly kOne{1};

void guard_growth(RationalForm& f) {
  if (f.num.degree() > kReductionDegree || f.den.degree() > kReductionDegree) f = reduce(f);
}

std::optional<RationalForm> eval_rational(std::span<const Op> nodes, std::size_t& pos) {
  Op op = nodes[pos++];
  switch (op) {
    case Op::x: return RationalForm{Poly{0, 1}, kOne};
    case Op::one: return RationalForm{kOne, kOne};
    default: break;
  }
  auto a = eval_rational(nodes, pos);
  auto b = eval_rational(nodes, pos);
  if (!a || !b) return std::nullopt;

  RationalForm out;
  switch (op) {
    case Op::add:
    case Op::sub: {
      const bool plus = op == Op::add;
      if (a->den == b->den) {
        out.num = plus ? a->num + b->num : a->num - b->num;
        out.den = a->den;
      } else {
        Poly lhs = a->num * b->den;
        Poly rhs = b->num * a->den;
        out.num = plus ? lhs + rhs : lhs - rhs;
        out.den = a->den * b->den;
      }
      break;
    }
    case Op::mul:
      out.num = a->num * b->num;
      out.den = a->den * b->den;
      break;
    case Op::div:
      if (b->num.is_zero()) return std::nullopt;
      out.num = a->num * b->den;
      out.den = a->den * b->num;
      break;
    default: throw std::logic_error("bad operator");
  }
  if (out.num.is_zero()) out.den = kOne;
  guard_growth(out);
  return out;
}

std::vector<BigInt> parse_coeffs(const std::string& text) {
  std::vector<BigInt> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string token = text.substr(start, comma - start);
    if (token.empty()) {
      if (text.empty()) break;
      throw std::invalid_argument("empty coefficient in canonical key");
    }
    out.emplace_back(token);
    start = comma + 1;
  }
  return out;
}

}  // namespace

std::optional<RationalForm> to_rational(const OpTree& tree) {
  std::size_t pos = 0;
  return eval_rational(tree.nodes(), pos);
}

std::optional<RationalForm> to_rational(const ExprTree& expr) { return to_rational(to_optree(expr)); }

int Condition::complexity() const { return std::abs(c0) + std::abs(cinf); }

std::string to_string(const Condition& c) {
  return "(" + std::to_string(c.c0) + "," + std::to_string(c.cinf) + ")";
}

LeadingPowers leading_powers(const RationalForm& form) {
  if (form.num.is_zero()) return {LeadingPowers::Status::zero_function, 0, 0};
  return {LeadingPowers::Status::defined, form.num.ord0() - form.den.ord0(),
          form.num.degree() - form.den.degree()};
}

LeadingPowers leading_powers(const std::optional<RationalForm>& form) {
  if (!form) return {LeadingPowers::Status::undefined_function, 0, 0};
  return leading_powers(*form);
}

LeadingPowers leading_powers(const OpTree& tree) { return leading_powers(to_rational(tree)); }

LeadingPowers leading_powers(const ExprTree& expr) { return leading_powers(to_rational(expr)); }

std::optional<Condition> condition_of(const ExprTree& expr) {
  auto lp = leading_powers(expr);
  if (!lp.defined()) return std::nullopt;
  return lp.condition();
}

RationalForm reduce(const RationalForm& form) {
  if (form.num.is_zero()) return {Poly{}, kOne};
  Poly g = gcd(form.num, form.den);
  Poly num = divide_exactly(form.num, g);
  Poly den = divide_exactly(form.den, g);
  BigInt c = boost::multiprecision::gcd(num.content(), den.content());
  if (den.leading() < 0) c = -c;
  return {num.divided_exactly(c), den.divided_exactly(c)};
}

CanonicalKey CanonicalKey::zero() {
  CanonicalKey k;
  k.kind_ = Kind::zero_function;
  return k;
}

CanonicalKey CanonicalKey::undefined() { return CanonicalKey{}; }

CanonicalKey CanonicalKey::of(const RationalForm& reduced) {
  if (reduced.num.is_zero()) return zero();
  CanonicalKey k;
  k.kind_ = Kind::function;
  k.num_ = reduced.num;
  k.den_ = reduced.den;
  return k;
}

std::string CanonicalKey::str() const {
  switch (kind_) {
    case Kind::zero_function: return "ZERO";
    case Kind::undefined_function: return "UNDEFINED";
    case Kind::function: break;
  }
  return num_.to_string() + "|" + den_.to_string();
}

CanonicalKey CanonicalKey::parse(const std::string& text) {
  if (text == "ZERO") return zero();
  if (text == "UNDEFINED") return undefined();
  auto bar = text.find('|');
  if (bar == std::string::npos) throw std::invalid_argument("canonical key without '|': " + text);
  RationalForm f{Poly(parse_coeffs(text.substr(0, bar))), Poly(parse_coeffs(text.substr(bar + 1)))};
  if (f.den.is_zero()) throw std::invalid_argument("canonical key with zero denominator");
  return of(f);
}

CanonicalKey canonicalize(const OpTree& tree) {
  auto form = to_rational(tree);
  if (!form) return CanonicalKey::undefined();
  return CanonicalKey::of(reduce(*form));
}

CanonicalKey canonicalize(const ExprTree& expr) { return canonicalize(to_optree(expr)); }

}  // namespace asymreg
