#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>

#include "asymreg/grammar.hpp"
#include "asymreg/optree.hpp"
#include "asymreg/poly.hpp"

namespace asymreg {

/// num / den with den never the zero polynomial. Not necessarily reduced.
struct RationalForm {
  Poly num;
  Poly den;

  bool operator==(const RationalForm&) const = default;
};

/// Degree above which to_rational reduces intermediate results by their gcd.
inline constexpr int kReductionDegree = 128;

/// Exact bottom-up evaluation. std::nullopt means the expression divides by
/// the identically zero function somewhere (an undefined function).
std::optional<RationalForm> to_rational(const OpTree& tree);
std::optional<RationalForm> to_rational(const ExprTree& expr);

/// Desired or achieved pair of leading powers at x -> 0 and x -> infinity.
struct Condition {
  int c0 = 0;
  int cinf = 0;

  /// |c0| + |cinf|
  int complexity() const;

  auto operator<=>(const Condition&) const = default;
};

std::string to_string(const Condition& c);

struct LeadingPowers {
  enum class Status { defined, zero_function, undefined_function };

  Status status = Status::undefined_function;
  int p0 = 0;
  int pinf = 0;

  bool defined() const { return status == Status::defined; }
  Condition condition() const { return {p0, pinf}; }

  bool operator==(const LeadingPowers&) const = default;
};

LeadingPowers leading_powers(const RationalForm& form);
LeadingPowers leading_powers(const std::optional<RationalForm>& form);
LeadingPowers leading_powers(const OpTree& tree);
LeadingPowers leading_powers(const ExprTree& expr);

/// Condition of an expression, or std::nullopt for zero and undefined functions.
std::optional<Condition> condition_of(const ExprTree& expr);

/// Semantic identity of an expression: the reduced p/q with integer
/// coefficients, no common factor, overall content 1 and positive leading
/// denominator coefficient. Zero and undefined functions get reserved keys.
class CanonicalKey {
 public:
  enum class Kind { function, zero_function, undefined_function };

  static CanonicalKey zero();
  static CanonicalKey undefined();
  static CanonicalKey of(const RationalForm& reduced);

  Kind kind() const { return kind_; }
  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }

  /// "num-coeffs|den-coeffs", coefficients in increasing power order, e.g.
  /// "1,1|1" for x + 1. Reserved keys serialize as "ZERO" and "UNDEFINED".
  std::string str() const;
  static CanonicalKey parse(const std::string& text);

  bool operator==(const CanonicalKey&) const = default;

 private:
  Kind kind_ = Kind::undefined_function;
  Poly num_;
  Poly den_;
};

/// Reduces by the polynomial gcd and normalizes content and sign.
RationalForm reduce(const RationalForm& form);

CanonicalKey canonicalize(const OpTree& tree);
CanonicalKey canonicalize(const ExprTree& expr);

}  // namespace asymreg

template <>
struct std::hash<asymreg::CanonicalKey> {
  std::size_t operator()(const asymreg::CanonicalKey& key) const noexcept {
    return std::hash<std::string>{}(key.str());
  }
};
