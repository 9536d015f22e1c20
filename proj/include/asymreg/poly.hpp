#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace asymreg {

using BigInt = boost::multiprecision::cpp_int;

/// Dense univariate polynomial with integer coefficients; coeffs()[i] is the
/// coefficient of x^i. Never stores trailing zeros, so the zero polynomial has
/// no coefficients.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<BigInt> coeffs);
  Poly(std::initializer_list<long long> coeffs);

  static Poly constant(const BigInt& c);
  static Poly monomial(const BigInt& c, int power);

  const std::vector<BigInt>& coeffs() const { return coeffs_; }
  bool is_zero() const { return coeffs_.empty(); }
  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  /// Index of the lowest nonzero coefficient; -1 for the zero polynomial.
  int ord0() const;
  const BigInt& leading() const { return coeffs_.back(); }

  /// gcd of the coefficients, nonnegative; 0 for the zero polynomial.
  BigInt content() const;
  Poly primitive_part() const;

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const BigInt& c) const;
  /// Divides every coefficient by c; c must divide all of them.
  Poly divided_exactly(const BigInt& c) const;

  bool operator==(const Poly&) const = default;

  std::string to_string() const;

 private:
  void trim();
  std::vector<BigInt> coeffs_;
};

/// Remainder of a * lc(b)^(deg a - deg b + 1) divided by b.
Poly pseudo_remainder(const Poly& a, const Poly& b);

/// Primitive gcd with positive leading coefficient, computed by the primitive
/// Euclidean algorithm. gcd(0, 0) = 0.
Poly gcd(const Poly& a, const Poly& b);

/// Quotient a / b for a divisor b that divides a exactly over the integers.
/// Throws std::domain_error if the division is not exact.
Poly divide_exactly(const Poly& a, const Poly& b);

}  // namespace asymreg
