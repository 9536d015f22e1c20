#include "asymreg/poly.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace asymreg {

Poly::Poly(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Poly::Poly(std::initializer_list<long long> coeffs) {
  coeffs_.reserve(coeffs.size());
  for (long long c : coeffs) coeffs_.emplace_back(c);
  trim();
}

Poly Poly::constant(const BigInt& c) { return Poly(std::vector<BigInt>{c}); }

Poly Poly::monomial(const BigInt& c, int power) {
  std::vector<BigInt> coeffs(static_cast<std::size_t>(power) + 1);
  coeffs.back() = c;
  return Poly(std::move(coeffs));
}

void Poly::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

int Poly::ord0() const {
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] != 0) return static_cast<int>(i);
  }
  return -1;
}

BigInt Poly::content() const {
  BigInt g = 0;
  for (const auto& c : coeffs_) {
    g = boost::multiprecision::gcd(g, c);
    if (g == 1) break;
  }
  return boost::multiprecision::abs(g);
}

Poly Poly::primitive_part() const {
  if (is_zero()) return {};
  BigInt c = content();
  if (leading() < 0) c = -c;
  return divided_exactly(c);
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& c : out.coeffs_) c = -c;
  return out;
}

Poly operator+(const Poly& a, const Poly& b) {
  const auto& longer = a.coeffs_.size() >= b.coeffs_.size() ? a : b;
  const auto& shorter = a.coeffs_.size() >= b.coeffs_.size() ? b : a;
  std::vector<BigInt> out = longer.coeffs_;
  for (std::size_t i = 0; i < shorter.coeffs_.size(); ++i) out[i] += shorter.coeffs_[i];
  return Poly(std::move(out));
}

Poly operator-(const Poly& a, const Poly& b) {
  std::vector<BigInt> out(std::max(a.coeffs_.size(), b.coeffs_.size()));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] = a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] -= b.coeffs_[i];
  return Poly(std::move(out));
}

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> out(a.coeffs_.size() + b.coeffs_.size() - 1);
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Poly(std::move(out));
}

Poly Poly::scaled(const BigInt& c) const {
  if (c == 0) return {};
  Poly out = *this;
  for (auto& v : out.coeffs_) v *= c;
  return out;
}

Poly Poly::divided_exactly(const BigInt& c) const {
  Poly out = *this;
  for (auto& v : out.coeffs_) {
    BigInt q, r;
    boost::multiprecision::divide_qr(v, c, q, r);
    if (r != 0) throw std::domain_error("coefficient not divisible");
    v = std::move(q);
  }
  return out;
}

std::string Poly::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i > 0) out += ',';
    out += coeffs_[i].str();
  }
  return out;
}

Poly pseudo_remainder(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::domain_error("pseudo-division by zero polynomial");
  Poly r = a;
  const BigInt& lb = b.leading();
  while (!r.is_zero() && r.degree() >= b.degree()) {
    Poly shifted = (b * Poly::monomial(r.leading(), r.degree() - b.degree()));
    r = r.scaled(lb) - shifted;
  }
  return r;
}

Poly gcd(const Poly& a, const Poly& b) {
  Poly p = a.primitive_part();
  Poly q = b.primitive_part();
  if (p.degree() < q.degree()) std::swap(p, q);
  while (!q.is_zero()) {
    Poly r = pseudo_remainder(p, q).primitive_part();
    p = std::move(q);
    q = std::move(r);
  }
  return p;
}

Poly divide_exactly(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw std::domain_error("division by zero polynomial");
  if (a.is_zero()) return {};
  if (a.degree() < b.degree()) throw std::domain_error("inexact polynomial division");
  std::vector<BigInt> quotient(static_cast<std::size_t>(a.degree() - b.degree()) + 1);
  Poly r = a;
  while (!r.is_zero() && r.degree() >= b.degree()) {
    BigInt q, rem;
    boost::multiprecision::divide_qr(r.leading(), b.leading(), q, rem);
    if (rem != 0) throw std::domain_error("inexact polynomial division");
    int shift = r.degree() - b.degree();
    quotient[static_cast<std::size_t>(shift)] = q;
    r = r - b * Poly::monomial(q, shift);
  }
  if (!r.is_zero()) throw std::domain_error("inexact polynomial division");
  return Poly(std::move(quotient));
}

}  // namespace asymreg
