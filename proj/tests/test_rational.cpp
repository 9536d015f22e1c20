#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "asymreg/ea.hpp"
#include "asymreg/rational.hpp"

using namespace asymreg;

namespace {

LeadingPowers lp(const char* text) { return leading_powers(parse_text(text)); }
CanonicalKey key(const char* text) { return canonicalize(parse_text(text)); }

OpTree random_tree(std::mt19937_64& rng, int max_height = 4) { return grow_tree(rng, 1, max_height); }

}  // namespace

TEST_SUITE("rational") {
  TEST_CASE("polynomial basics") {
    Poly p{1, 2, 0};
    CHECK(p.degree() == 1);
    CHECK(Poly{}.degree() == -1);
    CHECK(Poly{0, 0, 3}.ord0() == 2);
    CHECK(Poly{4, 6}.content() == 2);
    CHECK((Poly{1, 1} * Poly{-1, 1}) == Poly{-1, 0, 1});
    CHECK((Poly{1, 1} - Poly{1, 1}).is_zero());
    CHECK(Poly{-2, -4}.primitive_part() == Poly{1, 2});
    CHECK(gcd(Poly{-1, 0, 1}, Poly{1, 2, 1}) == Poly{1, 1});
    CHECK(gcd(Poly{2}, Poly{4}) == Poly{1});
    CHECK(divide_exactly(Poly{-1, 0, 1}, Poly{1, 1}) == Poly{-1, 1});
    CHECK_THROWS_AS(divide_exactly(Poly{1, 0, 1}, Poly{1, 1}), std::domain_error);
  }

  TEST_CASE("to_rational keeps the unreduced form") {
    auto f = to_rational(parse_text("x + 1"));
    REQUIRE(f);
    CHECK(f->num == Poly{1, 1});
    CHECK(f->den == Poly{1});
    auto g = to_rational(parse_text("1 / ( x + 1 )"));
    REQUIRE(g);
    CHECK(g->num == Poly{1});
    CHECK(g->den == Poly{1, 1});
    CHECK_FALSE(to_rational(parse_text("1 / ( x - x )")));
    CHECK_FALSE(to_rational(parse_text("x / ( 1 - 1 ) * x")));
  }

  TEST_CASE("leading powers of quoted examples") {
    auto quad = lp("x * x + x + x + x + x + x + x * x");
    CHECK(quad.defined());
    CHECK(quad.pinf == 2);
    CHECK(quad.p0 == 1);
    auto inv = lp("1 / ( x * x ) + 1 / x");
    CHECK(inv.pinf == -1);
    CHECK(inv.p0 == -2);
    CHECK(lp("1 / ( x + 1 )") == LeadingPowers{LeadingPowers::Status::defined, 0, -1});
    CHECK(lp("x - x").status == LeadingPowers::Status::zero_function);
    CHECK(lp("1 / ( x - x )").status == LeadingPowers::Status::undefined_function);
    CHECK(lp("1 / x + x + ( x - 1 ) * ( x - 1 )") == LeadingPowers{LeadingPowers::Status::defined, -1, 2});
  }

  TEST_CASE("condition_of") {
    auto u = condition_of(parse_text("1 / x + x + ( x - 1 ) * ( x - 1 )"));
    REQUIRE(u);
    CHECK(*u == Condition{-1, 2});
    CHECK(u->complexity() == 3);
    CHECK(*condition_of(parse_text("1")) == Condition{0, 0});
    auto c = condition_of(parse_text("1 / ( x * x ) - x * x"));
    REQUIRE(c);
    CHECK(*c == Condition{-2, 2});
    CHECK(c->complexity() == 4);
    CHECK_FALSE(condition_of(parse_text("x - x")));
    CHECK(to_string(Condition{-1, 2}) == "(-1,2)");
  }

  TEST_CASE("canonical keys") {
    CHECK(key("x + 1") == key("( 1 ) + x"));
    CHECK(key("( x + x ) / ( x + x )").str() == "1|1");
    CHECK(key("x * ( x + 1 ) / x") == key("x + 1"));
    CHECK(key("x + 1").str() == "1,1|1");
    CHECK(key("x - x").str() == "ZERO");
    CHECK(key("1 / ( x - x )").str() == "UNDEFINED");
    CHECK(key("x - x") != key("1 / ( x - x )"));
    CHECK(key("1 - x") != key("x - 1"));
    // 2 / (x + 1) cannot make numerator and denominator primitive separately.
    CHECK(key("( 1 + 1 ) / ( x + 1 )").str() == "2|1,1");
    CHECK(key("1 / ( x + x + 1 + 1 )").str() == "1|2,2");
  }

  TEST_CASE("canonical key serialization round trips") {
    for (const char* t : {"x + 1", "1 / ( x + 1 )", "x - x", "1 / ( x - x )", "( 1 + 1 ) / ( x * x - 1 )"}) {
      CanonicalKey k = key(t);
      CHECK(CanonicalKey::parse(k.str()) == k);
      CHECK(std::hash<CanonicalKey>{}(k) == std::hash<std::string>{}(k.str()));
    }
    CHECK_THROWS(CanonicalKey::parse("garbage"));
  }

  TEST_CASE("reduce normalizes content and sign") {
    RationalForm f{Poly{-2, -2}, Poly{-4, 0, 4}};
    RationalForm r = reduce(f);
    CHECK(r.num == Poly{-1});
    CHECK(r.den == Poly{-2, 2});
  }

  TEST_CASE("leading powers agree with the asymptotic probe") {
    std::mt19937_64 rng(11);
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
      OpTree t = random_tree(rng);
      LeadingPowers p = leading_powers(t);
      auto z = oracle::probe_power(t, true);
      auto inf = oracle::probe_power(t, false);
      if (!p.defined()) {
        if (p.status == LeadingPowers::Status::zero_function) {
          CHECK_FALSE(z);
        }
        continue;
      }
      REQUIRE(z);
      REQUIRE(inf);
      CHECK(p.p0 == *z);
      CHECK(p.pinf == *inf);
      ++checked;
    }
    CHECK(checked > 200);
  }

  TEST_CASE("multiplicativity and the addition bound over 1000 pairs") {
    std::mt19937_64 rng(5);
    int mult = 0, add = 0;
    for (int i = 0; i < 1000; ++i) {
      OpTree f = random_tree(rng);
      OpTree g = random_tree(rng);
      auto pf = leading_powers(f);
      auto pg = leading_powers(g);
      if (!pf.defined() || !pg.defined()) continue;
      auto prod = leading_powers(OpTree::binary(Op::mul, f, g));
      REQUIRE(prod.defined());
      CHECK(prod.p0 == pf.p0 + pg.p0);
      CHECK(prod.pinf == pf.pinf + pg.pinf);
      auto quot = leading_powers(OpTree::binary(Op::div, f, g));
      REQUIRE(quot.defined());
      CHECK(quot.p0 == pf.p0 - pg.p0);
      CHECK(quot.pinf == pf.pinf - pg.pinf);
      ++mult;

      auto sum = leading_powers(OpTree::binary(Op::add, f, g));
      if (sum.status == LeadingPowers::Status::zero_function) continue;
      REQUIRE(sum.defined());
      CHECK(sum.pinf <= std::max(pf.pinf, pg.pinf));
      CHECK(sum.p0 >= std::min(pf.p0, pg.p0));
      if (pf.pinf != pg.pinf) CHECK(sum.pinf == std::max(pf.pinf, pg.pinf));
      if (pf.p0 != pg.p0) CHECK(sum.p0 == std::min(pf.p0, pg.p0));
      ++add;
    }
    CHECK(mult > 500);
    CHECK(add > 500);
  }

  TEST_CASE("canonical keys match exact point agreement") {
    std::mt19937_64 rng(3);
    const std::vector<oracle::cpp_rational> seven = {
        {3, 2}, {5, 3}, {7, 4}, {9, 5}, {11, 7}, {13, 8}, {17, 9}};
    int equal = 0;
    for (int i = 0; i < 1000; ++i) {
      OpTree f = random_tree(rng, 3);
      OpTree g;
      switch (i % 4) {
        case 0: g = random_tree(rng, 3); break;
        case 1: g = OpTree::binary(Op::div, OpTree::binary(Op::mul, f, OpTree::leaf(Op::x)), OpTree::leaf(Op::x)); break;
        case 2: g = OpTree::binary(Op::sub, OpTree::binary(Op::add, f, OpTree::leaf(Op::one)), OpTree::leaf(Op::one)); break;
        default: {
          OpTree h = random_tree(rng, 2);
          g = OpTree::binary(Op::add, h, OpTree::binary(Op::sub, f, h));
        }
      }
      const bool same_key = canonicalize(f) == canonicalize(g);
      const bool agree = oracle::agree_on_points(f, g, 31);
      CHECK(same_key == agree);
      equal += same_key;
      if (same_key) {
        for (const auto& x : seven) {
          auto a = oracle::eval_exact(f, x);
          auto b = oracle::eval_exact(g, x);
          if (a && b) CHECK(*a == *b);
        }
      }
    }
    CHECK(equal > 300);
  }
}
