#include <map>
#include <set>

#include "doctest.h"
#include "oracles.hpp"

#include "asymreg/corpus.hpp"
#include "asymreg/json_io.hpp"
#include "asymreg/objective.hpp"

using namespace asymreg;

namespace {

std::set<std::string> texts(const std::vector<CorpusRecord>& recs) {
  std::set<std::string> out;
  for (const auto& r : recs) out.insert(r.expr);
  return out;
}

std::string dump(const std::vector<CorpusRecord>& recs) {
  std::string out;
  for (const auto& r : recs) out += to_json(r).dump() + "\n";
  return out;
}

const Dataset& desk_dataset() {
  static const Dataset ds = [] {
    auto c = DatasetConfig::desk();
    c.seed = 7;
    return build_dataset(c);
  }();
  return ds;
}

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("enumerate small budgets") {
    auto three = enumerate_expressions(3);
    CHECK(texts(three) == std::set<std::string>{"x", "1"});
    CHECK(enumerate_expressions(2).empty());
  }

  TEST_CASE("enumeration count agrees with an independent recursion") {
    for (std::size_t n : {3u, 5u, 7u, 9u, 10u}) {
      CAPTURE(n);
      auto recs = enumerate_expressions(n, 2);
      CHECK(oracle::cpp_int(recs.size()) == oracle::complete_derivations_up_to(static_cast<int>(n)));
      CHECK(texts(recs).size() == recs.size());
    }
  }

  TEST_CASE("enumerated records round trip") {
    for (const auto& r : enumerate_expressions(10, 2)) {
      auto d = from_rules(r.rules);
      REQUIRE(std::holds_alternative<ExprTree>(d));
      CHECK(render(std::get<ExprTree>(d)) == r.expr);
      CHECK(r.key == canonicalize(std::get<ExprTree>(d)));
      CHECK(r.condition == condition_of(std::get<ExprTree>(d)));
    }
  }

  TEST_CASE("space size matches brute-force structure counts") {
    for (int i = 1; i <= 9; ++i) {
      CAPTURE(i);
      CHECK(space_size(static_cast<std::size_t>(i)) == oracle::cpp_int(oracle::count_structures(i)));
    }
    // A terminal absorbs any leftover budget, so from 6 rules on the same
    // structure is counted once per budget split.
    for (int i = 1; i <= 7; ++i) {
      CAPTURE(i);
      std::vector<std::string> all;
      oracle::count_structures(i, &all);
      const auto distinct = std::set<std::string>(all.begin(), all.end()).size();
      if (i <= 5) {
        CHECK(distinct == all.size());
      } else {
        CHECK(distinct < all.size());
      }
    }
    CHECK(space_size(2) == 5);
    CHECK(space_size(3) == 35);
  }

  TEST_CASE("space size magnitudes") {
    auto approx = [](std::size_t n) {
      return space_size(n).convert_to<long double>();
    };
    auto two_digits = [](long double v, long double mantissa, int exponent) {
      long double scaled = v / std::pow(10.0L, exponent);
      return std::abs(scaled - mantissa) < 0.05L;
    };
    CHECK(two_digits(approx(31), 2.2L, 27));
    CHECK(two_digits(approx(39), 8.9L, 34));
    CHECK(two_digits(approx(43), 5.8L, 38));
    CHECK(std::abs(approx(100) / 1e93L - 3.0L) < 0.5L);
  }

  TEST_CASE("downsample keeps the shortest per key") {
    std::vector<CorpusRecord> recs;
    std::vector<std::string> variants = {"( 1 ) + x", "x + 1", "1 + x", "( x ) + 1", "( x + 1 )"};
    for (int rep = 0; rep < 5; ++rep) {
      for (const auto& v : variants) {
        std::string t = v;
        for (int i = 0; i < rep; ++i) t = "( " + t + " )";
        recs.push_back(make_record(parse_text(t)));
      }
    }
    REQUIRE(recs.size() == 25);
    auto kept = downsample(recs, 20);
    CHECK(kept.size() == 20);
    CHECK(texts(kept).count("x + 1"));
    CHECK(texts(kept).count("1 + x"));

    std::vector<CorpusRecord> small{make_record(parse_text("x")), make_record(parse_text("( x )")),
                                    make_record(parse_text("1"))};
    CHECK(downsample(small, 20).size() == 3);

    std::vector<CorpusRecord> a(recs.begin(), recs.begin() + 5);
    std::vector<CorpusRecord> b{make_record(parse_text("x * x")), make_record(parse_text("( x * x )"))};
    std::vector<CorpusRecord> both = a;
    both.insert(both.end(), b.begin(), b.end());
    auto joint = texts(downsample(both, 1));
    auto separate = texts(downsample(a, 1));
    separate.merge(texts(downsample(b, 1)));
    CHECK(joint == separate);
  }

  TEST_CASE("augmentation") {
    const auto& reps = augmentation_replacements();
    REQUIRE(reps.size() == 10);
    CHECK(render(replace_leaf(parse_text("x"), 0, 7)) == "( x * x )");
    CHECK(render(replace_leaf(parse_text("x + 1"), 1, 0)) == "x + ( 1 / x )");
    CHECK_THROWS_AS(replace_leaf(parse_text("x"), 1, 0), std::out_of_range);

    auto base = enumerate_expressions(7);
    auto out = augment(base, 3);
    CHECK(out.size() == 6 * base.size());
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(out[6 * i].expr == base[i].expr);
    for (const auto& r : out) {
      CHECK(parse_text(r.expr) == tree_from_rules(r.rules));
      CHECK(render(parse_text(r.expr)) == r.expr);
    }
    CHECK(dump(augment(base, 3, 5, 1)) == dump(augment(base, 3, 5, 2)));
    CHECK(dump(augment(base, 3)) != dump(augment(base, 4)));
  }

  TEST_CASE("conditions") {
    CHECK(conditions_up_to(4).size() == 41);
    CHECK(conditions_with_complexity(5).size() == 20);
    CHECK(conditions_with_complexity(6).size() == 24);
    CHECK(conditions_with_complexity(0) == std::vector<Condition>{{0, 0}});
  }

  TEST_CASE("dataset is deterministic") {
    auto c = DatasetConfig::desk();
    c.seed = 7;
    c.workers = 2;
    Dataset again = build_dataset(c);
    const Dataset& ds = desk_dataset();
    CHECK(dump(again.train) == dump(ds.train));
    CHECK(dump(again.validation) == dump(ds.validation));
    CHECK(dump(again.holdout_in_sample) == dump(ds.holdout_in_sample));
    for (int m : {5, 6}) CHECK(dump(again.holdout_by_complexity.at(m)) == dump(ds.holdout_by_complexity.at(m)));
    c.seed = 8;
    CHECK(dump(build_dataset(c).train) != dump(ds.train));
  }

  TEST_CASE("dataset splits are balanced and leak-free") {
    const Dataset& ds = desk_dataset();
    const auto cap = DatasetConfig::desk().per_condition_cap;
    CHECK(!ds.train.empty());
    CHECK(!ds.validation.empty());
    CHECK(!ds.holdout_in_sample.empty());

    std::map<Condition, std::size_t> balanced;
    std::map<Condition, std::set<std::string>> seen_keys;
    for (const auto* split : {&ds.train, &ds.validation}) {
      for (const auto& r : *split) {
        REQUIRE(r.condition);
        CHECK(r.condition->complexity() <= 4);
        ++balanced[*r.condition];
        seen_keys[*r.condition].insert(r.key.str());
      }
    }
    for (const auto& [c, n] : balanced) CHECK(n <= cap);

    auto train = texts(ds.train);
    auto val = texts(ds.validation);
    auto held = texts(ds.holdout_in_sample);
    for (const auto& t : val) CHECK_FALSE(train.count(t));
    for (const auto& t : held) {
      CHECK_FALSE(train.count(t));
      CHECK_FALSE(val.count(t));
    }

    std::map<Condition, std::set<std::string>> held_keys;
    for (const auto& r : ds.holdout_in_sample) {
      REQUIRE(r.condition);
      CHECK_FALSE(seen_keys[*r.condition].count(r.key.str()));
      CHECK(held_keys[*r.condition].insert(r.key.str()).second);
      CHECK(held_keys[*r.condition].size() <= DatasetConfig::desk().holdout_per_condition);
    }
    for (int m : {5, 6}) {
      std::set<std::string> keys;
      for (const auto& r : ds.holdout_by_complexity.at(m)) {
        REQUIRE(r.condition);
        CHECK(r.condition->complexity() == m);
        CHECK(keys.insert(to_string(*r.condition) + r.key.str()).second);
      }
      CHECK(!ds.holdout_by_complexity.at(m).empty());
    }
  }

  TEST_CASE("holdout targets are scorable") {
    const Dataset& ds = desk_dataset();
    std::vector<const CorpusRecord*> held;
    for (const auto& r : ds.holdout_in_sample) held.push_back(&r);
    for (const auto& [m, recs] : ds.holdout_by_complexity) {
      for (const auto& r : recs) held.push_back(&r);
    }
    for (const auto* r : held) {
      CAPTURE(r->expr);
      CHECK_NOTHROW(TargetSpec::from_text(r->expr));
    }
  }

  TEST_CASE("median length does not decrease across rounds") {
    const Dataset& ds = desk_dataset();
    REQUIRE(ds.round_sizes.size() == 3);
    for (std::size_t i = 1; i < ds.round_sizes.size(); ++i) {
      CHECK(ds.round_sizes[i].second >= ds.round_sizes[i - 1].second);
    }
    CHECK(ds.round_sizes[0].first == 2088);
  }

  TEST_CASE("length stats use the lower median") {
    std::vector<CorpusRecord> recs{make_record(parse_text("x")), make_record(parse_text("x + 1")),
                                   make_record(parse_text("x * x * x")), make_record(parse_text("( x )"))};
    auto s = length_stats(recs);
    CHECK(s.count == 4);
    CHECK(s.min == 3);
    CHECK(s.max == 7);
    CHECK(s.median == 5);
  }
}
