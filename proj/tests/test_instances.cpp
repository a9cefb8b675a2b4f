#include <gtest/gtest.h>

#include "ldt/instance.hpp"
#include "ldt/oracle.hpp"

using namespace ldt;

namespace {

std::vector<Rat> rats(std::initializer_list<long> v) {
  std::vector<Rat> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

AffineForm form(long c, std::initializer_list<long> v) { return AffineForm(Rat(c), rats(v)); }

}  // namespace

TEST(Instances, HyperplaneForms) {
  auto ksum = make_ksum(rats({0, 0, 0}), 3);
  EXPECT_EQ(hyperplane_form(ksum.family(), {{1, 2, 3}}), form(0, {1, 1, 1}));
  auto ldt = make_ldt(rats({2, 1, 1}), rats({0, 0, 0}));
  EXPECT_EQ(hyperplane_form(ldt.family(), {{1, 3}}), form(2, {1, 0, 1}));
  EXPECT_THROW(hyperplane_form(ldt.family(), {{3, 1}}), Error);
  EXPECT_THROW(hyperplane_form(ldt.family(), {{1, 4}}), Error);
  EXPECT_THROW(hyperplane_form(ldt.family(), {{1, 2, 3}}), Error);
}

TEST(Instances, Enumeration) {
  EXPECT_EQ(enumerate_ids(5, 3).size(), 10u);
  auto one = enumerate_ids(3, 3);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].idx, (std::vector<std::uint32_t>{1, 2, 3}));
  auto four = enumerate_ids(4, 3);
  ASSERT_EQ(four.size(), 4u);
  EXPECT_EQ(four.front().idx, (std::vector<std::uint32_t>{1, 2, 3}));
  EXPECT_EQ(four.back().idx, (std::vector<std::uint32_t>{2, 3, 4}));
  for (std::size_t n = 2; n <= 12; ++n)
    for (std::size_t k = 2; k <= n; ++k) {
      auto ids = enumerate_ids(n, k);
      EXPECT_EQ(ids.size(), binomial(n, k));
      EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
    }
}

TEST(Instances, BruteDecide) {
  EXPECT_TRUE(brute_decide(make_ksum(rats({1, 2, -3}), 3)).yes());
  EXPECT_FALSE(brute_decide(make_ksum(rats({1, 2, 4}), 3)).yes());
  auto d = brute_decide(make_ldt(rats({2, 1, 1}), rats({-1, -1, 5})));
  ASSERT_TRUE(d.yes());
  EXPECT_EQ(d.witness->idx, (std::vector<std::uint32_t>{1, 2}));
  EXPECT_EQ(d.to_string(), "YES (1,2)");
}

TEST(Instances, ParseAndSerialize) {
  auto a = parse_instance("ksum 3 3\n1 2 -3\n");
  EXPECT_EQ(a, make_ksum(rats({1, 2, -3}), 3));
  auto b = parse_instance("# comment\nldt 3 2\n2 1 1\n-1 -1 5\n");
  EXPECT_EQ(b, make_ldt(rats({2, 1, 1}), rats({-1, -1, 5})));
  auto c = parse_instance("ldt 2 2\n1/2 -3/4 5\n7/3 -1\n");
  EXPECT_EQ(c.x[0], Rat(7, 3));
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    LdtFamily fam{6, 3, {Rat(1, 2), Rat(-2), Rat(0), Rat(3, 7)}};
    if (i % 2) fam = {6, 3, {0, 1, 1, 1}};
    auto inst = random_instance(fam, rng, i % 3 == 0);
    EXPECT_EQ(parse_instance(serialize_instance(inst)), inst);
  }
}

TEST(Instances, ParseErrorsCarryPositions) {
  auto expect_error = [](const char* text, std::size_t line, std::size_t column) {
    try {
      parse_instance(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << text << ": " << e.what();
      EXPECT_EQ(e.column(), column) << text << ": " << e.what();
    }
  };
  expect_error("", 1, 1);
  expect_error("sum 3 3\n1 2 3\n", 1, 1);
  expect_error("ksum 3 4\n1 2 3\n", 1, 8);
  expect_error("ksum 3 3\n1 2\n", 2, 4);
  expect_error("ksum 3 3\n1 x 3\n", 2, 3);
  expect_error("ksum 3 3\n1 2 3\n4\n", 3, 1);
  expect_error("ldt 3 2\n0 0 0\n1 2 3\n", 2, 3);
  expect_error("ksum 3 3\n1 2/0 3\n", 2, 3);
}

TEST(Instances, PlantedInstancesAreYes) {
  Rng rng(8);
  for (int i = 0; i < 30; ++i) {
    LdtFamily fam{7, 3, {Rat(1), Rat(2), Rat(-1), Rat(0)}};
    EXPECT_TRUE(brute_decide(random_instance(fam, rng, true)).yes());
    EXPECT_FALSE(brute_decide(random_instance(LdtFamily{7, 3, {0, 1, 1, 1}}, rng, false)).yes());
  }
}

TEST(Oracle, CountsEveryQuestion) {
  Oracle o(rats({1, 2, -3, 7}));
  EXPECT_EQ(o.query_count(), 0u);
  EXPECT_EQ(o.sign_of(form(0, {1, 1, 1})), Sign::zero);
  EXPECT_EQ(o.sign_of(form(0, {1, -1})), Sign::negative);
  EXPECT_EQ(o.sign_of(form(0, {1, -1})), Sign::negative);
  EXPECT_EQ(o.query_count(), 3u);
  EXPECT_EQ(o.transcript().size(), 3u);
  EXPECT_EQ(o.transcript().distinct_count(), 2u);
  EXPECT_THROW(o.sign_of(form(0, {0, 0})), Error);
  EXPECT_THROW(o.sign_of(form(0, {1, 1, 1, 1, 1})), DimensionError);
}

TEST(Oracle, CompareHeights) {
  Oracle p(std::vector<Rat>{Rat(3, 10), Rat(0)});
  EXPECT_EQ(p.compare_heights(AffineForm(Rat(0), rats({1})), AffineForm(Rat(1), rats({-1}))), Sign::negative);
  EXPECT_EQ(p.compare_heights(AffineForm(Rat(2), std::vector<Rat>{}), AffineForm(Rat(3), std::vector<Rat>{})),
            Sign::negative);
  EXPECT_EQ(p.query_count(), 2u);
  EXPECT_THROW(p.compare_heights(form(1, {1}), form(1, {1})), Error);
}

TEST(Oracle, ReplayChecksEverySign) {
  Oracle o(rats({1, 2, -3, 7}));
  o.sign_of(form(0, {1}));
  o.sign_of(form(-3, {0, 1}));
  EXPECT_TRUE(replay(o.transcript(), rats({1, 2, -3, 7})));
  EXPECT_TRUE(replay(o.transcript(), rats({5, 1, 0, 0})));
  EXPECT_FALSE(replay(o.transcript(), rats({-1, 2, -3, 7})));
}

TEST(Oracle, TransformedQuestionsAreRecordedInOriginalCoordinates) {
  std::vector<Rat> x = {Rat(1), Rat(2), Rat(-3)};
  auto t = random_generic_transform(3, 42);
  Oracle o(x, t);
  AffineForm f = form(0, {1, 1, 1});
  EXPECT_EQ(o.sign_of(transform_form(f, t)), Sign::zero);
  EXPECT_EQ(o.sign_of(transform_form(form(-1, {1, 0, 0}), t)), Sign::zero);
  auto [g, s] = o.transcript().original(0);
  EXPECT_EQ(g, f.canonical());
  EXPECT_EQ(s, Sign::zero);
  EXPECT_TRUE(replay(o.transcript(), x));
}

TEST(Oracle, MemoChargesFirstAskingsOnly) {
  Oracle o(rats({1, 2, -3}));
  MemoOracle<Oracle> m(o);
  EXPECT_EQ(m.sign_of(form(0, {1, -1})), Sign::negative);
  EXPECT_EQ(m.sign_of(form(0, {-2, 2})), Sign::positive);
  EXPECT_EQ(m.sign_of(form(1, {1})), Sign::positive);
  EXPECT_EQ(m.query_count(), 2u);
  EXPECT_EQ(o.query_count(), 2u);
}
