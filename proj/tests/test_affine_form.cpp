#include <gtest/gtest.h>

#include "ldt/affine_form.hpp"
#include "ldt/rng.hpp"
#include "ldt/transform.hpp"

using namespace ldt;

namespace {

AffineForm form(Rat c, std::vector<Rat> coeffs) { return AffineForm(std::move(c), std::move(coeffs)); }

std::vector<Rat> pt(std::initializer_list<Rat> v) { return std::vector<Rat>(v); }

}  // namespace

TEST(Rational, ParsesLiterals) {
  EXPECT_EQ(*parse_rational("3"), Rat(3));
  EXPECT_EQ(*parse_rational("-3/6"), Rat(-1, 2));
  EXPECT_EQ(*parse_rational("\xE2\x88\x92" "7"), Rat(-7));
  EXPECT_FALSE(parse_rational("1/0"));
  EXPECT_FALSE(parse_rational("1.5"));
  EXPECT_FALSE(parse_rational(""));
  EXPECT_FALSE(parse_rational("-"));
  EXPECT_FALSE(parse_rational("2/"));
}

TEST(AffineForm, Evaluate) {
  EXPECT_EQ(form(0, {1, 1, 1}).evaluate(pt({1, 2, -3})), 0);
  EXPECT_EQ(form(0, {1, -1}).evaluate(pt({1, 2})), -1);
  EXPECT_EQ(form(Rat(1, 2), {1}).evaluate(pt({Rat(1, 3)})), Rat(5, 6));
  EXPECT_THROW(form(0, {1, 1}).evaluate(pt({1})), DimensionError);
}

TEST(AffineForm, SubstituteLast) {
  EXPECT_EQ(substitute_last(form(0, {1, 1, 1}), form(0, {1, 1, -1})), form(0, {2, 2}));
  EXPECT_EQ(substitute_last(form(-5, {0, 1}), form(0, {-1, 1})), form(-5, {1}));
  EXPECT_TRUE(substitute_last(form(0, {1, 1, -1}), form(0, {1, 1, -1})).is_zero());
  EXPECT_THROW(substitute_last(form(0, {1, 1}), form(0, {1, 0})), DimensionError);
}

TEST(AffineForm, SubstituteLastPreservesValuesOnTheHyperplane) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng.below(4);
    AffineForm g(static_cast<long>(rng.between(-9, 9)), std::vector<Rat>(m));
    AffineForm h(static_cast<long>(rng.between(-9, 9)), std::vector<Rat>(m));
    for (std::size_t i = 0; i < m; ++i) {
      g.coeffs()[i] = static_cast<long>(rng.between(-9, 9));
      h.coeffs()[i] = static_cast<long>(rng.between(-9, 9));
    }
    if (h.last() == 0) h.coeffs().back() = 3;
    std::vector<Rat> y(m - 1);
    for (auto& v : y) v = make_rat(static_cast<long>(rng.between(-50, 50)), 7);
    std::vector<Rat> x = y;
    x.push_back(height_form(h).evaluate(y));
    EXPECT_EQ(h.evaluate(x), 0);
    EXPECT_EQ(substitute_last(g, h).evaluate(y), g.evaluate(x));
  }
}

TEST(AffineForm, HeightForm) {
  EXPECT_EQ(height_form(form(0, {-1, 1})), form(0, {1}));
  EXPECT_EQ(height_form(form(-1, {1, 1})), form(1, {-1}));
  EXPECT_EQ(height_form(form(-3, {2})), form(Rat(3, 2), {}));
}

TEST(AffineForm, Lift) {
  AffineForm f = form(2, {1, -1});
  AffineForm g = lift(f, 4);
  EXPECT_EQ(g.dim(), 4u);
  EXPECT_EQ(g.evaluate(pt({3, 5, 100, -100})), f.evaluate(pt({3, 5})));
  EXPECT_EQ(lift(f, 2), f);
  EXPECT_THROW(lift(f, 1), DimensionError);
}

TEST(AffineForm, Normalizations) {
  AffineForm f = form(Rat(-1, 2), {Rat(-3, 4), Rat(3, 2)});
  EXPECT_EQ(f.canonical(), form(2, {3, -6}));
  EXPECT_EQ(f.canonical_with_sign().second, Sign::negative);
  EXPECT_EQ(f.primitive(), form(-2, {-3, 6}));
  EXPECT_EQ(form(-4, {0, 0}).canonical(), form(1, {0, 0}));
  EXPECT_TRUE(AffineForm(3).canonical().is_zero());
}

TEST(AffineForm, ZeroResolution) {
  EXPECT_EQ(resolve_zero(Sign::negative, form(0, {1, 1})), Sign::negative);
  EXPECT_EQ(resolve_zero(Sign::zero, form(0, {1, -2})), Sign::negative);
  EXPECT_EQ(resolve_zero(Sign::zero, form(0, {-1, 0})), Sign::negative);
  EXPECT_EQ(resolve_zero(Sign::zero, form(0, {0, 5, 0})), Sign::positive);
  EXPECT_EQ(resolve_zero(Sign::zero, form(0, {})), Sign::zero);
}

TEST(Transform, OneDimensional) {
  TransformMatrix t = random_generic_transform(1, 3);
  EXPECT_NE(t.at(0, 0), 0);
  EXPECT_EQ(t.at(0, 0) * t.inverse_at(0, 0), 1);
}

TEST(Transform, InverseIsExact) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TransformMatrix t = random_generic_transform(5, seed);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) {
        Rat s = 0;
        for (std::size_t l = 0; l < 5; ++l) s += t.at(i, l) * t.inverse_at(l, j);
        EXPECT_EQ(s, i == j ? 1 : 0);
      }
  }
}

TEST(Transform, KSumFormsBecomeNonVertical) {
  // All four 3-SUM forms in dimension 4 get a nonzero last coefficient; redraw otherwise.
  std::uint64_t seed = 11;
  for (;; ++seed) {
    TransformMatrix t = random_generic_transform(4, seed);
    bool ok = true;
    for (int skip = 0; skip < 4; ++skip) {
      AffineForm f(4);
      for (int i = 0; i < 4; ++i)
        if (i != skip) f.coeffs()[i] = 1;
      if (transform_form(f, t).last() == 0) ok = false;
    }
    if (ok) break;
  }
  SUCCEED() << "seed " << seed;
}

TEST(Transform, Identity) {
  AffineForm f = form(3, {1, -2, 5});
  EXPECT_EQ(transform_form(f, TransformMatrix::identity(3)), f);
}

TEST(Transform, Swap) {
  TransformMatrix swap(2, {0, 1, 1, 0});
  EXPECT_EQ(transform_form(form(0, {1, 0}), swap), form(0, {0, 1}));
}

TEST(Transform, PreservesValues) {
  TransformMatrix t = random_generic_transform(4, 99);
  AffineForm f = form(Rat(2, 3), {1, -4, Rat(1, 5), 7});
  AffineForm g = transform_form(f, t);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    std::vector<Rat> p(4);
    for (auto& v : p) v = make_rat(static_cast<long>(rng.between(-1000, 1000)), static_cast<long>(rng.between(1, 30)));
    EXPECT_EQ(g.evaluate(t.apply(p)), f.evaluate(p));
  }
}

TEST(Transform, RoundTrip) {
  TransformMatrix t = random_generic_transform(4, 5);
  AffineForm f = form(-1, {2, 0, 3, -1});
  EXPECT_EQ(transform_form(transform_form(f, t), t.inverse()), f);
}
