#include <gtest/gtest.h>

#include <limits>

#include "ldt/instance.hpp"
#include "ldt/prism.hpp"
#include "ldt/transform.hpp"
#include "oracles.hpp"

using namespace ldt;

namespace {

AffineForm form(Rat c, std::vector<Rat> coeffs) { return AffineForm(std::move(c), std::move(coeffs)); }

std::vector<SampleForm> sample_of(const std::vector<AffineForm>& fs) {
  std::vector<SampleForm> s;
  for (std::size_t i = 0; i < fs.size(); ++i) s.push_back({i, fs[i]});
  return s;
}

const std::vector<AffineForm> kExample = {form(0, {-1, 1}), form(-1, {1, 1}), form(-4, {2, 1})};

}  // namespace

TEST(LocatePrism, WorkedExample) {
  Oracle o({Rat(3, 10), Rat(1, 5)});
  auto s = sample_of(kExample);
  auto r = locate_prism(std::span<const SampleForm>(s), 2, o);
  ASSERT_FALSE(r.on_hyperplane);
  const Prism& p = r.prism;
  ASSERT_EQ(p.levels.size(), 2u);
  EXPECT_EQ(*p.levels[0].ceiling, kExample[0]);
  EXPECT_FALSE(p.levels[0].floor);
  ASSERT_EQ(p.levels[0].kept_walls.size(), 1u);
  // 1/2 - x1 >= 0; the candidate from 2x1 + x2 - 4 is pruned.
  EXPECT_EQ(p.levels[0].kept_walls[0].canonical(), form(-1, {2}));
  EXPECT_EQ(p.levels[0].kept_walls[0].evaluate(std::vector<Rat>{0}) > 0, true);
  EXPECT_EQ(p.levels[0].candidates, 2u);
  // Level 2: three signs and two comparisons; level 1: one sign.
  EXPECT_EQ(p.levels[0].queries, 5u);
  EXPECT_EQ(p.levels[1].queries, 1u);
  EXPECT_EQ(r.queries, 6u);
  EXPECT_EQ(o.query_count(), 6u);
  EXPECT_TRUE(p.contains(std::vector<Rat>{Rat(3, 10), Rat(1, 5)}, true));
  EXPECT_TRUE(verify_prism(p, kExample));
}

TEST(LocatePrism, PointOnSampledHyperplane) {
  Oracle o({Rat(1, 2), Rat(1, 2)});
  auto s = sample_of(kExample);
  auto r = locate_prism(std::span<const SampleForm>(s), 2, o);
  ASSERT_TRUE(r.on_hyperplane);
  EXPECT_EQ(*r.on_hyperplane, 0u);
  EXPECT_EQ(r.queries, 1u);
}

TEST(LocatePrism, VerticalFormIsAGenericityFailure) {
  Oracle o({Rat(1), Rat(1)});
  std::vector<AffineForm> fs = {form(0, {1, 0})};
  auto s = sample_of(fs);
  EXPECT_THROW(locate_prism(std::span<const SampleForm>(s), 2, o), GenericityError);
}

TEST(VerifyPrism, DroppingAWallBreaksIt) {
  Oracle o({Rat(3, 10), Rat(1, 5)});
  auto s = sample_of(kExample);
  auto r = locate_prism(std::span<const SampleForm>(s), 2, o);
  Prism p = r.prism;
  ASSERT_EQ(p.constraints.size(), 2u);
  EXPECT_TRUE(verify_prism(p, kExample));
  p.constraints.pop_back();  // the wall x1 <= 1/2
  EXPECT_FALSE(verify_prism(p, kExample));
}

TEST(VerifyPrism, SingleHyperplane) {
  Oracle o({Rat(0), Rat(5)});
  std::vector<AffineForm> fs = {form(-1, {1, 1})};
  auto s = sample_of(fs);
  auto r = locate_prism(std::span<const SampleForm>(s), 2, o);
  EXPECT_EQ(r.prism.constraints.size(), 1u);
  EXPECT_TRUE(verify_prism(r.prism, fs));
}

// In the plane the prism is a trapezoid: the closest line above and below the point, cut
// by the nearest places to the left and right where another line meets the ceiling or the
// floor (or the two meet).
TEST(LocatePrism, TrapezoidsMatchPlaneSweepOracle) {
  Rng rng(404);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t r = 2 + rng.below(10);
    std::vector<AffineForm> fs;
    for (std::size_t i = 0; i < r; ++i) {
      AffineForm f = oracle::random_constraint(rng, 2, 9);
      if (f.coeff(1) == 0) f.coeffs()[1] = 1;
      fs.push_back(f);
    }
    std::vector<Rat> p = {make_rat(rng.between(-300, 300), 37), make_rat(rng.between(-300, 300), 41)};
    bool on_line = false;
    for (const auto& f : fs) on_line = on_line || f.evaluate(p) == 0;
    if (on_line) continue;
    Oracle o(p);
    auto s = sample_of(fs);
    auto res = locate_prism(std::span<const SampleForm>(s), 2, o);
    ASSERT_FALSE(res.on_hyperplane);
    const Prism& pr = res.prism;
    // Brute force: line heights at p1.
    std::optional<std::size_t> ceil, flo;
    auto h_at = [&](std::size_t i, const Rat& x) { return height_form(fs[i]).evaluate(std::vector<Rat>{x}); };
    for (std::size_t i = 0; i < r; ++i) {
      Rat h = h_at(i, p[0]);
      if (h > p[1] && (!ceil || h < h_at(*ceil, p[0]))) ceil = i;
      if (h < p[1] && (!flo || h > h_at(*flo, p[0]))) flo = i;
    }
    if (pr.levels[0].ceiling) {
      ASSERT_TRUE(ceil);
      EXPECT_EQ(pr.levels[0].ceiling->canonical(), fs[*ceil].canonical());
    } else {
      EXPECT_FALSE(ceil);
    }
    if (pr.levels[0].floor) {
      ASSERT_TRUE(flo);
      EXPECT_EQ(pr.levels[0].floor->canonical(), fs[*flo].canonical());
    } else {
      EXPECT_FALSE(flo);
    }
    std::optional<Rat> left, right;
    auto consider = [&](std::size_t a, std::size_t b) {
      AffineForm diff = height_form(fs[a]) - height_form(fs[b]);
      if (diff.coeff(0) == 0) return;
      Rat x = -diff.constant() / diff.coeff(0);
      if (x < p[0] && (!left || x > *left)) left = x;
      if (x > p[0] && (!right || x < *right)) right = x;
    };
    for (std::size_t i = 0; i < r; ++i) {
      if (fs[i].canonical() == (ceil ? fs[*ceil].canonical() : AffineForm()) ||
          fs[i].canonical() == (flo ? fs[*flo].canonical() : AffineForm()))
        continue;
      Rat h = h_at(i, p[0]);
      if (ceil && h > p[1]) consider(i, *ceil);
      if (flo && h < p[1]) consider(i, *flo);
    }
    if (ceil && flo) consider(*ceil, *flo);
    AffineForm x1 = form(0, {1, 0});
    auto sup = pr.sup(x1);
    auto inf = pr.inf(x1);
    ASSERT_EQ(sup.has_value(), right.has_value()) << "trial " << trial;
    ASSERT_EQ(inf.has_value(), left.has_value()) << "trial " << trial;
    if (right) {
      EXPECT_EQ(*sup, *right) << "trial " << trial;
    }
    if (left) {
      EXPECT_EQ(*inf, *left) << "trial " << trial;
    }
    EXPECT_TRUE(pr.contains(p, true));
    EXPECT_TRUE(verify_prism(pr, fs));
    EXPECT_LE(pr.constraints.size(), 4u);
    EXPECT_LE(res.queries, 2 * r * 2);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(LocatePrism, HigherDimensionalPrismsAreCleanAndTight) {
  Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + rng.below(3);
    const std::size_t r = 3 + rng.below(12);
    std::vector<AffineForm> fs;
    for (std::size_t i = 0; i < r; ++i) {
      AffineForm f = oracle::random_constraint(rng, n, 9);
      if (f.last() == 0) f.coeffs().back() = -2;
      fs.push_back(f);
    }
    std::vector<Rat> p(n);
    for (auto& v : p) v = make_rat(rng.between(-500, 500), rng.between(1, 50));
    Oracle o(p);
    auto s = sample_of(fs);
    LocateResult res;
    try {
      res = locate_prism(std::span<const SampleForm>(s), n, o);
    } catch (const GenericityError&) {
      continue;
    }
    if (res.on_hyperplane) continue;
    const Prism& pr = res.prism;
    EXPECT_TRUE(pr.contains(p, true));
    EXPECT_TRUE(verify_prism(pr, fs)) << "trial " << trial;
    EXPECT_LE(pr.constraints.size(), 2 * n);
    EXPECT_LE(res.queries, 2 * r * n);
    // Support by elimination agrees with the simplex on sampled and unrelated forms.
    for (const auto& f : fs) EXPECT_EQ(pr.crosses(f), crosses(f, pr.constraints));
    for (int extra = 0; extra < 10; ++extra) {
      AffineForm g = oracle::random_constraint(rng, n, 9);
      EXPECT_EQ(pr.crosses(g), crosses(g, pr.constraints)) << "trial " << trial;
      EXPECT_EQ(pr.meets(g), !(maximize(g, pr.constraints).status == LpStatus::optimal &&
                               maximize(g, pr.constraints).value < 0) &&
                                 !(maximize(-g, pr.constraints).status == LpStatus::optimal &&
                                   maximize(-g, pr.constraints).value < 0));
    }
  }
}

// k-SUM prisms are cones over a degenerate arrangement: exact zeros are everywhere, so
// both the interval path and the modular zero test get exercised.
TEST(Prism, FilteredSignsMatchExactSupremum) {
  const std::size_t n = 9;
  auto t = random_generic_transform(n, 31);
  std::vector<AffineForm> family;
  for (const auto& id : enumerate_ids(n, 3))
    family.push_back(transform_form(hyperplane_form(LdtFamily{n, 3, {0, 1, 1, 1}}, id), t).primitive());
  Rng rng(6);
  std::size_t settled = 0, zeros = 0, total = 0;
  for (int trial = 0; trial < 4; ++trial) {
    std::vector<Rat> x(n);
    for (auto& v : x) v = make_rat(rng.between(-1000, 1000), rng.between(1, 20));
    Oracle o(x, t);
    std::vector<std::size_t> pool(family.size());
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    rng.partial_shuffle(pool, 40);
    std::vector<SampleForm> s;
    for (std::size_t j = 0; j < 40; ++j) s.push_back({pool[j], family[pool[j]]});
    auto res = locate_prism(std::span<const SampleForm>(s), n, o);
    ASSERT_FALSE(res.on_hyperplane);
    for (const auto& f : family)
      for (bool negate : {false, true}) {
        ++total;
        auto fast = res.prism.sup_sign_filtered(f, negate);
        auto exact = res.prism.sup(negate ? -f : f);
        if (!fast) continue;
        ++settled;
        const int want = exact ? sgn(*exact) : 2;
        EXPECT_EQ(*fast, want);
        zeros += want == 0;
      }
    for (std::size_t i = 0; i < family.size(); i += 7)
      EXPECT_EQ(res.prism.crosses(family[i]), crosses(family[i], res.prism.constraints));
  }
  EXPECT_GT(settled * 10, total * 9);
  EXPECT_GT(zeros, 0u);
}

TEST(Prism, FilteredSignsOnRandomPrisms) {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(4);
    std::vector<SampleForm> s;
    for (std::size_t i = 0; i < 4 + rng.below(8); ++i) {
      AffineForm f = oracle::random_constraint(rng, n, 9);
      if (f.last() == 0) f.coeffs().back() = 3;
      s.push_back({i, f});
    }
    std::vector<Rat> p(n);
    for (auto& v : p) v = make_rat(rng.between(-500, 500), rng.between(1, 50));
    Oracle o(p);
    LocateResult res;
    try {
      res = locate_prism(std::span<const SampleForm>(s), n, o);
    } catch (const GenericityError&) {
      continue;
    }
    if (res.on_hyperplane) continue;
    for (int extra = 0; extra < 20; ++extra) {
      AffineForm g = oracle::random_constraint(rng, n, 9);
      for (bool negate : {false, true}) {
        auto fast = res.prism.sup_sign_filtered(g, negate);
        if (!fast) continue;
        auto exact = res.prism.sup(negate ? -g : g);
        EXPECT_EQ(*fast, exact ? sgn(*exact) : 2) << "trial " << trial;
      }
    }
  }
}
