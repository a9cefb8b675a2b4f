#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "affine_form.hpp"
#include "lp.hpp"
#include "modular.hpp"
#include "oracle.hpp"

namespace ldt {

// A level form is vertical (zero coefficient on its top coordinate).
class GenericityError : public Error {
 public:
  using Error::Error;
};

// The sample produced walls that contradict the structure of the construction: more
// than one surviving wall from one hyperplane, or more walls than hyperplanes.
class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// One level of the construction, independent of where signs come from.

// Above/below split of the level forms and the closest one on each side.
struct LevelSplit {
  std::vector<Sign> raw;        // answers as given
  std::vector<Sign> effective;  // zero answers resolved by resolve_zero
  std::optional<std::size_t> ceiling, floor;
  std::size_t ties = 0;         // zero answers among height comparisons
};

inline void require_non_vertical(const AffineForm& f) {
  if (f.dim() == 0 || f.last() == 0) throw GenericityError("level form " + f.to_string() + " is vertical");
}

inline bool lies_above(const AffineForm& f, Sign effective) { return to_int(effective) * sgn(f.last()) < 0; }

// compare(hf, hg) answers the sign of hf - hg at the projected point for two different
// height forms. Ties between identical hyperplanes are broken without a question: the
// smaller canonical form wins, then the earlier index.
template <class Compare>
void choose_extremes(std::span<const AffineForm> forms, LevelSplit& split, Compare&& compare) {
  std::vector<std::optional<AffineForm>> heights(forms.size());
  auto height = [&](std::size_t i) -> const AffineForm& {
    if (!heights[i]) heights[i] = height_form(forms[i]);
    return *heights[i];
  };
  auto pick = [&](bool above) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < forms.size(); ++i) {
      if (lies_above(forms[i], split.effective[i]) != above) continue;
      if (!best) {
        best = i;
        continue;
      }
      const AffineForm& hi = height(i);
      const AffineForm& hb = height(*best);
      AffineForm diff = hi - hb;
      bool take;
      if (diff.is_zero()) {
        ++split.ties;
        take = forms[i].canonical() < forms[*best].canonical();
      } else {
        Sign raw = compare(hi, hb);
        if (raw == Sign::zero) ++split.ties;
        Sign e = resolve_zero(raw, diff);
        take = above ? e == Sign::negative : e == Sign::positive;
      }
      if (take) best = i;
    }
    return best;
  };
  split.ceiling = pick(true);
  split.floor = pick(false);
}

struct WallCandidate {
  AffineForm form;          // dimension m - 1, oriented: >= 0 on the projected prism
  std::size_t source;       // index of the level form it comes from (gap: forms.size())
  int side;                 // 0: meets the ceiling, 1: meets the floor, 2: ceiling-floor gap
};

// For every level form h other than the extremes: sign(h) * h restricted to the ceiling
// and to the floor, plus height(ceiling) - height(floor) when both exist.
// `include` selects which sources contribute (all when empty).
inline std::vector<WallCandidate> wall_candidates(std::span<const AffineForm> forms, const LevelSplit& split,
                                                  const std::vector<char>& include = {}) {
  std::vector<WallCandidate> out;
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (i == split.ceiling || i == split.floor) continue;
    if (!include.empty() && !include[i]) continue;
    const Rat s = to_int(split.effective[i]);
    for (int side = 0; side < 2; ++side) {
      const auto& ext = side == 0 ? split.ceiling : split.floor;
      if (!ext) continue;
      AffineForm c = substitute_last(forms[i], forms[*ext]) * s;
      if (c.is_zero()) continue;
      out.push_back({c.primitive(), i, side});
    }
  }
  if (split.ceiling && split.floor) {
    AffineForm gap = height_form(forms[*split.ceiling]) - height_form(forms[*split.floor]);
    if (!gap.is_zero()) out.push_back({gap.primitive(), forms.size(), 2});
  }
  return out;
}

// Facets among the candidates; checks that each source keeps at most one wall and that
// there are no more walls than non-extreme level forms (+1 for the gap).
inline std::vector<std::size_t> prune_walls(const std::vector<WallCandidate>& cands, std::size_t dim,
                                            std::size_t form_count, std::size_t extremes, PruneStats* stats) {
  std::vector<LinConstraint> cs;
  cs.reserve(cands.size());
  for (const auto& c : cands) cs.push_back(c.form);
  std::vector<std::size_t> kept = irredundant_subset(cs, dim, stats);
  std::vector<std::size_t> per_source(form_count + 1, 0);
  for (std::size_t i : kept) {
    const auto& c = cands[i];
    if (c.side != 2 && ++per_source[c.source] > 1)
      throw DegenerateSampleError("both walls of one hyperplane survive pruning");
  }
  if (kept.size() + extremes > form_count + 1) throw DegenerateSampleError("more walls than hyperplanes");
  return kept;
}

// ---------------------------------------------------------------------------
// The prism.

struct PrismLevel {
  std::size_t dim = 0;
  std::size_t form_count = 0;
  std::optional<AffineForm> ceiling;  // level form bounding x_dim from above
  std::optional<AffineForm> floor;
  Sign ceiling_sign = Sign::zero;     // effective signs, used to orient the constraints
  Sign floor_sign = Sign::zero;
  std::vector<std::pair<AffineForm, Sign>> sign_labels;  // every level form with its effective sign
  std::vector<AffineForm> kept_walls;  // next level's forms, dimension dim - 1, >= 0 on the prism
  std::size_t candidates = 0;
  std::size_t raw_zeros = 0;  // sign answers of zero (level < n) and zero height comparisons
  std::size_t queries = 0;
  double seconds = 0;         // wall-clock, diagnostics only
};

namespace detail {

// Closed interval of doubles with outward rounding; used to settle signs without
// rational arithmetic when the enclosure is clear of zero.
struct Interval {
  double lo = 0, hi = 0;

  bool is_zero() const { return lo == 0 && hi == 0; }
  bool finite() const { return std::isfinite(lo) && std::isfinite(hi); }
};

inline Interval enclose(const Rat& q) {
  if (sgn(q) == 0) return {};
  const long bits = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) -
                    static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
  if (bits > 1000 || bits < -1000) return {-HUGE_VAL, HUGE_VAL};
  const double d = q.get_d();  // truncated: within one unit in the last place
  return {std::nextafter(d, -HUGE_VAL), std::nextafter(d, HUGE_VAL)};
}

inline Interval operator+(const Interval& a, const Interval& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return {std::nextafter(a.lo + b.lo, -HUGE_VAL), std::nextafter(a.hi + b.hi, HUGE_VAL)};
}

inline Interval operator*(const Interval& a, const Interval& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  return {std::nextafter(*std::min_element(p, p + 4), -HUGE_VAL), std::nextafter(*std::max_element(p, p + 4), HUGE_VAL)};
}

struct IntervalForm {
  std::vector<Interval> coeffs;
  Interval constant;
};

inline IntervalForm enclose(const AffineForm& f) {
  IntervalForm r;
  for (const auto& c : f.coeffs()) r.coeffs.push_back(enclose(c));
  r.constant = enclose(f.constant());
  return r;
}

}  // namespace detail

// Prism containing the point: for each level m, x_m between the floor and the ceiling of
// that level, read as functions of x_1..x_{m-1}. A level without a floor (ceiling) leaves
// x_m unbounded below (above); levels under the last one are unconstrained.
struct Prism {
  std::size_t n = 0;
  std::vector<PrismLevel> levels;           // dimensions n, n-1, ...
  std::vector<LinConstraint> constraints;   // oriented ceilings and floors lifted to dimension n
  bool degenerate = false;                  // some answer was zero below the top level

  std::optional<AffineForm> upper_bound(std::size_t m) const { return bound(m, true); }
  std::optional<AffineForm> lower_bound(std::size_t m) const { return bound(m, false); }

  // Maximum of f over the closed prism (nullopt: unbounded), by eliminating coordinates
  // from the top: a positive coefficient on x_m takes the ceiling height, a negative one
  // the floor height. Valid because each level's floor lies below its ceiling over the
  // lower-dimensional prism, which is nonempty.
  std::optional<Rat> sup(const AffineForm& f) const {
    if (f.dim() > n) throw DimensionError("Prism::sup: form dimension exceeds the prism's");
    std::vector<Rat> g = f.coeffs();
    g.resize(n);
    Rat c = f.constant();
    if (upper_.size() != n + 1) index_bounds();
    for (std::size_t m = n; m >= 1; --m) {
      Rat a = g[m - 1];
      if (a == 0) continue;
      const auto& h = a > 0 ? upper_[m] : lower_[m];
      if (!h) return std::nullopt;
      for (std::size_t i = 0; i + 1 < m; ++i) g[i] += a * h->coeff(i);
      c += a * h->constant();
      g[m - 1] = 0;
    }
    return c;
  }
  std::optional<Rat> inf(const AffineForm& f) const {
    auto s = sup(-f);
    if (!s) return std::nullopt;
    return -*s;
  }

  // Sign of sup f (2 when unbounded) settled without rational arithmetic, else nullopt.
  // Signs come from interval arithmetic. A coefficient whose enclosure contains zero is
  // tested for being exactly zero modulo enough coprime moduli (the enclosure bounds its
  // size); the degenerate arrangements of k-SUM make exact zeros common.
  std::optional<int> sup_sign_filtered(const AffineForm& f, bool negate = false) const {
    if (f.dim() > n) throw DimensionError("Prism::sup: form dimension exceeds the prism's");
    if (upper_.size() != n + 1) index_bounds();
    const double s = negate ? -1.0 : 1.0;
    std::vector<detail::Interval> g(n);
    for (std::size_t i = 0; i < f.dim(); ++i) g[i] = detail::enclose(f.coeff(i)) * detail::Interval{s, s};
    detail::Interval c = detail::enclose(f.constant()) * detail::Interval{s, s};
    std::vector<int> path(n + 1, 0);  // per level: +1 ceiling used, -1 floor used, 0 skipped
    long scale_bits = 0;               // bits of the product of |last coefficients| used so far
    for (std::size_t m = n; m >= 1; --m) {
      detail::Interval a = g[m - 1];
      if (a.is_zero()) continue;
      if (!a.finite()) return std::nullopt;
      if (a.lo <= 0 && a.hi >= 0) {
        if (!zero_by_residues(f, negate, path, m, false, a, scale_bits)) return std::nullopt;
        g[m - 1] = {};
        continue;
      }
      path[m] = a.lo > 0 ? 1 : -1;
      const auto& h = path[m] > 0 ? upper_i_[m] : lower_i_[m];
      if (!h) return 2;
      scale_bits += last_bits_[m][path[m] > 0 ? 0 : 1];
      for (std::size_t i = 0; i + 1 < m; ++i) g[i] = g[i] + a * h->coeffs[i];
      c = c + a * h->constant;
    }
    if (!c.finite()) return std::nullopt;
    if (c.lo > 0) return 1;
    if (c.hi < 0) return -1;
    if (c.is_zero() || zero_by_residues(f, negate, path, 0, true, c, scale_bits)) return 0;
    return std::nullopt;
  }

  // f takes both signs in the interior.
  bool crosses(const AffineForm& f) const {
    auto fast_hi = sup_sign_filtered(f);
    if (fast_hi && *fast_hi <= 0) return false;
    if (!fast_hi) {
      auto hi = sup(f);
      if (hi && *hi <= 0) return false;
    }
    auto fast_lo = sup_sign_filtered(f, true);
    if (fast_lo) return *fast_lo > 0;
    auto lo = inf(f);
    return !lo || *lo < 0;
  }
  // f vanishes somewhere on the closed prism.
  bool meets(const AffineForm& f) const {
    auto hi = sup(f);
    if (hi && *hi < 0) return false;
    auto lo = inf(f);
    return !lo || *lo <= 0;
  }

  bool contains(std::span<const Rat> p, bool strict) const {
    for (const auto& c : constraints) {
      Rat v = c.evaluate(p);
      if (v < 0 || (strict && v == 0)) return false;
    }
    return true;
  }

  // Caches the ceiling and floor heights; call again after editing `levels`.
  void index_bounds() const {
    upper_.assign(n + 1, std::nullopt);
    lower_.assign(n + 1, std::nullopt);
    upper_i_.assign(n + 1, std::nullopt);
    lower_i_.assign(n + 1, std::nullopt);
    last_bits_.assign(n + 1, {0, 0});
    last_negative_.assign(n + 1, {false, false});
    residues_.clear();
    monts_.clear();
    integral_ = true;
    for (const auto& lv : levels)
      for (int side = 0; side < 2; ++side) {
        const auto& form = side == 0 ? lv.ceiling : lv.floor;
        if (!form) continue;
        for (const auto& v : form->coeffs()) integral_ = integral_ && v.get_den() == 1;
        integral_ = integral_ && form->constant().get_den() == 1;
        last_bits_[lv.dim][side] = static_cast<long>(mpz_sizeinbase(form->last().get_num_mpz_t(), 2));
        last_negative_[lv.dim][side] = form->last() < 0;
      }
    for (const auto& lv : levels) {
      if (lv.ceiling) {
        upper_[lv.dim] = height_form(*lv.ceiling);
        upper_i_[lv.dim] = detail::enclose(*upper_[lv.dim]);
      }
      if (lv.floor) {
        lower_[lv.dim] = height_form(*lv.floor);
        lower_i_[lv.dim] = detail::enclose(*lower_[lv.dim]);
      }
    }
  }

 private:
  std::optional<AffineForm> bound(std::size_t m, bool upper) const {
    if (upper_.size() != n + 1) index_bounds();
    return upper ? upper_.at(m) : lower_.at(m);
  }

  // Whether the coefficient of x_stop (or the constant when `constant`) left after the
  // eliminations in `path` is exactly zero. With integer level forms F (last coefficient
  // L), a step is G <- |L| G - sign(L) G_m F, which keeps G a positive multiple of the
  // rational coefficients by the product of the |L| used.
  bool zero_by_residues(const AffineForm& f, bool negate, const std::vector<int>& path, std::size_t stop,
                        bool constant, const detail::Interval& enclosure, long scale_bits) const {
    if (!integral_) return false;
    for (const auto& v : f.coeffs())
      if (v.get_den() != 1) return false;
    if (f.constant().get_den() != 1) return false;
    const double bound = std::max(std::abs(enclosure.lo), std::abs(enclosure.hi));
    int exp2 = 0;
    std::frexp(bound, &exp2);
    const long bits = scale_bits + std::max(exp2, 0) + 2;
    const std::size_t count = static_cast<std::size_t>(bits / 61 + 1);
    const std::size_t top = constant ? 1 : stop + 1;
    std::vector<std::uint64_t> g(n + 1);
    for (std::size_t k = 0; k < count; ++k) {
      const auto& res = level_residues(k);
      const detail::Montgomery& mg = monts_[k];
      auto load = [&](const Rat& v) {
        std::uint64_t r = mg.to(detail::residue(v.get_num(), mg.m));
        return negate ? mg.sub(0, r) : r;
      };
      for (std::size_t i = 0; i < n; ++i) g[i] = i < f.dim() ? load(f.coeff(i)) : 0;
      g[n] = load(f.constant());
      for (std::size_t m = n; m >= top; --m) {
        if (path[m] == 0) continue;
        const auto& form = res[m][path[m] > 0 ? 0 : 1];  // coefficients 0..m-1, the constant, |L|
        const bool neg_last = last_negative_[m][path[m] > 0 ? 0 : 1];
        const std::uint64_t abs_last = form[m + 1];
        const std::uint64_t am = g[m - 1];
        auto step = [&](std::uint64_t& cell, std::uint64_t fi) {
          const std::uint64_t t = mg.mul(am, fi);
          cell = mg.mul(cell, abs_last);
          cell = neg_last ? mg.add(cell, t) : mg.sub(cell, t);
        };
        for (std::size_t i = 0; i + 1 < m; ++i) step(g[i], form[i]);
        step(g[n], form[m]);
        g[m - 1] = 0;
      }
      if ((constant ? g[n] : g[stop - 1]) != 0) return false;
    }
    return true;
  }

  // Montgomery residues modulo the k-th modulus of the ceiling and floor forms, followed
  // by the residue of |last coefficient|; cached.
  const std::vector<std::array<std::vector<std::uint64_t>, 2>>& level_residues(std::size_t k) const {
    while (residues_.size() <= k) {
      const detail::Montgomery mg(detail::coprime_moduli(residues_.size() + 1)[residues_.size()]);
      std::vector<std::array<std::vector<std::uint64_t>, 2>> per(n + 1);
      for (const auto& lv : levels)
        for (int side = 0; side < 2; ++side) {
          const auto& form = side == 0 ? lv.ceiling : lv.floor;
          if (!form) continue;
          auto& out = per[lv.dim][side];
          for (const auto& v : form->coeffs()) out.push_back(mg.to(detail::residue(v.get_num(), mg.m)));
          out.push_back(mg.to(detail::residue(form->constant().get_num(), mg.m)));
          Int abs_last = abs(form->last().get_num());
          out.push_back(mg.to(detail::residue(abs_last, mg.m)));
        }
      residues_.push_back(std::move(per));
      monts_.push_back(mg);
    }
    return residues_[k];
  }

  mutable std::vector<std::optional<AffineForm>> upper_, lower_;
  mutable std::vector<std::optional<detail::IntervalForm>> upper_i_, lower_i_;
  mutable bool integral_ = true;
  mutable std::vector<std::array<long, 2>> last_bits_;
  mutable std::vector<std::array<bool, 2>> last_negative_;
  mutable std::vector<std::vector<std::array<std::vector<std::uint64_t>, 2>>> residues_;
  mutable std::vector<detail::Montgomery> monts_;
};

inline void dump_prism(const Prism& p, std::ostream& os) {
  os << "prism in dimension " << p.n << (p.degenerate ? " (degenerate)" : "") << '\n';
  for (const auto& lv : p.levels) {
    os << "  level " << lv.dim << ": " << lv.form_count << " forms, " << lv.queries << " queries";
    if (lv.raw_zeros) os << ", " << lv.raw_zeros << " zero answers";
    os << '\n';
    os << "    ceiling: " << (lv.ceiling ? lv.ceiling->to_string() : std::string("none")) << '\n';
    os << "    floor:   " << (lv.floor ? lv.floor->to_string() : std::string("none")) << '\n';
    if (lv.dim > 1) {
      os << "    walls:   " << lv.kept_walls.size() << " kept of " << lv.candidates << " candidates\n";
      for (const auto& w : lv.kept_walls) os << "      " << w.to_string() << " >= 0\n";
    }
  }
}

// ---------------------------------------------------------------------------
// Locating the prism of the vertical decomposition that contains the secret point.

struct SampleForm {
  std::size_t id;
  AffineForm form;  // dimension n, working coordinates
};

struct LocateOptions {
  // Skip wall candidates of hyperplanes that are not facets of the top-level cell; their
  // candidates are implied by the others, so the resulting walls are the same.
  bool prefilter = true;
  PruneStats* stats = nullptr;
};

struct LocateResult {
  std::optional<std::size_t> on_hyperplane;  // id of a sampled hyperplane through the point
  Prism prism;
  std::size_t queries = 0;
};

template <SignOracle O>
LocateResult locate_prism(std::span<const SampleForm> sample, std::size_t n, O& oracle,
                          const LocateOptions& opts = {}) {
  LocateResult out;
  const std::size_t start = oracle.query_count();
  Prism& prism = out.prism;
  prism.n = n;
  std::vector<AffineForm> forms;
  for (const auto& s : sample) {
    if (s.form.dim() != n) throw DimensionError("locate_prism: sample form dimension mismatch");
    forms.push_back(s.form);
  }
  for (std::size_t m = n; m >= 1 && !forms.empty(); --m) {
    PrismLevel lv;
    lv.dim = m;
    lv.form_count = forms.size();
    const std::size_t level_start = oracle.query_count();
    const auto clock_start = std::chrono::steady_clock::now();
    LevelSplit split;
    for (std::size_t i = 0; i < forms.size(); ++i) {
      require_non_vertical(forms[i]);
      Sign s = oracle.sign_of(forms[i]);
      if (s == Sign::zero) {
        if (m == n) {
          out.on_hyperplane = sample[i].id;
          out.queries = oracle.query_count() - start;
          return out;
        }
        ++lv.raw_zeros;
      }
      split.raw.push_back(s);
      split.effective.push_back(resolve_zero(s, forms[i]));
    }
    choose_extremes(std::span<const AffineForm>(forms), split,
                    [&](const AffineForm& a, const AffineForm& b) { return oracle.compare_heights(a, b); });
    lv.raw_zeros += split.ties;
    for (std::size_t i = 0; i < forms.size(); ++i) lv.sign_labels.emplace_back(forms[i], split.effective[i]);
    if (split.ceiling) {
      lv.ceiling = forms[*split.ceiling];
      lv.ceiling_sign = split.effective[*split.ceiling];
      prism.constraints.push_back(lift(*lv.ceiling * Rat(to_int(lv.ceiling_sign)), n).primitive());
    }
    if (split.floor) {
      lv.floor = forms[*split.floor];
      lv.floor_sign = split.effective[*split.floor];
      prism.constraints.push_back(lift(*lv.floor * Rat(to_int(lv.floor_sign)), n).primitive());
    }
    std::vector<AffineForm> next;
    if (m > 1) {
      std::vector<char> include;
      if (opts.prefilter && m == n && forms.size() > 2) {
        std::vector<LinConstraint> cell;
        for (std::size_t i = 0; i < forms.size(); ++i) cell.push_back(forms[i] * Rat(to_int(split.effective[i])));
        include.assign(forms.size(), 0);
        for (std::size_t i : irredundant_subset(cell, m, opts.stats)) include[i] = 1;
      }
      auto cands = wall_candidates(forms, split, include);
      lv.candidates = cands.size();
      const std::size_t extremes = (split.ceiling ? 1 : 0) + (split.floor ? 1 : 0);
      for (std::size_t i : prune_walls(cands, m - 1, forms.size(), extremes, opts.stats))
        next.push_back(cands[i].form);
      lv.kept_walls = next;
    }
    lv.queries = oracle.query_count() - level_start;
    lv.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    if (lv.raw_zeros) prism.degenerate = true;
    prism.levels.push_back(std::move(lv));
    forms = std::move(next);
  }
  prism.index_bounds();
  out.queries = oracle.query_count() - start;
  return out;
}

// No sampled form crosses the prism and the prism has interior; decided by linear
// programming on the constraint list alone.
inline bool verify_prism(const Prism& p, std::span<const AffineForm> sample) {
  auto flags = crossing_flags(sample, p.constraints, p.n);
  return flags && std::none_of(flags->begin(), flags->end(), [](char c) { return c != 0; });
}

}  // namespace ldt
