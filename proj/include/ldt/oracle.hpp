#pragma once

#include <concepts>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <vector>

#include "affine_form.hpp"
#include "transform.hpp"

namespace ldt {

// One answered query: the canonical form of the question in the working coordinates of
// its epoch (lifted to the full dimension) and the sign it took at the secret point.
struct QueryRecord {
  AffineForm form;
  Sign sign;
  std::uint32_t epoch;
};

// Every query in order. An epoch starts whenever the coordinate transform changes.
class Transcript {
 public:
  void begin_epoch(const TransformMatrix& t) { transforms_.push_back(t); }
  void record(AffineForm canonical_form, Sign s) {
    records_.push_back({std::move(canonical_form), s, static_cast<std::uint32_t>(transforms_.size() - 1)});
  }

  std::size_t size() const { return records_.size(); }
  const QueryRecord& operator[](std::size_t i) const { return records_[i]; }
  const std::vector<QueryRecord>& records() const { return records_; }
  std::size_t epochs() const { return transforms_.size(); }
  const TransformMatrix& transform(std::size_t epoch) const { return transforms_.at(epoch); }

  // Query i as a canonical form in the original coordinates, with the sign it took there.
  std::pair<AffineForm, Sign> original(std::size_t i) const {
    const QueryRecord& r = records_.at(i);
    const TransformMatrix& t = transforms_.at(r.epoch);
    const std::size_t n = t.size();
    AffineForm o(r.form.constant(), std::vector<Rat>(n));
    for (std::size_t a = 0; a < n; ++a) {
      if (r.form.coeff(a) == 0) continue;
      for (std::size_t b = 0; b < n; ++b)
        if (t.at(a, b) != 0) o.coeffs()[b] += r.form.coeff(a) * t.at(a, b);
    }
    auto [c, s] = o.canonical_with_sign();
    return {std::move(c), s * r.sign};
  }

  // Number of distinct query hyperplanes.
  std::size_t distinct_count() const {
    std::set<AffineForm> seen;
    if (transforms_.size() <= 1) {
      for (const auto& r : records_) seen.insert(r.form);
    } else {
      for (std::size_t i = 0; i < records_.size(); ++i) seen.insert(original(i).first);
    }
    return seen.size();
  }

  // One line per query: canonical coefficients x_1..x_n, the constant, then the sign.
  void write(std::ostream& os) const {
    for (std::size_t i = 0; i < records_.size(); ++i) {
      auto [f, s] = original(i);
      for (const auto& c : f.coeffs()) os << c.get_str() << ' ';
      os << f.constant().get_str() << ' ' << to_char(s) << '\n';
    }
  }

  friend bool operator==(const Transcript& a, const Transcript& b) {
    if (a.records_.size() != b.records_.size() || a.transforms_ != b.transforms_) return false;
    for (std::size_t i = 0; i < a.records_.size(); ++i)
      if (a.records_[i].form != b.records_[i].form || a.records_[i].sign != b.records_[i].sign ||
          a.records_[i].epoch != b.records_[i].epoch)
        return false;
    return true;
  }

 private:
  std::vector<TransformMatrix> transforms_;
  std::vector<QueryRecord> records_;
};

// True iff every recorded query has the recorded sign at `candidate` (original coordinates).
inline bool replay(const Transcript& t, std::span<const Rat> candidate) {
  std::vector<std::vector<Rat>> moved(t.epochs());
  for (std::size_t e = 0; e < t.epochs(); ++e) moved[e] = t.transform(e).apply(candidate);
  for (const auto& r : t.records())
    if (sign_of_value(r.form.evaluate(moved[r.epoch])) != r.sign) return false;
  return true;
}

template <class O>
concept SignOracle = requires(O o, const AffineForm& f) {
  { o.sign_of(f) } -> std::same_as<Sign>;
  { o.compare_heights(f, f) } -> std::same_as<Sign>;
  { o.query_count() } -> std::convertible_to<std::size_t>;
};

template <class O>
concept TransformingOracle = SignOracle<O> && requires(O o, const TransformMatrix& t) {
  { o.dim() } -> std::convertible_to<std::size_t>;
  o.set_transform(t);
};

// The only holder of the secret point. Questions are affine forms in working
// coordinates y = M x (M the current transform) of dimension at most n; a form of
// dimension m is read as a function of y_1..y_m. Every question is charged and recorded.
class Oracle {
 public:
  explicit Oracle(std::vector<Rat> secret) : Oracle(secret, TransformMatrix::identity(secret.size())) {}
  Oracle(std::vector<Rat> secret, TransformMatrix t) : secret_(std::move(secret)) { set_transform(std::move(t)); }

  std::size_t dim() const { return secret_.size(); }

  void set_transform(TransformMatrix t) {
    if (t.size() != secret_.size()) throw DimensionError("Oracle: transform dimension mismatch");
    working_ = t.apply(secret_);
    transform_ = std::move(t);
    transcript_.begin_epoch(transform_);
  }
  const TransformMatrix& transform() const { return transform_; }

  Sign sign_of(const AffineForm& f) {
    if (f.dim() > dim()) throw DimensionError("sign_of: form dimension exceeds the secret's");
    if (f.is_zero()) throw Error("sign_of: zero form");
    Rat v = f.constant();
    for (std::size_t i = 0; i < f.dim(); ++i)
      if (f.coeff(i) != 0) v += f.coeff(i) * working_[i];
    Sign s = sign_of_value(v);
    auto [c, factor] = lift(f, dim()).canonical_with_sign();
    transcript_.record(std::move(c), factor * s);
    ++count_;
    return s;
  }

  // Sign of f - g at the projected secret; f and g must differ.
  Sign compare_heights(const AffineForm& f, const AffineForm& g) {
    AffineForm diff = f - g;
    if (diff.is_zero()) throw Error("compare_heights: identical forms");
    return sign_of(diff);
  }

  std::size_t query_count() const { return count_; }
  const Transcript& transcript() const { return transcript_; }

 private:
  std::vector<Rat> secret_;
  std::vector<Rat> working_;
  TransformMatrix transform_;
  Transcript transcript_;
  std::size_t count_ = 0;
};

// Answers repeated questions (same hyperplane) from a cache; only first askings reach
// the wrapped oracle and are charged.
template <TransformingOracle O>
class MemoOracle {
 public:
  explicit MemoOracle(O& inner) : inner_(inner) {}

  std::size_t dim() const { return inner_.dim(); }
  void set_transform(const TransformMatrix& t) {
    cache_.clear();
    inner_.set_transform(t);
  }

  Sign sign_of(const AffineForm& f) {
    auto [c, factor] = lift(f, dim()).canonical_with_sign();
    auto it = cache_.find(c);
    if (it != cache_.end()) return factor * it->second;
    Sign s = inner_.sign_of(f);
    cache_.emplace(std::move(c), factor * s);
    return s;
  }

  Sign compare_heights(const AffineForm& f, const AffineForm& g) {
    AffineForm diff = f - g;
    if (diff.is_zero()) throw Error("compare_heights: identical forms");
    return sign_of(diff);
  }

  std::size_t query_count() const { return inner_.query_count(); }

 private:
  O& inner_;
  std::map<AffineForm, Sign> cache_;
};

}  // namespace ldt
