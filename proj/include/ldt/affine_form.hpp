#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rational.hpp"
#include "sign.hpp"

namespace ldt {

// f(x) = constant + sum_i coeffs[i] * x_{i+1} over Q^dim.
class AffineForm {
 public:
  AffineForm() = default;
  explicit AffineForm(std::size_t dim) : coeffs_(dim) {}
  AffineForm(Rat constant, std::vector<Rat> coeffs) : constant_(std::move(constant)), coeffs_(std::move(coeffs)) {}

  // x_{i+1} in dimension dim (i is zero-based).
  static AffineForm coordinate(std::size_t dim, std::size_t i) {
    AffineForm f(dim);
    f.coeffs_.at(i) = 1;
    return f;
  }

  std::size_t dim() const { return coeffs_.size(); }
  const Rat& constant() const { return constant_; }
  Rat& constant() { return constant_; }
  const std::vector<Rat>& coeffs() const { return coeffs_; }
  std::vector<Rat>& coeffs() { return coeffs_; }
  const Rat& coeff(std::size_t i) const { return coeffs_.at(i); }
  const Rat& last() const { return coeffs_.back(); }

  bool is_constant() const {
    for (const auto& c : coeffs_)
      if (c != 0) return false;
    return true;
  }
  bool is_zero() const { return constant_ == 0 && is_constant(); }

  Rat evaluate(std::span<const Rat> p) const {
    if (p.size() != dim())
      throw DimensionError("evaluate: form has dimension " + std::to_string(dim()) + ", point has " +
                           std::to_string(p.size()));
    Rat v = constant_;
    for (std::size_t i = 0; i < dim(); ++i)
      if (coeffs_[i] != 0) v += coeffs_[i] * p[i];
    return v;
  }

  AffineForm operator-() const {
    AffineForm r(-constant_, coeffs_);
    for (auto& c : r.coeffs_) c = -c;
    return r;
  }

  AffineForm& operator+=(const AffineForm& o) {
    check_same_dim(o, "+");
    constant_ += o.constant_;
    for (std::size_t i = 0; i < dim(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  AffineForm& operator-=(const AffineForm& o) {
    check_same_dim(o, "-");
    constant_ -= o.constant_;
    for (std::size_t i = 0; i < dim(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  AffineForm& operator*=(const Rat& s) {
    constant_ *= s;
    for (auto& c : coeffs_) c *= s;
    return *this;
  }
  friend AffineForm operator+(AffineForm a, const AffineForm& b) { return a += b; }
  friend AffineForm operator-(AffineForm a, const AffineForm& b) { return a -= b; }
  friend AffineForm operator*(AffineForm a, const Rat& s) { return a *= s; }
  friend AffineForm operator*(const Rat& s, AffineForm a) { return a *= s; }

  // Positive factor turning every entry into a coprime integer. Zero form -> 1.
  Rat primitive_factor() const {
    Int l = 1, g = 0;
    auto visit_den = [&](const Rat& v) {
      if (v != 0) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
    };
    visit_den(constant_);
    for (const auto& c : coeffs_) visit_den(c);
    auto visit_num = [&](const Rat& v) {
      if (v == 0) return;
      Int scaled = v.get_num() * (l / v.get_den());
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), scaled.get_mpz_t());
    };
    visit_num(constant_);
    for (const auto& c : coeffs_) visit_num(c);
    if (g == 0) return Rat(1);
    Rat f(l, g);
    f.canonicalize();
    return f;
  }

  // Same halfspace {f >= 0}, coprime integer entries.
  AffineForm primitive() const { return *this * primitive_factor(); }

  // Identity of the zero set: coprime integers, first nonzero coefficient positive
  // (the constant decides when every coefficient vanishes). The returned sign is the
  // sign of the factor applied, so sign(canonical(f)(p)) = factor_sign * sign(f(p)).
  std::pair<AffineForm, Sign> canonical_with_sign() const {
    Rat f = primitive_factor();
    Sign s = Sign::positive;
    const Rat* lead = &constant_;
    for (const auto& c : coeffs_)
      if (c != 0) {
        lead = &c;
        break;
      }
    if (*lead < 0) {
      f = -f;
      s = Sign::negative;
    }
    return {*this * f, s};
  }
  AffineForm canonical() const { return canonical_with_sign().first; }

  friend bool operator==(const AffineForm& a, const AffineForm& b) {
    return a.constant_ == b.constant_ && a.coeffs_ == b.coeffs_;
  }
  friend std::strong_ordering operator<=>(const AffineForm& a, const AffineForm& b) {
    if (auto c = a.dim() <=> b.dim(); c != 0) return c;
    for (std::size_t i = 0; i < a.dim(); ++i) {
      int c = cmp(a.coeffs_[i], b.coeffs_[i]);
      if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    int c = cmp(a.constant_, b.constant_);
    if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string to_string() const {
    std::ostringstream os;
    bool first = true;
    auto term = [&](const Rat& c, const std::string& var) {
      if (c == 0) return;
      Rat a = abs(c);
      if (first)
        os << (c < 0 ? "-" : "");
      else
        os << (c < 0 ? " - " : " + ");
      if (var.empty() || a != 1) os << a.get_str();
      os << var;
      first = false;
    };
    term(constant_, "");
    for (std::size_t i = 0; i < dim(); ++i) term(coeffs_[i], "x" + std::to_string(i + 1));
    if (first) os << "0";
    return os.str();
  }

 private:
  void check_same_dim(const AffineForm& o, const char* op) const {
    if (o.dim() != dim())
      throw DimensionError(std::string("operator") + op + ": dimensions " + std::to_string(dim()) + " and " +
                           std::to_string(o.dim()));
  }

  Rat constant_{0};
  std::vector<Rat> coeffs_;
};

inline std::ostream& operator<<(std::ostream& os, const AffineForm& f) { return os << f.to_string(); }

// g restricted to the hyperplane h = 0, parametrized by the first m-1 coordinates.
inline AffineForm substitute_last(const AffineForm& g, const AffineForm& h) {
  if (g.dim() != h.dim() || g.dim() == 0)
    throw DimensionError("substitute_last: dimensions " + std::to_string(g.dim()) + " and " + std::to_string(h.dim()));
  if (h.last() == 0) throw DimensionError("substitute_last: h has zero last coefficient");
  const std::size_t m = g.dim();
  Rat ratio = g.last() / h.last();
  AffineForm r(g.constant() - ratio * h.constant(), std::vector<Rat>(m - 1));
  for (std::size_t i = 0; i + 1 < m; ++i) r.coeffs()[i] = g.coeff(i) - ratio * h.coeff(i);
  return r;
}

// Height of the hyperplane h = 0 above the point (y_1..y_{m-1}).
inline AffineForm height_form(const AffineForm& h) {
  if (h.dim() == 0) throw DimensionError("height_form: zero-dimensional form");
  if (h.last() == 0) throw DimensionError("height_form: h has zero last coefficient");
  const std::size_t m = h.dim();
  Rat inv = -1 / h.last();
  AffineForm r(h.constant() * inv, std::vector<Rat>(m - 1));
  for (std::size_t i = 0; i + 1 < m; ++i) r.coeffs()[i] = h.coeff(i) * inv;
  return r;
}

// The same function on Q^to_dim, independent of the extra coordinates.
inline AffineForm lift(const AffineForm& f, std::size_t to_dim) {
  if (to_dim < f.dim())
    throw DimensionError("lift: target dimension " + std::to_string(to_dim) + " below " + std::to_string(f.dim()));
  AffineForm r(f.constant(), f.coeffs());
  r.coeffs().resize(to_dim);
  return r;
}

// A zero value is replaced by the sign it takes after moving the point by
// eps_m e_m + eps_{m-1} e_{m-1} + ... with eps_m >> eps_{m-1} >> ... > 0, i.e. the sign
// of the highest-index nonzero coefficient. Consistent across dimensions because
// projection drops the top coordinates together with their perturbations.
inline Sign resolve_zero(Sign raw, const AffineForm& f) {
  if (raw != Sign::zero) return raw;
  for (std::size_t i = f.dim(); i-- > 0;)
    if (f.coeff(i) != 0) return sign_of_value(f.coeff(i));
  return Sign::zero;
}

}  // namespace ldt
