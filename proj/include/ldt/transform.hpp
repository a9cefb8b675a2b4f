#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "affine_form.hpp"
#include "rng.hpp"

namespace ldt {

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// Exact inverse of a row-major n x n matrix.
inline std::vector<Rat> invert_matrix(std::vector<Rat> a, std::size_t n) {
  std::vector<Rat> inv(n * n);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && a[piv * n + col] == 0) ++piv;
    if (piv == n) throw SingularMatrixError("matrix is singular");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a[piv * n + j], a[col * n + j]);
        std::swap(inv[piv * n + j], inv[col * n + j]);
      }
    Rat p = a[col * n + col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col * n + j] /= p;
      inv[col * n + j] /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || a[i * n + col] == 0) continue;
      Rat f = a[i * n + col];
      for (std::size_t j = 0; j < n; ++j) {
        a[i * n + j] -= f * a[col * n + j];
        inv[i * n + j] -= f * inv[col * n + j];
      }
    }
  }
  return inv;
}

// Invertible change of coordinates y = M x. Forms move with the inverse, so that
// transform_form(f, T) evaluated at M x equals f evaluated at x.
class TransformMatrix {
 public:
  TransformMatrix() = default;
  TransformMatrix(std::size_t n, std::vector<Rat> matrix) : n_(n), m_(std::move(matrix)) {
    if (m_.size() != n * n) throw DimensionError("TransformMatrix: expected " + std::to_string(n * n) + " entries");
    inv_ = invert_matrix(m_, n);
  }
  TransformMatrix(std::size_t n, std::vector<Rat> matrix, std::vector<Rat> inverse)
      : n_(n), m_(std::move(matrix)), inv_(std::move(inverse)) {}

  static TransformMatrix identity(std::size_t n) {
    std::vector<Rat> id(n * n);
    for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1;
    return TransformMatrix(n, id, id);
  }

  std::size_t size() const { return n_; }
  const Rat& at(std::size_t i, std::size_t j) const { return m_[i * n_ + j]; }
  const Rat& inverse_at(std::size_t i, std::size_t j) const { return inv_[i * n_ + j]; }
  TransformMatrix inverse() const { return TransformMatrix(n_, inv_, m_); }

  std::vector<Rat> apply(std::span<const Rat> x) const {
    if (x.size() != n_) throw DimensionError("TransformMatrix::apply: dimension mismatch");
    std::vector<Rat> y(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        if (m_[i * n_ + j] != 0) y[i] += m_[i * n_ + j] * x[j];
    return y;
  }

  friend bool operator==(const TransformMatrix&, const TransformMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<Rat> m_;
  std::vector<Rat> inv_;
};

inline AffineForm transform_form(const AffineForm& f, const TransformMatrix& t) {
  if (f.dim() != t.size()) throw DimensionError("transform_form: dimension mismatch");
  const std::size_t n = t.size();
  AffineForm r(f.constant(), std::vector<Rat>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (f.coeff(i) == 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (t.inverse_at(i, j) != 0) r.coeffs()[j] += f.coeff(i) * t.inverse_at(i, j);
  }
  return r;
}

// Draws an integer matrix A with entries in [-bound, bound] (redrawn while singular) and
// returns M = A^{-1}: transformed forms f * A keep integer coefficients. A form becomes
// vertical with probability about 1/bound, hence the default well above 9.
inline TransformMatrix random_generic_transform(std::size_t n, std::uint64_t seed, long bound = 1024) {
  Rng rng(derive_seed(seed, 0x7472616e73ULL));
  for (;;) {
    std::vector<Rat> a(n * n);
    for (auto& v : a) v = static_cast<long>(rng.between(-bound, bound));
    try {
      std::vector<Rat> inv = invert_matrix(a, n);
      return TransformMatrix(n, std::move(inv), std::move(a));
    } catch (const SingularMatrixError&) {
    }
  }
}

}  // namespace ldt
