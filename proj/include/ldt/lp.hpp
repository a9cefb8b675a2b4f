#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "affine_form.hpp"

namespace ldt {

// A constraint form >= 0.
using LinConstraint = AffineForm;

enum class LpStatus { infeasible, unbounded, optimal };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  Rat value;                  // optimal value (status optimal)
  std::vector<Rat> witness;   // a feasible point; optimal point when status optimal
  std::vector<Rat> ray;       // improving recession direction (status unbounded)
};

class DegenerateRegionError : public Error {
 public:
  using Error::Error;
};

namespace detail {

// Rows a_j . y + b_j >= 0 with integer entries, row-major.
struct IntSystem {
  std::size_t dim = 0;
  std::vector<Int> a;
  std::vector<Int> b;

  std::size_t rows() const { return b.size(); }
  const Int* row(std::size_t j) const { return a.data() + j * dim; }

  void push(const Int* coeffs, const Int& constant) {
    a.insert(a.end(), coeffs, coeffs + dim);
    b.push_back(constant);
  }
};

inline void dot(Int& out, const Int* x, const Int* y, std::size_t d) {
  mpz_set_ui(out.get_mpz_t(), 0);
  for (std::size_t i = 0; i < d; ++i)
    if (sgn(x[i]) != 0) mpz_addmul(out.get_mpz_t(), x[i].get_mpz_t(), y[i].get_mpz_t());
}

// Primitive integer coefficients and constant of a positive multiple of f.
inline std::pair<std::vector<Int>, Int> integer_row(const AffineForm& f) {
  AffineForm p = f.primitive();
  std::vector<Int> a(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) a[i] = p.coeff(i).get_num();
  return {std::move(a), p.constant().get_num()};
}

// Common-denominator representation P / Q (Q > 0) of a rational point.
inline std::pair<std::vector<Int>, Int> integer_point(std::span<const Rat> p) {
  Int q = 1;
  for (const auto& v : p) mpz_lcm(q.get_mpz_t(), q.get_mpz_t(), v.get_den_mpz_t());
  std::vector<Int> num(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) num[i] = p[i].get_num() * (q / p[i].get_den());
  return {std::move(num), q};
}

inline std::vector<Rat> rational_point(std::span<const Int> num, const Int& den) {
  std::vector<Rat> p(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) {
    p[i] = Rat(num[i], den);
    p[i].canonicalize();
  }
  return p;
}

struct SimplexOutcome {
  enum class Kind { optimal, unbounded, positive } kind = Kind::optimal;
  std::vector<Int> num;  // final point numerators
  Int den;               // final point denominator, > 0
  std::vector<Int> ray;  // improving direction when unbounded
  std::size_t pivots = 0;
};

// Maximizes obj . y + obj0 over the rows listed in `rows`, from a feasible start
// point. The basis holds d rows: either constraint normals (tight constraints) or
// unit vectors (coordinates not yet pinned). The inverse is kept as an integer
// adjugate with its determinant and updated fraction-free on every row exchange.
// Bland's rule: unit rows first by position, then smallest constraint index; ties
// in the ratio test go to the smallest constraint index.
// With stop_when_positive the run ends as soon as the objective value exceeds 0.
inline SimplexOutcome run_simplex(const IntSystem& sys, std::span<const std::uint32_t> rows,
                                  std::span<const Int> obj, const Int& obj0, std::span<const Int> start_num,
                                  const Int& start_den, bool stop_when_positive) {
  const std::size_t d = sys.dim;
  SimplexOutcome out;
  std::vector<Int> adj(d * d);
  for (std::size_t i = 0; i < d; ++i) adj[i * d + i] = 1;
  Int det = 1;
  std::vector<long> basis(d, -1);  // -1: unit row; otherwise index into rows
  std::vector<char> tight(rows.size(), 0);
  std::vector<Int> rhs(start_num.begin(), start_num.end());
  out.num.assign(start_num.begin(), start_num.end());
  out.den = start_den;

  std::vector<Int> lam(d);  // obj . adj; sign(lambda_k) = sign(lam_k) * sign(det)
  for (std::size_t k = 0; k < d; ++k) lam[k] = obj[k];

  std::vector<Int> delta(d), u(d);
  Int g, s, best_g, best_s, lhs, rhs_cmp, tmp;

  for (;;) {
    if (stop_when_positive) {
      dot(tmp, obj.data(), out.num.data(), d);
      mpz_addmul(tmp.get_mpz_t(), obj0.get_mpz_t(), out.den.get_mpz_t());
      if (sgn(tmp) > 0) {
        out.kind = SimplexOutcome::Kind::positive;
        return out;
      }
    }
    const int det_sign = sgn(det);
    long enter = -1;
    int direction = 0;
    for (std::size_t k = 0; k < d; ++k)
      if (basis[k] < 0 && sgn(lam[k]) != 0) {
        enter = static_cast<long>(k);
        direction = sgn(lam[k]) * det_sign;
        break;
      }
    if (enter < 0) {
      long best_row = -1;
      for (std::size_t k = 0; k < d; ++k)
        if (basis[k] >= 0 && sgn(lam[k]) * det_sign > 0 && (best_row < 0 || basis[k] < best_row)) {
          best_row = basis[k];
          enter = static_cast<long>(k);
        }
      direction = 1;
    }
    if (enter < 0) {
      out.kind = SimplexOutcome::Kind::optimal;
      return out;
    }
    const std::size_t k = static_cast<std::size_t>(enter);
    const int scale = direction * det_sign;
    for (std::size_t i = 0; i < d; ++i) delta[i] = scale > 0 ? adj[i * d + k] : Int(-adj[i * d + k]);

    long leave = -1;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (tight[j]) continue;
      const Int* a = sys.row(rows[j]);
      dot(g, a, delta.data(), d);
      if (sgn(g) >= 0) continue;
      dot(s, a, out.num.data(), d);
      mpz_addmul(s.get_mpz_t(), sys.b[rows[j]].get_mpz_t(), out.den.get_mpz_t());
      if (leave >= 0) {
        // s / -g < best_s / -best_g  <=>  s * best_g > best_s * g  (both g negative)
        lhs = s * best_g;
        rhs_cmp = best_s * g;
        if (lhs <= rhs_cmp) continue;
      }
      leave = static_cast<long>(j);
      best_g = g;
      best_s = s;
    }
    if (leave < 0) {
      out.kind = SimplexOutcome::Kind::unbounded;
      out.ray = delta;
      return out;
    }

    const Int* a = sys.row(rows[leave]);
    for (std::size_t j = 0; j < d; ++j) {
      mpz_set_ui(u[j].get_mpz_t(), 0);
      for (std::size_t i = 0; i < d; ++i)
        if (sgn(a[i]) != 0) mpz_addmul(u[j].get_mpz_t(), a[i].get_mpz_t(), adj[i * d + j].get_mpz_t());
    }
    const Int uk = u[k];
    for (std::size_t j = 0; j < d; ++j) {
      if (j == k) continue;
      for (std::size_t i = 0; i < d; ++i) {
        Int& cell = adj[i * d + j];
        mpz_mul(cell.get_mpz_t(), cell.get_mpz_t(), uk.get_mpz_t());
        mpz_submul(cell.get_mpz_t(), adj[i * d + k].get_mpz_t(), u[j].get_mpz_t());
        mpz_divexact(cell.get_mpz_t(), cell.get_mpz_t(), det.get_mpz_t());
      }
      mpz_mul(lam[j].get_mpz_t(), lam[j].get_mpz_t(), uk.get_mpz_t());
      mpz_submul(lam[j].get_mpz_t(), lam[k].get_mpz_t(), u[j].get_mpz_t());
      mpz_divexact(lam[j].get_mpz_t(), lam[j].get_mpz_t(), det.get_mpz_t());
    }
    det = uk;
    if (basis[k] >= 0) tight[static_cast<std::size_t>(basis[k])] = 0;
    basis[k] = leave;
    tight[static_cast<std::size_t>(leave)] = 1;
    rhs[k] = -sys.b[rows[leave]] * start_den;

    for (std::size_t i = 0; i < d; ++i) dot(out.num[i], adj.data() + i * d, rhs.data(), d);
    out.den = det * start_den;
    if (sgn(out.den) < 0) {
      out.den = -out.den;
      for (auto& v : out.num) v = -v;
    }
    ++out.pivots;
  }
}

// Nonconstant rows go to the system; constant rows are checked directly.
// Returns false when some constant row is negative.
inline bool build_system(std::span<const LinConstraint> cs, std::size_t dim, IntSystem& sys) {
  sys.dim = dim;
  for (const auto& c : cs) {
    if (c.dim() != dim) throw DimensionError("LP: constraint dimension mismatch");
    if (c.is_constant()) {
      if (c.constant() < 0) return false;
      continue;
    }
    auto [a, b] = integer_row(c);
    sys.push(a.data(), b);
  }
  return true;
}

inline std::vector<std::uint32_t> all_rows(std::size_t n) {
  std::vector<std::uint32_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = static_cast<std::uint32_t>(i);
  return r;
}

// Feasible point of the system, or nullopt. Phase one: an auxiliary variable s relaxes
// every row, a_j.y + b_j + s >= 0, s >= 0, and -s is maximized from y = 0.
inline std::optional<std::pair<std::vector<Int>, Int>> feasible_point(const IntSystem& sys) {
  const std::size_t d = sys.dim;
  IntSystem aux;
  aux.dim = d + 1;
  std::vector<Int> row(d + 1);
  Int s0 = 0;
  for (std::size_t j = 0; j < sys.rows(); ++j) {
    std::copy(sys.row(j), sys.row(j) + d, row.begin());
    row[d] = 1;
    aux.push(row.data(), sys.b[j]);
    if (-sys.b[j] > s0) s0 = -sys.b[j];
  }
  std::fill(row.begin(), row.end(), Int(0));
  row[d] = 1;
  aux.push(row.data(), Int(0));
  if (s0 == 0) return std::make_pair(std::vector<Int>(d), Int(1));
  std::vector<Int> obj(d + 1), start(d + 1);
  obj[d] = -1;
  start[d] = s0;
  auto rows = all_rows(aux.rows());
  auto res = run_simplex(aux, rows, obj, Int(0), start, Int(1), false);
  if (sgn(res.num[d]) != 0) return std::nullopt;
  res.num.pop_back();
  return std::make_pair(std::move(res.num), std::move(res.den));
}

// Point where every row is strictly positive, or nullopt. Maximizes t subject to
// a_j.y + b_j - t >= 0 and t <= 1, starting from y = 0.
inline std::optional<std::pair<std::vector<Int>, Int>> strict_point(const IntSystem& sys) {
  const std::size_t d = sys.dim;
  IntSystem aux;
  aux.dim = d + 1;
  std::vector<Int> row(d + 1);
  Int t0 = 1;
  for (std::size_t j = 0; j < sys.rows(); ++j) {
    std::copy(sys.row(j), sys.row(j) + d, row.begin());
    row[d] = -1;
    aux.push(row.data(), sys.b[j]);
    if (sys.b[j] < t0) t0 = sys.b[j];
  }
  std::fill(row.begin(), row.end(), Int(0));
  row[d] = -1;
  aux.push(row.data(), Int(1));
  std::vector<Int> obj(d + 1), start(d + 1);
  obj[d] = 1;
  start[d] = t0;
  auto rows = all_rows(aux.rows());
  auto res = run_simplex(aux, rows, obj, Int(0), start, Int(1), false);
  if (sgn(res.num[d]) <= 0) return std::nullopt;
  res.num.pop_back();
  return std::make_pair(std::move(res.num), std::move(res.den));
}

// ---------------------------------------------------------------------------
// Floating-point guidance. A double-precision copy of the system steers the search; every
// conclusion drawn from it is re-checked exactly, and the exact simplex takes over
// whenever a check fails.

// Each row scaled by a power of two so that its largest coefficient lies in [1/2, 1).
struct FloatSystem {
  std::size_t dim = 0;
  std::vector<double> a;
  std::vector<double> b;
  bool ok = true;  // false when some row does not fit in double range

  const double* row(std::size_t j) const { return a.data() + j * dim; }
};

inline double scaled(const Int& v, long shift) {
  if (sgn(v) == 0) return 0;
  long e;
  double m = mpz_get_d_2exp(&e, v.get_mpz_t());
  return std::ldexp(m, static_cast<int>(std::clamp(e - shift, -2000L, 2000L)));
}

inline FloatSystem to_float(const IntSystem& sys) {
  FloatSystem fs;
  fs.dim = sys.dim;
  fs.a.resize(sys.a.size());
  fs.b.resize(sys.rows());
  for (std::size_t j = 0; j < sys.rows(); ++j) {
    long top = 0;
    for (std::size_t i = 0; i < sys.dim; ++i)
      top = std::max<long>(top, static_cast<long>(mpz_sizeinbase(sys.row(j)[i].get_mpz_t(), 2)));
    for (std::size_t i = 0; i < sys.dim; ++i) fs.a[j * sys.dim + i] = scaled(sys.row(j)[i], top);
    fs.b[j] = scaled(sys.b[j], top);
    if (!std::isfinite(fs.b[j]) || std::abs(fs.b[j]) > 1e300) fs.ok = false;
  }
  return fs;
}

inline double ratio_to_double(const Int& num, const Int& den) {
  if (sgn(num) == 0) return 0;
  long en, ed;
  double mn = mpz_get_d_2exp(&en, num.get_mpz_t());
  double md = mpz_get_d_2exp(&ed, den.get_mpz_t());
  return std::ldexp(mn / md, static_cast<int>(std::clamp(en - ed, -2000L, 2000L)));
}

inline double fdot(const double* x, const double* y, std::size_t d) {
  double s = 0;
  for (std::size_t i = 0; i < d; ++i) s += x[i] * y[i];
  return s;
}

struct FloatOutcome {
  enum class Kind { optimal, unbounded, positive, failed } kind = Kind::failed;
  std::vector<double> y;
  std::vector<double> ray;
  std::vector<long> basis;  // rows indices (into `rows`) per slot, -1 for unit rows
};

// Inverts the basis matrix (rows: constraint rows or unit vectors); false if singular.
inline bool invert_basis(const FloatSystem& fs, std::span<const std::uint32_t> rows, const std::vector<long>& basis,
                         std::vector<double>& inv) {
  const std::size_t d = fs.dim;
  std::vector<double> m(d * d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    if (basis[k] < 0) {
      m[k * d + k] = 1;
    } else {
      std::copy(fs.row(rows[basis[k]]), fs.row(rows[basis[k]]) + d, m.begin() + static_cast<long>(k * d));
    }
  }
  inv.assign(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) inv[i * d + i] = 1;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::abs(m[r * d + c]) > std::abs(m[p * d + c])) p = r;
    if (std::abs(m[p * d + c]) < 1e-300) return false;
    if (p != c)
      for (std::size_t j = 0; j < d; ++j) {
        std::swap(m[p * d + j], m[c * d + j]);
        std::swap(inv[p * d + j], inv[c * d + j]);
      }
    const double piv = m[c * d + c];
    for (std::size_t j = 0; j < d; ++j) {
      m[c * d + j] /= piv;
      inv[c * d + j] /= piv;
    }
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c || m[r * d + c] == 0) continue;
      const double f = m[r * d + c];
      for (std::size_t j = 0; j < d; ++j) {
        m[r * d + j] -= f * m[c * d + j];
        inv[r * d + j] -= f * inv[c * d + j];
      }
    }
  }
  // inv now holds B^{-1}: B * inv = I.
  return true;
}

// Double-precision twin of run_simplex: maximizes obj . y + obj0 from a feasible start.
// Largest-gain pricing; gives up after an iteration cap.
inline FloatOutcome float_simplex(const FloatSystem& fs, std::span<const std::uint32_t> rows,
                                  std::span<const double> obj, double obj0, std::span<const double> start,
                                  bool stop_when_positive) {
  const std::size_t d = fs.dim;
  FloatOutcome out;
  out.y.assign(start.begin(), start.end());
  out.basis.assign(d, -1);
  std::vector<double> inv(d * d, 0.0), rhs(start.begin(), start.end()), lam(d), delta(d), u(d);
  for (std::size_t i = 0; i < d; ++i) inv[i * d + i] = 1;
  std::vector<char> tight(rows.size(), 0);
  double ynorm = 1;
  for (double v : out.y) ynorm = std::max(ynorm, std::abs(v));
  const std::size_t cap = 8 * (rows.size() + d) + 64;
  for (std::size_t it = 0; it < cap; ++it) {
    if (it % 24 == 23) {
      if (!invert_basis(fs, rows, out.basis, inv)) return out;
      for (std::size_t i = 0; i < d; ++i) {
        double v = 0;
        for (std::size_t k = 0; k < d; ++k) v += inv[i * d + k] * rhs[k];
        out.y[i] = v;
      }
    }
    const double value = fdot(obj.data(), out.y.data(), d) + obj0;
    double scale = std::abs(obj0);
    for (std::size_t i = 0; i < d; ++i) scale += std::abs(obj[i] * out.y[i]);
    const double tol = 1e-9 * (scale + 1e-300);
    if (stop_when_positive && value > tol) {
      out.kind = FloatOutcome::Kind::positive;
      return out;
    }
    double objnorm = 0;
    for (std::size_t i = 0; i < d; ++i) objnorm = std::max(objnorm, std::abs(obj[i]));
    long enter = -1;
    double best = 0;
    int direction = 1;
    for (std::size_t k = 0; k < d; ++k) {
      double l = 0;
      for (std::size_t i = 0; i < d; ++i) l += obj[i] * inv[i * d + k];
      lam[k] = l;
      const double gain = out.basis[k] < 0 ? std::abs(l) : l;
      if (gain > 1e-11 * objnorm && gain > best) {
        best = gain;
        enter = static_cast<long>(k);
        direction = out.basis[k] < 0 && l < 0 ? -1 : 1;
      }
    }
    if (enter < 0) {
      out.kind = FloatOutcome::Kind::optimal;
      return out;
    }
    const std::size_t k = static_cast<std::size_t>(enter);
    for (std::size_t i = 0; i < d; ++i) delta[i] = direction * inv[i * d + k];
    double dnorm = 0;
    for (double v : delta) dnorm = std::max(dnorm, std::abs(v));
    long leave = -1;
    double step = 0, leave_g = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (tight[j]) continue;
      const double* a = fs.row(rows[j]);
      const double g = fdot(a, delta.data(), d);
      if (g >= -1e-12 * dnorm) continue;
      double sl = fdot(a, out.y.data(), d) + fs.b[rows[j]];
      if (sl < 0) sl = 0;
      const double t = sl / -g;
      if (leave < 0 || t < step || (t == step && -g > -leave_g)) {
        leave = static_cast<long>(j);
        step = t;
        leave_g = g;
      }
    }
    if (leave < 0) {
      out.kind = FloatOutcome::Kind::unbounded;
      out.ray = delta;
      return out;
    }
    for (std::size_t i = 0; i < d; ++i) out.y[i] += step * delta[i];
    ynorm = 1;
    for (double v : out.y) ynorm = std::max(ynorm, std::abs(v));
    const double* a = fs.row(rows[leave]);
    for (std::size_t j = 0; j < d; ++j) {
      double v = 0;
      for (std::size_t i = 0; i < d; ++i) v += a[i] * inv[i * d + j];
      u[j] = v;
    }
    const double uk = u[k];
    for (std::size_t j = 0; j < d; ++j) {
      if (j == k) continue;
      const double f = u[j] / uk;
      if (f == 0) continue;
      for (std::size_t i = 0; i < d; ++i) inv[i * d + j] -= inv[i * d + k] * f;
    }
    for (std::size_t i = 0; i < d; ++i) inv[i * d + k] /= uk;
    if (out.basis[k] >= 0) tight[static_cast<std::size_t>(out.basis[k])] = 0;
    out.basis[k] = leave;
    tight[static_cast<std::size_t>(leave)] = 1;
    rhs[k] = -fs.b[rows[leave]];
  }
  out.kind = FloatOutcome::Kind::failed;
  return out;
}

// Point deep inside the normalized rows: maximizes t subject to row_j - t >= 0, t <= 1.
inline std::optional<std::vector<double>> float_strict_point(const FloatSystem& fs) {
  const std::size_t d = fs.dim;
  if (!fs.ok) return std::nullopt;
  FloatSystem aux;
  aux.dim = d + 1;
  double t0 = 1;
  for (std::size_t j = 0; j < fs.b.size(); ++j) {
    aux.a.insert(aux.a.end(), fs.row(j), fs.row(j) + d);
    aux.a.push_back(-1);
    aux.b.push_back(fs.b[j]);
    t0 = std::min(t0, fs.b[j]);
  }
  aux.a.insert(aux.a.end(), d, 0.0);
  aux.a.push_back(-1);
  aux.b.push_back(1);
  std::vector<double> obj(d + 1, 0.0), start(d + 1, 0.0);
  obj[d] = 1;
  start[d] = t0;
  std::vector<std::uint32_t> rows(aux.b.size());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<std::uint32_t>(i);
  auto fo = float_simplex(aux, rows, obj, 0, start, false);
  if (fo.kind != FloatOutcome::Kind::optimal || !(fo.y[d] > 0)) return std::nullopt;
  fo.y.pop_back();
  return fo.y;
}

// Exact check that c_u is implied by the listed rows: a_u = sum lambda_i a_i with
// lambda >= 0 and b_u >= sum lambda_i b_i. Fraction-free elimination on the columns a_i.
inline bool implied_by(const IntSystem& sys, std::size_t u, std::span<const std::uint32_t> basis_rows) {
  const std::size_t d = sys.dim, p = basis_rows.size();
  if (p == 0 || p > d) return false;
  // Column-major augmented matrix: d rows, p + 1 columns.
  std::vector<Int> m(d * (p + 1));
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = 0; c < p; ++c) m[r * (p + 1) + c] = sys.row(basis_rows[c])[r];
    m[r * (p + 1) + p] = sys.row(u)[r];
  }
  auto at = [&](std::size_t r, std::size_t c) -> Int& { return m[r * (p + 1) + c]; };
  Int prev = 1;
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    while (piv < d && sgn(at(piv, c)) == 0) ++piv;
    if (piv == d) return false;
    if (piv != c)
      for (std::size_t j = 0; j <= p; ++j) std::swap(at(piv, j), at(c, j));
    for (std::size_t r = c + 1; r < d; ++r) {
      for (std::size_t j = c + 1; j <= p; ++j) {
        Int& cell = at(r, j);
        mpz_mul(cell.get_mpz_t(), cell.get_mpz_t(), at(c, c).get_mpz_t());
        mpz_submul(cell.get_mpz_t(), at(r, c).get_mpz_t(), at(c, j).get_mpz_t());
        mpz_divexact(cell.get_mpz_t(), cell.get_mpz_t(), prev.get_mpz_t());
      }
      at(r, c) = 0;
    }
    prev = at(c, c);
  }
  for (std::size_t r = p; r < d; ++r)
    if (sgn(at(r, p)) != 0) return false;
  // Back substitution: X_i = lambda_i * D with D = prev.
  const Int& den = prev;
  const int dsign = sgn(den);
  std::vector<Int> x(p);
  Int acc;
  for (std::size_t i = p; i-- > 0;) {
    acc = den * at(i, p);
    for (std::size_t j = i + 1; j < p; ++j) mpz_submul(acc.get_mpz_t(), at(i, j).get_mpz_t(), x[j].get_mpz_t());
    mpz_divexact(x[i].get_mpz_t(), acc.get_mpz_t(), at(i, i).get_mpz_t());
    if (sgn(x[i]) * dsign < 0) return false;
  }
  acc = den * sys.b[u];
  for (std::size_t i = 0; i < p; ++i) mpz_submul(acc.get_mpz_t(), x[i].get_mpz_t(), sys.b[basis_rows[i]].get_mpz_t());
  return sgn(acc) * dsign >= 0;
}

// Exact integer point P / Q from doubles (each double is a dyadic rational).
inline std::pair<std::vector<Int>, Int> dyadic_point(std::span<const double> y) {
  std::vector<Rat> r(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) r[i] = Rat(y[i]);
  return integer_point(r);
}

}  // namespace detail

inline LpResult maximize(const AffineForm& objective, std::span<const LinConstraint> constraints) {
  const std::size_t d = objective.dim();
  LpResult result;
  detail::IntSystem sys;
  if (!detail::build_system(constraints, d, sys)) return result;
  auto start = detail::feasible_point(sys);
  if (!start) return result;
  auto [obj, obj0] = detail::integer_row(objective);
  auto rows = detail::all_rows(sys.rows());
  auto res = detail::run_simplex(sys, rows, obj, obj0, start->first, start->second, false);
  result.witness = detail::rational_point(res.num, res.den);
  if (res.kind == detail::SimplexOutcome::Kind::unbounded) {
    result.status = LpStatus::unbounded;
    result.ray.resize(d);
    for (std::size_t i = 0; i < d; ++i) result.ray[i] = res.ray[i];
    return result;
  }
  result.status = LpStatus::optimal;
  result.value = objective.evaluate(result.witness);
  return result;
}

// True iff dropping c leaves the feasible region unchanged, i.e. -c cannot be made
// positive over the others. An infeasible `others` makes every c redundant.
inline bool is_redundant(const LinConstraint& c, std::span<const LinConstraint> others) {
  LpResult r = maximize(-c, others);
  if (r.status == LpStatus::infeasible) return true;
  if (r.status == LpStatus::unbounded) return false;
  return r.value <= 0;
}

// f takes both strictly positive and strictly negative values on the closed region.
inline bool crosses(const AffineForm& f, std::span<const LinConstraint> constraints) {
  LpResult hi = maximize(f, constraints);
  if (hi.status == LpStatus::infeasible) return false;
  if (hi.status == LpStatus::optimal && hi.value <= 0) return false;
  LpResult lo = maximize(-f, constraints);
  return lo.status == LpStatus::unbounded || lo.value > 0;
}

// A point strictly inside every nonconstant constraint, if the region has interior.
inline std::optional<std::vector<Rat>> interior_point(std::span<const LinConstraint> constraints, std::size_t dim) {
  detail::IntSystem sys;
  for (const auto& c : constraints)
    if (c.is_constant() && c.constant() < 0) return std::nullopt;
  detail::build_system(constraints, dim, sys);
  auto p = detail::strict_point(sys);
  if (!p) return std::nullopt;
  return detail::rational_point(p->first, p->second);
}

struct PruneStats {
  std::size_t lps = 0;        // exact simplex runs
  std::size_t pivots = 0;
  std::size_t ties = 0;
  std::size_t certified = 0;  // tests settled by a checked floating-point answer
};

// crosses() for many forms over one region with interior; nullopt when the region has
// none. A form vanishing at an interior point z crosses. Otherwise, with g the form
// oriented positive at z, it crosses iff g < 0 somewhere in the region: a floating-point
// run proposes either such a point or a nonnegative combination of rows implying g >= 0,
// either is checked exactly, and the exact simplex decides when the check fails.
inline std::optional<std::vector<char>> crossing_flags(std::span<const AffineForm> forms,
                                                       std::span<const LinConstraint> constraints, std::size_t dim,
                                                       PruneStats* stats = nullptr) {
  detail::IntSystem sys;
  if (!detail::build_system(constraints, dim, sys)) return std::nullopt;
  const std::size_t m = sys.rows();
  detail::FloatSystem fs = detail::to_float(sys);
  auto strictly_inside = [&](const std::vector<Int>& num, const Int& den) {
    Int v;
    for (std::size_t j = 0; j < m; ++j) {
      detail::dot(v, sys.row(j), num.data(), dim);
      v += sys.b[j] * den;
      if (sgn(v) <= 0) return false;
    }
    return true;
  };
  std::optional<std::pair<std::vector<Int>, Int>> zp;
  if (auto zf = detail::float_strict_point(fs)) {
    zp = detail::dyadic_point(*zf);
    if (!strictly_inside(zp->first, zp->second)) zp.reset();
  }
  if (!zp) zp = detail::strict_point(sys);
  if (!zp) return std::nullopt;
  const auto& [z, ze] = *zp;
  std::vector<double> zd(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    zd[i] = detail::ratio_to_double(z[i], ze);
    if (!std::isfinite(zd[i])) fs.ok = false;
  }
  const auto rows = detail::all_rows(m);
  std::vector<char> out;
  std::vector<Int> obj(dim);
  std::vector<double> objd(dim), wd(dim);
  Int val;
  for (const auto& f : forms) {
    if (f.dim() != dim) throw DimensionError("crossing_flags: form dimension mismatch");
    if (f.is_constant()) {
      out.push_back(0);
      continue;
    }
    auto [ga, gb] = detail::integer_row(f);
    detail::dot(val, ga.data(), z.data(), dim);
    val += gb * ze;
    const int s = sgn(val);
    if (s == 0) {
      out.push_back(1);
      continue;
    }
    if (s < 0) {
      for (auto& c : ga) c = -c;
      gb = -gb;
    }
    // Row m holds g while this form is tested.
    sys.push(ga.data(), gb);
    detail::IntSystem one;
    one.dim = dim;
    one.push(ga.data(), gb);
    const detail::FloatSystem gf = detail::to_float(one);
    int verdict = -1;
    if (fs.ok && gf.ok) {
      for (std::size_t i = 0; i < dim; ++i) objd[i] = -gf.a[i];
      auto fo = detail::float_simplex(fs, rows, objd, -gf.b[0], zd, true);
      using K = detail::FloatOutcome::Kind;
      if (fo.kind == K::optimal) {
        std::vector<std::uint32_t> basis_rows;
        for (long b : fo.basis)
          if (b >= 0) basis_rows.push_back(rows[static_cast<std::size_t>(b)]);
        if (detail::implied_by(sys, m, basis_rows)) verdict = 0;
      } else if (fo.kind != K::failed) {
        const double gz = detail::fdot(gf.a.data(), zd.data(), dim) + gf.b[0];
        std::vector<double> v = fo.y;
        bool usable = true;
        if (fo.kind == K::unbounded) {
          const double slope = detail::fdot(gf.a.data(), fo.ray.data(), dim);
          usable = slope < 0;
          const double t = 2 * gz / -slope;
          for (std::size_t i = 0; i < dim && usable; ++i) v[i] = zd[i] + t * fo.ray[i];
        }
        const double gv = detail::fdot(gf.a.data(), v.data(), dim) + gf.b[0];
        if (usable && gz > 0 && gv < 0) {
          const double t = (1 + gz / (gz - gv)) / 2;
          for (std::size_t i = 0; i < dim; ++i) wd[i] = zd[i] + t * (v[i] - zd[i]);
          auto [wn, wden] = detail::dyadic_point(wd);
          detail::dot(val, ga.data(), wn.data(), dim);
          val += gb * wden;
          bool inside = sgn(val) < 0;
          for (std::size_t j = 0; j < m && inside; ++j) {
            detail::dot(val, sys.row(j), wn.data(), dim);
            val += sys.b[j] * wden;
            inside = sgn(val) >= 0;
          }
          if (inside) verdict = 1;
        }
      }
      if (verdict >= 0 && stats) ++stats->certified;
    }
    if (verdict < 0) {
      for (std::size_t i = 0; i < dim; ++i) obj[i] = -ga[i];
      auto res = detail::run_simplex(sys, rows, obj, Int(-gb), z, ze, true);
      if (stats) {
        ++stats->lps;
        stats->pivots += res.pivots;
      }
      verdict = res.kind == detail::SimplexOutcome::Kind::optimal ? 0 : 1;
    }
    sys.a.resize(m * dim);
    sys.b.resize(m);
    out.push_back(static_cast<char>(verdict));
  }
  return out;
}

// Indices (ascending) of a minimal subset of `constraints` describing the same region:
// one representative per facet. Constant and duplicate rows are never kept. The region
// must have nonempty interior (DegenerateRegionError otherwise).
//
// Incremental: a known-facet set S grows while candidates are tested against S alone.
// A candidate beaten by S is redundant. Otherwise the LP yields a point w of S's region
// violating it; shooting from an interior point z towards w, the first constraint hit is
// a facet and joins S. Simultaneous hits fall back to a full test of each hit constraint.
inline std::vector<std::size_t> irredundant_subset(std::span<const LinConstraint> constraints, std::size_t dim,
                                                   PruneStats* stats = nullptr) {
  detail::IntSystem sys;
  sys.dim = dim;
  std::vector<std::size_t> origin;
  std::map<std::vector<Int>, std::size_t> seen;
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    const auto& c = constraints[i];
    if (c.dim() != dim) throw DimensionError("irredundant_subset: constraint dimension mismatch");
    if (c.is_constant()) {
      if (c.constant() < 0) throw DegenerateRegionError("irredundant_subset: infeasible constant constraint");
      continue;
    }
    auto [a, b] = detail::integer_row(c);
    std::vector<Int> key = a;
    key.push_back(b);
    if (!seen.emplace(std::move(key), origin.size()).second) continue;
    sys.push(a.data(), b);
    origin.push_back(i);
  }
  const std::size_t m = sys.rows();
  if (m == 0) return {};
  detail::FloatSystem fs = detail::to_float(sys);
  std::optional<std::pair<std::vector<Int>, Int>> zp;
  if (auto zf = detail::float_strict_point(fs)) {
    zp = detail::dyadic_point(*zf);
    Int v;
    for (std::size_t j = 0; j < m && zp; ++j) {
      detail::dot(v, sys.row(j), zp->first.data(), dim);
      v += sys.b[j] * zp->second;
      if (sgn(v) <= 0) zp.reset();
    }
    if (zp && stats) ++stats->certified;
  }
  if (!zp) {
    zp = detail::strict_point(sys);
    if (stats) ++stats->lps;
  }
  if (!zp) throw DegenerateRegionError("irredundant_subset: region has empty interior");
  const std::vector<Int>& z = zp->first;
  const Int& ze = zp->second;

  std::vector<Int> zval(m);  // c_j(z) * ze, all positive
  for (std::size_t j = 0; j < m; ++j) {
    detail::dot(zval[j], sys.row(j), z.data(), dim);
    zval[j] += sys.b[j] * ze;
  }

  std::vector<std::uint32_t> facets;
  std::vector<char> is_facet(m, 0);
  std::vector<Int> obj(dim), w(dim);
  Int obj0, wq, val, lhs, rhs, best_num, best_den, num, den, step;
  auto add_facet = [&](std::size_t j) {
    is_facet[j] = 1;
    facets.insert(std::upper_bound(facets.begin(), facets.end(), static_cast<std::uint32_t>(j)),
                  static_cast<std::uint32_t>(j));
  };
  // Full test of row j against every other row, from z.
  auto redundant_against_all = [&](std::size_t j) {
    std::vector<std::uint32_t> others;
    for (std::size_t i = 0; i < m; ++i)
      if (i != j) others.push_back(static_cast<std::uint32_t>(i));
    std::vector<Int> o(dim);
    for (std::size_t i = 0; i < dim; ++i) o[i] = -sys.row(j)[i];
    auto res = detail::run_simplex(sys, others, o, Int(-sys.b[j]), z, ze, true);
    if (stats) {
      ++stats->lps;
      stats->pivots += res.pivots;
    }
    return res.kind == detail::SimplexOutcome::Kind::optimal;
  };

  std::vector<double> zd(dim), objd(dim), wd(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    zd[i] = detail::ratio_to_double(z[i], ze);
    if (!std::isfinite(zd[i])) fs.ok = false;
  }

  // Floating-point attempt at the test of row u against the facets. Returns 1 when u is
  // certified redundant, 0 when a violating point was certified (left in w, wq), -1 when
  // the exact simplex has to decide.
  auto guided_test = [&](std::size_t u) -> int {
    if (!fs.ok) return -1;
    const double* au = fs.row(u);
    for (std::size_t i = 0; i < dim; ++i) objd[i] = -au[i];
    auto fo = detail::float_simplex(fs, facets, objd, -fs.b[u], zd, true);
    using K = detail::FloatOutcome::Kind;
    if (fo.kind == K::failed) return -1;
    if (fo.kind == K::optimal) {
      std::vector<std::uint32_t> basis_rows;
      for (long b : fo.basis)
        if (b >= 0) basis_rows.push_back(facets[static_cast<std::size_t>(b)]);
      return detail::implied_by(sys, u, basis_rows) ? 1 : -1;
    }
    const double cz = detail::fdot(au, zd.data(), dim) + fs.b[u];
    std::vector<double> v = fo.y;
    if (fo.kind == K::unbounded) {
      const double slope = detail::fdot(au, fo.ray.data(), dim);
      if (!(slope < 0)) return -1;
      const double t = 2 * cz / -slope;
      for (std::size_t i = 0; i < dim; ++i) v[i] = zd[i] + t * fo.ray[i];
    }
    const double cv = detail::fdot(au, v.data(), dim) + fs.b[u];
    if (!(cz > 0) || !(cv < 0)) return -1;
    const double t = (1 + cz / (cz - cv)) / 2;
    for (std::size_t i = 0; i < dim; ++i) wd[i] = zd[i] + t * (v[i] - zd[i]);
    auto [wn, wden] = detail::dyadic_point(wd);
    detail::dot(val, sys.row(u), wn.data(), dim);
    val += sys.b[u] * wden;
    if (sgn(val) >= 0) return -1;
    for (std::uint32_t j : facets) {
      detail::dot(val, sys.row(j), wn.data(), dim);
      val += sys.b[j] * wden;
      if (sgn(val) < 0) return -1;
    }
    w = std::move(wn);
    wq = std::move(wden);
    return 0;
  };

  // Same contract as guided_test, decided by the exact simplex.
  auto exact_test = [&](std::size_t u) -> int {
    const Int* au = sys.row(u);
    for (std::size_t i = 0; i < dim; ++i) obj[i] = -au[i];
    obj0 = -sys.b[u];
    auto res = detail::run_simplex(sys, facets, obj, obj0, z, ze, true);
    if (stats) {
      ++stats->lps;
      stats->pivots += res.pivots;
    }
    if (res.kind == detail::SimplexOutcome::Kind::optimal) return 1;
    wq = res.den;
    w = res.num;
    if (res.kind == detail::SimplexOutcome::Kind::unbounded) {
      // Walk along the ray until c_u turns negative.
      detail::dot(val, au, w.data(), dim);
      val += sys.b[u] * wq;
      Int g;
      detail::dot(g, au, res.ray.data(), dim);  // negative
      step = 1;
      if (sgn(val) > 0) {
        Int denom = -g * wq;
        mpz_fdiv_q(step.get_mpz_t(), val.get_mpz_t(), denom.get_mpz_t());
        step += 1;
      }
      for (std::size_t i = 0; i < dim; ++i) w[i] += step * wq * res.ray[i];
    }
    return 0;
  };

  for (std::size_t u = 0; u < m; ++u) {
    while (!is_facet[u]) {
      int verdict = guided_test(u);
      if (verdict >= 0 && stats) ++stats->certified;
      if (verdict < 0) verdict = exact_test(u);
      if (verdict == 1) break;  // redundant
      // First constraint hit on the segment z -> w: minimal zval_j * wq / (zval_j * wq - c_j(w) * ze).
      std::vector<std::size_t> hits;
      for (std::size_t j = 0; j < m; ++j) {
        if (is_facet[j]) continue;
        detail::dot(val, sys.row(j), w.data(), dim);
        val += sys.b[j] * wq;
        if (sgn(val) >= 0) continue;
        num = zval[j] * wq;
        den = num - val * ze;
        if (!hits.empty()) {
          lhs = num * best_den;
          rhs = best_num * den;
          if (lhs > rhs) continue;
          if (lhs < rhs) hits.clear();
        }
        if (hits.empty()) {
          best_num = num;
          best_den = den;
        }
        hits.push_back(j);
      }
      if (hits.empty()) throw Error("irredundant_subset: ray shooting found no boundary");
      if (hits.size() == 1) {
        add_facet(hits.front());
        continue;
      }
      if (stats) ++stats->ties;
      bool added = false;
      for (std::size_t j : hits)
        if (!redundant_against_all(j)) {
          add_facet(j);
          added = true;
        }
      if (!added) throw Error("irredundant_subset: no facet among simultaneous hits");
      if (!is_facet[u] && std::find(hits.begin(), hits.end(), u) != hits.end()) break;  // u tested in full
    }
  }
  std::vector<std::size_t> kept;
  for (std::uint32_t j : facets) kept.push_back(origin[j]);
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace ldt
