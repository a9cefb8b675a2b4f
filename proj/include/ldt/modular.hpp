#pragma once

#include <cstdint>
#include <vector>

#include "rational.hpp"

namespace ldt::detail {

// Pairwise coprime moduli just above 2^61, generated on demand. An integer of absolute
// value below the product of the first K moduli is zero iff it vanishes modulo each.
inline const std::vector<std::uint64_t>& coprime_moduli(std::size_t count) {
  static std::vector<std::uint64_t> mods;
  static Int product = 1;
  static Int candidate = Int(1) << 61;
  while (mods.size() < count) {
    mpz_nextprime(candidate.get_mpz_t(), candidate.get_mpz_t());
    Int g;
    mpz_gcd(g.get_mpz_t(), product.get_mpz_t(), candidate.get_mpz_t());
    if (g != 1) continue;
    mods.push_back(mpz_get_ui(candidate.get_mpz_t()));
    product *= candidate;
  }
  return mods;
}

// Montgomery arithmetic modulo an odd m < 2^62, with R = 2^64. Zero is zero in both
// representations, which is all the zero tests need.
struct Montgomery {
  std::uint64_t m = 0;
  std::uint64_t neg_inv = 0;  // -m^{-1} mod 2^64
  std::uint64_t r2 = 0;       // R^2 mod m

  explicit Montgomery(std::uint64_t mod) : m(mod) {
    std::uint64_t inv = mod;  // Newton iteration for m^{-1} mod 2^64
    for (int i = 0; i < 6; ++i) inv *= 2 - mod * inv;
    neg_inv = ~inv + 1;
    const unsigned __int128 r = (static_cast<unsigned __int128>(1) << 64) % mod;
    r2 = static_cast<std::uint64_t>(r * r % mod);
  }

  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    const unsigned __int128 t = static_cast<unsigned __int128>(a) * b;
    const std::uint64_t u = static_cast<std::uint64_t>(t) * neg_inv;
    const std::uint64_t r = static_cast<std::uint64_t>((t + static_cast<unsigned __int128>(u) * m) >> 64);
    return r >= m ? r - m : r;
  }
  std::uint64_t to(std::uint64_t x) const { return mul(x, r2); }
  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    const std::uint64_t r = a + b;
    return r >= m ? r - m : r;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + (m - b); }
};

inline std::uint64_t residue(const Int& v, std::uint64_t m) {
  return mpz_fdiv_ui(v.get_mpz_t(), m);  // in [0, m)
}

}  // namespace ldt::detail
