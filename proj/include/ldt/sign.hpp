#pragma once

#include <cstdint>
#include <ostream>

#include "rational.hpp"

namespace ldt {

enum class Sign : std::int8_t { negative = -1, zero = 0, positive = 1 };

inline Sign sign_from_int(int v) { return v < 0 ? Sign::negative : (v > 0 ? Sign::positive : Sign::zero); }
inline Sign sign_of_value(const Rat& v) { return sign_from_int(sgn(v)); }
inline Sign sign_of_value(const Int& v) { return sign_from_int(sgn(v)); }

inline int to_int(Sign s) { return static_cast<int>(s); }
inline Sign operator*(Sign a, Sign b) { return sign_from_int(to_int(a) * to_int(b)); }
inline Sign operator-(Sign a) { return sign_from_int(-to_int(a)); }

inline char to_char(Sign s) {
  switch (s) {
    case Sign::negative: return '-';
    case Sign::zero: return '0';
    case Sign::positive: return '+';
  }
  return '?';
}

inline std::ostream& operator<<(std::ostream& os, Sign s) { return os << to_char(s); }

}  // namespace ldt
