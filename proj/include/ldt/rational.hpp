#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ldt {

using Rat = mpq_class;
using Int = mpz_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace detail

// Accepts "p/q" or "p" with an optional leading '-' (the UTF-8 minus sign U+2212 is
// accepted too). Returns nullopt on anything else, including a zero denominator.
inline std::optional<Rat> parse_rational(std::string_view token) {
  bool negative = false;
  if (!token.empty() && (token.front() == '-' || token.front() == '+')) {
    negative = token.front() == '-';
    token.remove_prefix(1);
  } else if (token.starts_with("\xE2\x88\x92")) {
    negative = true;
    token.remove_prefix(3);
  }
  auto slash = token.find('/');
  std::string_view num = token.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view{} : token.substr(slash + 1);
  if (!detail::all_digits(num)) return std::nullopt;
  if (slash != std::string_view::npos && !detail::all_digits(den)) return std::nullopt;
  Rat r;
  r.get_num() = Int(std::string(num), 10);
  r.get_den() = slash == std::string_view::npos ? Int(1) : Int(std::string(den), 10);
  if (r.get_den() == 0) return std::nullopt;
  r.canonicalize();
  if (negative) r = -r;
  return r;
}

// n/d in canonical form; d != 0.
inline Rat make_rat(const Int& n, const Int& d) {
  Rat r(n, d);
  r.canonicalize();
  return r;
}

inline std::string to_string(const Rat& r) { return r.get_str(); }

inline int sgn(const Rat& r) { return ::sgn(r); }
inline int sgn(const Int& z) { return ::sgn(z); }

}  // namespace ldt
