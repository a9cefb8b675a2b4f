#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "affine_form.hpp"
#include "rng.hpp"

namespace ldt {

// 1-based coordinate indices i_1 < ... < i_k.
struct HyperplaneId {
  std::vector<std::uint32_t> idx;

  friend auto operator<=>(const HyperplaneId&, const HyperplaneId&) = default;
  friend bool operator==(const HyperplaneId&, const HyperplaneId&) = default;

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < idx.size(); ++i) s += (i ? "," : "") + std::to_string(idx[i]);
    return s + ")";
  }
};

// The public part of an instance: which hyperplanes are asked about.
// Hyperplane id: a_0 + a_1 x_{i_1} + ... + a_k x_{i_k} = 0.
struct LdtFamily {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<Rat> a;  // a_0 .. a_k

  bool is_ksum() const {
    if (a.size() != k + 1 || a[0] != 0) return false;
    for (std::size_t j = 1; j <= k; ++j)
      if (a[j] != 1) return false;
    return true;
  }
  friend bool operator==(const LdtFamily&, const LdtFamily&) = default;
};

struct LdtInstance {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<Rat> a;
  std::vector<Rat> x;

  LdtFamily family() const { return {n, k, a}; }
  friend bool operator==(const LdtInstance&, const LdtInstance&) = default;
};

inline void validate(const LdtFamily& f) {
  if (f.k < 2 || f.k > f.n)
    throw Error("instance: need 2 <= k <= n, got n = " + std::to_string(f.n) + ", k = " + std::to_string(f.k));
  if (f.a.size() != f.k + 1) throw Error("instance: expected " + std::to_string(f.k + 1) + " coefficients a_0..a_k");
  bool any = false;
  for (std::size_t j = 1; j <= f.k; ++j) any = any || f.a[j] != 0;
  if (!any) throw Error("instance: a_1..a_k all zero");
}

inline void validate(const LdtInstance& inst) {
  validate(inst.family());
  if (inst.x.size() != inst.n)
    throw Error("instance: expected " + std::to_string(inst.n) + " input values, got " + std::to_string(inst.x.size()));
}

inline LdtInstance make_ksum(std::vector<Rat> x, std::size_t k) {
  LdtInstance inst;
  inst.n = x.size();
  inst.k = k;
  inst.a.assign(k + 1, Rat(1));
  inst.a[0] = 0;
  inst.x = std::move(x);
  validate(inst);
  return inst;
}

inline LdtInstance make_ldt(std::vector<Rat> a, std::vector<Rat> x) {
  LdtInstance inst;
  inst.n = x.size();
  inst.k = a.empty() ? 0 : a.size() - 1;
  inst.a = std::move(a);
  inst.x = std::move(x);
  validate(inst);
  return inst;
}

inline AffineForm hyperplane_form(const LdtFamily& f, const HyperplaneId& id) {
  if (id.idx.size() != f.k) throw Error("hyperplane_form: id has wrong arity");
  AffineForm h(f.a[0], std::vector<Rat>(f.n));
  for (std::size_t j = 0; j < f.k; ++j) {
    std::uint32_t i = id.idx[j];
    if (i < 1 || i > f.n || (j > 0 && id.idx[j - 1] >= i)) throw Error("hyperplane_form: invalid id " + id.to_string());
    h.coeffs()[i - 1] = f.a[j + 1];
  }
  return h;
}

// All k-subsets of {1..n} in lexicographic order.
inline std::vector<HyperplaneId> enumerate_ids(std::size_t n, std::size_t k) {
  std::vector<HyperplaneId> ids;
  if (k == 0 || k > n) return ids;
  std::vector<std::uint32_t> c(k);
  for (std::size_t j = 0; j < k; ++j) c[j] = static_cast<std::uint32_t>(j + 1);
  for (;;) {
    ids.push_back({c});
    std::size_t j = k;
    while (j > 0 && c[j - 1] == n - k + j) --j;
    if (j == 0) break;
    ++c[j - 1];
    for (std::size_t l = j; l < k; ++l) c[l] = c[l - 1] + 1;
  }
  return ids;
}

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::size_t j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// YES with the lexicographically first witness, NO otherwise.
struct Decision {
  std::optional<HyperplaneId> witness;

  bool yes() const { return witness.has_value(); }
  std::string to_string() const { return yes() ? "YES " + witness->to_string() : "NO"; }
  friend bool operator==(const Decision&, const Decision&) = default;
};

inline Decision brute_decide(const LdtInstance& inst) {
  validate(inst);
  for (const auto& id : enumerate_ids(inst.n, inst.k))
    if (hyperplane_form(inst.family(), id).evaluate(inst.x) == 0) return {id};
  return {};
}

namespace detail {

struct Token {
  std::string_view text;
  std::size_t line;
  std::size_t column;
};

// Non-empty lines (comments start with '#') split on whitespace.
inline std::vector<std::vector<Token>> tokenize(std::string_view text) {
  std::vector<std::vector<Token>> lines;
  std::size_t line = 1, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = text.substr(pos, end - pos);
    if (auto hash = l.find('#'); hash != std::string_view::npos) l = l.substr(0, hash);
    std::vector<Token> toks;
    std::size_t i = 0;
    while (i < l.size()) {
      while (i < l.size() && (l[i] == ' ' || l[i] == '\t' || l[i] == '\r')) ++i;
      std::size_t start = i;
      while (i < l.size() && l[i] != ' ' && l[i] != '\t' && l[i] != '\r') ++i;
      if (i > start) toks.push_back({l.substr(start, i - start), line, start + 1});
    }
    if (!toks.empty()) lines.push_back(std::move(toks));
    if (end == text.size()) break;
    pos = end + 1;
    ++line;
  }
  return lines;
}

inline Rat rational_token(const Token& t) {
  auto r = parse_rational(t.text);
  if (!r) throw ParseError(t.line, t.column, "expected a rational p/q or p, got '" + std::string(t.text) + "'");
  return *r;
}

inline std::size_t count_token(const Token& t, const char* what) {
  if (!all_digits(t.text) || t.text.size() > 9)
    throw ParseError(t.line, t.column, std::string("expected ") + what + ", got '" + std::string(t.text) + "'");
  return std::stoul(std::string(t.text));
}

inline std::vector<Rat> rational_line(const std::vector<Token>& toks, std::size_t expected, const char* what) {
  if (toks.size() != expected) {
    const Token& at = toks.size() > expected ? toks[expected] : toks.back();
    std::size_t col = toks.size() > expected ? at.column : at.column + at.text.size();
    throw ParseError(at.line, col,
                     std::string("expected ") + std::to_string(expected) + " " + what + ", got " + std::to_string(toks.size()));
  }
  std::vector<Rat> v;
  for (const auto& t : toks) v.push_back(rational_token(t));
  return v;
}

}  // namespace detail

// Format:
//   ksum n k            or   ldt n k
//   x_1 ... x_n              a_0 ... a_k
//                            x_1 ... x_n
inline LdtInstance parse_instance(std::string_view text) {
  auto lines = detail::tokenize(text);
  if (lines.empty()) throw ParseError(1, 1, "empty input");
  const auto& head = lines[0];
  const auto& kind = head[0];
  if (kind.text != "ksum" && kind.text != "ldt")
    throw ParseError(kind.line, kind.column, "expected 'ksum' or 'ldt', got '" + std::string(kind.text) + "'");
  if (head.size() != 3) {
    const auto& at = head.size() > 3 ? head[3] : head.back();
    throw ParseError(at.line, head.size() > 3 ? at.column : at.column + at.text.size(), "header must be '<kind> n k'");
  }
  std::size_t n = detail::count_token(head[1], "n");
  std::size_t k = detail::count_token(head[2], "k");
  if (k < 2 || k > n) throw ParseError(head[2].line, head[2].column, "need 2 <= k <= n");
  const bool ldt = kind.text == "ldt";
  const std::size_t expected_lines = ldt ? 3 : 2;
  if (lines.size() < expected_lines) {
    const auto& last = lines.back().back();
    throw ParseError(last.line + 1, 1, ldt ? "missing coefficient or input line" : "missing input line");
  }
  if (lines.size() > expected_lines) {
    const auto& extra = lines[expected_lines].front();
    throw ParseError(extra.line, extra.column, "unexpected trailing data");
  }
  LdtInstance inst;
  inst.n = n;
  inst.k = k;
  if (ldt) {
    inst.a = detail::rational_line(lines[1], k + 1, "coefficients");
    bool any = false;
    for (std::size_t j = 1; j <= k; ++j) any = any || inst.a[j] != 0;
    if (!any) throw ParseError(lines[1][1].line, lines[1][1].column, "a_1..a_k all zero");
  } else {
    inst.a.assign(k + 1, Rat(1));
    inst.a[0] = 0;
  }
  inst.x = detail::rational_line(lines[ldt ? 2 : 1], n, "input values");
  return inst;
}

inline std::string serialize_instance(const LdtInstance& inst) {
  std::ostringstream os;
  const bool ksum = inst.family().is_ksum();
  os << (ksum ? "ksum " : "ldt ") << inst.n << ' ' << inst.k << '\n';
  auto line = [&](const std::vector<Rat>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i].get_str();
    os << '\n';
  };
  if (!ksum) line(inst.a);
  line(inst.x);
  return os.str();
}

// Random rationals num/den with |num| <= num_range, 1 <= den <= den_range. When `planted`,
// one random hyperplane is made to pass through x by solving for its last coordinate.
inline LdtInstance random_instance(const LdtFamily& family, Rng& rng, bool planted, long num_range = 1000000,
                                   long den_range = 1000) {
  validate(family);
  LdtInstance inst{family.n, family.k, family.a, std::vector<Rat>(family.n)};
  for (auto& v : inst.x) v = make_rat(rng.between(-num_range, num_range), rng.between(1, den_range));
  if (planted) {
    std::vector<std::uint32_t> all(family.n);
    for (std::size_t i = 0; i < family.n; ++i) all[i] = static_cast<std::uint32_t>(i + 1);
    rng.partial_shuffle(all, family.k);
    std::vector<std::uint32_t> pick(all.begin(), all.begin() + static_cast<long>(family.k));
    std::sort(pick.begin(), pick.end());
    // Solve for a coordinate with nonzero coefficient.
    std::size_t solve = family.k;
    while (family.a[solve] == 0) --solve;
    Rat rest = family.a[0];
    for (std::size_t j = 1; j <= family.k; ++j)
      if (j != solve) rest += family.a[j] * inst.x[pick[j - 1] - 1];
    inst.x[pick[solve - 1] - 1] = -rest / family.a[solve];
  }
  return inst;
}

}  // namespace ldt
