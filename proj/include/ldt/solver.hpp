#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "instance.hpp"
#include "oracle.hpp"
#include "prism.hpp"
#include "transform.hpp"

namespace ldt {

enum class ConflictMethod { elimination, simplex };

struct LocateEvent {
  std::size_t restart;
  std::size_t round;
  std::size_t attempt;
  std::span<const SampleForm> sample;
  const LocateResult& result;
  const TransformMatrix& transform;  // original to working coordinates
};

struct SolverConfig {
  Rat epsilon{1, 2};
  Rat sample_const{1};
  std::size_t direct_threshold = 64;
  std::size_t max_resamples = 20;
  std::uint64_t seed = 0;
  std::size_t max_restarts = 16;
  ConflictMethod conflicts = ConflictMethod::elimination;
  bool memoize = false;
  bool prefilter = true;
  std::function<void(const LocateEvent&)> on_locate;
};

struct RoundReport {
  std::size_t restart = 0;
  std::size_t round = 0;
  std::size_t conflict_before = 0;
  std::size_t sample_size = 0;
  std::size_t attempts = 0;             // locate calls; attempts - 1 resamples
  std::size_t conflict_after = 0;
  std::size_t queries = 0;
  std::size_t max_locate_queries = 0;
  bool first_sample_ok = false;
  bool flagged = false;                 // no sample met the epsilon target
  bool degenerate = false;              // the kept prism saw a zero answer below the top level
  double seconds = 0;
};

struct SolveResult {
  Decision decision;
  std::vector<RoundReport> rounds;      // rounds of the final restart
  std::size_t direct_tests = 0;
  std::size_t restarts = 0;
  std::vector<std::string> restart_reasons;
  std::size_t restart_queries = 0;      // spent in abandoned attempts
  std::size_t queries = 0;
  std::size_t distinct_queries = 0;
  std::optional<Prism> final_prism;
  Transcript transcript;
  double seconds = 0;

  std::size_t resamples() const {
    std::size_t s = 0;
    for (const auto& r : rounds) s += r.attempts - 1;
    return s;
  }
  std::size_t flagged_rounds() const {
    std::size_t s = 0;
    for (const auto& r : rounds) s += (r.flagged || r.degenerate) ? 1 : 0;
    return s;
  }
};

// ceil(c * (2n / eps) * ln(2n / eps)). The logarithm is taken in floating point; it only
// sizes the sample.
inline std::size_t sample_size(std::size_t n, const SolverConfig& cfg) {
  double ratio = 2.0 * static_cast<double>(n) / cfg.epsilon.get_d();
  return static_cast<std::size_t>(std::ceil(cfg.sample_const.get_d() * ratio * std::log(ratio)));
}

class SolverError : public Error {
 public:
  using Error::Error;
};

// Forms of the family in the working coordinates of one transform, built on demand.
class WorkingForms {
 public:
  WorkingForms(const LdtFamily& family, std::vector<HyperplaneId> ids, const TransformMatrix& t)
      : family_(family), ids_(std::move(ids)), t_(t), cache_(ids_.size()) {}

  std::size_t size() const { return ids_.size(); }
  const HyperplaneId& id(std::size_t i) const { return ids_[i]; }
  const AffineForm& operator[](std::size_t i) {
    if (!cache_[i]) cache_[i] = transform_form(hyperplane_form(family_, ids_[i]), t_).primitive();
    return *cache_[i];
  }

 private:
  const LdtFamily& family_;
  std::vector<HyperplaneId> ids_;
  const TransformMatrix& t_;
  std::vector<std::optional<AffineForm>> cache_;
};

// Whether f belongs to the conflict list of the prism. When the prism came from a
// degenerate walk the point may sit on its boundary, so every hyperplane meeting the
// closed prism is kept.
inline bool in_conflict(const AffineForm& f, const Prism& prism, ConflictMethod method) {
  if (method == ConflictMethod::elimination) return prism.degenerate ? prism.meets(f) : prism.crosses(f);
  if (!prism.degenerate) return crosses(f, prism.constraints);
  LpResult hi = maximize(f, prism.constraints), lo = maximize(-f, prism.constraints);
  return (hi.status == LpStatus::unbounded || hi.value >= 0) && (lo.status == LpStatus::unbounded || lo.value >= 0);
}

// Indices of the forms that cross the prism; no queries.
inline std::vector<std::size_t> conflict_list(std::span<const AffineForm> forms, const Prism& prism,
                                              ConflictMethod method = ConflictMethod::elimination) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < forms.size(); ++i)
    if (in_conflict(forms[i], prism, method)) out.push_back(i);
  return out;
}

// Query accounting of a finished solve: each locate call costs at most 2rn, the rest are
// direct tests, and rounds that met the cutting target number at most
// ceil(log_{1/eps} C(n,k)). Returns a description of the first violated bound.
inline std::optional<std::string> cost_bound_violation(const SolveResult& res, std::size_t n, std::size_t k,
                                                       const SolverConfig& cfg) {
  std::size_t budget = res.direct_tests + res.restart_queries, good_rounds = 0;
  for (const auto& r : res.rounds) {
    if (r.max_locate_queries > 2 * r.sample_size * n)
      return "round " + std::to_string(r.round) + " exceeded 2rn queries in one locate call";
    if (r.conflict_after > r.conflict_before) return "round " + std::to_string(r.round) + " grew the conflict list";
    budget += 2 * r.sample_size * n * r.attempts;
    if (!r.flagged) ++good_rounds;
  }
  if (res.queries > budget) return "total queries exceed the per-round budget";
  // Smallest t with (1/eps)^t >= C(n,k).
  const Rat total(static_cast<unsigned long>(binomial(n, k)));
  Rat reach(1);
  std::size_t max_rounds = 0;
  while (reach < total) {
    reach /= cfg.epsilon;
    ++max_rounds;
  }
  if (good_rounds > max_rounds) return "more shrinking rounds than log_{1/eps} C(n,k)";
  return std::nullopt;
}

namespace detail {

struct Restart {
  std::string reason;
};

template <TransformingOracle O>
Decision solve_once(const LdtFamily& family, const SolverConfig& cfg, O& oracle, std::size_t restart,
                    SolveResult& res) {
  using clock = std::chrono::steady_clock;
  const std::size_t n = family.n;
  // Redraw until no form of the family is vertical; this costs no queries.
  const std::vector<HyperplaneId> ids = enumerate_ids(n, family.k);
  TransformMatrix t;
  for (std::uint64_t draw = 0;; ++draw) {
    t = random_generic_transform(n, derive_seed(derive_seed(cfg.seed, 1000 + restart), draw));
    bool generic = true;
    for (std::size_t i = 0; i < ids.size() && generic; ++i)
      generic = transform_form(hyperplane_form(family, ids[i]), t).last() != 0;
    if (generic) break;
    if (draw >= 64) throw SolverError("decide: no generic transform found");
  }
  oracle.set_transform(t);
  WorkingForms forms(family, ids, t);
  Rng rng(derive_seed(cfg.seed, 2000 + restart));
  const std::size_t r_full = sample_size(n, cfg);
  const Int eps_num = cfg.epsilon.get_num(), eps_den = cfg.epsilon.get_den();

  std::vector<std::size_t> cl(forms.size());
  for (std::size_t i = 0; i < cl.size(); ++i) cl[i] = i;
  LocateOptions lopts;
  lopts.prefilter = cfg.prefilter;

  for (std::size_t round = 1;; ++round) {
    if (cl.size() <= std::max(r_full, cfg.direct_threshold)) {
      for (std::size_t i : cl) {
        ++res.direct_tests;
        if (oracle.sign_of(forms[i]) == Sign::zero) return {forms.id(i)};
      }
      return {};
    }
    const auto round_start = clock::now();
    const std::size_t q0 = oracle.query_count();
    RoundReport rep;
    rep.restart = restart;
    rep.round = round;
    rep.conflict_before = cl.size();
    const std::size_t r = std::min(r_full, cl.size());
    rep.sample_size = r;
    std::optional<std::vector<std::size_t>> best;
    bool best_degenerate = false;
    for (std::size_t attempt = 0; attempt <= cfg.max_resamples; ++attempt) {
      std::vector<std::size_t> pool = cl;
      rng.partial_shuffle(pool, r);
      std::vector<std::size_t> picked(pool.begin(), pool.begin() + static_cast<long>(r));
      std::sort(picked.begin(), picked.end());
      std::vector<SampleForm> sample;
      for (std::size_t i : picked) sample.push_back({i, forms[i]});
      LocateResult loc;
      try {
        loc = locate_prism(std::span<const SampleForm>(sample), n, oracle, lopts);
      } catch (const GenericityError& e) {
        throw Restart{e.what()};
      } catch (const DegenerateSampleError& e) {
        throw Restart{e.what()};
      } catch (const DegenerateRegionError& e) {
        throw Restart{e.what()};
      }
      ++rep.attempts;
      rep.max_locate_queries = std::max(rep.max_locate_queries, loc.queries);
      if (cfg.on_locate) cfg.on_locate(LocateEvent{restart, round, attempt, sample, loc, t});
      if (loc.on_hyperplane) {
        rep.queries = oracle.query_count() - q0;
        rep.seconds = std::chrono::duration<double>(clock::now() - round_start).count();
        res.rounds.push_back(rep);
        res.final_prism.reset();
        return {forms.id(*loc.on_hyperplane)};
      }
      std::vector<std::size_t> rest;
      std::set_difference(cl.begin(), cl.end(), picked.begin(), picked.end(), std::back_inserter(rest));
      std::vector<std::size_t> next;
      for (std::size_t i : rest)
        if (in_conflict(forms[i], loc.prism, cfg.conflicts)) next.push_back(i);
      const bool ok = Int(static_cast<unsigned long>(next.size())) * eps_den <=
                      eps_num * Int(static_cast<unsigned long>(cl.size()));
      if (attempt == 0) rep.first_sample_ok = ok;
      if (!best || next.size() < best->size()) {
        best = std::move(next);
        best_degenerate = loc.prism.degenerate;
        res.final_prism = std::move(loc.prism);
      }
      if (ok) break;
    }
    rep.flagged = !(Int(static_cast<unsigned long>(best->size())) * eps_den <=
                    eps_num * Int(static_cast<unsigned long>(cl.size())));
    rep.degenerate = best_degenerate;
    rep.conflict_after = best->size();
    rep.queries = oracle.query_count() - q0;
    rep.seconds = std::chrono::duration<double>(clock::now() - round_start).count();
    res.rounds.push_back(rep);
    cl = std::move(*best);
    if (cl.empty()) return {};
  }
}

}  // namespace detail

// Decides whether the hidden point lies on a hyperplane of the family using only the
// oracle. Genericity failures and degenerate samples restart with a fresh transform.
template <TransformingOracle O>
SolveResult decide_with(const LdtFamily& family, const SolverConfig& cfg, O& oracle) {
  validate(family);
  if (oracle.dim() != family.n) throw DimensionError("decide: oracle dimension differs from n");
  SolveResult res;
  const auto start = std::chrono::steady_clock::now();
  const std::size_t q0 = oracle.query_count();
  for (std::size_t restart = 0;; ++restart) {
    res.rounds.clear();
    res.final_prism.reset();
    res.direct_tests = 0;
    const std::size_t attempt_start = oracle.query_count();
    try {
      res.decision = detail::solve_once(family, cfg, oracle, restart, res);
      break;
    } catch (const detail::Restart& r) {
      res.restart_reasons.push_back(r.reason);
      res.restart_queries += oracle.query_count() - attempt_start;
      ++res.restarts;
      if (restart >= cfg.max_restarts) throw SolverError("decide: giving up after repeated restarts: " + r.reason);
    }
  }
  res.queries = oracle.query_count() - q0;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (auto why = cost_bound_violation(res, family.n, family.k, cfg)) throw SolverError("decide: " + *why);
  return res;
}

inline SolveResult decide(const LdtInstance& inst, const SolverConfig& cfg = {}) {
  validate(inst);
  Oracle oracle(inst.x);
  SolveResult res;
  if (cfg.memoize) {
    MemoOracle<Oracle> memo(oracle);
    res = decide_with(inst.family(), cfg, memo);
  } else {
    res = decide_with(inst.family(), cfg, oracle);
  }
  res.transcript = oracle.transcript();
  res.distinct_queries = res.transcript.distinct_count();
  return res;
}

// Independent solves; results are in input order and do not depend on `threads`.
inline std::vector<SolveResult> decide_batch(const std::vector<LdtInstance>& instances, const SolverConfig& cfg = {},
                                             std::size_t threads = 1) {
  std::vector<SolveResult> out(instances.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < instances.size(); ++i) out[i] = decide(instances[i], cfg);
    return out;
  }
  std::vector<std::exception_ptr> errors(instances.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < instances.size(); i += threads) {
        try {
          out[i] = decide(instances[i], cfg);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace ldt
