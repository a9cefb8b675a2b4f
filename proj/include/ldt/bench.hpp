#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "solver.hpp"

namespace ldt {

// One solve as reported by the benchmark and verification commands.
struct RunRecord {
  std::size_t n = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;         // instance seed; the solver seed is the same value
  std::string decision;           // "YES (i,j,k)" or "NO"
  std::size_t queries_raw = 0;
  std::size_t queries_dedup = 0;
  std::size_t rounds = 0;
  std::size_t resamples = 0;
  std::size_t flagged = 0;
  std::size_t restarts = 0;
  double cfit = 0;                // queries_raw / (k n^2 ln^2 n)
  double seconds = 0;             // diagnostics only; never written to CSV or JSON
};

inline double scaling_unit(std::size_t n, std::size_t k) {
  const double ln = std::log(static_cast<double>(n));
  return static_cast<double>(k) * static_cast<double>(n) * static_cast<double>(n) * ln * ln;
}

inline RunRecord make_record(const LdtInstance& inst, std::uint64_t seed, const SolveResult& res) {
  RunRecord r;
  r.n = inst.n;
  r.k = inst.k;
  r.seed = seed;
  r.decision = res.decision.to_string();
  r.queries_raw = res.queries;
  r.queries_dedup = res.distinct_queries;
  r.rounds = res.rounds.size();
  r.resamples = res.resamples();
  r.flagged = res.flagged_rounds();
  r.restarts = res.restarts;
  r.cfit = static_cast<double>(r.queries_raw) / scaling_unit(r.n, r.k);
  r.seconds = res.seconds;
  return r;
}

// Median of the per-run values for one (n, k) cell; cfit is the fitted constant.
struct Aggregate {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t runs = 0;
  double queries_raw = 0;
  double queries_dedup = 0;
  double rounds = 0;
  double resamples = 0;
  double flagged = 0;
  double cfit = 0;
};

inline double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2;
}

inline std::vector<Aggregate> aggregate(const std::vector<RunRecord>& runs) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const RunRecord*>> cells;
  for (const auto& r : runs) cells[{r.n, r.k}].push_back(&r);
  std::vector<Aggregate> out;
  for (const auto& [key, rs] : cells) {
    auto med = [&](auto field) {
      std::vector<double> v;
      for (const auto* r : rs) v.push_back(static_cast<double>(field(*r)));
      return median(v);
    };
    Aggregate a;
    a.n = key.first;
    a.k = key.second;
    a.runs = rs.size();
    a.queries_raw = med([](const RunRecord& r) { return r.queries_raw; });
    a.queries_dedup = med([](const RunRecord& r) { return r.queries_dedup; });
    a.rounds = med([](const RunRecord& r) { return r.rounds; });
    a.resamples = med([](const RunRecord& r) { return r.resamples; });
    a.flagged = med([](const RunRecord& r) { return r.flagged; });
    a.cfit = med([](const RunRecord& r) { return r.cfit; });
    out.push_back(a);
  }
  return out;
}

// Fixed-format numbers so that output bytes do not depend on locale or stream state.
inline std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline const char* csv_header() { return "n,k,seed,decision,queries_raw,queries_dedup,rounds,resamples,flagged,cfit"; }

// Runs first, then one row per (n, k) with seed "median" and the medians.
inline void write_csv(std::ostream& os, const std::vector<RunRecord>& runs, bool with_aggregates = true) {
  os << csv_header() << '\n';
  for (const auto& r : runs)
    os << r.n << ',' << r.k << ',' << r.seed << ",\"" << r.decision << "\"," << r.queries_raw << ',' << r.queries_dedup
       << ',' << r.rounds << ',' << r.resamples << ',' << r.flagged << ',' << fixed(r.cfit, 6) << '\n';
  if (!with_aggregates) return;
  for (const auto& a : aggregate(runs))
    os << a.n << ',' << a.k << ",median,\"" << a.runs << " runs\"," << fixed(a.queries_raw, 1) << ','
       << fixed(a.queries_dedup, 1) << ',' << fixed(a.rounds, 1) << ',' << fixed(a.resamples, 1) << ','
       << fixed(a.flagged, 1) << ',' << fixed(a.cfit, 6) << '\n';
}

inline nlohmann::ordered_json to_json(const std::vector<RunRecord>& runs) {
  nlohmann::ordered_json j;
  j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    nlohmann::ordered_json o;
    o["n"] = r.n;
    o["k"] = r.k;
    o["seed"] = r.seed;
    o["decision"] = r.decision;
    o["queries_raw"] = r.queries_raw;
    o["queries_dedup"] = r.queries_dedup;
    o["rounds"] = r.rounds;
    o["resamples"] = r.resamples;
    o["flagged"] = r.flagged;
    o["cfit"] = r.cfit;
    j["runs"].push_back(o);
  }
  j["aggregates"] = nlohmann::ordered_json::array();
  for (const auto& a : aggregate(runs)) {
    nlohmann::ordered_json o;
    o["n"] = a.n;
    o["k"] = a.k;
    o["runs"] = a.runs;
    o["queries_raw"] = a.queries_raw;
    o["queries_dedup"] = a.queries_dedup;
    o["rounds"] = a.rounds;
    o["resamples"] = a.resamples;
    o["flagged"] = a.flagged;
    o["cfit"] = a.cfit;
    j["aggregates"].push_back(o);
  }
  return j;
}

// Ratio between the largest and smallest fitted constant over the cells.
inline double cfit_spread(const std::vector<Aggregate>& cells) {
  double lo = 0, hi = 0;
  for (const auto& a : cells) {
    if (lo == 0 || a.cfit < lo) lo = a.cfit;
    hi = std::max(hi, a.cfit);
  }
  return lo > 0 ? hi / lo : 0;
}

}  // namespace ldt
