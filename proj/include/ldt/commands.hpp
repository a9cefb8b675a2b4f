#pragma once

#include <exception>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "bench.hpp"
#include "pointloc.hpp"
#include "solver.hpp"

namespace ldt {

// The command-line front end as library functions: each writes its report to `out`,
// diagnostics (including wall-clock times) to `err`, and returns the exit code.

enum ExitCode : int { exit_no = 0, exit_yes = 1, exit_input = 2, exit_internal = 3 };

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// File and parse problems are both input errors; parse errors are prefixed with the path.
inline void report_input_error(std::ostream& err, const std::string& path, const Error& e) {
  if (dynamic_cast<const ParseError*>(&e)) err << path << ": ";
  err << e.what() << '\n';
}

inline void write_transcript_file(const std::string& path, const Transcript& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  t.write(out);
}

// Prints the decision, then the query accounting. Exit 1 on YES, 0 on NO.
inline int cmd_solve(const std::string& path, const SolverConfig& cfg, const std::string& transcript_path,
                     std::ostream& out, std::ostream& err) {
  LdtInstance inst;
  try {
    inst = parse_instance(read_file(path));
  } catch (const Error& e) {
    report_input_error(err, path, e);
    return exit_input;
  }
  try {
    SolveResult res = decide(inst, cfg);
    out << res.decision.to_string() << '\n';
    out << "queries " << res.queries << " distinct " << res.distinct_queries << " rounds " << res.rounds.size()
        << " resamples " << res.resamples() << " flagged " << res.flagged_rounds() << " restarts " << res.restarts
        << " direct " << res.direct_tests << '\n';
    if (!transcript_path.empty()) write_transcript_file(transcript_path, res.transcript);
    err << "time " << fixed(res.seconds, 3) << " s\n";
    return res.decision.yes() ? exit_yes : exit_no;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  }
}

// Random instance for the verification and benchmark sweeps. LDT coefficients are small
// integers; inputs are random rationals, generic unless a solution is planted.
inline LdtInstance generate_instance(std::size_t n, std::size_t k, std::uint64_t seed, bool planted, bool ldt) {
  Rng rng(seed);
  LdtFamily fam{n, k, std::vector<Rat>(k + 1, Rat(1))};
  fam.a[0] = 0;
  if (ldt) {
    for (auto& a : fam.a) a = static_cast<long>(rng.between(-5, 5));
    if (fam.a[k] == 0) fam.a[k] = 1;
  }
  return random_instance(fam, rng, planted);
}

struct VerifyOptions {
  std::size_t count = 500;
  std::size_t n_min = 6, n_max = 14;
  std::size_t k_min = 3, k_max = 5;
  double planted_ratio = 0.5;
  double ldt_ratio = 0.25;
  std::uint64_t seed = 0;
  std::size_t max_family = 200000;  // cap on C(n, k)
};

struct VerifyCase {
  LdtInstance instance;
  std::uint64_t seed;
};

inline std::vector<VerifyCase> verify_cases(const VerifyOptions& opt) {
  if (opt.n_min > opt.n_max || opt.k_min > opt.k_max || opt.k_min < 2) throw Error("verify: empty or invalid range");
  if (binomial(opt.n_max, std::min(opt.k_max, opt.n_max / 2)) > opt.max_family)
    throw CapError("verify: C(n, k) exceeds the cap " + std::to_string(opt.max_family));
  Rng rng(derive_seed(opt.seed, 1));
  std::vector<VerifyCase> cases;
  const auto threshold = [](double p) { return static_cast<std::uint64_t>(std::llround(p * 1000000.0)); };
  for (std::size_t i = 0; i < opt.count; ++i) {
    const std::size_t n = opt.n_min + rng.below(opt.n_max - opt.n_min + 1);
    std::size_t k = opt.k_min + rng.below(opt.k_max - opt.k_min + 1);
    k = std::min(k, n);
    const bool planted = rng.below(1000000) < threshold(opt.planted_ratio);
    const bool ldt = rng.below(1000000) < threshold(opt.ldt_ratio);
    const std::uint64_t s = derive_seed(opt.seed, 100 + i);
    cases.push_back({generate_instance(n, k, s, planted, ldt), s});
  }
  return cases;
}

// A run agrees with brute force when the YES/NO answers match and a YES carries a tuple
// whose hyperplane passes through the input.
inline bool agrees(const LdtInstance& inst, const Decision& d, const Decision& truth) {
  if (d.yes() != truth.yes()) return false;
  return !d.yes() || hyperplane_form(inst.family(), *d.witness).evaluate(inst.x) == 0;
}

inline int cmd_verify(const VerifyOptions& opt, const SolverConfig& base, std::ostream& out, std::ostream& err) {
  std::vector<VerifyCase> cases;
  try {
    cases = verify_cases(opt);
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_input;
  }
  std::size_t agree = 0, yes = 0;
  double seconds = 0;
  try {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      SolverConfig cfg = base;
      cfg.seed = cases[i].seed;
      SolveResult res = decide(cases[i].instance, cfg);
      seconds += res.seconds;
      const Decision truth = brute_decide(cases[i].instance);
      yes += truth.yes();
      if (agrees(cases[i].instance, res.decision, truth)) {
        ++agree;
      } else {
        out << "disagreement on case " << i << ": solver " << res.decision.to_string() << ", brute force "
            << truth.to_string() << '\n'
            << serialize_instance(cases[i].instance);
      }
    }
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  }
  out << "agreement " << agree << '/' << cases.size() << " (yes " << yes << ", no " << cases.size() - yes << ")\n";
  err << "time " << fixed(seconds, 3) << " s\n";
  return agree == cases.size() ? 0 : 1;
}

struct BenchOptions {
  std::vector<std::size_t> ns{16, 20, 24, 28};
  std::vector<std::size_t> ks{3};
  std::size_t reps = 5;
  std::uint64_t seed = 0;
  std::string format = "csv";
  std::size_t threads = 1;
};

// Unplanted k-SUM instances with generic inputs: the answer is NO and every solve runs to
// the end. Instance (n, k, rep) uses seed derive_seed(seed, (n * 64 + k) * 1024 + rep).
inline std::vector<RunRecord> run_bench(const BenchOptions& opt, const SolverConfig& base, std::ostream* progress) {
  std::vector<RunRecord> runs;
  for (std::size_t n : opt.ns)
    for (std::size_t k : opt.ks) {
      if (k < 2 || k > n) throw Error("bench: need 2 <= k <= n");
      std::vector<LdtInstance> insts;
      std::vector<std::uint64_t> seeds;
      for (std::size_t rep = 0; rep < opt.reps; ++rep) {
        seeds.push_back(derive_seed(opt.seed, (n * 64 + k) * 1024 + rep));
        insts.push_back(generate_instance(n, k, seeds.back(), false, false));
      }
      std::vector<SolveResult> results(insts.size());
      std::vector<std::thread> pool;
      std::vector<std::exception_ptr> errors(insts.size());
      const std::size_t threads = std::max<std::size_t>(1, opt.threads);
      auto work = [&](std::size_t w) {
        for (std::size_t i = w; i < insts.size(); i += threads) try {
            SolverConfig cfg = base;
            cfg.seed = seeds[i];
            results[i] = decide(insts[i], cfg);
          } catch (...) {
            errors[i] = std::current_exception();
          }
      };
      if (threads == 1) {
        work(0);
      } else {
        for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
      }
      for (auto& e : errors)
        if (e) std::rethrow_exception(e);
      for (std::size_t i = 0; i < insts.size(); ++i) {
        runs.push_back(make_record(insts[i], seeds[i], results[i]));
        if (progress)
          *progress << "n " << n << " k " << k << " rep " << i << " queries " << runs.back().queries_raw << " time "
                    << fixed(runs.back().seconds, 3) << " s\n";
      }
    }
  return runs;
}

inline int cmd_bench(const BenchOptions& opt, const SolverConfig& base, std::ostream& out, std::ostream& err) {
  if (opt.format != "csv" && opt.format != "json") {
    err << "bench: unknown format '" << opt.format << "'\n";
    return exit_input;
  }
  std::vector<RunRecord> runs;
  try {
    runs = run_bench(opt, base, &err);
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  }
  if (opt.format == "csv")
    write_csv(out, runs);
  else
    out << to_json(runs).dump(2) << '\n';
  return 0;
}

// Builds the structure, answers every query, and compares each answer with direct
// evaluation. Columns: query index, position vector, cost, agreement.
inline int cmd_pointloc(const std::string& arr_path, const std::string& query_path, const PLConfig& cfg,
                        std::ostream& out, std::ostream& err) {
  Arrangement arr;
  std::vector<std::vector<Rat>> queries;
  try {
    arr = parse_arrangement(read_file(arr_path));
  } catch (const Error& e) {
    report_input_error(err, arr_path, e);
    return exit_input;
  }
  try {
    queries = parse_points(read_file(query_path), arr.d);
  } catch (const Error& e) {
    report_input_error(err, query_path, e);
    return exit_input;
  }
  try {
    PointLocator pl(arr, cfg);
    std::size_t agree = 0;
    out << "query,position,cost,agrees\n";
    for (std::size_t i = 0; i < queries.size(); ++i) {
      std::size_t cost = 0;
      PositionVector pv = pl.query(queries[i], &cost);
      const bool ok = pv == brute_position_vector(arr, queries[i]);
      agree += ok;
      out << i << ',' << to_string(pv) << ',' << cost << ',' << (ok ? "yes" : "no") << '\n';
    }
    const PLStats& s = pl.stats();
    out << "# agreement " << agree << '/' << queries.size() << " r " << pl.sample_size() << " nodes " << s.nodes
        << " prisms " << s.prisms << " flagged " << s.flagged << '\n';
    return agree == queries.size() ? 0 : 1;
  } catch (const CapError& e) {
    err << e.what() << '\n';
    return exit_input;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return exit_internal;
  }
}

}  // namespace ldt
