#include <CLI11.hpp>

#include <iostream>

#include "ldt/commands.hpp"

namespace {

struct SolverFlags {
  std::string epsilon = "1/2";
  std::string sample_const = "1";
  std::size_t threshold = 64;
  std::size_t max_resamples = 20;
  std::uint64_t seed = 0;
  std::string dedup = "off";
  std::string conflicts = "elimination";

  void attach(CLI::App* app) {
    app->add_option("--epsilon", epsilon, "cutting parameter, a rational in (0, 1)")->capture_default_str();
    app->add_option("--sample-const", sample_const, "multiplier on the sample size formula")->capture_default_str();
    app->add_option("--threshold", threshold, "conflict list size below which the rest is tested directly")
        ->capture_default_str();
    app->add_option("--max-resamples", max_resamples, "resamples per round before proceeding with the best sample")
        ->capture_default_str();
    app->add_option("--seed", seed, "random seed")->capture_default_str();
    app->add_option("--dedup", dedup, "ask each distinct question once")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    app->add_option("--conflicts", conflicts, "conflict list method")
        ->check(CLI::IsMember({"elimination", "simplex"}))
        ->capture_default_str();
  }

  ldt::SolverConfig config() const {
    ldt::SolverConfig cfg;
    cfg.epsilon = rational("--epsilon", epsilon);
    cfg.sample_const = rational("--sample-const", sample_const);
    if (cfg.epsilon <= 0 || cfg.epsilon >= 1) throw CLI::ValidationError("--epsilon", "must lie in (0, 1)");
    if (cfg.sample_const <= 0) throw CLI::ValidationError("--sample-const", "must be positive");
    cfg.direct_threshold = threshold;
    cfg.max_resamples = max_resamples;
    cfg.seed = seed;
    cfg.memoize = dedup == "on";
    cfg.conflicts = conflicts == "simplex" ? ldt::ConflictMethod::simplex : ldt::ConflictMethod::elimination;
    return cfg;
  }

  static ldt::Rat rational(const std::string& name, const std::string& text) {
    auto r = ldt::parse_rational(text);
    if (!r) throw CLI::ValidationError(name, "expected a rational p/q, got '" + text + "'");
    return *r;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact k-SUM and k-LDT decision in the linear decision tree model"};
  app.require_subcommand(1);

  SolverFlags solve_flags, verify_flags, bench_flags;

  auto* solve = app.add_subcommand("solve", "decide one instance file (exit 1 on YES, 0 on NO)");
  std::string solve_path, transcript_path;
  solve->add_option("file", solve_path, "instance file")->required();
  solve->add_option("--transcript", transcript_path, "write the query transcript to this file");
  solve_flags.attach(solve);

  auto* verify = app.add_subcommand("verify", "compare the solver with brute force on random instances");
  ldt::VerifyOptions vopt;
  std::vector<std::size_t> n_range{vopt.n_min, vopt.n_max}, k_range{vopt.k_min, vopt.k_max};
  verify->add_option("--count", vopt.count, "number of instances")->capture_default_str();
  verify->add_option("--n-range", n_range, "smallest and largest n")->expected(2)->capture_default_str();
  verify->add_option("--k-range", k_range, "smallest and largest k")->expected(2)->capture_default_str();
  verify->add_option("--planted-ratio", vopt.planted_ratio, "fraction of instances with a planted solution")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  verify->add_option("--ldt-ratio", vopt.ldt_ratio, "fraction of instances with random LDT coefficients")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  verify->add_option("--max-family", vopt.max_family, "cap on C(n, k)")->capture_default_str();
  verify_flags.attach(verify);

  auto* bench = app.add_subcommand("bench", "query counts over a grid of (n, k), as CSV or JSON");
  ldt::BenchOptions bopt;
  bench->add_option("--n", bopt.ns, "values of n")->capture_default_str();
  bench->add_option("--k", bopt.ks, "values of k")->capture_default_str();
  bench->add_option("--reps", bopt.reps, "solves per (n, k)")->capture_default_str();
  bench->add_option("--format", bopt.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  bench->add_option("--threads", bopt.threads, "parallel solves")->capture_default_str();
  bench_flags.attach(bench);

  auto* pointloc = app.add_subcommand("pointloc", "build a point location structure and answer queries");
  std::string arr_path, query_path;
  ldt::PLConfig pcfg;
  std::string pl_epsilon, pl_sample_const = "1";
  std::size_t pl_r = 0;
  pointloc->add_option("arrangement", arr_path, "arrangement file")->required();
  pointloc->add_option("queries", query_path, "query point file")->required();
  pointloc->add_flag("--eager", pcfg.eager, "build the whole tree before answering");
  pointloc->add_option("--seed", pcfg.seed, "random seed")->capture_default_str();
  pointloc->add_option("--epsilon", pl_epsilon, "cutting parameter (default 1/d)");
  pointloc->add_option("--sample-const", pl_sample_const, "multiplier on the sample size formula")
      ->capture_default_str();
  pointloc->add_option("--r", pl_r, "sample size, overriding the formula");

  auto* generate = app.add_subcommand("generate", "write a random instance file");
  std::size_t gen_n = 12, gen_k = 3;
  std::uint64_t gen_seed = 0;
  bool gen_planted = false, gen_ldt = false;
  generate->add_option("--n", gen_n, "number of inputs")->capture_default_str();
  generate->add_option("--k", gen_k, "tuple size")->capture_default_str();
  generate->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  generate->add_flag("--planted", gen_planted, "plant a solution");
  generate->add_flag("--ldt", gen_ldt, "draw random LDT coefficients");

  try {
    app.parse(argc, argv);
    if (*solve) return ldt::cmd_solve(solve_path, solve_flags.config(), transcript_path, std::cout, std::cerr);
    if (*verify) {
      vopt.n_min = n_range[0];
      vopt.n_max = n_range[1];
      vopt.k_min = k_range[0];
      vopt.k_max = k_range[1];
      vopt.seed = verify_flags.seed;
      return ldt::cmd_verify(vopt, verify_flags.config(), std::cout, std::cerr);
    }
    if (*bench) {
      bopt.seed = bench_flags.seed;
      return ldt::cmd_bench(bopt, bench_flags.config(), std::cout, std::cerr);
    }
    if (*pointloc) {
      if (!pl_epsilon.empty()) pcfg.epsilon = SolverFlags::rational("--epsilon", pl_epsilon);
      pcfg.sample_const = SolverFlags::rational("--sample-const", pl_sample_const);
      if (pl_r > 0) pcfg.r = pl_r;
      return ldt::cmd_pointloc(arr_path, query_path, pcfg, std::cout, std::cerr);
    }
    if (*generate) {
      if (gen_k < 2 || gen_k > gen_n) throw CLI::ValidationError("--k", "need 2 <= k <= n");
      std::cout << ldt::serialize_instance(ldt::generate_instance(gen_n, gen_k, gen_seed, gen_planted, gen_ldt));
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : ldt::exit_input;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return ldt::exit_internal;
  }
  return 0;
}
