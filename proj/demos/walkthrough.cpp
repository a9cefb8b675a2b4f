// Solves a random 3-SUM instance round by round, then answers a few point location
// queries in the plane. Usage: walkthrough [n] [seed] [plant]; any third argument
// plants a solution.

#include <iostream>

#include "ldt/ldt.hpp"

using namespace ldt;

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::stoul(argv[1]) : 18;
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 1;

  LdtInstance inst = generate_instance(n, 3, seed, argc > 3, false);
  std::cout << serialize_instance(inst);

  SolverConfig cfg;
  cfg.seed = seed;
  cfg.on_locate = [](const LocateEvent& e) {
    std::cout << "  round " << e.round << " sample " << e.sample.size() << ": ";
    if (e.result.on_hyperplane)
      std::cout << "point lies on a sampled hyperplane\n";
    else
      std::cout << e.result.prism.constraints.size() << " prism constraints, " << e.result.queries << " queries\n";
  };
  SolveResult res = decide(inst, cfg);
  for (const auto& r : res.rounds)
    std::cout << "round " << r.round << ": conflict list " << r.conflict_before << " -> " << r.conflict_after
              << (r.attempts > 1 ? " after resampling" : "") << '\n';
  std::cout << res.decision.to_string() << " after " << res.queries << " queries (" << res.direct_tests
            << " direct), brute force says " << brute_decide(inst).to_string() << "\n\n";

  Arrangement arr{2, {}};
  Rng rng(seed);
  while (arr.forms.size() < 16) {
    AffineForm f(Rat(rng.between(-20, 20)), {Rat(rng.between(-9, 9)), Rat(rng.between(1, 9))});
    arr.forms.push_back(f);
  }
  PointLocator pl(arr);
  for (int i = 0; i < 5; ++i) {
    std::vector<Rat> q = {make_rat(rng.between(-40, 40), 3), make_rat(rng.between(-40, 40), 3)};
    std::size_t cost = 0;
    PositionVector pv = pl.query(q, &cost);
    std::cout << "(" << q[0] << ", " << q[1] << ") " << to_string(pv) << " cost " << cost
              << (pv == brute_position_vector(arr, q) ? "" : " MISMATCH") << '\n';
  }
  std::cout << "tree nodes " << pl.stats().nodes << ", sample size " << pl.sample_size() << '\n';
}
