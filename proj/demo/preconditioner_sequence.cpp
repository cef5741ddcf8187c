// Builds SPAI at the first point of the gyroscope analog and updates it for
// the remaining points, then solves each system with GCRO.
//
//   demo_preconditioner_sequence [n]

#include <cstdio>
#include <cstdlib>

#include "pmor/pmor.hpp"

using namespace pmor;

int main(int argc, char** argv) {
  GyroAnalogSpec spec;
  spec.n = argc > 1 ? std::atol(argv[1]) : 1000;
  const auto g = gen_gyro_analog(spec);
  const auto& f = g.model;

  for (const auto policy : {PreconditionPolicy::spai, PreconditionPolicy::update}) {
    SequenceConfig cfg;
    cfg.policy = policy;
    SequencePreconditioner seq(cfg);
    std::printf("%s\n", policy == PreconditionPolicy::spai ? "fresh SPAI at every point" : "SPAI once, then updates");
    std::printf("%-6s %-14s %10s %8s %6s\n", "point", "kind", "build[s]", "nnz", "iters");
    for (std::size_t l = 0; l < g.points.size(); ++l) {
      const auto a = f.evaluate(g.points[l]);
      const auto& p = seq.next(a);
      const auto r = gcro_solve(a, f.rhs().col(0), &p, SolverConfig{});
      const auto& step = seq.steps().back();
      std::printf("%-6zu %-14s %10.4f %8lld %6lld\n", l + 1, step.kind.c_str(), step.build_seconds,
                  static_cast<long long>(step.nnz), static_cast<long long>(r.report.iterations));
    }
    std::printf("\n");
  }
  return 0;
}
