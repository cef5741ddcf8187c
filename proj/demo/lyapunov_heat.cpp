// Solves the Kronecker-form Lyapunov systems of the heat model at its
// parameter points, with SPAI at the first point and updates after.
//
//   demo_lyapunov_heat [n]

#include <cstdio>
#include <cstdlib>

#include "pmor/pmor.hpp"

using namespace pmor;

int main(int argc, char** argv) {
  HeatKronSpec spec;
  spec.n = argc > 1 ? std::atol(argv[1]) : 20;
  const auto base = heat_base(spec.n);
  const auto systems = pbtmr_sequence(spec);

  SequencePreconditioner seq(SequenceConfig{});
  std::printf("%-6s %8s %-14s %6s %14s\n", "point", "size", "precond", "iters", "Lyapunov res");
  for (std::size_t j = 0; j < systems.size(); ++j) {
    const auto& sys = systems[j];
    const auto& p = seq.next(sys.a);
    const auto r = gcro_solve(sys.a, sys.b.col(0), &p, SolverConfig{});
    const double res = lyapunov_residual(base, spec.points[j], unvec(r.x, spec.n));
    std::printf("%-6zu %8lld %-14s %6lld %14.3e\n", j + 1, static_cast<long long>(sys.a.rows()),
                seq.steps().back().kind.c_str(), static_cast<long long>(r.report.iterations), res);
  }
  return 0;
}
