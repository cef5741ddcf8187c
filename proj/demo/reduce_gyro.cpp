// Reduces a small gyroscope analog with moment matching at its four
// expansion points and compares full and reduced transfer functions.
//
//   demo_reduce_gyro [levels]

#include <cstdio>
#include <cstdlib>

#include "pmor/pmor.hpp"

using namespace pmor;

int main(int argc, char** argv) {
  GyroAnalogSpec spec;
  spec.n = 150;
  spec.mass_scale = 0.05;
  spec.mass2_scale = 0.02;
  spec.damping_scale = 1.0;
  spec.damping2_scale = 0.5;
  spec.stiffness2_scale = 0.1;
  spec.stiffness3_scale = 0.1;
  spec.shift = 0.1;
  const auto g = gen_gyro_analog(spec);

  PipelineConfig cfg;
  cfg.levels = argc > 1 ? std::atol(argv[1]) : 1;
  const auto r = rpmor_reduce(g.model, g.points, cfg);
  std::printf("full order %lld, reduced order %lld, %lld solver calls, %lld iterations\n",
              static_cast<long long>(g.model.dimension()), static_cast<long long>(r.reduced.order()),
              static_cast<long long>(r.report.total_calls), static_cast<long long>(r.report.total_iterations));

  auto rel = [](const DenseMatrix& a, const DenseMatrix& b) { return (a - b).norm() / b.norm(); };
  std::printf("%-8s %14s %14s\n", "point", "H error", "dH/ds error");
  for (const auto& pt : g.points) {
    const double h = rel(transfer_function(r.reduced, pt), transfer_function(g.model, pt));
    const double dh = rel(transfer_derivative(r.reduced, pt, 0), transfer_derivative(g.model, pt, 0));
    std::printf("%-8s %14.3e %14.3e\n", pt.label.c_str(), h, dh);
  }

  return 0;
}
