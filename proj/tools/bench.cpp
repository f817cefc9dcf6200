// Timing comparison of the serial reference kernels against the OpenMP
// variants, and of a sweep run at 1 vs all workers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "dsblow/harness.hpp"
#include "dsblow/kernels.hpp"
#include "dsblow/solver.hpp"

using namespace dsblow;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_seconds();
    f();
    best = std::min(best, now_seconds() - t0);
  }
  return best;
}

void bench_rhs(std::size_t m) {
  std::vector<double> u(m), v(m), du(m), dv(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double r = static_cast<double>(i) / static_cast<double>(m - 1);
    u[i] = std::exp(-8.0 * r * r);
    v[i] = r * u[i];
  }
  kernels::RhsSetup s;
  s.n = 3;
  s.h = 10.0 / static_cast<double>(m - 1);
  s.kind = 1;
  s.p = 2.0;
  const int inner = static_cast<int>(std::max<std::size_t>(1, (1u << 22) / m));
  const double ts = time_best_of(5, [&] {
    for (int k = 0; k < inner; ++k) kernels::radial_rhs_serial(u, v, du, dv, s);
  });
  const double tp = time_best_of(5, [&] {
    for (int k = 0; k < inner; ++k) kernels::radial_rhs_parallel(u, v, du, dv, s);
  });
  const double td = time_best_of(5, [&] {
    double acc = 0.0;
    for (int k = 0; k < inner; ++k) acc += kernels::dot_serial(u, v);
    if (acc == 12345.6789) std::puts("");
  });
  const double tc = time_best_of(5, [&] {
    double acc = 0.0;
    for (int k = 0; k < inner; ++k) acc += kernels::dot_chunked(u, v);
    if (acc == 12345.6789) std::puts("");
  });
  std::printf("m=%8zu  rhs serial %8.3f us  omp %8.3f us  speedup %5.2fx   dot serial %7.3f us  chunked %7.3f us  speedup %5.2fx\n",
              m, 1e6 * ts / inner, 1e6 * tp / inner, ts / tp, 1e6 * td / inner,
              1e6 * tc / inner, td / tc);
}

void bench_evolve() {
  ModelParams params{3, 0.1, 2.0, Nonlinearity::PowerU};
  const RadialGrid grid = RadialGrid::make(5.0, 16384);
  InitialDataSpec data;
  EvolveControls controls;
  controls.T_max = 0.5;
  controls.U_max = 1e8;
  controls.sample_dt = 0.05;

  controls.use_parallel_kernels = false;
  const double ts = time_best_of(2, [&] {
    (void)evolve(params, grid, make_initial_state(data, grid), controls);
  });
  controls.use_parallel_kernels = true;
  const double tp = time_best_of(2, [&] {
    (void)evolve(params, grid, make_initial_state(data, grid), controls);
  });
  std::printf("evolve m=16384 to t=0.5: serial %7.3f s  omp %7.3f s  speedup %5.2fx\n", ts, tp,
              ts / tp);
}

void bench_sweep() {
  SweepConfig cfg;
  cfg.model = {3, 0.1, 2.0, Nonlinearity::PowerU};
  cfg.epsilons = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
  cfg.refinements = {512, 1024};
  cfg.controls.T_max = 6.0;
#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
  const double t1 = time_best_of(1, [&] { (void)run_sweep(cfg); });
  omp_set_num_threads(max_threads);
  const double tn = time_best_of(1, [&] { (void)run_sweep(cfg); });
  std::printf("sweep 6x2 cells: 1 worker %7.3f s  %d workers %7.3f s  speedup %5.2fx\n", t1,
              max_threads, tn, t1 / tn);
#else
  const double t1 = time_best_of(1, [&] { (void)run_sweep(cfg); });
  std::printf("sweep 6x2 cells (no OpenMP): %7.3f s\n", t1);
#endif
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP not enabled\n");
#endif
  for (std::size_t m : {4096u, 16384u, 65536u, 262144u}) bench_rhs(m);
  bench_evolve();
  bench_sweep();
  return 0;
}
