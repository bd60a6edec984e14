#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "fracsem/fraclap.hpp"
#include "fracsem/kernels.hpp"

namespace {

using namespace fracsem;

GridPtr grid_1d(int level) {
  return build_grid(Domain::interval(-1.0, 1.0), std::ldexp(1.0, -level), 4.0);
}

GridPtr grid_2d(int level) {
  return build_grid(Domain::box(-1.0, 1.0, -1.0, 1.0), std::ldexp(1.0, -level), 2.0);
}

kernels::KernelParams params(const Grid& g) {
  const auto p = make_params(g.dim(), 0.5);
  return {p.n, p.s, p.cns};
}

void BM_Assemble(benchmark::State& state, GridPtr (*make)(int), bool parallel) {
  const auto grid = make(static_cast<int>(state.range(0)));
  const auto kp = params(*grid);
  for (auto _ : state) {
    auto block = parallel ? kernels::assemble_rows_parallel(*grid, kp, grid->interior())
                          : kernels::assemble_rows_serial(*grid, kp, grid->interior());
    benchmark::DoNotOptimize(block.to_interior.data());
  }
  state.counters["interior"] = static_cast<double>(grid->interior_count());
}

template <bool Parallel>
void BM_Apply(benchmark::State& state) {
  const auto grid = grid_1d(static_cast<int>(state.range(0)));
  const auto op = assemble(grid, 0.5);
  std::vector<double> ui(grid->interior_count()), ue(grid->exterior_count()), out(ui.size());
  for (std::size_t k = 0; k < ui.size(); ++k) ui[k] = std::sin(0.1 * static_cast<double>(k));
  for (auto _ : state) {
    if (Parallel) kernels::apply_parallel(op.A_II, op.A_IE, op.tail, ui, ue, 0.0, out);
    else kernels::apply_serial(op.A_II, op.A_IE, op.tail, ui, ue, 0.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_Neumann(benchmark::State& state) {
  const auto grid = grid_1d(static_cast<int>(state.range(0)));
  const auto kp = params(*grid);
  std::vector<double> u(grid->size(), 1.0);
  std::vector<std::size_t> at;
  for (auto e : grid->exterior()) {
    if (grid->domain().distance(grid->node(e)) >= 0.5) at.push_back(e);
  }
  std::vector<double> out(at.size());
  for (auto _ : state) {
    if (Parallel) kernels::neumann_parallel(*grid, kp, u, at, out);
    else kernels::neumann_serial(*grid, kp, u, at, out);
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_Assemble, serial_1d, grid_1d, false)->DenseRange(6, 9);
BENCHMARK_CAPTURE(BM_Assemble, parallel_1d, grid_1d, true)->DenseRange(6, 9);
BENCHMARK_CAPTURE(BM_Assemble, serial_2d, grid_2d, false)->DenseRange(3, 4);
BENCHMARK_CAPTURE(BM_Assemble, parallel_2d, grid_2d, true)->DenseRange(3, 4);
BENCHMARK_TEMPLATE(BM_Apply, false)->DenseRange(6, 9);
BENCHMARK_TEMPLATE(BM_Apply, true)->DenseRange(6, 9);
BENCHMARK_TEMPLATE(BM_Neumann, false)->DenseRange(6, 9);
BENCHMARK_TEMPLATE(BM_Neumann, true)->DenseRange(6, 9);

BENCHMARK_MAIN();
