// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "porohom/cell_problem.hpp"
#include "porohom/dns.hpp"
#include "porohom/interpolate.hpp"

using namespace porohom;

namespace {

CellGeometry ngon_cell() {
    CellGeometry cell;
    cell.obstacle = make_ngon_obstacle(64, 0.25);
    return cell;
}

void BM_BuildCellMesh(benchmark::State& state) {
    const CellGeometry cell = ngon_cell();
    const int m = static_cast<int>(state.range(0));
    for (auto _ : state) {
        Mesh mesh = build_cell_mesh(cell, m);
        benchmark::DoNotOptimize(mesh.vertices.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildCellMesh)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_AssembleStiffness(benchmark::State& state) {
    const Mesh mesh = build_cell_mesh(ngon_cell(), static_cast<int>(state.range(0)));
    for (auto _ : state) {
        SparseMatrix k = assemble_stiffness(mesh, identity_tensor());
        benchmark::DoNotOptimize(k.values().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(mesh.triangles.size()));
}
BENCHMARK(BM_AssembleStiffness)->RangeMultiplier(2)->Range(16, 128);

void BM_CellCorrector(benchmark::State& state) {
    const Mesh mesh = build_cell_mesh(ngon_cell(), static_cast<int>(state.range(0)));
    for (auto _ : state) {
        CorrectorField w = solve_cell_corrector(mesh, 1, 1e-10);
        benchmark::DoNotOptimize(w.values.data());
    }
}
BENCHMARK(BM_CellCorrector)->RangeMultiplier(2)->Range(16, 64)->Unit(benchmark::kMillisecond);

void BM_DnsRun(benchmark::State& state) {
    const double eps = 1.0 / static_cast<double>(state.range(0));
    const Mesh mesh = build_perforated_mesh(DomainSpec{1.0, eps}, ngon_cell(), 8);
    ProblemData data;
    data.kappa = 1.0;
    data.T = 0.1;
    data.f = [](double x, double y, double) { return x + y; };
    data.g = [](double, double, double) { return 1.0; };
    data.u0 = [](double, double) { return 0.0; };
    for (auto _ : state) {
        TransientSolution sol = run_dns(mesh, data, TimeGrid{0.1, 10}, eps);
        benchmark::DoNotOptimize(sol.values.back().data());
    }
}
BENCHMARK(BM_DnsRun)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_InterpolateP1(benchmark::State& state) {
    const Mesh mesh = build_perforated_mesh(DomainSpec{1.0, 0.125}, CellGeometry{}, 8);
    std::vector<double> vals(mesh.vertices.size());
    for (std::size_t v = 0; v < vals.size(); ++v) vals[v] = mesh.vertices[v].x;
    std::vector<Vec2> pts;
    for (int i = 0; i < 1000; ++i)
        pts.push_back({0.01 + 0.98 * (i % 37) / 37.0, 0.01 + 0.98 * (i % 61) / 61.0});
    for (auto _ : state) {
        std::vector<double> out = interpolate_p1(mesh, vals, pts);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_InterpolateP1);

} // namespace

BENCHMARK_MAIN();
