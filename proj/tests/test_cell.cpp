// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "porohom/cell_problem.hpp"

using namespace porohom;

namespace {

CellGeometry square_cell() {
    CellGeometry cell;
    cell.obstacle = make_square_obstacle(0.5);
    return cell;
}

CellGeometry ngon_cell() {
    CellGeometry cell;
    cell.obstacle = make_ngon_obstacle(64, 0.25);
    return cell;
}

// triangle-wise integral of (e_i + grad w_i) . grad w_j, the Galerkin
// orthogonality quantity
double flux_times_gradient(const Mesh& mesh, const CorrectorField& wi, const CorrectorField& wj) {
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tr = mesh.triangles[t];
        const Vec2 p0 = mesh.vertices[static_cast<std::size_t>(tr[0])];
        const Vec2 p1 = mesh.vertices[static_cast<std::size_t>(tr[1])];
        const Vec2 p2 = mesh.vertices[static_cast<std::size_t>(tr[2])];
        const double twice_area = cross(p1 - p0, p2 - p0);
        const std::array<Vec2, 3> grad = {(1.0 / twice_area) * perp(p2 - p1),
                                          (1.0 / twice_area) * perp(p0 - p2),
                                          (1.0 / twice_area) * perp(p1 - p0)};
        Vec2 gi{0, 0}, gj{0, 0};
        for (int v = 0; v < 3; ++v) {
            gi = gi + wi.values[static_cast<std::size_t>(tr[static_cast<std::size_t>(v)])] *
                          grad[static_cast<std::size_t>(v)];
            gj = gj + wj.values[static_cast<std::size_t>(tr[static_cast<std::size_t>(v)])] *
                          grad[static_cast<std::size_t>(v)];
        }
        const Vec2 field = wi.direction == 1 ? Vec2{1.0 + gi.x, gi.y} : Vec2{gi.x, 1.0 + gi.y};
        s += 0.5 * twice_area * dot(field, gj);
    }
    return s;
}

} // namespace

TEST_CASE("obstacle-free cell: correctors vanish and Q is the identity") {
    const Mesh mesh = build_cell_mesh(CellGeometry{}, 16);
    const CorrectorField w1 = solve_cell_corrector(mesh, 1);
    const CorrectorField w2 = solve_cell_corrector(mesh, 2);
    for (double v : w1.values) CHECK(std::abs(v) <= 1e-12);
    for (double v : w2.values) CHECK(std::abs(v) <= 1e-12);

    const EffectiveTensor t = homogenized_matrix(mesh, w1, w2);
    CHECK(std::abs(t.q[0][0] - 1.0) <= 1e-12);
    CHECK(std::abs(t.q[1][1] - 1.0) <= 1e-12);
    CHECK(std::abs(t.q[0][1]) <= 1e-12);
    CHECK(std::abs(t.q[1][0]) <= 1e-12);
    CHECK(t.theta == 1.0);
    CHECK(t.sigma == 0.0);
}

TEST_CASE("cell-problem load is compatible (entries sum to zero)") {
    for (const CellGeometry& cell : {CellGeometry{}, square_cell(), ngon_cell()}) {
        const Mesh mesh = build_cell_mesh(cell, 16);
        for (int dir : {1, 2}) {
            const std::vector<double> b = cell_problem_load(mesh, dir);
            double s = 0.0;
            for (double v : b) s += v;
            CHECK(std::abs(s) <= 1e-12);
        }
    }
}

TEST_CASE("corrector solve: residual, constraints, normalization") {
    const Mesh mesh = build_cell_mesh(ngon_cell(), 16);
    const double cg_tol = 1e-10;
    const CorrectorField w = solve_cell_corrector(mesh, 1, cg_tol);

    SUBCASE("condensed residual meets the solver tolerance") {
        const DofMap dofs = DofMap::from_mesh(mesh, std::nullopt);
        const SparseMatrix k = assemble_stiffness(mesh, identity_tensor());
        const auto [k_red, b_red] = apply_constraints(k, cell_problem_load(mesh, 1), dofs);
        std::vector<double> x_red(static_cast<std::size_t>(dofs.n_free()));
        for (int v = 0; v < dofs.n_vertices(); ++v)
            if (dofs.free_index(v) >= 0)
                x_red[static_cast<std::size_t>(dofs.free_index(v))] = w.values[static_cast<std::size_t>(v)];
        const std::vector<double> kx = k_red.multiply(x_red);
        double rnorm = 0.0, bnorm = 0.0;
        for (std::size_t i = 0; i < kx.size(); ++i) {
            rnorm += (kx[i] - b_red[i]) * (kx[i] - b_red[i]);
            bnorm += b_red[i] * b_red[i];
        }
        CHECK(std::sqrt(rnorm) <= 2.0 * cg_tol * std::sqrt(bnorm));
    }
    SUBCASE("slaves carry master values exactly") {
        for (const auto& [s, m] : mesh.periodic_pairs)
            CHECK(w.values[static_cast<std::size_t>(s)] == w.values[static_cast<std::size_t>(m)]);
    }
    SUBCASE("weighted mean is zero") {
        const std::vector<double> weights = assemble_mass(mesh).row_sums();
        double s = 0.0;
        for (std::size_t v = 0; v < weights.size(); ++v) s += weights[v] * w.values[v];
        CHECK(std::abs(s) <= 1e-10);
    }
}

TEST_CASE("square-obstacle corrector parity at mirrored vertices") {
    const Mesh mesh = build_cell_mesh(square_cell(), 16);
    const CorrectorField w1 = solve_cell_corrector(mesh, 1, 1e-12);

    std::map<std::pair<long long, long long>, int> index;
    auto key = [](Vec2 p) {
        return std::make_pair(llround(p.x * 1e9), llround(p.y * 1e9));
    };
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) index[key(mesh.vertices[v])] = static_cast<int>(v);

    int checked = 0;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const Vec2 p = mesh.vertices[v];
        const auto mx = index.find(key({-p.x, p.y}));
        const auto my = index.find(key({p.x, -p.y}));
        REQUIRE(mx != index.end());
        REQUIRE(my != index.end());
        CHECK(std::abs(w1.values[static_cast<std::size_t>(mx->second)] + w1.values[v]) <= 1e-8);
        CHECK(std::abs(w1.values[static_cast<std::size_t>(my->second)] - w1.values[v]) <= 1e-8);
        ++checked;
    }
    CHECK(checked == static_cast<int>(mesh.vertices.size()));
}

TEST_CASE("homogenized matrix structure and regression values") {
    std::mt19937 rng(99);
    std::normal_distribution<double> gauss;

    SUBCASE("square obstacle at m = 64") {
        const Mesh mesh = build_cell_mesh(square_cell(), 64);
        const EffectiveTensor t = compute_effective_tensor(mesh, 1e-10);
        CHECK(std::abs(t.q[0][0] - t.q[1][1]) <= 1e-6);
        CHECK(std::abs(t.q[0][1]) <= 1e-6);
        CHECK(t.q[0][0] > 0.0);
        CHECK(t.q[0][0] < 0.75);
        // fine-mesh self-oracle: Richardson value from m = 128/256 at tol 1e-12
        CHECK(std::abs(t.q[0][0] - 0.57745453292663773) <= 2.5e-3);
        CHECK(t.min_eigenvalue() > 0.0);
    }
    SUBCASE("64-gon obstacle at m = 64") {
        const Mesh mesh = build_cell_mesh(ngon_cell(), 64);
        const EffectiveTensor t = compute_effective_tensor(mesh, 1e-10);
        const double theta = t.theta;
        CHECK(t.q[0][0] <= theta + 1e-8);
        CHECK(std::abs(t.q[0][1]) <= 1e-6);
        CHECK(std::abs(t.q[0][0] - 0.67206499724484903) <= 5e-4);
        for (int trial = 0; trial < 100; ++trial) {
            Vec2 xi{gauss(rng), gauss(rng)};
            const double n = norm(xi);
            if (n < 1e-8) continue;
            xi = (1.0 / n) * xi;
            const double qxx = xi.x * (t.q[0][0] * xi.x + t.q[0][1] * xi.y) +
                               xi.y * (t.q[1][0] * xi.x + t.q[1][1] * xi.y);
            CHECK(qxx <= theta + 1e-8);
            CHECK(qxx > 0.0);
        }
    }
}

TEST_CASE("Galerkin orthogonality ties the long and short forms together") {
    const double cg_tol = 1e-10;
    const Mesh mesh = build_cell_mesh(ngon_cell(), 32);
    const CorrectorField w1 = solve_cell_corrector(mesh, 1, cg_tol);
    const CorrectorField w2 = solve_cell_corrector(mesh, 2, cg_tol);
    for (const CorrectorField* wi : {&w1, &w2})
        for (const CorrectorField* wj : {&w1, &w2})
            CHECK(std::abs(flux_times_gradient(mesh, *wi, *wj)) <= 10.0 * cg_tol);
    CHECK_NOTHROW(homogenized_matrix(mesh, w1, w2, cg_tol));
}

TEST_CASE("axis relabeling symmetry on 90-degree-symmetric obstacles") {
    for (const CellGeometry& cell : {square_cell(), ngon_cell()}) {
        const Mesh mesh = build_cell_mesh(cell, 32);
        const EffectiveTensor t = compute_effective_tensor(mesh, 1e-12);
        CHECK(std::abs(t.q[0][0] - t.q[1][1]) <= 1e-8);
        CHECK(std::abs(t.q[0][1] - t.q[1][0]) <= 1e-8);
    }
}

TEST_CASE("argument errors") {
    const Mesh mesh = build_cell_mesh(ngon_cell(), 8);
    const CorrectorField w1 = solve_cell_corrector(mesh, 1);
    const CorrectorField w2 = solve_cell_corrector(mesh, 2);
    CHECK_THROWS_AS(solve_cell_corrector(mesh, 3), std::invalid_argument);
    CHECK_THROWS_AS(homogenized_matrix(mesh, w2, w2), std::invalid_argument);
    Mesh no_pairs = mesh;
    no_pairs.periodic_pairs.clear();
    CHECK_THROWS_AS(solve_cell_corrector(no_pairs, 1), constraint_error);
    CorrectorField short_w = w1;
    short_w.values.pop_back();
    CHECK_THROWS_AS(homogenized_matrix(mesh, short_w, w2), std::invalid_argument);
}
