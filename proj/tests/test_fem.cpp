// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "porohom/fem.hpp"

using namespace porohom;

namespace {

Mesh unit_right_triangle() {
    Mesh mesh;
    mesh.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    mesh.triangles = {{0, 1, 2}};
    return mesh;
}

// dense Cholesky oracle for small SPD systems
std::vector<double> dense_solve_spd(std::vector<std::vector<double>> a, std::vector<double> b) {
    const std::size_t n = b.size();
    std::vector<std::vector<double>> l(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                REQUIRE(s > 0.0);
                l[i][j] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i][k] * y[k];
        y[i] = s / l[i][i];
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l[k][ii] * x[k];
        x[ii] = s / l[ii][ii];
    }
    return x;
}

} // namespace

TEST_CASE("P1 stiffness on the unit right triangle") {
    const Mesh mesh = unit_right_triangle();
    const SparseMatrix k = assemble_stiffness(mesh, identity_tensor());
    const double expected[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(k.coeff(i, j) == doctest::Approx(expected[i][j]).epsilon(1e-14));

    SUBCASE("doubling the tensor doubles every entry exactly") {
        const SparseMatrix k2 = assemble_stiffness(mesh, Tensor2{{{2.0, 0.0}, {0.0, 2.0}}});
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(k2.coeff(i, j) == 2.0 * k.coeff(i, j));
    }
    SUBCASE("non-symmetric tensor is rejected") {
        CHECK_THROWS_AS(assemble_stiffness(mesh, Tensor2{{{1.0, 0.2}, {0.1, 1.0}}}),
                        std::invalid_argument);
    }
}

TEST_CASE("constants lie in the stiffness kernel") {
    const Mesh mesh = build_cell_mesh(CellGeometry{}, 6);
    const SparseMatrix k = assemble_stiffness(mesh, identity_tensor());
    const std::vector<double> ones(mesh.vertices.size(), 1.0);
    const std::vector<double> k1 = k.multiply(ones);
    for (double v : k1) CHECK(std::abs(v) <= 1e-12);
    CHECK(k.max_asymmetry() == 0.0);

    std::mt19937 rng(12345);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> x(mesh.vertices.size());
        for (double& xi : x) xi = gauss(rng);
        CHECK(k.bilinear(x, x) >= -1e-12);
    }
}

TEST_CASE("P1 mass matrices") {
    Mesh mesh = unit_right_triangle();
    const SparseMatrix m = assemble_mass(mesh);
    const double s = 0.5;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(m.coeff(i, j) == doctest::Approx(s / 12.0 * (i == j ? 2.0 : 1.0)).epsilon(1e-14));

    SUBCASE("partition of unity gives the area") {
        const Mesh cellmesh = build_cell_mesh(CellGeometry{}, 5);
        const SparseMatrix mc = assemble_mass(cellmesh);
        const std::vector<double> ones(cellmesh.vertices.size(), 1.0);
        CHECK(mc.bilinear(ones, ones) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(mc.max_asymmetry() == 0.0);
    }
    SUBCASE("two disjoint triangles assemble block-diagonally") {
        Mesh two;
        two.vertices = {{0, 0}, {1, 0}, {0, 1}, {5, 5}, {6, 5}, {5, 6}};
        two.triangles = {{0, 1, 2}, {3, 4, 5}};
        const SparseMatrix m2 = assemble_mass(two);
        for (int i = 0; i < 3; ++i)
            for (int j = 3; j < 6; ++j) CHECK(m2.coeff(i, j) == 0.0);
    }
}

TEST_CASE("boundary mass on a tagged edge") {
    Mesh mesh = unit_right_triangle();
    mesh.edge_tags[{0, 1}] = EdgeTag::obstacle; // length 1
    const SparseMatrix b = assemble_boundary_mass(mesh, EdgeTag::obstacle);
    CHECK(b.coeff(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(b.coeff(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(b.coeff(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(b.coeff(2, 2) == 0.0);

    SUBCASE("no tagged edges yields the zero matrix") {
        const SparseMatrix z = assemble_boundary_mass(mesh, EdgeTag::exterior_dirichlet);
        CHECK(z.nnz() == 0);
    }
    SUBCASE("partition of unity gives the tagged perimeter") {
        const Mesh cellmesh = build_cell_mesh(
            CellGeometry{make_square_obstacle(0.5), 0.05}, 8);
        const SparseMatrix bc = assemble_boundary_mass(cellmesh, EdgeTag::obstacle);
        const std::vector<double> ones(cellmesh.vertices.size(), 1.0);
        CHECK(bc.bilinear(ones, ones) == doctest::Approx(2.0).epsilon(1e-13));
    }
}

TEST_CASE("consistent load vector") {
    const Mesh mesh = build_cell_mesh(CellGeometry{}, 4);
    const std::vector<double> zero(mesh.vertices.size(), 0.0);
    for (double v : assemble_load(mesh, zero)) CHECK(v == 0.0);

    const std::vector<double> ones(mesh.vertices.size(), 1.0);
    const std::vector<double> load = assemble_load(mesh, ones);
    const SparseMatrix m = assemble_mass(mesh);
    const std::vector<double> rows = m.row_sums();
    double total = 0.0;
    for (std::size_t i = 0; i < load.size(); ++i) {
        CHECK(load[i] == doctest::Approx(rows[i]).epsilon(1e-13));
        total += load[i];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));

    std::mt19937 rng(7);
    std::normal_distribution<double> gauss;
    std::vector<double> f(mesh.vertices.size());
    for (double& v : f) v = gauss(rng);
    const std::vector<double> lf = assemble_load(mesh, f);
    std::vector<double> f3 = f;
    for (double& v : f3) v *= 3.0;
    const std::vector<double> lf3 = assemble_load(mesh, f3);
    for (std::size_t i = 0; i < lf.size(); ++i)
        CHECK(lf3[i] == doctest::Approx(3.0 * lf[i]).epsilon(1e-13));

    CHECK_THROWS_AS(assemble_load(mesh, std::vector<double>(3, 1.0)), std::invalid_argument);
}

TEST_CASE("constraint condensation") {
    SUBCASE("no constraints is the identity transformation") {
        const Mesh mesh = unit_right_triangle();
        const SparseMatrix k = assemble_stiffness(mesh, identity_tensor());
        const DofMap dofs = DofMap::build(3, {}, {});
        const auto [kr, br] = apply_constraints(k, {1.0, 2.0, 3.0}, dofs);
        CHECK(kr.dim() == 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(kr.coeff(i, j) == k.coeff(i, j));
        CHECK(br == std::vector<double>{1.0, 2.0, 3.0});
    }
    SUBCASE("all-Dirichlet system returns the boundary data") {
        const Mesh mesh = unit_right_triangle();
        const SparseMatrix k = assemble_stiffness(mesh, identity_tensor());
        const DofMap dofs = DofMap::build(3, {}, {0, 1, 2}, {4.0, 5.0, 6.0});
        const auto [kr, br] = apply_constraints(k, {0.0, 0.0, 0.0}, dofs);
        CHECK(kr.dim() == 0);
        const std::vector<double> u = dofs.expand({});
        CHECK(u == std::vector<double>{4.0, 5.0, 6.0});
    }
    SUBCASE("periodic pair condensation matches hand elimination") {
        // 3-dof chain with pair (2 -> 0): fold row/col 2 into 0
        std::vector<Triplet> trip = {{0, 0, 2.0}, {1, 1, 2.0}, {2, 2, 2.0},
                                     {0, 1, -1.0}, {1, 0, -1.0}, {1, 2, -1.0}, {2, 1, -1.0}};
        const SparseMatrix a = SparseMatrix::from_triplets(3, std::move(trip));
        const DofMap dofs = DofMap::build(3, {{2, 0}}, {});
        const auto [ar, br] = apply_constraints(a, {1.0, 0.0, 2.0}, dofs);
        REQUIRE(ar.dim() == 2);
        // hand elimination: K00' = K00 + K02 + K20 + K22 = 4, K01' = K01 + K21 = -2
        CHECK(ar.coeff(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(ar.coeff(0, 1) == doctest::Approx(-2.0).epsilon(1e-15));
        CHECK(ar.coeff(1, 1) == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(br[0] == doctest::Approx(3.0).epsilon(1e-15));
        const CgResult sol = solve_cg(ar, br);
        const std::vector<double> u = dofs.expand(sol.x);
        CHECK(u[2] == u[0]); // exact equality by construction
    }
    SUBCASE("slave mapped to a Dirichlet vertex is rejected") {
        CHECK_THROWS_AS(DofMap::build(3, {{2, 0}}, {0}), constraint_error);
    }
}

TEST_CASE("conjugate gradients") {
    SUBCASE("identity converges immediately") {
        const SparseMatrix eye = SparseMatrix::from_triplets(
            3, {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
        const CgResult r = solve_cg(eye, {1.0, -2.0, 3.0});
        CHECK(r.iterations == 1);
        CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.x[1] == doctest::Approx(-2.0).epsilon(1e-12));
        CHECK(r.x[2] == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("2x2 system with known solution") {
        const SparseMatrix a =
            SparseMatrix::from_triplets(2, {{0, 0, 2.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 2.0}});
        const CgResult r = solve_cg(a, {3.0, 3.0});
        CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("diagonal system inverts entrywise") {
        std::vector<Triplet> trip;
        std::vector<double> b;
        for (int i = 0; i < 8; ++i) {
            trip.push_back({i, i, static_cast<double>(i + 1)});
            b.push_back(static_cast<double>(2 * i + 1));
        }
        const SparseMatrix d = SparseMatrix::from_triplets(8, std::move(trip));
        const CgResult r = solve_cg(d, b);
        for (int i = 0; i < 8; ++i)
            CHECK(r.x[static_cast<std::size_t>(i)] ==
                  doctest::Approx(b[static_cast<std::size_t>(i)] / (i + 1)).epsilon(1e-10));
    }
    SUBCASE("random SPD systems against the dense oracle, energy monotone") {
        std::mt19937 rng(2024);
        std::normal_distribution<double> gauss;
        for (int trial = 0; trial < 20; ++trial) {
            const int n = 10 + static_cast<int>(rng() % 41);
            std::vector<std::vector<double>> dense(static_cast<std::size_t>(n),
                                                   std::vector<double>(static_cast<std::size_t>(n), 0.0));
            std::vector<std::vector<double>> r(dense);
            for (auto& row : r)
                for (double& v : row) v = gauss(rng);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = i == j ? n : 0.0;
                    for (int k = 0; k < n; ++k)
                        s += r[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] *
                             r[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
                    dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = s;
                }
            std::vector<Triplet> trip;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    trip.push_back({i, j, dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]});
            const SparseMatrix a = SparseMatrix::from_triplets(n, std::move(trip));
            std::vector<double> b(static_cast<std::size_t>(n));
            for (double& v : b) v = gauss(rng);

            CgOptions opt;
            opt.tol = 1e-12;
            const CgResult sol = solve_cg(a, b, opt);
            const std::vector<double> exact = dense_solve_spd(dense, b);
            for (int i = 0; i < n; ++i)
                CHECK(std::abs(sol.x[static_cast<std::size_t>(i)] - exact[static_cast<std::size_t>(i)]) <=
                      1e-8);
            for (std::size_t k = 1; k < sol.energy_trace.size(); ++k)
                CHECK(sol.energy_trace[k] <= sol.energy_trace[k - 1] + 1e-12);
        }
    }
    SUBCASE("iteration cap raises a convergence error") {
        const SparseMatrix a =
            SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {0, 1, 0.999}, {1, 0, 0.999}, {1, 1, 1.0}});
        CgOptions opt;
        opt.tol = 1e-16;
        opt.maxiter = 1;
        CHECK_THROWS_AS(solve_cg(a, {1.0, 0.0}, opt), convergence_error);
    }
}
