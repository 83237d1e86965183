// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "porohom/geometry.hpp"

using namespace porohom;

namespace {

// independent shoelace / edge-length oracle over a vertex ring
double oracle_area(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

double oracle_perimeter(const std::vector<Vec2>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 d = v[(i + 1) % v.size()] - v[i];
        s += std::sqrt(d.x * d.x + d.y * d.y);
    }
    return s;
}

CellGeometry ngon_cell(int n, double r) {
    CellGeometry cell;
    cell.obstacle = make_ngon_obstacle(n, r);
    return cell;
}

CellGeometry square_cell(double side) {
    CellGeometry cell;
    cell.obstacle = make_square_obstacle(side);
    return cell;
}

std::map<int, int> resolved_masters(const Mesh& mesh) {
    std::map<int, int> root;
    for (const auto& [s, m] : mesh.periodic_pairs) root[s] = m;
    std::map<int, int> out;
    for (const auto& [s, m] : root) {
        int r = m;
        while (root.count(r)) r = root.at(r);
        out[s] = r;
    }
    return out;
}

} // namespace

TEST_CASE("obstacle polygon validation") {
    ObstaclePolygon bowtie{{{-0.2, -0.2}, {0.2, 0.2}, {0.2, -0.2}, {-0.2, 0.2}}};
    CHECK_THROWS_AS(bowtie.validate(0.05), geometry_error);

    ObstaclePolygon clockwise{{{-0.2, -0.2}, {-0.2, 0.2}, {0.2, 0.2}, {0.2, -0.2}}};
    CHECK_THROWS_AS(clockwise.validate(0.05), geometry_error);

    // r = 0.49 leaves less than the default clearance
    CHECK_THROWS_AS(ngon_cell(64, 0.49).validate(), geometry_error);
    CHECK_NOTHROW(ngon_cell(64, 0.25).validate());
}

TEST_CASE("geometric coefficients") {
    const auto [theta_none, sigma_none] = geometric_coefficients(CellGeometry{});
    CHECK(theta_none == 1.0);
    CHECK(sigma_none == 0.0);

    const auto [theta_sq, sigma_sq] = geometric_coefficients(square_cell(0.5));
    CHECK(theta_sq == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(sigma_sq == doctest::Approx(2.0).epsilon(1e-14));

    const CellGeometry cell = ngon_cell(64, 0.25);
    const auto [theta, sigma] = geometric_coefficients(cell);
    // analytic n-gon formulas
    CHECK(theta == doctest::Approx(1.0 - 2.0 * std::sin(M_PI / 32.0)).epsilon(1e-12));
    CHECK(sigma == doctest::Approx(32.0 * std::sin(M_PI / 64.0)).epsilon(1e-12));
    // shoelace / edge-length oracle over the same polygon
    CHECK(theta == doctest::Approx(1.0 - oracle_area(cell.obstacle->vertices)).epsilon(1e-13));
    CHECK(sigma == doctest::Approx(oracle_perimeter(cell.obstacle->vertices)).epsilon(1e-13));
    CHECK(theta == doctest::Approx(0.8039657).epsilon(1e-7));
}

TEST_CASE("ngon coordinates are exactly four-fold symmetric") {
    const ObstaclePolygon p = make_ngon_obstacle(64, 0.25);
    const int q = 16;
    for (int k = 0; k < q; ++k) {
        CHECK(p.vertices[static_cast<std::size_t>(q + k)].x == -p.vertices[static_cast<std::size_t>(k)].y);
        CHECK(p.vertices[static_cast<std::size_t>(q + k)].y == p.vertices[static_cast<std::size_t>(k)].x);
        CHECK(p.vertices[static_cast<std::size_t>(2 * q + k)].x == -p.vertices[static_cast<std::size_t>(k)].x);
        CHECK(p.vertices[static_cast<std::size_t>(2 * q + k)].y == -p.vertices[static_cast<std::size_t>(k)].y);
        CHECK(p.vertices[static_cast<std::size_t>(3 * q + k)].x == p.vertices[static_cast<std::size_t>(k)].y);
        CHECK(p.vertices[static_cast<std::size_t>(3 * q + k)].y == -p.vertices[static_cast<std::size_t>(k)].x);
    }
    // mirror about the x axis maps vertex k to vertex n-k
    for (int k = 1; k < 64; ++k) {
        CHECK(p.vertices[static_cast<std::size_t>(64 - k)].x == p.vertices[static_cast<std::size_t>(k)].x);
        CHECK(p.vertices[static_cast<std::size_t>(64 - k)].y == -p.vertices[static_cast<std::size_t>(k)].y);
    }
}

TEST_CASE("cell mesh without obstacle, m = 4") {
    const Mesh mesh = build_cell_mesh(CellGeometry{}, 4);
    CHECK(mesh.vertices.size() == 25);
    CHECK(mesh.triangles.size() == 32);
    CHECK(mesh.count_tagged_edges(EdgeTag::obstacle) == 0);
    CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-13));

    std::set<int> boundary;
    for (const auto& [e, tag] : mesh.edge_tags) {
        boundary.insert(e.first);
        boundary.insert(e.second);
    }
    CHECK(boundary.size() == 16);
    CHECK(mesh.periodic_pairs.size() == 9);

    // corner class of size 4 under the resolved pairing
    const auto roots = resolved_masters(mesh);
    std::map<int, int> class_size;
    for (const auto& [s, r] : roots) ++class_size[r];
    int corner_root = -1;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
        if (mesh.vertices[v].x == -0.5 && mesh.vertices[v].y == -0.5) corner_root = static_cast<int>(v);
    REQUIRE(corner_root >= 0);
    CHECK(class_size[corner_root] == 3); // three corner slaves chain to it

    // non-corner pairing is a bijection between slave and master traces
    std::set<int> noncorner_masters;
    int noncorner = 0;
    for (const auto& [s, m] : mesh.periodic_pairs) {
        const Vec2 ps = mesh.vertices[static_cast<std::size_t>(s)];
        if (std::abs(std::abs(ps.x) - 0.5) < 1e-12 && std::abs(std::abs(ps.y) - 0.5) < 1e-12) continue;
        ++noncorner;
        CHECK(noncorner_masters.insert(m).second);
    }
    CHECK(noncorner == 6);
}

TEST_CASE("cell mesh with flush square obstacle, m = 8") {
    const Mesh mesh = build_cell_mesh(square_cell(0.5), 8);
    CHECK(mesh.total_area() == doctest::Approx(0.75).epsilon(1e-13));
    CHECK(mesh.vertices.size() == 72);
    CHECK(mesh.triangles.size() == 96);
    CHECK(mesh.count_tagged_edges(EdgeTag::obstacle) == 16);
    CHECK(mesh.tagged_length(EdgeTag::obstacle) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(mesh.count_tagged_loops(EdgeTag::obstacle) == 1);
}

TEST_CASE("cell mesh with 64-gon obstacle, m = 32") {
    const CellGeometry cell = ngon_cell(64, 0.25);
    const Mesh mesh = build_cell_mesh(cell, 32);
    const double expected = 1.0 - 32.0 * 0.25 * 0.25 * std::sin(2.0 * M_PI / 64.0);
    CHECK(mesh.total_area() == doctest::Approx(expected).epsilon(1e-10));
    CHECK(mesh.count_tagged_loops(EdgeTag::obstacle) == 1);
    CHECK(mesh.tagged_length(EdgeTag::obstacle) ==
          doctest::Approx(cell.obstacle->perimeter()).epsilon(1e-10));
    CHECK(mesh.h <= std::sqrt(2.0) / 32.0 + 1e-12);
}

TEST_CASE("area consistency across geometries and subdivisions") {
    for (const CellGeometry& cell :
         {CellGeometry{}, square_cell(0.5), square_cell(0.37), ngon_cell(64, 0.25),
          ngon_cell(12, 0.3), ngon_cell(7, 0.2)}) {
        for (int m : {10, 16}) {
            const Mesh mesh = build_cell_mesh(cell, m);
            const double theta = geometric_coefficients(cell).first;
            CHECK(std::abs(mesh.total_area() - theta) <= 1e-10);
        }
    }
}

TEST_CASE("refinement shrinks the mesh size monotonically") {
    double prev = 1e300;
    for (int m : {8, 16, 32, 64}) {
        const Mesh mesh = build_cell_mesh(ngon_cell(64, 0.25), m);
        CHECK(mesh.h < prev);
        prev = mesh.h;
    }
}

TEST_CASE("clearance precondition against the subdivision") {
    CHECK_THROWS_AS(build_cell_mesh(ngon_cell(64, 0.25), 4), geometry_error);
    CHECK_NOTHROW(build_cell_mesh(ngon_cell(64, 0.25), 8));
    CHECK_THROWS_AS(build_cell_mesh(CellGeometry{}, 1), geometry_error);
}

TEST_CASE("perforated mesh tiling") {
    SUBCASE("no obstacle matches the uniform grid") {
        const Mesh mesh = build_perforated_mesh(DomainSpec{1.0, 0.5}, CellGeometry{}, 2);
        CHECK(mesh.vertices.size() == 25);
        CHECK(mesh.triangles.size() == 32);
        CHECK(mesh.periodic_pairs.empty());
        CHECK(mesh.count_tagged_edges(EdgeTag::obstacle) == 0);
        CHECK(mesh.count_tagged_edges(EdgeTag::exterior_dirichlet) == 16);
        CHECK(mesh.total_area() == doctest::Approx(1.0).epsilon(1e-13));
    }
    SUBCASE("square obstacle area scales with eps^2 per cell") {
        const Mesh mesh = build_perforated_mesh(DomainSpec{1.0, 0.5}, square_cell(0.5), 8);
        CHECK(mesh.total_area() == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("one obstacle loop per cell") {
        const Mesh mesh = build_perforated_mesh(DomainSpec{1.0, 0.25}, ngon_cell(64, 0.25), 8);
        CHECK(mesh.count_tagged_loops(EdgeTag::obstacle) == 16);
        CHECK(mesh.total_area() ==
              doctest::Approx(geometric_coefficients(ngon_cell(64, 0.25)).first).epsilon(1e-10));
    }
    SUBCASE("non-integer cell count is rejected") {
        CHECK_THROWS_AS(build_perforated_mesh(DomainSpec{1.0, 0.3}, CellGeometry{}, 4), config_error);
    }
}

TEST_CASE("mesh dump is deterministic and carries the full record") {
    const Mesh mesh = build_cell_mesh(CellGeometry{}, 4);
    const std::string dump = dump_mesh(mesh);
    CHECK(dump.substr(0, 11) == "mesh 25 32 ");
    CHECK(dump == dump_mesh(build_cell_mesh(CellGeometry{}, 4)));
    CHECK(dump.find("PERIODIC_MASTER") != std::string::npos);
    CHECK(dump.find("PERIODIC_SLAVE") != std::string::npos);
    CHECK(dump.find("\np ") != std::string::npos);
}

TEST_CASE("golden dump of the m = 2 cell mesh") {
    const char* golden =
        "mesh 9 8 8\n"
        "v -0.5 -0.5\nv 0 -0.5\nv 0 0\nv -0.5 0\nv 0.5 -0.5\nv 0.5 0\nv 0 0.5\nv -0.5 0.5\n"
        "v 0.5 0.5\n"
        "t 0 1 2\nt 0 2 3\nt 1 4 2\nt 4 5 2\nt 3 2 7\nt 2 6 7\nt 2 5 8\nt 2 8 6\n"
        "e 0 1 PERIODIC_MASTER\ne 0 3 PERIODIC_MASTER\ne 1 4 PERIODIC_MASTER\n"
        "e 3 7 PERIODIC_MASTER\n"
        "e 4 5 PERIODIC_SLAVE\ne 5 8 PERIODIC_SLAVE\ne 6 7 PERIODIC_SLAVE\ne 6 8 PERIODIC_SLAVE\n"
        "p 4 0\np 5 3\np 8 7\np 6 1\np 7 0\n";
    CHECK(dump_mesh(build_cell_mesh(CellGeometry{}, 2)) == golden);
}
