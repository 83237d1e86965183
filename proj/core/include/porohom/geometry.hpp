// SPDX-License-Identifier: Apache-2.0
////////////////////////////////////////////////////////////////////////////////
// geometry.hpp
//
// Unit-cell and perforated-domain geometry: obstacle polygons on the periodic
// cell Y' = [-1/2,1/2]^2, conforming triangulations built from a structured
// background grid with the obstacle cut out exactly, periodic vertex pairing
// on cell meshes, and the two geometric coefficients
//     theta = |Y'_f| / |Y'|   (fluid area fraction),
//     sigma = |dF'|  / |Y'|   (cell-normalized obstacle perimeter).
// The same polygon defines the mesh, theta and sigma, so every consumer sees
// one consistent geometry.
////////////////////////////////////////////////////////////////////////////////
#ifndef POROHOM_GEOMETRY_HPP
#define POROHOM_GEOMETRY_HPP

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "porohom/common.hpp"

namespace porohom {

enum class EdgeTag { exterior_dirichlet, obstacle, periodic_master, periodic_slave };

const char* edge_tag_name(EdgeTag tag);

// Simple closed polygon, counter-clockwise, in cell coordinates.
struct ObstaclePolygon {
    std::vector<Vec2> vertices;

    double area() const;       // shoelace, positive for CCW
    double perimeter() const;
    bool contains(Vec2 p) const; // strict interior
    double max_abs_coord() const;
    bool is_convex() const;
    // Throws geometry_error on self-intersection, wrong orientation, or a
    // clearance violation (max(|x|,|y|) must stay <= 1/2 - clearance).
    void validate(double clearance) const;
};

ObstaclePolygon make_square_obstacle(double side);
// Regular n-gon with a vertex on the positive x-axis. For n divisible by 4
// the coordinates are generated symmetrically, so the polygon is exactly
// invariant under quarter-turns and axis reflections.
ObstaclePolygon make_ngon_obstacle(int n, double circumradius);

struct CellGeometry {
    std::optional<ObstaclePolygon> obstacle;
    double clearance = 0.05;

    void validate() const;
    std::string describe() const;
};

// Macroscopic domain omega = (0,L)^2 covered by an integer lattice of
// epsilon-cells, so no obstacle meets the outer boundary.
struct DomainSpec {
    double side_length = 1.0;
    double epsilon = 0.25;

    int cells_per_side() const; // throws config_error when L/eps is not integral
};

struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles; // CCW
    std::map<std::pair<int, int>, EdgeTag> edge_tags; // boundary edges, key = (min,max)
    std::vector<std::pair<int, int>> periodic_pairs;  // (slave, master), cell meshes only
    double h = 0.0; // max triangle diameter

    // Provenance, set by the builders; lets downstream consumers recover the
    // exact polygon the mesh was cut against.
    std::optional<CellGeometry> cell;
    std::optional<DomainSpec> domain;
    int subdivision = 0;

    double triangle_area(int t) const;
    double total_area() const;
    int count_tagged_edges(EdgeTag tag) const;
    double tagged_length(EdgeTag tag) const;
    // Connected components of the edges carrying `tag` (obstacle loops).
    int count_tagged_loops(EdgeTag tag) const;
    std::vector<int> tagged_vertices(EdgeTag tag) const;
};

// Triangulates Y' \ F on an m x m background grid. Free squares keep the
// structured split (alternating diagonals); squares crossed by the obstacle
// are retriangulated exactly to the polygon boundary, and fully covered
// squares are dropped. Opposite cell edges carry identical vertex traces, so
// the periodic pairing is total on the outer boundary.
Mesh build_cell_mesh(const CellGeometry& cell, int m);

// Tiles the scaled cell mesh over the lattice covering (0,L)^2 and merges the
// duplicated interface vertices. Outer boundary edges are Dirichlet-tagged,
// every interior hole boundary becomes an obstacle edge, no periodic pairs.
Mesh build_perforated_mesh(const DomainSpec& domain, const CellGeometry& cell, int m);

// (theta, sigma) from the same polygon the meshers consume.
std::pair<double, double> geometric_coefficients(const CellGeometry& cell);

// Conformity audit: positive triangle areas, every edge interior or tagged
// boundary, no hanging vertices on boundary edges, periodic pairs translate
// exactly. Throws geometry_error on the first violation.
void validate_mesh(const Mesh& mesh);

// Text dump (17 significant digits): `mesh nv nt nbe`, then v/t/e/p records.
std::string dump_mesh(const Mesh& mesh);

} // namespace porohom

#endif
