// SPDX-License-Identifier: Apache-2.0
#ifndef POROHOM_INTERPOLATE_HPP
#define POROHOM_INTERPOLATE_HPP

#include <utility>
#include <vector>

#include "porohom/geometry.hpp"

namespace porohom {

// P1 barycentric interpolation of a nodal field at arbitrary points. Every
// query must land inside the source mesh up to a 1e-12 barycentric tolerance;
// otherwise a location_error carrying the point index is thrown.
std::vector<double> interpolate_p1(const Mesh& src_mesh, const std::vector<double>& src_vals,
                                   const std::vector<Vec2>& points);

// L2 distance on the perforated domain between a field on the perforated
// mesh and a field on the covering unperforated mesh, weighted by the
// perforated mass matrix: (absolute, relative) with relative = 0 when the
// reference norm is below 1e-14.
std::pair<double, double> l2_error_on_perforated(const Mesh& dns_mesh,
                                                 const std::vector<double>& dns_vals,
                                                 const Mesh& limit_mesh,
                                                 const std::vector<double>& limit_vals);

} // namespace porohom

#endif
