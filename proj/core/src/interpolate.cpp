// SPDX-License-Identifier: Apache-2.0
#include "porohom/interpolate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "porohom/fem.hpp"

namespace porohom {

namespace {

// Uniform bucket grid over the mesh bounding box for point location.
class TriangleLocator {
public:
    explicit TriangleLocator(const Mesh& mesh) : mesh_(mesh) {
        lo_ = hi_ = mesh.vertices.at(0);
        for (const Vec2& v : mesh.vertices) {
            lo_.x = std::min(lo_.x, v.x);
            lo_.y = std::min(lo_.y, v.y);
            hi_.x = std::max(hi_.x, v.x);
            hi_.y = std::max(hi_.y, v.y);
        }
        nx_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(mesh.triangles.size()))));
        buckets_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(nx_));
        for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
            const auto& tr = mesh.triangles[t];
            Vec2 tlo = mesh.vertices[static_cast<std::size_t>(tr[0])];
            Vec2 thi = tlo;
            for (int k = 1; k < 3; ++k) {
                const Vec2 p = mesh.vertices[static_cast<std::size_t>(tr[static_cast<std::size_t>(k)])];
                tlo.x = std::min(tlo.x, p.x);
                tlo.y = std::min(tlo.y, p.y);
                thi.x = std::max(thi.x, p.x);
                thi.y = std::max(thi.y, p.y);
            }
            for (int bx = cell_of(tlo.x, lo_.x, hi_.x); bx <= cell_of(thi.x, lo_.x, hi_.x); ++bx)
                for (int by = cell_of(tlo.y, lo_.y, hi_.y); by <= cell_of(thi.y, lo_.y, hi_.y); ++by)
                    buckets_[static_cast<std::size_t>(by) * static_cast<std::size_t>(nx_) +
                             static_cast<std::size_t>(bx)]
                        .push_back(static_cast<int>(t));
        }
    }

    // Returns (triangle, barycentric coords) or triangle = -1.
    int locate(Vec2 p, std::array<double, 3>& bary) const {
        const int bx = cell_of(p.x, lo_.x, hi_.x);
        const int by = cell_of(p.y, lo_.y, hi_.y);
        if (bx < 0 || bx >= nx_ || by < 0 || by >= nx_) return -1;
        for (int t : buckets_[static_cast<std::size_t>(by) * static_cast<std::size_t>(nx_) +
                              static_cast<std::size_t>(bx)]) {
            const auto& tr = mesh_.triangles[static_cast<std::size_t>(t)];
            const Vec2 a = mesh_.vertices[static_cast<std::size_t>(tr[0])];
            const Vec2 b = mesh_.vertices[static_cast<std::size_t>(tr[1])];
            const Vec2 c = mesh_.vertices[static_cast<std::size_t>(tr[2])];
            const double twice_area = cross(b - a, c - a);
            const double l0 = cross(b - p, c - p) / twice_area;
            const double l1 = cross(c - p, a - p) / twice_area;
            const double l2 = 1.0 - l0 - l1;
            if (l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12) {
                bary = {l0, l1, l2};
                return t;
            }
        }
        return -1;
    }

private:
    int cell_of(double v, double lo, double hi) const {
        const double w = hi - lo;
        if (w <= 0.0) return 0;
        int c = static_cast<int>((v - lo) / w * nx_);
        return std::clamp(c, 0, nx_ - 1);
    }

    const Mesh& mesh_;
    Vec2 lo_, hi_;
    int nx_ = 1;
    std::vector<std::vector<int>> buckets_;
};

} // namespace

std::vector<double> interpolate_p1(const Mesh& src_mesh, const std::vector<double>& src_vals,
                                   const std::vector<Vec2>& points) {
    if (src_vals.size() != src_mesh.vertices.size())
        throw std::invalid_argument("interpolate_p1: one value per source vertex required");
    const TriangleLocator locator(src_mesh);
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        std::array<double, 3> bary{};
        const int t = locator.locate(points[i], bary);
        if (t < 0) throw location_error("interpolate_p1: point outside the source mesh", i);
        const auto& tr = src_mesh.triangles[static_cast<std::size_t>(t)];
        out[i] = bary[0] * src_vals[static_cast<std::size_t>(tr[0])] +
                 bary[1] * src_vals[static_cast<std::size_t>(tr[1])] +
                 bary[2] * src_vals[static_cast<std::size_t>(tr[2])];
    }
    return out;
}

std::pair<double, double> l2_error_on_perforated(const Mesh& dns_mesh,
                                                 const std::vector<double>& dns_vals,
                                                 const Mesh& limit_mesh,
                                                 const std::vector<double>& limit_vals) {
    if (dns_vals.size() != dns_mesh.vertices.size())
        throw std::invalid_argument("l2_error_on_perforated: field/mesh size mismatch");
    const std::vector<double> reference = interpolate_p1(limit_mesh, limit_vals, dns_mesh.vertices);
    const SparseMatrix mass = assemble_mass(dns_mesh);
    std::vector<double> diff(dns_vals.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = dns_vals[i] - reference[i];
    const double abs_err = std::sqrt(std::max(0.0, mass.bilinear(diff, diff)));
    const double ref_norm = std::sqrt(std::max(0.0, mass.bilinear(reference, reference)));
    const double rel_err = ref_norm < 1e-14 ? 0.0 : abs_err / ref_norm;
    return {abs_err, rel_err};
}

} // namespace porohom
