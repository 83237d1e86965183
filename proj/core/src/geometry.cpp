// SPDX-License-Identifier: Apache-2.0
#include "porohom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

namespace porohom {

namespace {

constexpr double kSnapTol = 1e-12;

// ---------------------------------------------------------------- polygons

double signed_area(const std::vector<Vec2>& v) {
    double s = 0.0;
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % n];
        s += cross(a, b);
    }
    return 0.5 * s;
}

int orientation_sign(Vec2 a, Vec2 b, Vec2 c, double tol) {
    const double cr = cross(b - a, c - a);
    if (cr > tol) return 1;
    if (cr < -tol) return -1;
    return 0;
}

bool segments_properly_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
    const double scale = std::max({norm(p2 - p1), norm(q2 - q1), 1e-30});
    const double tol = 1e-14 * scale * scale;
    const int o1 = orientation_sign(p1, p2, q1, tol);
    const int o2 = orientation_sign(p1, p2, q2, tol);
    const int o3 = orientation_sign(q1, q2, p1, tol);
    const int o4 = orientation_sign(q1, q2, p2, tol);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

} // namespace

const char* edge_tag_name(EdgeTag tag) {
    switch (tag) {
        case EdgeTag::exterior_dirichlet: return "EXTERIOR_DIRICHLET";
        case EdgeTag::obstacle: return "OBSTACLE";
        case EdgeTag::periodic_master: return "PERIODIC_MASTER";
        case EdgeTag::periodic_slave: return "PERIODIC_SLAVE";
    }
    return "?";
}

double ObstaclePolygon::area() const { return signed_area(vertices); }

double ObstaclePolygon::perimeter() const {
    double s = 0.0;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) s += norm(vertices[(i + 1) % n] - vertices[i]);
    return s;
}

bool ObstaclePolygon::contains(Vec2 p) const {
    bool in = false;
    const std::size_t n = vertices.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xint) in = !in;
        }
    }
    return in;
}

double ObstaclePolygon::max_abs_coord() const {
    double m = 0.0;
    for (const Vec2& v : vertices) m = std::max({m, std::abs(v.x), std::abs(v.y)});
    return m;
}

bool ObstaclePolygon::is_convex() const {
    const std::size_t n = vertices.size();
    const double tol = 1e-14;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = vertices[i];
        const Vec2& b = vertices[(i + 1) % n];
        const Vec2& c = vertices[(i + 2) % n];
        if (cross(b - a, c - b) < -tol) return false;
    }
    return true;
}

void ObstaclePolygon::validate(double clearance) const {
    const std::size_t n = vertices.size();
    if (n < 3) throw geometry_error("obstacle polygon needs at least 3 vertices");
    for (const Vec2& v : vertices)
        if (!std::isfinite(v.x) || !std::isfinite(v.y))
            throw geometry_error("obstacle polygon has non-finite coordinates");
    if (signed_area(vertices) <= 0.0)
        throw geometry_error("obstacle polygon must be counter-clockwise with positive area");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_properly_intersect(vertices[i], vertices[(i + 1) % n],
                                            vertices[j], vertices[(j + 1) % n]))
                throw geometry_error("obstacle polygon is self-intersecting");
        }
    }
    if (max_abs_coord() > 0.5 - clearance + 1e-15)
        throw geometry_error("obstacle violates the cell clearance: max(|x|,|y|) > 1/2 - delta");
}

ObstaclePolygon make_square_obstacle(double side) {
    if (!(side > 0.0)) throw geometry_error("square obstacle side must be positive");
    const double s = 0.5 * side;
    return ObstaclePolygon{{{-s, -s}, {s, -s}, {s, s}, {-s, s}}};
}

ObstaclePolygon make_ngon_obstacle(int n, double circumradius) {
    if (n < 3) throw geometry_error("regular obstacle polygon needs n >= 3");
    if (!(circumradius > 0.0)) throw geometry_error("obstacle circumradius must be positive");
    const double r = circumradius;
    std::vector<Vec2> v(static_cast<std::size_t>(n));
    if (n % 4 == 0) {
        const int q = n / 4;
        v[0] = {r, 0.0};
        if (n % 8 == 0) {
            const int o = n / 8;
            for (int k = 1; k < o; ++k) {
                const double a = 2.0 * M_PI * k / n;
                v[k] = {r * std::cos(a), r * std::sin(a)};
            }
            const double d = r * std::sqrt(0.5);
            v[o] = {d, d};
            for (int k = 1; k < o; ++k) v[q - k] = {v[k].y, v[k].x};
        } else {
            for (int k = 1; k < q; ++k) {
                const double a = 2.0 * M_PI * k / n;
                v[k] = {r * std::cos(a), r * std::sin(a)};
            }
        }
        // remaining quadrants by exact quarter turns
        for (int k = 0; k < q; ++k) {
            v[q + k] = {-v[k].y, v[k].x};
            v[2 * q + k] = {-v[k].x, -v[k].y};
            v[3 * q + k] = {v[k].y, -v[k].x};
        }
    } else {
        for (int k = 0; k < n; ++k) {
            const double a = 2.0 * M_PI * k / n;
            v[k] = {r * std::cos(a), r * std::sin(a)};
        }
        v[0] = {r, 0.0};
    }
    return ObstaclePolygon{std::move(v)};
}

void CellGeometry::validate() const {
    if (!(clearance > 0.0) || clearance >= 0.5)
        throw geometry_error("cell clearance must lie in (0, 1/2)");
    if (obstacle) obstacle->validate(clearance);
}

std::string CellGeometry::describe() const {
    if (!obstacle) return "none";
    char buf[96];
    std::snprintf(buf, sizeof buf, "polygon(%zu)", obstacle->vertices.size());
    return buf;
}

int DomainSpec::cells_per_side() const {
    std::vector<std::string> bad;
    if (!(side_length > 0.0)) bad.push_back("domain.L must be positive");
    if (!(epsilon > 0.0)) bad.push_back("eps must be positive");
    if (!bad.empty()) throw config_error(bad);
    const double ratio = side_length / epsilon;
    const long k = std::lround(ratio);
    if (k < 1 || std::abs(ratio - static_cast<double>(k)) > 1e-9 * std::max(1.0, ratio))
        throw config_error({"L/eps is not a positive integer (L=" + std::to_string(side_length) +
                            ", eps=" + std::to_string(epsilon) + ")"});
    return static_cast<int>(k);
}

// ------------------------------------------------------------ mesh helpers

double Mesh::triangle_area(int t) const {
    const auto& tr = triangles[static_cast<std::size_t>(t)];
    const Vec2& a = vertices[static_cast<std::size_t>(tr[0])];
    const Vec2& b = vertices[static_cast<std::size_t>(tr[1])];
    const Vec2& c = vertices[static_cast<std::size_t>(tr[2])];
    return 0.5 * cross(b - a, c - a);
}

double Mesh::total_area() const {
    double s = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) s += triangle_area(static_cast<int>(t));
    return s;
}

int Mesh::count_tagged_edges(EdgeTag tag) const {
    int n = 0;
    for (const auto& [e, t] : edge_tags)
        if (t == tag) ++n;
    return n;
}

double Mesh::tagged_length(EdgeTag tag) const {
    double s = 0.0;
    for (const auto& [e, t] : edge_tags)
        if (t == tag)
            s += norm(vertices[static_cast<std::size_t>(e.second)] -
                      vertices[static_cast<std::size_t>(e.first)]);
    return s;
}

std::vector<int> Mesh::tagged_vertices(EdgeTag tag) const {
    std::vector<char> seen(vertices.size(), 0);
    for (const auto& [e, t] : edge_tags)
        if (t == tag) seen[static_cast<std::size_t>(e.first)] = seen[static_cast<std::size_t>(e.second)] = 1;
    std::vector<int> out;
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i]) out.push_back(static_cast<int>(i));
    return out;
}

int Mesh::count_tagged_loops(EdgeTag tag) const {
    std::vector<int> parent(vertices.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    };
    std::vector<char> involved(vertices.size(), 0);
    for (const auto& [e, t] : edge_tags) {
        if (t != tag) continue;
        involved[static_cast<std::size_t>(e.first)] = involved[static_cast<std::size_t>(e.second)] = 1;
        parent[static_cast<std::size_t>(find(e.first))] = find(e.second);
    }
    int loops = 0;
    for (std::size_t v = 0; v < vertices.size(); ++v)
        if (involved[v] && find(static_cast<int>(v)) == static_cast<int>(v)) ++loops;
    return loops;
}

// ------------------------------------------------------------ vertex store

namespace {

class VertexStore {
public:
    explicit VertexStore(double tol) : tol_(tol), cell_(2.0 * tol) {}

    int add(Vec2 p) {
        const long long qx = static_cast<long long>(std::floor(p.x / cell_));
        const long long qy = static_cast<long long>(std::floor(p.y / cell_));
        for (long long dx = -1; dx <= 1; ++dx) {
            for (long long dy = -1; dy <= 1; ++dy) {
                auto it = buckets_.find(key(qx + dx, qy + dy));
                if (it == buckets_.end()) continue;
                for (int id : it->second) {
                    const Vec2 q = pts_[static_cast<std::size_t>(id)];
                    if (std::abs(q.x - p.x) <= tol_ && std::abs(q.y - p.y) <= tol_) return id;
                }
            }
        }
        const int id = static_cast<int>(pts_.size());
        pts_.push_back(p);
        buckets_[key(qx, qy)].push_back(id);
        return id;
    }

    std::vector<Vec2> take() { return std::move(pts_); }

private:
    static long long key(long long qx, long long qy) {
        return qx * 73856093LL ^ qy * 19349663LL;
    }
    double tol_;
    double cell_;
    std::vector<Vec2> pts_;
    std::unordered_map<long long, std::vector<int>> buckets_;
};

// --------------------------------------------------- box clipping & pieces

Vec2 cut_vertical(Vec2 a, Vec2 b, double c) {
    const double t = (c - a.x) / (b.x - a.x);
    return {c, a.y + t * (b.y - a.y)};
}

Vec2 cut_horizontal(Vec2 a, Vec2 b, double c) {
    const double t = (c - a.y) / (b.y - a.y);
    return {a.x + t * (b.x - a.x), c};
}

void dedupe_ring(std::vector<Vec2>& v) {
    std::vector<Vec2> out;
    for (const Vec2& p : v) {
        if (!out.empty() && std::abs(out.back().x - p.x) <= kSnapTol &&
            std::abs(out.back().y - p.y) <= kSnapTol)
            continue;
        out.push_back(p);
    }
    while (out.size() > 1 && std::abs(out.front().x - out.back().x) <= kSnapTol &&
           std::abs(out.front().y - out.back().y) <= kSnapTol)
        out.pop_back();
    v = std::move(out);
}

// One Sutherland-Hodgman pass: keep the side where sign*(coord - c) <= 0.
std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, int axis, double c, double sign) {
    std::vector<Vec2> out;
    const std::size_t n = poly.size();
    out.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 cur = poly[i];
        const Vec2 nxt = poly[(i + 1) % n];
        const double sc = sign * ((axis == 0 ? cur.x : cur.y) - c);
        const double sn = sign * ((axis == 0 ? nxt.x : nxt.y) - c);
        const bool cin = sc <= 0.0;
        const bool nin = sn <= 0.0;
        if (cin) out.push_back(cur);
        if (cin != nin) out.push_back(axis == 0 ? cut_vertical(cur, nxt, c) : cut_horizontal(cur, nxt, c));
    }
    return out;
}

std::vector<Vec2> clip_to_box(const std::vector<Vec2>& poly,
                              double x0, double x1, double y0, double y1) {
    std::vector<Vec2> g = clip_half_plane(poly, 0, x0, -1.0);
    if (g.size() >= 3) g = clip_half_plane(g, 0, x1, 1.0);
    if (g.size() >= 3) g = clip_half_plane(g, 1, y0, -1.0);
    if (g.size() >= 3) g = clip_half_plane(g, 1, y1, 1.0);
    dedupe_ring(g);
    if (g.size() < 3) g.clear();
    return g;
}

enum SquareClass : char { kFree, kCovered, kCut };

// Pieces of square \ obstacle for a cut square, each a CCW simple polygon.
// The square boundary portion is stitched to the obstacle chains at the
// clip crossings, so neighbouring squares subdivide shared edges identically.
std::vector<std::vector<Vec2>> cut_square_pieces(const ObstaclePolygon& F,
                                                 double x0, double x1, double y0, double y1) {
    std::vector<Vec2> g = clip_to_box(F.vertices, x0, x1, y0, y1);
    if (g.size() < 3)
        throw geometry_error("mesher: inconsistent cut-square classification");
    for (Vec2& p : g) {
        if (std::abs(p.x - x0) <= kSnapTol) p.x = x0;
        if (std::abs(p.x - x1) <= kSnapTol) p.x = x1;
        if (std::abs(p.y - y0) <= kSnapTol) p.y = y0;
        if (std::abs(p.y - y1) <= kSnapTol) p.y = y1;
    }
    dedupe_ring(g);
    if (g.size() < 3)
        throw geometry_error("mesher: obstacle intersection degenerates after snapping");

    const std::size_t n = g.size();
    auto side_mask = [&](const Vec2& p) {
        int m = 0;
        if (p.x == x0) m |= 1;
        if (p.x == x1) m |= 2;
        if (p.y == y0) m |= 4;
        if (p.y == y1) m |= 8;
        return m;
    };
    std::vector<int> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = side_mask(g[i]);

    std::vector<char> edge_on_box(n);
    int n_on_box = 0;
    for (std::size_t i = 0; i < n; ++i) {
        edge_on_box[i] = (mask[i] & mask[(i + 1) % n]) != 0;
        n_on_box += edge_on_box[i];
    }
    if (n_on_box == 0)
        throw geometry_error("mesher: obstacle not resolved by the subdivision (increase m)");
    if (n_on_box == static_cast<int>(n))
        throw geometry_error("mesher: cut square is fully covered; classification inconsistent");

    // Maximal runs of interior (obstacle-boundary) edges.
    struct Chain { std::vector<Vec2> pts; };
    std::vector<Chain> chains;
    std::size_t start = 0;
    while (!edge_on_box[start]) start = (start + n - 1) % n; // an on-box edge exists
    std::size_t i = start;
    do {
        if (!edge_on_box[i]) {
            Chain ch;
            ch.pts.push_back(g[i]);
            while (!edge_on_box[i]) {
                ch.pts.push_back(g[(i + 1) % n]);
                i = (i + 1) % n;
            }
            chains.push_back(std::move(ch));
        } else {
            i = (i + 1) % n;
        }
    } while (i != start);

    // Square-boundary node cycle: the four corners plus all chain endpoints,
    // ordered counter-clockwise.
    const double wx = x1 - x0;
    const double wy = y1 - y0;
    auto boundary_param = [&](const Vec2& p) {
        if (p.y == y0 && p.x != x1) return p.x - x0;
        if (p.x == x1 && p.y != y1) return wx + (p.y - y0);
        if (p.y == y1 && p.x != x0) return wx + wy + (x1 - p.x);
        if (p.x == x0) return 2.0 * wx + wy + (y1 - p.y);
        throw geometry_error("mesher: chain endpoint not on the square boundary");
    };

    struct Node {
        Vec2 pos;
        double param;
        int chain_start = -1; // chain whose first point is here
        int chain_end = -1;   // chain whose last point is here
    };
    std::vector<Node> nodes;
    auto node_at = [&](Vec2 p) -> Node& {
        for (Node& nd : nodes)
            if (nd.pos.x == p.x && nd.pos.y == p.y) return nd;
        nodes.push_back({p, boundary_param(p), -1, -1});
        return nodes.back();
    };
    node_at({x0, y0});
    node_at({x1, y0});
    node_at({x1, y1});
    node_at({x0, y1});
    for (std::size_t c = 0; c < chains.size(); ++c) {
        const Vec2 f = chains[c].pts.front();
        const Vec2 l = chains[c].pts.back();
        if (f.x == l.x && f.y == l.y)
            throw geometry_error("mesher: obstacle touches the grid in a single point");
        Node& na = node_at(f);
        if (na.chain_start >= 0)
            throw geometry_error("mesher: coincident obstacle crossings on a square edge");
        na.chain_start = static_cast<int>(c);
        Node& nb = node_at(chains[c].pts.back());
        if (nb.chain_end >= 0)
            throw geometry_error("mesher: coincident obstacle crossings on a square edge");
        nb.chain_end = static_cast<int>(c);
    }
    std::sort(nodes.begin(), nodes.end(),
              [](const Node& a, const Node& b) { return a.param < b.param; });
    const std::size_t nn = nodes.size();

    std::vector<char> seg_free(nn);
    for (std::size_t k = 0; k < nn; ++k) {
        const Vec2 mid = 0.5 * (nodes[k].pos + nodes[(k + 1) % nn].pos);
        seg_free[k] = !F.contains(mid);
    }

    // Stitch components: reversed chain, then the free arc from its start
    // until the next chain end, and so on until the cycle closes.
    std::vector<char> used(chains.size(), 0);
    std::vector<std::vector<Vec2>> pieces;
    auto node_index = [&](const Vec2& p) {
        for (std::size_t k = 0; k < nn; ++k)
            if (nodes[k].pos.x == p.x && nodes[k].pos.y == p.y) return k;
        throw geometry_error("mesher: lost a chain endpoint");
    };
    for (std::size_t c0 = 0; c0 < chains.size(); ++c0) {
        if (used[c0]) continue;
        std::vector<Vec2> poly;
        std::size_t c = c0;
        do {
            used[c] = 1;
            const auto& pts = chains[c].pts;
            poly.insert(poly.end(), pts.rbegin(), pts.rend());
            std::size_t k = node_index(pts.front());
            while (true) {
                if (!seg_free[k])
                    throw geometry_error("mesher: degenerate obstacle contact with the grid");
                k = (k + 1) % nn;
                if (nodes[k].chain_end >= 0) break;
                if (nodes[k].chain_start >= 0)
                    throw geometry_error("mesher: degenerate obstacle contact with the grid");
                poly.push_back(nodes[k].pos);
            }
            c = static_cast<std::size_t>(nodes[k].chain_end);
        } while (c != c0);
        dedupe_ring(poly);
        if (poly.size() < 3 || signed_area(poly) <= 0.0)
            throw geometry_error("mesher: produced a degenerate cut piece");
        pieces.push_back(std::move(poly));
    }
    return pieces;
}

// ------------------------------------------------ small polygon triangulation

double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double ax = a.x - d.x, ay = a.y - d.y;
    const double bx = b.x - d.x, by = b.y - d.y;
    const double cx = c.x - d.x, cy = c.y - d.y;
    const double a2 = ax * ax + ay * ay;
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

// Ear clipping picking the best-shaped valid ear each round, followed by
// Lawson flips towards the constrained Delaunay triangulation of the piece.
std::vector<std::array<int, 3>> triangulate_simple_polygon(const std::vector<Vec2>& poly) {
    const int n = static_cast<int>(poly.size());
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, norm(poly[(i + 1) % n] - poly[i]));
    const double area_tol = 1e-14 * scale * scale;

    std::vector<int> active(static_cast<std::size_t>(n));
    std::iota(active.begin(), active.end(), 0);
    std::vector<std::array<int, 3>> tris;

    auto point_blocked = [&](Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
        // inside or on the closed triangle
        return cross(b - a, p - a) >= -area_tol && cross(c - b, p - b) >= -area_tol &&
               cross(a - c, p - c) >= -area_tol;
    };

    while (active.size() > 3) {
        int best = -1;
        double best_quality = 0.0;
        const std::size_t na = active.size();
        for (std::size_t k = 0; k < na; ++k) {
            const Vec2 a = poly[static_cast<std::size_t>(active[(k + na - 1) % na])];
            const Vec2 b = poly[static_cast<std::size_t>(active[k])];
            const Vec2 c = poly[static_cast<std::size_t>(active[(k + 1) % na])];
            const double doubled = cross(b - a, c - a);
            if (doubled <= area_tol) continue;
            bool blocked = false;
            for (std::size_t j = 0; j < na && !blocked; ++j) {
                if (j == k || j == (k + na - 1) % na || j == (k + 1) % na) continue;
                blocked = point_blocked(a, b, c, poly[static_cast<std::size_t>(active[j])]);
            }
            if (blocked) continue;
            const double l2 = dot(b - a, b - a) + dot(c - b, c - b) + dot(a - c, a - c);
            const double q = doubled / l2;
            if (q > best_quality) {
                best_quality = q;
                best = static_cast<int>(k);
            }
        }
        if (best < 0) throw geometry_error("mesher: ear clipping failed on a cut piece");
        const std::size_t k = static_cast<std::size_t>(best);
        tris.push_back({active[(k + na - 1) % na], active[k], active[(k + 1) % na]});
        active.erase(active.begin() + best);
    }
    {
        const Vec2 a = poly[static_cast<std::size_t>(active[0])];
        const Vec2 b = poly[static_cast<std::size_t>(active[1])];
        const Vec2 c = poly[static_cast<std::size_t>(active[2])];
        if (cross(b - a, c - a) <= area_tol)
            throw geometry_error("mesher: degenerate final ear on a cut piece");
        tris.push_back({active[0], active[1], active[2]});
    }

    // Lawson flips on interior diagonals.
    const double ic_tol = 1e-10 * scale * scale * scale * scale;
    int guard = 4 * n * n + 32;
    bool flipped = true;
    while (flipped && guard-- > 0) {
        flipped = false;
        std::map<std::pair<int, int>, std::vector<int>> by_edge;
        for (std::size_t t = 0; t < tris.size(); ++t)
            for (int e = 0; e < 3; ++e) {
                const int u = tris[t][static_cast<std::size_t>(e)];
                const int v = tris[t][static_cast<std::size_t>((e + 1) % 3)];
                by_edge[{std::min(u, v), std::max(u, v)}].push_back(static_cast<int>(t));
            }
        for (const auto& [edge, owners] : by_edge) {
            if (owners.size() != 2) continue;
            auto& t1 = tris[static_cast<std::size_t>(owners[0])];
            auto& t2 = tris[static_cast<std::size_t>(owners[1])];
            const int ea = edge.first;
            const int eb = edge.second;
            auto opposite = [ea, eb](const std::array<int, 3>& t) {
                for (int v : t)
                    if (v != ea && v != eb) return v;
                return -1;
            };
            const int p = opposite(t1);
            const int q = opposite(t2);
            if (p < 0 || q < 0 || p == q) continue;
            const Vec2 A = poly[static_cast<std::size_t>(ea)];
            const Vec2 B = poly[static_cast<std::size_t>(eb)];
            const Vec2 P = poly[static_cast<std::size_t>(p)];
            const Vec2 Q = poly[static_cast<std::size_t>(q)];
            // flip only strictly non-Delaunay, strictly convex quads
            const double side_a = cross(Q - P, A - P);
            const double side_b = cross(Q - P, B - P);
            if (!((side_a > area_tol && side_b < -area_tol) ||
                  (side_a < -area_tol && side_b > area_tol)))
                continue;
            double ind = cross(B - A, P - A) > 0 ? incircle(A, B, P, Q) : incircle(A, P, B, Q);
            if (ind <= ic_tol) continue;
            t1 = {p, q, eb};
            t2 = {q, p, ea};
            if (cross(poly[static_cast<std::size_t>(t1[1])] - poly[static_cast<std::size_t>(t1[0])],
                      poly[static_cast<std::size_t>(t1[2])] - poly[static_cast<std::size_t>(t1[0])]) < 0)
                std::swap(t1[0], t1[1]);
            if (cross(poly[static_cast<std::size_t>(t2[1])] - poly[static_cast<std::size_t>(t2[0])],
                      poly[static_cast<std::size_t>(t2[2])] - poly[static_cast<std::size_t>(t2[0])]) < 0)
                std::swap(t2[0], t2[1]);
            flipped = true;
            break;
        }
    }
    return tris;
}

void tag_outer_and_obstacle(Mesh& mesh, double lo, double hi, double tol, bool periodic) {
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const int u = t[static_cast<std::size_t>(e)];
            const int v = t[static_cast<std::size_t>((e + 1) % 3)];
            ++edge_count[{std::min(u, v), std::max(u, v)}];
        }
    mesh.edge_tags.clear();
    for (const auto& [e, cnt] : edge_count) {
        if (cnt != 1) continue;
        const Vec2 a = mesh.vertices[static_cast<std::size_t>(e.first)];
        const Vec2 b = mesh.vertices[static_cast<std::size_t>(e.second)];
        auto on_line = [&](double av, double bv, double line) {
            return std::abs(av - line) <= tol && std::abs(bv - line) <= tol;
        };
        EdgeTag tag;
        if (on_line(a.x, b.x, lo) || on_line(a.y, b.y, lo))
            tag = periodic ? EdgeTag::periodic_master : EdgeTag::exterior_dirichlet;
        else if (on_line(a.x, b.x, hi) || on_line(a.y, b.y, hi))
            tag = periodic ? EdgeTag::periodic_slave : EdgeTag::exterior_dirichlet;
        else
            tag = EdgeTag::obstacle;
        mesh.edge_tags.emplace(e, tag);
    }
}

double mesh_diameter(const Mesh& mesh) {
    double h = 0.0;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e)
            h = std::max(h, norm(mesh.vertices[static_cast<std::size_t>(t[static_cast<std::size_t>((e + 1) % 3)])] -
                                 mesh.vertices[static_cast<std::size_t>(t[static_cast<std::size_t>(e)])]));
    return h;
}

} // namespace

// ---------------------------------------------------------------- builders

Mesh build_cell_mesh(const CellGeometry& cell, int m) {
    if (m < 2) throw geometry_error("cell subdivision m must be at least 2");
    cell.validate();
    if (cell.obstacle) {
        if (!cell.obstacle->is_convex())
            throw geometry_error("mesher supports convex obstacle polygons only");
        if (cell.obstacle->max_abs_coord() > 0.5 - 2.0 / m + 1e-12)
            throw geometry_error("obstacle clearance below 2/m: increase m or shrink the obstacle");
    }

    std::vector<double> line(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) line[static_cast<std::size_t>(i)] = -0.5 + static_cast<double>(i) / m;
    line[0] = -0.5;
    line[static_cast<std::size_t>(m)] = 0.5;

    const double sq_area = 1.0 / (static_cast<double>(m) * m);
    std::vector<SquareClass> cls(static_cast<std::size_t>(m) * static_cast<std::size_t>(m), kFree);
    if (cell.obstacle) {
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                const auto g = clip_to_box(cell.obstacle->vertices, line[static_cast<std::size_t>(i)],
                                           line[static_cast<std::size_t>(i) + 1], line[static_cast<std::size_t>(j)],
                                           line[static_cast<std::size_t>(j) + 1]);
                const double a = g.size() >= 3 ? signed_area(g) : 0.0;
                SquareClass& c = cls[static_cast<std::size_t>(j) * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)];
                if (a <= 1e-12 * sq_area)
                    c = kFree;
                else if (a >= (1.0 - 1e-12) * sq_area)
                    c = kCovered;
                else
                    c = kCut;
            }
    }

    VertexStore store(kSnapTol);
    Mesh mesh;
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const SquareClass c = cls[static_cast<std::size_t>(j) * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)];
            if (c == kCovered) continue;
            const double x0 = line[static_cast<std::size_t>(i)], x1 = line[static_cast<std::size_t>(i) + 1];
            const double y0 = line[static_cast<std::size_t>(j)], y1 = line[static_cast<std::size_t>(j) + 1];
            if (c == kFree) {
                const int bl = store.add({x0, y0});
                const int br = store.add({x1, y0});
                const int tr = store.add({x1, y1});
                const int tl = store.add({x0, y1});
                if ((i + j) % 2 == 0) {
                    mesh.triangles.push_back({bl, br, tr});
                    mesh.triangles.push_back({bl, tr, tl});
                } else {
                    mesh.triangles.push_back({bl, br, tl});
                    mesh.triangles.push_back({br, tr, tl});
                }
            } else {
                for (const auto& piece : cut_square_pieces(*cell.obstacle, x0, x1, y0, y1)) {
                    std::vector<int> ids(piece.size());
                    for (std::size_t k = 0; k < piece.size(); ++k) ids[k] = store.add(piece[k]);
                    for (const auto& t : triangulate_simple_polygon(piece))
                        mesh.triangles.push_back({ids[static_cast<std::size_t>(t[0])],
                                                  ids[static_cast<std::size_t>(t[1])],
                                                  ids[static_cast<std::size_t>(t[2])]});
                }
            }
        }
    }
    mesh.vertices = store.take();

    tag_outer_and_obstacle(mesh, -0.5, 0.5, kSnapTol, /*periodic=*/true);

    // Periodic vertex pairing: right -> left for the whole right trace,
    // top -> bottom for the top trace except the top-right corner (already a
    // slave through the right side). Corner pairs chain to the bottom-left
    // corner, which is the single free representative of the corner class.
    auto on = [&](const Vec2& p, int axis, double v) {
        return std::abs((axis == 0 ? p.x : p.y) - v) <= kSnapTol;
    };
    std::vector<std::pair<double, int>> left, bottom;
    std::vector<int> right, top;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const Vec2 p = mesh.vertices[v];
        if (on(p, 0, -0.5)) left.push_back({p.y, static_cast<int>(v)});
        if (on(p, 0, 0.5)) right.push_back(static_cast<int>(v));
        if (on(p, 1, -0.5)) bottom.push_back({p.x, static_cast<int>(v)});
        if (on(p, 1, 0.5)) top.push_back(static_cast<int>(v));
    }
    auto match = [&](const std::vector<std::pair<double, int>>& bank, double key) {
        for (const auto& [k, id] : bank)
            if (std::abs(k - key) <= kSnapTol) return id;
        throw geometry_error("periodic trace mismatch between opposite cell edges");
    };
    for (int v : right) mesh.periodic_pairs.push_back({v, match(left, mesh.vertices[static_cast<std::size_t>(v)].y)});
    for (int v : top) {
        const Vec2 p = mesh.vertices[static_cast<std::size_t>(v)];
        if (on(p, 0, 0.5)) continue; // top-right corner pairs through the right side
        mesh.periodic_pairs.push_back({v, match(bottom, p.x)});
    }

    mesh.h = mesh_diameter(mesh);
    mesh.cell = cell;
    mesh.subdivision = m;

    validate_mesh(mesh);
    const double theta = geometric_coefficients(cell).first;
    if (std::abs(mesh.total_area() - theta) > 1e-10)
        throw geometry_error("cell mesh area deviates from the exact fluid fraction");
    return mesh;
}

Mesh build_perforated_mesh(const DomainSpec& domain, const CellGeometry& cell, int m) {
    const int k = domain.cells_per_side();
    const Mesh unit = build_cell_mesh(cell, m);
    const double eps = domain.epsilon;

    VertexStore store(1e-9 * eps);
    Mesh mesh;
    std::vector<int> ids(unit.vertices.size());
    for (int cj = 0; cj < k; ++cj) {
        for (int ci = 0; ci < k; ++ci) {
            const double ox = static_cast<double>(ci) + 0.5;
            const double oy = static_cast<double>(cj) + 0.5;
            for (std::size_t v = 0; v < unit.vertices.size(); ++v)
                ids[v] = store.add({eps * (unit.vertices[v].x + ox), eps * (unit.vertices[v].y + oy)});
            for (const auto& t : unit.triangles)
                mesh.triangles.push_back({ids[static_cast<std::size_t>(t[0])],
                                          ids[static_cast<std::size_t>(t[1])],
                                          ids[static_cast<std::size_t>(t[2])]});
        }
    }
    mesh.vertices = store.take();

    tag_outer_and_obstacle(mesh, 0.0, domain.side_length, 1e-9 * eps, /*periodic=*/false);

    mesh.h = mesh_diameter(mesh);
    mesh.cell = cell;
    mesh.domain = domain;
    mesh.subdivision = m;

    validate_mesh(mesh);
    const double theta = geometric_coefficients(cell).first;
    const double expected = theta * domain.side_length * domain.side_length;
    if (std::abs(mesh.total_area() - expected) > 1e-10 * std::max(1.0, expected))
        throw geometry_error("perforated mesh area deviates from theta * L^2");
    return mesh;
}

std::pair<double, double> geometric_coefficients(const CellGeometry& cell) {
    cell.validate();
    if (!cell.obstacle) return {1.0, 0.0};
    return {1.0 - cell.obstacle->area(), cell.obstacle->perimeter()};
}

void validate_mesh(const Mesh& mesh) {
    const std::size_t nv = mesh.vertices.size();
    for (const auto& t : mesh.triangles)
        for (int v : t)
            if (v < 0 || static_cast<std::size_t>(v) >= nv)
                throw geometry_error("mesh audit: triangle index out of range");
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
        if (!(mesh.triangle_area(static_cast<int>(t)) > 0.0))
            throw geometry_error("mesh audit: non-positive triangle area");

    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            const int u = t[static_cast<std::size_t>(e)];
            const int v = t[static_cast<std::size_t>((e + 1) % 3)];
            ++edge_count[{std::min(u, v), std::max(u, v)}];
        }
    for (const auto& [e, cnt] : edge_count) {
        if (cnt > 2) throw geometry_error("mesh audit: edge shared by more than two triangles");
        const bool tagged = mesh.edge_tags.count(e) > 0;
        if (cnt == 1 && !tagged) throw geometry_error("mesh audit: untagged boundary edge");
        if (cnt == 2 && tagged) throw geometry_error("mesh audit: tagged interior edge");
    }
    for (const auto& [e, tag] : mesh.edge_tags)
        if (!edge_count.count(e)) throw geometry_error("mesh audit: tag on a non-existent edge");

    // hanging vertices on boundary edges (x-sorted sweep keeps this cheap)
    const double tol = 1e-12;
    std::vector<int> by_x(nv);
    std::iota(by_x.begin(), by_x.end(), 0);
    std::sort(by_x.begin(), by_x.end(), [&](int a, int b) {
        return mesh.vertices[static_cast<std::size_t>(a)].x < mesh.vertices[static_cast<std::size_t>(b)].x;
    });
    std::vector<double> xs(nv);
    for (std::size_t i = 0; i < nv; ++i) xs[i] = mesh.vertices[static_cast<std::size_t>(by_x[i])].x;
    for (const auto& [e, tag] : mesh.edge_tags) {
        const Vec2 a = mesh.vertices[static_cast<std::size_t>(e.first)];
        const Vec2 b = mesh.vertices[static_cast<std::size_t>(e.second)];
        const Vec2 d = b - a;
        const double len2 = dot(d, d);
        const double ylo = std::min(a.y, b.y) - tol, yhi = std::max(a.y, b.y) + tol;
        const auto lo = std::lower_bound(xs.begin(), xs.end(), std::min(a.x, b.x) - tol);
        const auto hi = std::upper_bound(xs.begin(), xs.end(), std::max(a.x, b.x) + tol);
        for (auto it = lo; it != hi; ++it) {
            const int v = by_x[static_cast<std::size_t>(it - xs.begin())];
            if (v == e.first || v == e.second) continue;
            const Vec2 p = mesh.vertices[static_cast<std::size_t>(v)];
            if (p.y < ylo || p.y > yhi) continue;
            const double s = dot(p - a, d) / len2;
            if (s <= tol || s >= 1.0 - tol) continue;
            const Vec2 foot = a + s * d;
            if (norm(p - foot) <= tol)
                throw geometry_error("mesh audit: hanging vertex on a boundary edge");
        }
    }

    for (const auto& [slave, master] : mesh.periodic_pairs) {
        const Vec2 d = mesh.vertices[static_cast<std::size_t>(slave)] -
                       mesh.vertices[static_cast<std::size_t>(master)];
        const bool unit_x = std::abs(std::abs(d.x) - 1.0) <= 1e-12 && std::abs(d.y) <= 1e-12;
        const bool unit_y = std::abs(std::abs(d.y) - 1.0) <= 1e-12 && std::abs(d.x) <= 1e-12;
        if (!unit_x && !unit_y)
            throw geometry_error("mesh audit: periodic pair does not translate by a unit vector");
    }
}

std::string dump_mesh(const Mesh& mesh) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "mesh %zu %zu %zu\n", mesh.vertices.size(), mesh.triangles.size(),
                  mesh.edge_tags.size());
    out += buf;
    for (const Vec2& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v.x, v.y);
        out += buf;
    }
    for (const auto& t : mesh.triangles) {
        std::snprintf(buf, sizeof buf, "t %d %d %d\n", t[0], t[1], t[2]);
        out += buf;
    }
    for (const auto& [e, tag] : mesh.edge_tags) {
        std::snprintf(buf, sizeof buf, "e %d %d %s\n", e.first, e.second, edge_tag_name(tag));
        out += buf;
    }
    for (const auto& [slave, master] : mesh.periodic_pairs) {
        std::snprintf(buf, sizeof buf, "p %d %d\n", slave, master);
        out += buf;
    }
    return out;
}

} // namespace porohom
