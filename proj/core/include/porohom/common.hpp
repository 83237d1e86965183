// SPDX-License-Identifier: Apache-2.0
#ifndef POROHOM_COMMON_HPP
#define POROHOM_COMMON_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace porohom {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }
// Right-angle rotation, used for P1 gradient formulas.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

class geometry_error : public std::runtime_error {
public:
    explicit geometry_error(const std::string& msg) : std::runtime_error(msg) {}
};

class constraint_error : public std::runtime_error {
public:
    explicit constraint_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Iterative solver failure; carries the residual reached and, for transient
// runs, the time step at which the solve gave up (-1 otherwise).
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& msg, double residual, int step = -1)
        : std::runtime_error(msg), residual(residual), step(step) {}
    double residual;
    int step;
};

// Configuration rejection; collects every violation, not just the first.
class config_error : public std::runtime_error {
public:
    explicit config_error(std::vector<std::string> violations)
        : std::runtime_error(join(violations)), violations(std::move(violations)) {}
    std::vector<std::string> violations;

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid configuration:";
        for (const auto& e : v) s += "\n  - " + e;
        return s;
    }
};

// Point-location failure in interpolation; carries the query index.
class location_error : public std::runtime_error {
public:
    location_error(const std::string& msg, std::size_t point_index)
        : std::runtime_error(msg), point_index(point_index) {}
    std::size_t point_index;
};

} // namespace porohom

#endif
