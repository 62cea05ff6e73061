#pragma once

#include <cmath>

namespace curvetrak {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

/// z-component of the planar cross product; positive when b is CCW of a.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// Rotation by +90 degrees counter-clockwise.
constexpr Vec2 rot90ccw(Vec2 v) { return {-v.y, v.x}; }

inline Vec2 normalized(Vec2 v) {
    const double n = norm(v);
    return {v.x / n, v.y / n};
}

inline bool finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Symmetric 2x2 matrix (xy stored once, so symmetry is structural).
struct SymMat2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    constexpr Vec2 operator*(Vec2 v) const {
        return {xx * v.x + xy * v.y, xy * v.x + yy * v.y};
    }
    constexpr SymMat2 operator+(SymMat2 o) const { return {xx + o.xx, xy + o.xy, yy + o.yy}; }
    constexpr SymMat2 operator*(double s) const { return {xx * s, xy * s, yy * s}; }
};

/// Axis-aligned rectangle, lo.x <= hi.x and lo.y <= hi.y.
struct Box {
    Vec2 lo;
    Vec2 hi;

    constexpr double width() const { return hi.x - lo.x; }
    constexpr double height() const { return hi.y - lo.y; }
    constexpr Vec2 center() const { return {(lo.x + hi.x) / 2, (lo.y + hi.y) / 2}; }
    constexpr bool contains(Vec2 p) const {
        return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
    }
};

}  // namespace curvetrak
