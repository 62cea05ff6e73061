#pragma once

// Analytic planar scalar fields with exact derivatives, a finite-difference
// cross-check, and level-set curvature.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <variant>
#include <vector>

#include "curvetrak/errors.hpp"
#include "curvetrak/geometry.hpp"

namespace curvetrak {

/// Below this gradient norm the unit normal and the level-set curvature
/// are treated as undefined (critical-point exclusion zone).
inline constexpr double kGradFloor = 1e-9;

inline constexpr int kMaxPolyDegree = 6;

/// z = coeff_x*(x-cx)^2 + coeff_y*(y-cy)^2
struct EllipseField {
    Vec2 center{20.0, 20.0};
    double coeff_x = 1.0;
    double coeff_y = 8.0;
};

/// z = 0.26(x^2 + y^2) - 0.48xy
struct MatyasField {};

/// One monomial c * x^i * y^j.
struct MonomialTerm {
    int i = 0;
    int j = 0;
    double c = 0.0;
};

/// z = sum of monomial terms, total degree capped at kMaxPolyDegree.
struct PolynomialField {
    std::vector<MonomialTerm> terms;
};

using FieldKind = std::variant<EllipseField, MatyasField, PolynomialField>;

struct FieldModel {
    FieldKind kind;
    Box domain_box{{-15.0, -15.0}, {15.0, 15.0}};
};

/// Grid-sampled estimates of the value and gradient-norm ranges over
/// domain_box. These are estimates, not certified bounds.
struct FieldBounds {
    double z_min = 0.0;
    double z_max = 0.0;
    double grad_min = 0.0;
    double grad_max = 0.0;
    Box box;
};

inline FieldModel make_ellipse(Vec2 center, double coeff_x, double coeff_y) {
    if (!finite(center) || !std::isfinite(coeff_x) || !std::isfinite(coeff_y))
        throw std::invalid_argument("ellipse field: non-finite parameter");
    const double half = 25.0;
    return {EllipseField{center, coeff_x, coeff_y},
            Box{{center.x - half, center.y - half}, {center.x + half, center.y + half}}};
}

inline FieldModel make_matyas() {
    return {MatyasField{}, Box{{-15.0, -15.0}, {15.0, 15.0}}};
}

inline FieldModel make_polynomial(std::vector<MonomialTerm> terms, Box domain_box) {
    for (const auto& t : terms) {
        if (t.i < 0 || t.j < 0)
            throw std::invalid_argument("polynomial field: negative exponent");
        if (t.i + t.j > kMaxPolyDegree)
            throw std::invalid_argument("polynomial field: total degree exceeds 6");
        if (!std::isfinite(t.c))
            throw std::invalid_argument("polynomial field: non-finite coefficient");
    }
    return {PolynomialField{std::move(terms)}, domain_box};
}

namespace detail {

inline double ipow(double x, int n) {
    double r = 1.0;
    for (int k = 0; k < n; ++k) r *= x;
    return r;
}

}  // namespace detail

inline double field_eval(const FieldModel& field, Vec2 p) {
    if (!finite(p)) throw std::invalid_argument("field_eval: non-finite point");
    return std::visit(
        [&](const auto& f) -> double {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, EllipseField>) {
                const double dx = p.x - f.center.x;
                const double dy = p.y - f.center.y;
                return f.coeff_x * dx * dx + f.coeff_y * dy * dy;
            } else if constexpr (std::is_same_v<F, MatyasField>) {
                return 0.26 * (p.x * p.x + p.y * p.y) - 0.48 * p.x * p.y;
            } else {
                double z = 0.0;
                for (const auto& t : f.terms)
                    z += t.c * detail::ipow(p.x, t.i) * detail::ipow(p.y, t.j);
                return z;
            }
        },
        field.kind);
}

inline Vec2 field_grad(const FieldModel& field, Vec2 p) {
    if (!finite(p)) throw std::invalid_argument("field_grad: non-finite point");
    return std::visit(
        [&](const auto& f) -> Vec2 {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, EllipseField>) {
                return {2.0 * f.coeff_x * (p.x - f.center.x),
                        2.0 * f.coeff_y * (p.y - f.center.y)};
            } else if constexpr (std::is_same_v<F, MatyasField>) {
                return {0.52 * p.x - 0.48 * p.y, 0.52 * p.y - 0.48 * p.x};
            } else {
                Vec2 g{0.0, 0.0};
                for (const auto& t : f.terms) {
                    if (t.i > 0)
                        g.x += t.c * t.i * detail::ipow(p.x, t.i - 1) * detail::ipow(p.y, t.j);
                    if (t.j > 0)
                        g.y += t.c * t.j * detail::ipow(p.x, t.i) * detail::ipow(p.y, t.j - 1);
                }
                return g;
            }
        },
        field.kind);
}

/// Central-difference gradient, error O(h^2) on smooth fields. Independent
/// of the analytic derivative path; used as its cross-check.
inline Vec2 field_grad_fd(const FieldModel& field, Vec2 p, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("field_grad_fd: h must be > 0");
    const double gx = (field_eval(field, {p.x + h, p.y}) - field_eval(field, {p.x - h, p.y})) / (2.0 * h);
    const double gy = (field_eval(field, {p.x, p.y + h}) - field_eval(field, {p.x, p.y - h})) / (2.0 * h);
    return {gx, gy};
}

inline SymMat2 field_hessian(const FieldModel& field, Vec2 p) {
    if (!finite(p)) throw std::invalid_argument("field_hessian: non-finite point");
    return std::visit(
        [&](const auto& f) -> SymMat2 {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, EllipseField>) {
                return {2.0 * f.coeff_x, 0.0, 2.0 * f.coeff_y};
            } else if constexpr (std::is_same_v<F, MatyasField>) {
                return {0.52, -0.48, 0.52};
            } else {
                SymMat2 h{0.0, 0.0, 0.0};
                for (const auto& t : f.terms) {
                    if (t.i > 1)
                        h.xx += t.c * t.i * (t.i - 1) * detail::ipow(p.x, t.i - 2) * detail::ipow(p.y, t.j);
                    if (t.i > 0 && t.j > 0)
                        h.xy += t.c * t.i * t.j * detail::ipow(p.x, t.i - 1) * detail::ipow(p.y, t.j - 1);
                    if (t.j > 1)
                        h.yy += t.c * t.j * (t.j - 1) * detail::ipow(p.x, t.i) * detail::ipow(p.y, t.j - 2);
                }
                return h;
            }
        },
        field.kind);
}

/// Curvature of the level curve through p:
///   kappa = (z_xx z_y^2 - 2 z_xy z_x z_y + z_yy z_x^2) / ||grad z||^3.
/// Sign convention: positive on convex level sets.
inline double level_curvature(const FieldModel& field, Vec2 p) {
    const Vec2 g = field_grad(field, p);
    const double gn = norm(g);
    if (gn <= kGradFloor)
        throw CriticalPointError("level_curvature: gradient norm below grad_floor");
    const SymMat2 h = field_hessian(field, p);
    const double num = h.xx * g.y * g.y - 2.0 * h.xy * g.x * g.y + h.yy * g.x * g.x;
    return num / (gn * gn * gn);
}

/// Dense-grid estimate (default 201x201) of FieldBounds over domain_box.
inline FieldBounds estimate_bounds(const FieldModel& field, int grid_n = 201) {
    if (grid_n < 2) throw std::invalid_argument("estimate_bounds: grid_n must be >= 2");
    FieldBounds b;
    b.box = field.domain_box;
    bool first = true;
    for (int iy = 0; iy < grid_n; ++iy) {
        const double fy = static_cast<double>(iy) / (grid_n - 1);
        const double y = field.domain_box.lo.y + fy * field.domain_box.height();
        for (int ix = 0; ix < grid_n; ++ix) {
            const double fx = static_cast<double>(ix) / (grid_n - 1);
            const double x = field.domain_box.lo.x + fx * field.domain_box.width();
            const double z = field_eval(field, {x, y});
            const double gn = norm(field_grad(field, {x, y}));
            if (first) {
                b.z_min = b.z_max = z;
                b.grad_min = b.grad_max = gn;
                first = false;
            } else {
                b.z_min = std::min(b.z_min, z);
                b.z_max = std::max(b.z_max, z);
                b.grad_min = std::min(b.grad_min, gn);
                b.grad_max = std::max(b.grad_max, gn);
            }
        }
    }
    return b;
}

/// Interior reference point used for winding counts: the built-in fields'
/// critical point, the domain-box center otherwise.
inline Vec2 default_winding_ref(const FieldModel& field) {
    return std::visit(
        [&](const auto& f) -> Vec2 {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, EllipseField>) {
                return f.center;
            } else if constexpr (std::is_same_v<F, MatyasField>) {
                return {0.0, 0.0};
            } else {
                return field.domain_box.center();
            }
        },
        field.kind);
}

}  // namespace curvetrak
