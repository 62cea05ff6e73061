#pragma once

// Gradient-free two-agent velocity law. Each agent's velocity is decomposed
// along the inter-agent direction q (formation keeping + signum drive toward
// the target level) and the forward direction n (speed proportional to the
// local field value, gated on |y_c - z_d| < epsilon).

#include <cmath>
#include <stdexcept>
#include <utility>

#include "curvetrak/errors.hpp"
#include "curvetrak/geometry.hpp"

namespace curvetrak {

struct ControllerParams {
    double k1 = 1.0;           // formation gain, > 0
    double k2 = 0.9;           // signum gain, > 0
    double C = 1.0;            // base forward speed, > 0
    double a = 0.01;           // field-proportional forward gain, > 0
    double epsilon = 2.0;      // annulus half-width, > 0
    double d0 = 1.0;           // desired separation, > 0
    double z_d = 500.0;        // desired level value
    double sgn_deadband = 0.0; // >= 0, < epsilon
};

inline void validate(const ControllerParams& p) {
    if (!(p.k1 > 0.0)) throw std::invalid_argument("params.k1 must be > 0");
    if (!(p.k2 > 0.0)) throw std::invalid_argument("params.k2 must be > 0");
    if (!(p.C > 0.0)) throw std::invalid_argument("params.C must be > 0");
    if (!(p.a > 0.0)) throw std::invalid_argument("params.a must be > 0");
    if (!(p.epsilon > 0.0)) throw std::invalid_argument("params.epsilon must be > 0");
    if (!(p.d0 > 0.0)) throw std::invalid_argument("params.d0 must be > 0");
    if (!std::isfinite(p.z_d)) throw std::invalid_argument("params.z_d must be finite");
    if (!(p.sgn_deadband >= 0.0)) throw std::invalid_argument("params.sgn_deadband must be >= 0");
    if (!(p.sgn_deadband < p.epsilon))
        throw std::invalid_argument("params.sgn_deadband must be < epsilon");
}

/// Body frame of the pair: q along the inter-agent line, n = q rotated
/// +90 degrees CCW, so (q, n) is right-handed.
struct FormationFrame {
    Vec2 q;
    Vec2 n;
};

/// Three-valued signum with an optional deadband; deadband 0 gives the
/// exact piecewise definition (-1 / 0 / +1).
inline int sgn(double x, double deadband = 0.0) {
    if (x < -deadband) return -1;
    if (x > deadband) return 1;
    return 0;
}

inline constexpr double kMinSeparation = 1e-12;

inline FormationFrame formation_frame(Vec2 r1, Vec2 r2) {
    const Vec2 d = r2 - r1;
    if (!(norm(d) > kMinSeparation))
        throw DegenerateFrameError("formation_frame: agents coincide");
    const Vec2 q = normalized(d);
    return {q, rot90ccw(q)};
}

inline double measure_center(double y1, double y2) { return (y1 + y2) / 2.0; }

/// Velocity component of agent i (1 or 2) along q:
///   k1*((r_j - r_i).q - d0_ij) + k2*sgn((y_c - z_d)(y1 - y2)).
/// Sign convention d0_{1,2} = +d0, d0_{2,1} = -d0, which makes the
/// separation s obey ds/dt = -2 k1 (s - d0).
inline double vel_q(int i, Vec2 r1, Vec2 r2, double y1, double y2,
                    const ControllerParams& p) {
    if (i != 1 && i != 2) throw std::invalid_argument("vel_q: agent index must be 1 or 2");
    const FormationFrame frame = formation_frame(r1, r2);
    const Vec2 to_other = (i == 1) ? r2 - r1 : r1 - r2;
    const double d0_ij = (i == 1) ? p.d0 : -p.d0;
    const double yc = measure_center(y1, y2);
    const double formation = p.k1 * (dot(to_other, frame.q) - d0_ij);
    const double steer = p.k2 * sgn((yc - p.z_d) * (y1 - y2), p.sgn_deadband);
    return formation + steer;
}

/// Forward speed: C + a*y_i while |y_c - z_d| < epsilon (strict), else 0.
inline double vel_n(double y_i, double y_c, const ControllerParams& p) {
    if (std::abs(y_c - p.z_d) < p.epsilon) return p.C + p.a * y_i;
    return 0.0;
}

/// Full velocity vectors of both agents from one shared measurement
/// snapshot, using the shared frame q1 = q2 = q, n1 = n2 = n.
inline std::pair<Vec2, Vec2> agent_velocities(Vec2 r1, Vec2 r2, double y1, double y2,
                                              const ControllerParams& p) {
    const FormationFrame frame = formation_frame(r1, r2);
    const double yc = measure_center(y1, y2);
    const Vec2 v1 = vel_q(1, r1, r2, y1, y2, p) * frame.q + vel_n(y1, yc, p) * frame.n;
    const Vec2 v2 = vel_q(2, r1, r2, y1, y2, p) * frame.q + vel_n(y2, yc, p) * frame.n;
    return {v1, v2};
}

}  // namespace curvetrak
