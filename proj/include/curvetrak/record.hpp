#pragma once

#include <cstdint>

#include "curvetrak/geometry.hpp"

namespace curvetrak {

enum class LemmaStatus { Satisfied, Violated, NotApplicable };

/// One simulation step: world state plus the observer-side diagnostics
/// computed from the noise-free field at the formation center.
struct TrajectoryRecord {
    std::int64_t step = 0;
    double t = 0.0;
    Vec2 r1;
    Vec2 r2;
    Vec2 rc;              // exact midpoint (r1 + r2) / 2
    double y1 = 0.0;      // measurements seen by the controller
    double y2 = 0.0;
    double yc = 0.0;
    double zc_true = 0.0; // noise-free field value at rc
    double separation = 0.0;
    double gamma = 0.0;   // body frame vs level-curve frame, (-pi, pi]
    double omega_measured = 0.0;
    double omega_approx = 0.0;
    double sigma_speed = 0.0;  // actual speed of the formation center
    double alpha = 0.0;
    double beta = 0.0;
    double V = 0.0;       // 0.5 (zc_true - z_d)^2
    LemmaStatus lemma = LemmaStatus::Satisfied;
    bool theorem_ok = true;
    bool gate_open = false;

    bool lemma_ok() const { return lemma != LemmaStatus::Violated; }
};

}  // namespace curvetrak
