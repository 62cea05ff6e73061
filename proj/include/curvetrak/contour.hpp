#pragma once

// Marching-squares contour extraction on a regular grid. Display-only:
// the controller and the diagnostics never see these segments.

#include <utility>
#include <vector>

#include "curvetrak/field.hpp"
#include "curvetrak/geometry.hpp"

namespace curvetrak {

using Segment = std::pair<Vec2, Vec2>;

/// Line segments of the iso-curve z = level over box, cell by cell on an
/// n x n sample grid. Saddle cells are disambiguated by the cell-center
/// average. Segments are unordered; callers only draw them.
inline std::vector<Segment> extract_contour(const FieldModel& field, Box box, double level,
                                            int n = 401) {
    if (n < 2) throw std::invalid_argument("extract_contour: grid must be at least 2x2");
    std::vector<double> z(static_cast<std::size_t>(n) * n);
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[i] = box.lo.x + box.width() * i / (n - 1);
        ys[i] = box.lo.y + box.height() * i / (n - 1);
    }
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
            z[static_cast<std::size_t>(iy) * n + ix] = field_eval(field, {xs[ix], ys[iy]});

    std::vector<Segment> segments;
    const auto zat = [&](int ix, int iy) { return z[static_cast<std::size_t>(iy) * n + ix]; };

    for (int iy = 0; iy + 1 < n; ++iy) {
        for (int ix = 0; ix + 1 < n; ++ix) {
            // Corners CCW from bottom-left; edge k joins corner k and k+1.
            const Vec2 corner[4] = {{xs[ix], ys[iy]},
                                    {xs[ix + 1], ys[iy]},
                                    {xs[ix + 1], ys[iy + 1]},
                                    {xs[ix], ys[iy + 1]}};
            const double value[4] = {zat(ix, iy), zat(ix + 1, iy), zat(ix + 1, iy + 1),
                                     zat(ix, iy + 1)};
            int mask = 0;
            for (int c = 0; c < 4; ++c)
                if (value[c] > level) mask |= 1 << c;
            if (mask == 0 || mask == 15) continue;

            const auto edge_point = [&](int e) -> Vec2 {
                const int a = e, b = (e + 1) % 4;
                double t = (level - value[a]) / (value[b] - value[a]);
                t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
                return corner[a] + t * (corner[b] - corner[a]);
            };
            const auto emit = [&](int ea, int eb) {
                segments.emplace_back(edge_point(ea), edge_point(eb));
            };

            switch (mask) {
                case 1: emit(3, 0); break;
                case 2: emit(0, 1); break;
                case 3: emit(3, 1); break;
                case 4: emit(1, 2); break;
                case 6: emit(0, 2); break;
                case 7: emit(3, 2); break;
                case 8: emit(2, 3); break;
                case 9: emit(0, 2); break;
                case 11: emit(1, 2); break;
                case 12: emit(3, 1); break;
                case 13: emit(0, 1); break;
                case 14: emit(3, 0); break;
                case 5: {
                    const double center = (value[0] + value[1] + value[2] + value[3]) / 4.0;
                    if (center > level) { emit(0, 1); emit(2, 3); }
                    else { emit(3, 0); emit(1, 2); }
                    break;
                }
                case 10: {
                    const double center = (value[0] + value[1] + value[2] + value[3]) / 4.0;
                    if (center > level) { emit(3, 0); emit(1, 2); }
                    else { emit(0, 1); emit(2, 3); }
                    break;
                }
                default: break;
            }
        }
    }
    return segments;
}

}  // namespace curvetrak
