#pragma once

// Static SVG 1.1 rendering of a finished run: target level curve, formation
// center trajectory, agent start/end markers, and periodic forward-direction
// arrows.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "curvetrak/contour.hpp"
#include "curvetrak/csv.hpp"
#include "curvetrak/field.hpp"
#include "curvetrak/record.hpp"

namespace curvetrak {

struct PlotOptions {
    int size_px = 840;
    int margin_px = 40;
    int contour_grid = 401;
    int arrow_count = 40;
    int max_polyline_points = 4000;
};

namespace detail {

class SvgCanvas {
public:
    SvgCanvas(Box world, int size_px, int margin_px) : world_(world), size_(size_px) {
        const double inner = size_px - 2.0 * margin_px;
        const double sx = inner / world.width();
        const double sy = inner / world.height();
        scale_ = std::min(sx, sy);
        // Center the (aspect-preserved) world box inside the canvas.
        offset_x_ = (size_px - scale_ * world.width()) / 2.0;
        offset_y_ = (size_px - scale_ * world.height()) / 2.0;
    }

    double px(double wx) const { return offset_x_ + (wx - world_.lo.x) * scale_; }
    // SVG y grows downward.
    double py(double wy) const { return size_ - offset_y_ - (wy - world_.lo.y) * scale_; }
    double scale() const { return scale_; }

private:
    Box world_;
    int size_;
    double scale_ = 1.0;
    double offset_x_ = 0.0;
    double offset_y_ = 0.0;
};

inline std::string f1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

}  // namespace detail

inline void render_plot_svg(std::ostream& os, const std::vector<TrajectoryRecord>& records,
                            const FieldModel& field, double z_d, const PlotOptions& opts = {}) {
    if (records.empty()) throw CsvFormatError("plot: trajectory has no rows");

    const detail::SvgCanvas c(field.domain_box, opts.size_px, opts.margin_px);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << opts.size_px
       << "\" height=\"" << opts.size_px << "\" viewBox=\"0 0 " << opts.size_px << ' '
       << opts.size_px << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // Domain box outline.
    os << "<rect x=\"" << detail::f1(c.px(field.domain_box.lo.x)) << "\" y=\""
       << detail::f1(c.py(field.domain_box.hi.y)) << "\" width=\""
       << detail::f1(field.domain_box.width() * c.scale()) << "\" height=\""
       << detail::f1(field.domain_box.height() * c.scale())
       << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";

    // Target level curve, clipped to the domain box by construction.
    const auto segments = extract_contour(field, field.domain_box, z_d, opts.contour_grid);
    os << "<path fill=\"none\" stroke=\"#888888\" stroke-width=\"1.2\" d=\"";
    for (const auto& [a, b] : segments)
        os << 'M' << detail::f1(c.px(a.x)) << ' ' << detail::f1(c.py(a.y)) << 'L'
           << detail::f1(c.px(b.x)) << ' ' << detail::f1(c.py(b.y));
    os << "\"/>\n";

    // Formation-center trajectory (decimated for file size).
    const std::size_t stride =
        std::max<std::size_t>(1, records.size() / static_cast<std::size_t>(opts.max_polyline_points));
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.4\" points=\"";
    for (std::size_t k = 0; k < records.size(); k += stride)
        os << detail::f1(c.px(records[k].rc.x)) << ',' << detail::f1(c.py(records[k].rc.y)) << ' ';
    const auto& last = records.back();
    os << detail::f1(c.px(last.rc.x)) << ',' << detail::f1(c.py(last.rc.y)) << "\"/>\n";

    // Forward-direction arrows along the trajectory.
    const std::size_t arrow_stride =
        std::max<std::size_t>(1, records.size() / static_cast<std::size_t>(opts.arrow_count));
    const double arrow_len_px = opts.size_px * 0.03;
    for (std::size_t k = 0; k < records.size(); k += arrow_stride) {
        const auto& r = records[k];
        const Vec2 d = r.r2 - r.r1;
        const double dn = norm(d);
        if (!(dn > 0.0)) continue;
        const Vec2 n = rot90ccw(d / dn);
        const double x0 = c.px(r.rc.x), y0 = c.py(r.rc.y);
        // Pixel-space direction (y flip).
        const double ux = n.x, uy = -n.y;
        const double x1 = x0 + ux * arrow_len_px, y1 = y0 + uy * arrow_len_px;
        const double hx = -uy, hy = ux;  // arrowhead barbs
        os << "<path fill=\"none\" stroke=\"green\" stroke-width=\"1.0\" d=\"M"
           << detail::f1(x0) << ' ' << detail::f1(y0) << 'L' << detail::f1(x1) << ' '
           << detail::f1(y1) << 'M' << detail::f1(x1 - 0.25 * arrow_len_px * (ux - hx)) << ' '
           << detail::f1(y1 - 0.25 * arrow_len_px * (uy - hy)) << 'L' << detail::f1(x1) << ' '
           << detail::f1(y1) << 'L' << detail::f1(x1 - 0.25 * arrow_len_px * (ux + hx)) << ' '
           << detail::f1(y1 - 0.25 * arrow_len_px * (uy + hy)) << "\"/>\n";
    }

    // Agents: open circles at the start, filled at the end.
    const auto agent_marker = [&](Vec2 p, const char* color, bool filled) {
        os << "<circle cx=\"" << detail::f1(c.px(p.x)) << "\" cy=\"" << detail::f1(c.py(p.y))
           << "\" r=\"4\" stroke=\"" << color << "\" fill=\"" << (filled ? color : "none")
           << "\"/>\n";
    };
    agent_marker(records.front().r1, "red", false);
    agent_marker(records.front().r2, "blue", false);
    agent_marker(records.back().r1, "red", true);
    agent_marker(records.back().r2, "blue", true);

    os << "<text x=\"" << opts.margin_px << "\" y=\"" << opts.margin_px - 12
       << "\" font-family=\"sans-serif\" font-size=\"14\">level " << z_d
       << " | steps " << records.size() << "</text>\n";
    os << "</svg>\n";
}

}  // namespace curvetrak
