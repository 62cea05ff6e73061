#pragma once

// Trajectory CSV, one row per step. Column order is part of the file
// contract; values carry 17 significant digits so parsing them back is
// lossless.

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "curvetrak/record.hpp"

namespace curvetrak {

inline const std::string kTrajectoryCsvHeader =
    "step,t,r1x,r1y,r2x,r2y,rcx,rcy,y1,y2,yc,zc_true,sep,gamma,omega_meas,"
    "omega_approx,sigma,alpha,beta,V,lemma_ok,theorem_ok,gate_open";

struct CsvFormatError : std::runtime_error {
    explicit CsvFormatError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_trajectory_csv(std::ostream& os, const std::vector<TrajectoryRecord>& records) {
    os << kTrajectoryCsvHeader << '\n';
    for (const auto& r : records) {
        os << r.step;
        for (double v : {r.t, r.r1.x, r.r1.y, r.r2.x, r.r2.y, r.rc.x, r.rc.y, r.y1, r.y2,
                         r.yc, r.zc_true, r.separation, r.gamma, r.omega_measured,
                         r.omega_approx, r.sigma_speed, r.alpha, r.beta, r.V})
            os << ',' << detail::fmt17(v);
        os << ',' << (r.lemma_ok() ? 1 : 0) << ',' << (r.theorem_ok ? 1 : 0) << ','
           << (r.gate_open ? 1 : 0) << '\n';
    }
}

inline std::vector<TrajectoryRecord> read_trajectory_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw CsvFormatError("trajectory csv: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrajectoryCsvHeader)
        throw CsvFormatError("trajectory csv: unexpected header row");

    std::vector<TrajectoryRecord> records;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 23)
            throw CsvFormatError("trajectory csv: wrong column count on line " +
                                 std::to_string(line_no));

        const auto num = [&](std::size_t idx) -> double {
            char* end = nullptr;
            const double v = std::strtod(cells[idx].c_str(), &end);
            if (end == cells[idx].c_str() || *end != '\0')
                throw CsvFormatError("trajectory csv: bad numeric field on line " +
                                     std::to_string(line_no));
            return v;
        };

        TrajectoryRecord r;
        r.step = static_cast<std::int64_t>(num(0));
        r.t = num(1);
        r.r1 = {num(2), num(3)};
        r.r2 = {num(4), num(5)};
        r.rc = {num(6), num(7)};
        r.y1 = num(8);
        r.y2 = num(9);
        r.yc = num(10);
        r.zc_true = num(11);
        r.separation = num(12);
        r.gamma = num(13);
        r.omega_measured = num(14);
        r.omega_approx = num(15);
        r.sigma_speed = num(16);
        r.alpha = num(17);
        r.beta = num(18);
        r.V = num(19);
        r.lemma = num(20) != 0.0 ? LemmaStatus::Satisfied : LemmaStatus::Violated;
        r.theorem_ok = num(21) != 0.0;
        r.gate_open = num(22) != 0.0;
        records.push_back(r);
    }
    return records;
}

}  // namespace curvetrak
